#include "nhsr/quasispin.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nhsr {

const char* to_string(Model model) {
    switch (model) {
        case Model::HO: return "ho";
        case Model::PT1: return "pt1";
        case Model::PT2: return "pt2";
    }
    return "?";
}

Model model_from_string(const std::string& name) {
    if (name == "ho" || name == "HO") return Model::HO;
    if (name == "pt1" || name == "PT1") return Model::PT1;
    if (name == "pt2" || name == "PT2") return Model::PT2;
    throw std::invalid_argument("unknown model '" + name + "' (expected ho, pt1 or pt2)");
}

QuasispinOps build_quasispin(double j, int max_dim) {
    const double twoj = 2.0 * j;
    if (j < 0.5 || std::abs(twoj - std::round(twoj)) > 1e-9) {
        throw std::invalid_argument("quasispin j must be a half-integer >= 1/2, got " +
                                    std::to_string(j));
    }
    const int d = static_cast<int>(std::lround(twoj)) + 1;
    if (d > max_dim) {
        throw std::invalid_argument("dimension " + std::to_string(d) +
                                    " exceeds the configured maximum " +
                                    std::to_string(max_dim));
    }

    QuasispinOps ops;
    ops.j = j;
    ops.d = d;
    ops.j3 = Eigen::MatrixXd::Zero(d, d);
    ops.j1 = Eigen::MatrixXd::Zero(d, d);
    for (int a = 0; a < d; ++a) {
        const double m = -j + a;
        ops.j3(a, a) = m;
        if (a + 1 < d) {
            // <m+1| J1 |m> = (1/2) sqrt(j(j+1) - m(m+1))
            const double v = 0.5 * std::sqrt(j * (j + 1.0) - m * (m + 1.0));
            ops.j1(a, a + 1) = v;
            ops.j1(a + 1, a) = v;
        }
    }
    return ops;
}

InitialSpectrum build_initial(Model model, double j) {
    const QuasispinOps ops = build_quasispin(j);
    const int d = ops.d;

    InitialSpectrum s;
    s.model = model;
    s.j = j;
    s.d = d;

    if (model == Model::HO) {
        // J3 is already diagonal: the affine map is closed-form.
        s.eigenbasis_to_j3 = Eigen::MatrixXd::Identity(d, d);
        s.scale = (d > 1) ? static_cast<double>(d) / (2.0 * j) : 1.0;
        s.shift = s.scale * j;
        s.energies.resize(d);
        for (int k = 0; k < d; ++k) s.energies[k] = s.scale * (-j + k) + s.shift;
    } else {
        const double c = (model == Model::PT1) ? 3.0 / j : 1.0 / (2.0 * j);
        const Eigen::MatrixXd raw = ops.j3 - c * (ops.j1 * ops.j1);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(raw);
        if (solver.info() != Eigen::Success) {
            throw std::runtime_error(std::string("initial-spectrum diagonalization failed for model ") +
                                     to_string(model) + ", j = " + std::to_string(j));
        }
        const Eigen::VectorXd ev = solver.eigenvalues();  // ascending
        const double lo = ev[0];
        const double hi = ev[d - 1];
        s.scale = static_cast<double>(d) / (hi - lo);
        s.shift = -s.scale * lo;
        s.energies = s.scale * ev.array() + s.shift;
        s.eigenbasis_to_j3 = solver.eigenvectors();
    }

    // enforce the bounds exactly
    s.energies[0] = 0.0;
    s.energies[d - 1] = static_cast<double>(d);
    return s;
}

Cumulants spectrum_cumulants(const InitialSpectrum& s) {
    Cumulants c;
    const auto& e = s.energies;
    c.mean = e.mean();
    const Eigen::ArrayXd dev = e.array() - c.mean;
    c.variance = dev.square().mean();
    c.skewness = dev.cube().mean();
    return c;
}

}  // namespace nhsr
