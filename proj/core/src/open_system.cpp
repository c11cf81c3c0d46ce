#include "nhsr/open_system.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "nhsr/rng.hpp"

namespace nhsr {

bool ComplexSpectrum::any_ep_proximity() const {
    return std::any_of(ep_proximity.begin(), ep_proximity.end(),
                       [](bool f) { return f; });
}

OpenHamiltonian assemble(const InitialSpectrum& h0, const DecayingSubspace& sub,
                         double eps, double gamma) {
    if (h0.d != sub.d) {
        throw std::invalid_argument("dimension mismatch: spectrum d = " + std::to_string(h0.d) +
                                    ", subspace d = " + std::to_string(sub.d));
    }
    if (gamma < 0) {
        throw std::invalid_argument("gamma must be non-negative, got " + std::to_string(gamma));
    }
    OpenHamiltonian h;
    h.d = h0.d;
    h.n = sub.n;
    h.lambda = Complex(eps, -gamma);
    h.h0 = &h0;
    h.subspace = &sub;
    h.seed = sub.seed;
    h.index = sub.index;
    h.matrix = assemble_matrix(h0, sub, h.lambda);
    return h;
}

Eigen::MatrixXcd assemble_matrix(const InitialSpectrum& h0,
                                 const DecayingSubspace& sub, Complex lambda) {
    Eigen::MatrixXcd m = (sub.phi * sub.phi.transpose()).cast<Complex>() * lambda;
    m.diagonal() += h0.energies.cast<Complex>();
    return m;
}

namespace {

ComplexSpectrum decompose(const Eigen::MatrixXcd& m, bool with_vectors) {
    ComplexSpectrum s;
    const int d = static_cast<int>(m.rows());

    Eigen::VectorXcd vals;
    Eigen::MatrixXcd vecs;
    if (with_vectors) {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, true);
        if (solver.info() != Eigen::Success) return {};  // caller retries
        vals = solver.eigenvalues();
        vecs = solver.eigenvectors();
    } else {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
        if (solver.info() != Eigen::Success) return {};
        vals = solver.eigenvalues();
    }

    // order: Re ascending, ties by width (= -Im) ascending
    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (vals[a].real() != vals[b].real()) return vals[a].real() < vals[b].real();
        return -vals[a].imag() < -vals[b].imag();
    });

    s.eigenvalues.resize(d);
    for (int k = 0; k < d; ++k) s.eigenvalues[k] = vals[order[k]];

    if (with_vectors) {
        s.right_vectors.resize(d, d);
        s.ep_proximity.assign(d, false);
        const double h_norm = m.norm();
        double max_res = 0;
        for (int k = 0; k < d; ++k) {
            Eigen::VectorXcd v = vecs.col(order[k]);
            v /= v.norm();
            max_res = std::max(max_res,
                               (m * v - s.eigenvalues[k] * v).norm() / h_norm);
            // bi-orthonormal rescaling: left vector is the transpose of the
            // right one, so the target is v^T v = 1. Near an EP the overlap
            // vanishes (self-orthogonality) and the vector is left unit-norm.
            const Complex overlap = v.transpose() * v;
            if (std::abs(overlap) < kEpProximityOverlap) {
                s.ep_proximity[k] = true;
            } else {
                v /= std::sqrt(overlap);
            }
            s.right_vectors.col(k) = v;
        }
        s.residual = max_res;
    }
    return s;
}

}  // namespace

ComplexSpectrum eig_matrix(const Eigen::MatrixXcd& m, bool with_vectors,
                           Complex lambda, std::uint64_t seed,
                           std::uint64_t index) {
    ComplexSpectrum s = decompose(m, with_vectors);
    bool ok = s.eigenvalues.size() == m.rows() &&
              (!with_vectors || s.residual <= kResidualThreshold);
    if (!ok) {
        // one restart under a random orthogonal-sign similarity transform,
        // which reshuffles the QR shift sequence without changing the spectrum
        RngStream rng(seed ^ 0xa0761d6478bd642fULL, index);
        Eigen::VectorXcd signs(m.rows());
        for (int i = 0; i < m.rows(); ++i)
            signs[i] = (rng.next_u64() & 1) ? 1.0 : -1.0;
        const Eigen::MatrixXcd t =
            signs.asDiagonal() * m * signs.asDiagonal();
        s = decompose(t, with_vectors);
        ok = s.eigenvalues.size() == m.rows() &&
             (!with_vectors || s.residual <= kResidualThreshold);
        if (ok && with_vectors) {
            for (int k = 0; k < m.rows(); ++k)
                s.right_vectors.col(k) = signs.asDiagonal() * s.right_vectors.col(k);
        }
    }
    if (!ok) {
        throw SolverError("eigendecomposition failed (residual above threshold after restart)",
                          lambda, seed, index);
    }
    return s;
}

ComplexSpectrum eig(const OpenHamiltonian& h, bool with_vectors) {
    if (!h.matrix.allFinite()) {
        throw SolverError("non-finite Hamiltonian entries", h.lambda, h.seed, h.index);
    }
    return eig_matrix(h.matrix, with_vectors, h.lambda, h.seed, h.index);
}

}  // namespace nhsr
