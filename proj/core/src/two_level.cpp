#include "nhsr/two_level.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nhsr {

Eigen::Matrix2cd two_level_hamiltonian(const TwoLevelModel& m, Complex lambda) {
    const double c = std::cos(m.theta);
    const double s = std::sin(m.theta);
    Eigen::Matrix2cd h;
    h << Complex(m.e1) + lambda * (c * c), lambda * (c * s),
         lambda * (s * c), Complex(m.e2) + lambda * (s * s);
    return h;
}

std::pair<Complex, Complex> analytic_eigenvalues(const TwoLevelModel& m,
                                                 Complex lambda) {
    const Complex mean = (m.e1 + m.e2 + lambda) / 2.0;
    const double half_gap = (m.e1 - m.e2) / 2.0;
    const Complex root = std::sqrt(half_gap * half_gap +
                                   (lambda / 2.0) * (lambda / 2.0) +
                                   lambda * half_gap * std::cos(2.0 * m.theta));
    return {mean + root, mean - root};
}

std::pair<Complex, Complex> analytic_eps(const TwoLevelModel& m) {
    const double gap = m.e1 - m.e2;
    const Complex plus = -gap * std::exp(Complex(0, 2.0 * m.theta));
    return {plus, std::conj(plus)};
}

JordanReport jordan_check(const TwoLevelModel& m) {
    JordanReport report;
    const auto [ep_plus, ep_minus] = analytic_eps(m);
    for (const Complex& ep : {ep_plus, ep_minus}) {
        const Eigen::Matrix2cd h = two_level_hamiltonian(m, ep);
        const ComplexSpectrum sp = eig_matrix(h, true, ep);
        report.max_eigenvalue_gap =
            std::max(report.max_eigenvalue_gap,
                     std::abs(sp.eigenvalues[0] - sp.eigenvalues[1]));
        for (int k = 0; k < 2; ++k) {
            Eigen::Vector2cd v = sp.right_vectors.col(k);
            v /= v.norm();
            const Complex overlap = v.transpose() * v;
            report.min_self_overlap =
                std::min(report.min_self_overlap, std::abs(overlap));
        }
        // rank of H - E I should be exactly 1 at the EP
        const Complex mean = (sp.eigenvalues[0] + sp.eigenvalues[1]) / 2.0;
        const Eigen::Matrix2cd shifted = h - mean * Eigen::Matrix2cd::Identity();
        const Eigen::JacobiSVD<Eigen::Matrix2cd> svd(shifted);
        report.max_rank_ratio =
            std::max(report.max_rank_ratio,
                     svd.singularValues()[1] / svd.singularValues()[0]);
    }
    return report;
}

InitialSpectrum two_level_spectrum(const TwoLevelModel& m) {
    if (m.e1 == m.e2)
        throw std::invalid_argument("two-level model requires e1 != e2");
    InitialSpectrum s;
    s.model = Model::HO;
    s.j = 0.5;
    s.d = 2;
    s.energies.resize(2);
    s.energies << std::min(m.e1, m.e2), std::max(m.e1, m.e2);
    s.eigenbasis_to_j3 = Eigen::MatrixXd::Identity(2, 2);
    s.scale = 1.0;
    s.shift = 0.0;
    return s;
}

DecayingSubspace two_level_subspace(const TwoLevelModel& m) {
    const double theta =
        (m.e1 <= m.e2) ? m.theta : (std::numbers::pi / 2.0 - m.theta);
    DecayingSubspace sub;
    sub.d = 2;
    sub.n = 1;
    sub.phi.resize(2, 1);
    sub.phi << std::cos(theta), std::sin(theta);
    return sub;
}

}  // namespace nhsr
