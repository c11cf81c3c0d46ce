#include "nhsr/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "nhsr/rng.hpp"

namespace nhsr {

GoeSample sample_goe(int d, std::uint64_t seed, std::uint64_t index) {
    if (d < 2) throw std::invalid_argument("GOE dimension must be >= 2, got " + std::to_string(d));
    RngStream rng(seed, index);
    GoeSample g;
    g.d = d;
    g.seed = seed;
    g.index = index;
    g.matrix.resize(d, d);
    const double diag_sigma = std::sqrt(2.0);
    for (int a = 0; a < d; ++a) {
        g.matrix(a, a) = diag_sigma * rng.normal();
        for (int b = a + 1; b < d; ++b) {
            const double v = rng.normal();
            g.matrix(a, b) = v;
            g.matrix(b, a) = v;
        }
    }
    return g;
}

DecayingSubspace sample_subspace(int d, int n, std::uint64_t seed,
                                 std::uint64_t index) {
    if (n < 1 || n > d - 1) {
        throw std::invalid_argument("decaying-subspace dimension n must satisfy 1 <= n <= d-1, got n = " +
                                    std::to_string(n) + ", d = " + std::to_string(d));
    }
    const GoeSample g = sample_goe(d, seed, index);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g.matrix);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("GOE diagonalization failed (seed " + std::to_string(seed) +
                                 ", index " + std::to_string(index) + ")");
    }

    // column selection: partial Fisher-Yates, indices kept in
    // ascending-eigenvalue order; a dedicated sub-stream keeps the selection
    // independent of the number of normals the matrix fill consumed
    RngStream pick(seed ^ 0x94d049bb133111ebULL, index);
    std::vector<int> idx(d);
    for (int i = 0; i < d; ++i) idx[i] = i;
    for (int i = 0; i < n; ++i) {
        const int r = i + static_cast<int>(pick.uniform_below(static_cast<std::uint64_t>(d - i)));
        std::swap(idx[i], idx[r]);
    }
    idx.resize(n);
    std::sort(idx.begin(), idx.end());

    DecayingSubspace sub;
    sub.d = d;
    sub.n = n;
    sub.seed = seed;
    sub.index = index;
    sub.phi.resize(d, n);
    for (int l = 0; l < n; ++l) {
        Eigen::VectorXd col = solver.eigenvectors().col(idx[l]);
        // sign convention: largest-magnitude component positive
        int imax = 0;
        col.cwiseAbs().maxCoeff(&imax);
        if (col[imax] < 0) col = -col;
        sub.phi.col(l) = col;
    }
    return sub;
}

}  // namespace nhsr
