// ensemble.hpp — isotropic random decaying subspaces from GOE eigenframes.
// Every sample is a pure function of (d, n, seed, realization index).

#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace nhsr {

struct GoeSample {
    int d = 0;
    Eigen::MatrixXd matrix;  // real symmetric; diag sigma^2 = 2, offdiag sigma^2 = 1
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
};

struct DecayingSubspace {
    int d = 0;
    int n = 0;
    Eigen::MatrixXd phi;  // d x n, orthonormal columns in the H0 eigenbasis
    std::uint64_t seed = 0;
    std::uint64_t index = 0;

    Eigen::MatrixXd projector() const { return phi * phi.transpose(); }
};

GoeSample sample_goe(int d, std::uint64_t seed, std::uint64_t index);

// Diagonalizes a GOE sample and picks n of its eigenvector columns uniformly
// at random without replacement (same seeded stream). Requires 1 <= n <= d-1.
DecayingSubspace sample_subspace(int d, int n, std::uint64_t seed,
                                 std::uint64_t index);

}  // namespace nhsr
