// open_system.hpp — the open-system Hamiltonian H(lambda) = H0 + lambda P_D
// (complex symmetric) and its full eigendecomposition with bi-orthonormal
// left/right eigenvectors. Left eigenvectors are the transposes of the right
// ones, so only right vectors are stored.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "nhsr/ensemble.hpp"
#include "nhsr/quasispin.hpp"

namespace nhsr {

using Complex = std::complex<double>;

struct OpenHamiltonian {
    int d = 0;
    int n = 0;
    Complex lambda;               // eps - i*gamma, gamma >= 0
    Eigen::MatrixXcd matrix;      // diag(E_k) + lambda * phi phi^T, H0 eigenbasis
    const InitialSpectrum* h0 = nullptr;      // non-owning
    const DecayingSubspace* subspace = nullptr;
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
};

struct SolverError : std::runtime_error {
    SolverError(const std::string& what, Complex lambda_, std::uint64_t seed_,
                std::uint64_t index_)
        : std::runtime_error(what), lambda(lambda_), seed(seed_), index(index_) {}
    Complex lambda;
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
};

struct ComplexSpectrum {
    Eigen::VectorXcd eigenvalues;   // sorted by Re ascending, then by width ascending
    Eigen::MatrixXcd right_vectors; // columns; empty when computed without vectors.
                                    // Scaled so v^T v = 1 unless ep_proximity.
    std::vector<bool> ep_proximity; // |v^T v| < 1e-6 after unit normalization
    double residual = 0;            // max_k ||H v_k - E_k v_k|| / ||H||_F

    int size() const { return static_cast<int>(eigenvalues.size()); }
    double energy(int k) const { return eigenvalues[k].real(); }
    double width(int k) const { return -eigenvalues[k].imag(); }
    Eigen::VectorXd widths() const { return -eigenvalues.imag(); }
    bool any_ep_proximity() const;
};

OpenHamiltonian assemble(const InitialSpectrum& h0, const DecayingSubspace& sub,
                         double eps, double gamma);

// Raw matrix for an arbitrary complex coupling (used by the EP search, which
// walks the full complex lambda plane).
Eigen::MatrixXcd assemble_matrix(const InitialSpectrum& h0,
                                 const DecayingSubspace& sub, Complex lambda);

ComplexSpectrum eig(const OpenHamiltonian& h, bool with_vectors = true);

// Decomposition of an arbitrary complex symmetric matrix with the same
// conventions; context values are only used for error reporting.
ComplexSpectrum eig_matrix(const Eigen::MatrixXcd& m, bool with_vectors = true,
                           Complex lambda = {}, std::uint64_t seed = 0,
                           std::uint64_t index = 0);

inline constexpr double kEpProximityOverlap = 1e-6;
inline constexpr double kResidualThreshold = 1e-8;
inline constexpr double kWidthClamp = 1e-12;  // reporting clamp for |Gamma|

}  // namespace nhsr
