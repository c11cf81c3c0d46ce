// exceptional_points.hpp — locates all finite exceptional points of the
// pencil H0 + lambda P_D. The discriminant of the characteristic polynomial
// is a degree-2n(d-n) polynomial in lambda; it is interpolated from samples
// on a circle, its roots extracted from a companion matrix and refined by
// Newton iteration on the squared gap of the locally closest eigenvalue
// pair.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "nhsr/ensemble.hpp"
#include "nhsr/open_system.hpp"
#include "nhsr/quasispin.hpp"

namespace nhsr {

struct EpPoint {
    Complex lambda;
    double residual_gap = 0;   // smallest eigenvalue separation of H(lambda)
    int newton_iters = 0;
    bool converged = false;
};

struct EpSet {
    int d = 0;
    int n = 0;
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
    std::vector<EpPoint> points;

    int expected_count() const { return 2 * n * (d - n); }
    int converged_count() const;
    // every point has a complex-conjugate partner within rel_tol * |lambda|
    bool conjugate_paired(double rel_tol = 1e-6) const;
};

struct EpConfig {
    double scan_radius = 0;      // 0 = auto: 2 * S d^2 / sqrt(n(d-n))
    int max_newton_iters = 80;
    double gap_rel_tol = 1e-8;   // residual_gap <= gap_rel_tol * spectral scale
    double dedup_rel_tol = 1e-6;
    int max_dim = 32;
    int rescue_rounds = 6;       // inward companion scans (radius * 0.6^k)
    int random_starts = 64;      // last-resort seeded starts if still short
};

struct EpCountError : std::runtime_error {
    EpCountError(const std::string& what, EpSet partial_, int deficit_)
        : std::runtime_error(what), partial(std::move(partial_)), deficit(deficit_) {}
    EpSet partial;
    int deficit = 0;
};

// log D(lambda_j) for each sample, D = prod_{k<k'} (E_k - E_k')^2; returned
// as log-magnitude + i*phase (phase wrapped) to avoid overflow.
std::vector<Complex> discriminant_profile(const InitialSpectrum& h0,
                                          const DecayingSubspace& sub,
                                          std::span<const Complex> samples);

EpSet find_eps(const InitialSpectrum& h0, const DecayingSubspace& sub,
               const EpConfig& config = {});

struct DensitySpec {
    double re_min = 0, re_max = 0;
    double im_min = 0, im_max = 0;
    int re_bins = 0, im_bins = 0;

    // symmetric box covering 1.5x the expected EP domain
    static DensitySpec standard(const InitialSpectrum& h0, int n, int bins = 128);
};

struct EpDensityGrid {
    DensitySpec spec;
    Eigen::MatrixXd counts;      // im_bins rows x re_bins cols
    Eigen::VectorXd re_marginal; // projection onto Re(lambda)
    Eigen::VectorXd im_marginal; // projection onto Im(lambda)
    long long total_points = 0;  // converged EPs accumulated (incl. out of range)
    long long out_of_range = 0;
    int realizations = 0;
    int skipped_realizations = 0;
};

EpDensityGrid ep_density(Model model, int d, int n, int n_realizations,
                         const DensitySpec& spec, std::uint64_t seed,
                         int workers = 1);

}  // namespace nhsr
