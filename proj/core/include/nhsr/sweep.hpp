// sweep.hpp — eigenvalue trajectories along fixed-eps, increasing-gamma
// paths with continuity matching (optimal assignment, locally refined near
// trajectory collisions) and log-log width slopes.

#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "nhsr/open_system.hpp"

namespace nhsr {

struct GammaGrid {
    enum class Spacing { Log, Linear };

    double gamma_min = 1e-2;
    double gamma_max = 1e2;
    int points = 200;
    Spacing spacing = Spacing::Log;

    std::vector<double> values() const;

    // 200 log points on [1e-2, 1e2 * d/16]; the upper end scales with the
    // EP-domain size so the asymptotic regime is always reached.
    static GammaGrid standard(int d);
};

struct RefinementEvent {
    int step = 0;          // index of the accepting grid step
    std::string reason;
};

struct SweepResult {
    double eps = 0;
    GammaGrid grid;
    Eigen::MatrixXcd trajectories;  // d x points, row = one level's path
    Eigen::MatrixXd slopes;         // d x points, NaN where the width is clamped
    std::vector<double> matching_cost;          // per grid step
    std::vector<RefinementEvent> refinement_events;
};

// Optimal assignment minimizing sum |prev_i - next_perm[i]|; returns perm
// with perm[i] = index into next. Deterministic tie-breaking.
std::vector<int> match_levels(const Eigen::VectorXcd& prev,
                              const Eigen::VectorXcd& next);

SweepResult run_sweep(const InitialSpectrum& h0, const DecayingSubspace& sub,
                      double eps, const GammaGrid& grid);

// Centered log-log differences of width against gamma (one-sided at the
// ends). Widths below kSlopeClamp * gamma yield NaN.
Eigen::MatrixXd log_slopes(const Eigen::MatrixXcd& trajectories,
                           const std::vector<double>& gammas);

inline constexpr double kSlopeClamp = 1e-14;

}  // namespace nhsr
