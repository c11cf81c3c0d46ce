#include "nhsr/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace nhsr {

std::vector<double> GammaGrid::values() const {
    if (points < 1) throw std::invalid_argument("gamma grid needs at least one point");
    if (gamma_min >= gamma_max && points > 1)
        throw std::invalid_argument("gamma grid must be strictly increasing");
    if (spacing == Spacing::Log && gamma_min <= 0)
        throw std::invalid_argument("log-spaced gamma grid requires gamma_min > 0");
    std::vector<double> v(points);
    if (points == 1) {
        v[0] = gamma_min;
        return v;
    }
    for (int i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / (points - 1);
        v[i] = (spacing == Spacing::Log)
                   ? gamma_min * std::pow(gamma_max / gamma_min, t)
                   : gamma_min + t * (gamma_max - gamma_min);
    }
    return v;
}

GammaGrid GammaGrid::standard(int d) {
    GammaGrid g;
    g.gamma_min = 1e-2;
    g.gamma_max = 1e2 * (static_cast<double>(d) / 16.0);
    g.points = 200;
    g.spacing = Spacing::Log;
    return g;
}

namespace {

// Jonker-Volgenant shortest augmenting path; O(n^3). cost(i, j) must be
// finite and non-negative. Returns row -> column assignment.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0), v(n + 1, 0);
    std::vector<int> p(n + 1, n), way(n + 1, n);  // p[j] = row assigned to column j
    for (int i = 0; i < n; ++i) {
        p[n] = i;
        int j0 = n;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, false);
        do {
            used[j0] = true;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = n;
            for (int j = 0; j < n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0, j) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != n);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != n);
    }
    std::vector<int> perm(n, -1);
    for (int j = 0; j < n; ++j)
        if (p[j] != n) perm[p[j]] = j;
    return perm;
}

double min_pairwise_gap(const Eigen::VectorXcd& vals) {
    const int d = static_cast<int>(vals.size());
    double g = std::numeric_limits<double>::infinity();
    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b)
            g = std::min(g, std::abs(vals[a] - vals[b]));
    return g;
}

std::vector<int> compose(const std::vector<int>& first,
                         const std::vector<int>& second) {
    std::vector<int> out(first.size());
    for (std::size_t i = 0; i < first.size(); ++i) out[i] = second[first[i]];
    return out;
}

struct StepContext {
    const InitialSpectrum* h0;
    const DecayingSubspace* sub;
    double eps;
    int step;
    std::vector<RefinementEvent>* events;
};

// Match prev -> next, bisecting the gamma interval (log-midpoint) when the
// assignment is ambiguous: near an EP two eigenvalues approach within the
// per-step motion and the permutation is not trustworthy.
std::vector<int> match_step(const StepContext& ctx, double gamma_prev,
                            const Eigen::VectorXcd& prev, double gamma_next,
                            const Eigen::VectorXcd& next, int depth) {
    std::vector<int> perm = match_levels(prev, next);
    double motion = 0;
    for (int i = 0; i < prev.size(); ++i)
        motion = std::max(motion, std::abs(prev[i] - next[perm[i]]));
    const double gap = min_pairwise_gap(next);
    if (gap >= 10.0 * motion) return perm;

    if (depth >= 8) {
        ctx.events->push_back({ctx.step, "ambiguous match accepted at depth 8 (gap " +
                                             std::to_string(gap) + ", motion " +
                                             std::to_string(motion) + ")"});
        return perm;
    }
    const double gamma_mid = std::sqrt(gamma_prev * gamma_next);
    if (!(gamma_mid > gamma_prev && gamma_mid < gamma_next)) return perm;
    if (depth == 0)
        ctx.events->push_back({ctx.step, "local gamma-step refinement"});
    const ComplexSpectrum mid =
        eig(assemble(*ctx.h0, *ctx.sub, ctx.eps, gamma_mid), false);
    const auto first =
        match_step(ctx, gamma_prev, prev, gamma_mid, mid.eigenvalues, depth + 1);
    const auto second =
        match_step(ctx, gamma_mid, mid.eigenvalues, gamma_next, next, depth + 1);
    return compose(first, second);
}

}  // namespace

std::vector<int> match_levels(const Eigen::VectorXcd& prev,
                              const Eigen::VectorXcd& next) {
    if (prev.size() != next.size())
        throw std::invalid_argument("match_levels: dimension mismatch");
    const int d = static_cast<int>(prev.size());
    Eigen::MatrixXd cost(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) cost(i, j) = std::abs(prev[i] - next[j]);
    return solve_assignment(cost);
}

SweepResult run_sweep(const InitialSpectrum& h0, const DecayingSubspace& sub,
                      double eps, const GammaGrid& grid) {
    const std::vector<double> gammas = grid.values();
    const int points = static_cast<int>(gammas.size());
    const int d = h0.d;

    SweepResult result;
    result.eps = eps;
    result.grid = grid;
    result.trajectories.resize(d, points);
    result.matching_cost.assign(points, 0.0);

    Eigen::VectorXcd current =
        eig(assemble(h0, sub, eps, gammas[0]), false).eigenvalues;
    result.trajectories.col(0) = current;

    // perm_to_row[k] = trajectory row followed by storage slot k
    std::vector<int> perm_to_row(d);
    for (int k = 0; k < d; ++k) perm_to_row[k] = k;

    for (int step = 1; step < points; ++step) {
        const Eigen::VectorXcd next =
            eig(assemble(h0, sub, eps, gammas[step]), false).eigenvalues;
        StepContext ctx{&h0, &sub, eps, step, &result.refinement_events};
        const std::vector<int> perm =
            match_step(ctx, gammas[step - 1], current, gammas[step], next, 0);

        double cost = 0;
        std::vector<int> next_rows(d);
        for (int k = 0; k < d; ++k) {
            cost += std::abs(current[k] - next[perm[k]]);
            next_rows[perm[k]] = perm_to_row[k];
        }
        result.matching_cost[step] = cost;
        perm_to_row = next_rows;
        current = next;
        for (int k = 0; k < d; ++k)
            result.trajectories(perm_to_row[k], step) = next[k];
    }

    result.slopes = log_slopes(result.trajectories, gammas);
    return result;
}

Eigen::MatrixXd log_slopes(const Eigen::MatrixXcd& trajectories,
                           const std::vector<double>& gammas) {
    const int d = static_cast<int>(trajectories.rows());
    const int points = static_cast<int>(trajectories.cols());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    Eigen::MatrixXd slopes = Eigen::MatrixXd::Constant(d, points, nan);
    if (points < 2) return slopes;

    auto log_width = [&](int row, int col) -> double {
        const double w = -trajectories(row, col).imag();
        if (!(w > kSlopeClamp * gammas[col])) return nan;
        return std::log(w);
    };
    for (int row = 0; row < d; ++row) {
        for (int col = 0; col < points; ++col) {
            const int lo = (col == 0) ? 0 : col - 1;
            const int hi = (col == points - 1) ? points - 1 : col + 1;
            const double a = log_width(row, lo);
            const double b = log_width(row, hi);
            if (std::isnan(a) || std::isnan(b)) continue;
            slopes(row, col) = (b - a) / (std::log(gammas[hi]) - std::log(gammas[lo]));
        }
    }
    return slopes;
}

}  // namespace nhsr
