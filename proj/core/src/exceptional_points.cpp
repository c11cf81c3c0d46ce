#include "nhsr/exceptional_points.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "nhsr/rng.hpp"

namespace nhsr {

int EpSet::converged_count() const {
    int c = 0;
    for (const auto& p : points) c += p.converged ? 1 : 0;
    return c;
}

bool EpSet::conjugate_paired(double rel_tol) const {
    for (const auto& p : points) {
        if (!p.converged) continue;
        const Complex conj = std::conj(p.lambda);
        const double tol = rel_tol * std::max(1.0, std::abs(p.lambda));
        bool found = false;
        for (const auto& q : points) {
            if (q.converged && std::abs(q.lambda - conj) <= tol) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

std::vector<Complex> discriminant_profile(const InitialSpectrum& h0,
                                          const DecayingSubspace& sub,
                                          std::span<const Complex> samples) {
    std::vector<Complex> out;
    out.reserve(samples.size());
    for (const Complex& lambda : samples) {
        const ComplexSpectrum s = eig_matrix(assemble_matrix(h0, sub, lambda),
                                             false, lambda, sub.seed, sub.index);
        double log_mag = 0;
        double phase = 0;
        const int d = s.size();
        for (int a = 0; a < d; ++a) {
            for (int b = a + 1; b < d; ++b) {
                const Complex diff = s.eigenvalues[a] - s.eigenvalues[b];
                log_mag += 2.0 * std::log(std::abs(diff));
                phase += 2.0 * std::arg(diff);
            }
        }
        phase = std::remainder(phase, 2.0 * std::numbers::pi);
        out.emplace_back(log_mag, phase);
    }
    return out;
}

namespace {

double spectral_scale(const InitialSpectrum& h0, Complex lambda) {
    const double span = h0.energies[h0.d - 1] - h0.energies[0];
    return std::max(1.0, span) + std::abs(lambda);
}

// Interpolate the discriminant as a degree-N polynomial in mu = lambda/R
// from N+1 samples on the circle |lambda| = R (inverse DFT), then take
// companion-matrix roots. Samples are rescaled by their geometric-mean
// magnitude first; the product of O(d^2) squared gaps spans hundreds of
// orders of magnitude otherwise. Roots already pinned down are deflated out
// of the sampled values (cheap in log form), so later scans interpolate the
// lower-degree polynomial whose roots are exactly the missing ones — without
// deflation the found roots dominate the circle values and bury the rest.
std::vector<Complex> companion_candidates(const InitialSpectrum& h0,
                                          const DecayingSubspace& sub,
                                          int degree, double radius,
                                          const std::vector<EpPoint>& found) {
    if (degree < 1) return {};
    const int m = degree + 1;
    std::vector<Complex> nodes(m);
    for (int k = 0; k < m; ++k) {
        const double a = 2.0 * std::numbers::pi * k / m;
        nodes[k] = radius * Complex(std::cos(a), std::sin(a));
    }
    std::vector<Complex> log_d = discriminant_profile(h0, sub, nodes);
    for (int k = 0; k < m; ++k) {
        double mag = log_d[k].real();
        double phase = log_d[k].imag();
        for (const EpPoint& p : found) {
            const Complex diff = nodes[k] - p.lambda;
            mag -= std::log(std::abs(diff));
            phase -= std::arg(diff);
        }
        log_d[k] = Complex(mag, std::remainder(phase, 2.0 * std::numbers::pi));
    }

    double mean_log = 0;
    for (const Complex& v : log_d) mean_log += v.real();
    mean_log /= m;

    std::vector<Complex> values(m);
    for (int k = 0; k < m; ++k)
        values[k] = std::exp(Complex(log_d[k].real() - mean_log, log_d[k].imag()));

    // c_j = (1/m) sum_k values[k] exp(-2 pi i j k / m)
    Eigen::VectorXcd coeff(m);
    for (int j = 0; j < m; ++j) {
        Complex acc = 0;
        for (int k = 0; k < m; ++k) {
            const double a = -2.0 * std::numbers::pi * j * k / m;
            acc += values[k] * Complex(std::cos(a), std::sin(a));
        }
        coeff[j] = acc / static_cast<double>(m);
    }

    // effective degree: trailing coefficients can underflow numerically
    const double max_coeff = coeff.cwiseAbs().maxCoeff();
    int deg = degree;
    while (deg > 0 && std::abs(coeff[deg]) < 1e-13 * max_coeff) --deg;
    if (deg == 0) return {};

    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -coeff[i] / coeff[deg];

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp, false);
    std::vector<Complex> roots;
    if (solver.info() != Eigen::Success) return roots;
    // A high-degree interpolation only resolves roots near its own circle, so
    // distant "roots" are noise and get dropped. A low-degree (deflated)
    // polynomial is pinned down globally by the same samples; keep everything
    // finite then — the farthest EPs of a realization can sit an order of
    // magnitude outside the nominal domain radius.
    const double mu_cap = (degree <= 16) ? 1e6 : 3.0;
    for (int i = 0; i < deg; ++i) {
        const Complex mu = solver.eigenvalues()[i];
        if (std::abs(mu) <= mu_cap) roots.push_back(radius * mu);
    }
    return roots;
}

struct RefineResult {
    Complex lambda;
    double gap = std::numeric_limits<double>::infinity();
    int iters = 0;
    bool converged = false;
};

// Newton iteration on g(lambda) = (E_a - E_b)^2 for the locally closest
// eigenvalue pair; g has a simple zero at the EP although the eigenvalues
// themselves branch as a square root. The Hellmann-Feynman derivative gives
// the exact step g/g' = (E_a - E_b) / (2 (v_a - v_b)).
RefineResult refine_candidate(const InitialSpectrum& h0,
                              const DecayingSubspace& sub, Complex start,
                              const EpConfig& cfg, double step_cap) {
    RefineResult res;
    res.lambda = start;
    for (int iter = 0; iter < cfg.max_newton_iters; ++iter) {
        res.iters = iter + 1;
        ComplexSpectrum sp;
        try {
            sp = eig_matrix(assemble_matrix(h0, sub, res.lambda), true,
                            res.lambda, sub.seed, sub.index);
        } catch (const SolverError&) {
            return res;
        }
        const int d = sp.size();
        int best_a = 0, best_b = 1;
        double best_gap = std::numeric_limits<double>::infinity();
        for (int a = 0; a < d; ++a) {
            for (int b = a + 1; b < d; ++b) {
                const double g = std::abs(sp.eigenvalues[a] - sp.eigenvalues[b]);
                if (g < best_gap) {
                    best_gap = g;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        res.gap = best_gap;
        const double scale = spectral_scale(h0, res.lambda);
        if (best_gap <= cfg.gap_rel_tol * scale) {
            res.converged = true;
            return res;
        }

        auto derivative = [&](int k) -> Complex {
            const Eigen::VectorXcd w = sp.right_vectors.col(k);
            const Complex t = (sub.phi.transpose().cast<Complex>() * w)
                                  .unaryExpr([](Complex v) { return v * v; })
                                  .sum();
            const Complex norm = (w.array() * w.array()).sum();
            return t / norm;
        };
        const Complex diff = sp.eigenvalues[best_a] - sp.eigenvalues[best_b];
        const Complex dv = derivative(best_a) - derivative(best_b);
        const Complex step = diff / (2.0 * dv);
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag()) ||
            std::abs(step) > step_cap) {
            return res;
        }
        // At a defective pair the computed gap bottoms out at the
        // sqrt(machine-epsilon) branching noise of the eigensolver, which for
        // large |lambda| sits above gap_rel_tol * scale. A vanishing Newton
        // update means lambda itself is converged to machine precision, so
        // accept once the step stalls while the gap is already tiny.
        if (std::abs(step) <= 1e-12 * (1.0 + std::abs(res.lambda)) &&
            best_gap <= 1e-5 * scale) {
            res.converged = true;
            return res;
        }
        res.lambda -= step;
    }
    return res;
}

// Newton on log of the deflated discriminant,
//   w(lambda) = log D(lambda) - sum_f log(lambda - lambda_f),
// whose derivative follows from the Hellmann-Feynman eigenvalue derivatives:
//   D'/D = sum_{a<b} 2 (v_a - v_b) / (E_a - E_b).
// Roots already accepted repel the iteration, so inside a tight EP cluster it
// walks to a root that is still missing instead of re-converging onto a
// neighbour. Once the minimal gap is locally resolved the endgame is handed
// to the pairwise refinement.
RefineResult refine_deflated(const InitialSpectrum& h0,
                             const DecayingSubspace& sub, Complex start,
                             const std::vector<EpPoint>& found,
                             const EpConfig& cfg, double step_cap) {
    RefineResult res;
    res.lambda = start;
    for (int iter = 0; iter < cfg.max_newton_iters; ++iter) {
        res.iters = iter + 1;
        ComplexSpectrum sp;
        try {
            sp = eig_matrix(assemble_matrix(h0, sub, res.lambda), true,
                            res.lambda, sub.seed, sub.index);
        } catch (const SolverError&) {
            return res;
        }
        const int d = sp.size();
        double min_gap = std::numeric_limits<double>::infinity();
        for (int a = 0; a < d; ++a)
            for (int b = a + 1; b < d; ++b)
                min_gap = std::min(min_gap,
                                   std::abs(sp.eigenvalues[a] - sp.eigenvalues[b]));
        res.gap = min_gap;
        const double scale = spectral_scale(h0, res.lambda);
        if (min_gap <= 0.02 * scale) {
            // close enough for the plain pair iteration to take over
            return refine_candidate(h0, sub, res.lambda, cfg, step_cap);
        }

        Eigen::VectorXcd deriv(d);
        for (int k = 0; k < d; ++k) {
            const Eigen::VectorXcd w = sp.right_vectors.col(k);
            const Complex t = (sub.phi.transpose().cast<Complex>() * w)
                                  .unaryExpr([](Complex v) { return v * v; })
                                  .sum();
            const Complex norm = (w.array() * w.array()).sum();
            if (std::abs(norm) < 1e-12) return res;
            deriv[k] = t / norm;
        }
        Complex s = 0;
        for (int a = 0; a < d; ++a)
            for (int b = a + 1; b < d; ++b)
                s += 2.0 * (deriv[a] - deriv[b]) /
                     (sp.eigenvalues[a] - sp.eigenvalues[b]);
        for (const EpPoint& p : found) {
            const Complex diff = res.lambda - p.lambda;
            if (std::abs(diff) < 1e-12) return res;
            s -= 1.0 / diff;
        }
        if (std::abs(s) < 1e-300) return res;
        const Complex step = 1.0 / s;
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag()) ||
            std::abs(step) > step_cap) {
            return res;
        }
        res.lambda -= step;
    }
    return res;
}

}  // namespace

EpSet find_eps(const InitialSpectrum& h0, const DecayingSubspace& sub,
               const EpConfig& config) {
    const int d = h0.d;
    const int n = sub.n;
    if (d != sub.d) throw std::invalid_argument("find_eps: dimension mismatch");
    if (d > config.max_dim) {
        throw std::invalid_argument("find_eps: d = " + std::to_string(d) +
                                    " exceeds the EP cap " +
                                    std::to_string(config.max_dim));
    }

    const int target = 2 * n * (d - n);
    const Cumulants cum = spectrum_cumulants(h0);
    const double bound =
        std::sqrt(cum.variance / (d * static_cast<double>(d))) * d * d /
        std::sqrt(static_cast<double>(n) * (d - n));
    const double radius = (config.scan_radius > 0) ? config.scan_radius : 2.0 * bound;

    EpSet set;
    set.d = d;
    set.n = n;
    set.seed = sub.seed;
    set.index = sub.index;

    std::vector<EpPoint> unconverged;
    auto known = [&](Complex lambda) {
        for (const auto& p : set.points) {
            if (std::abs(p.lambda - lambda) <=
                config.dedup_rel_tol * std::max(1.0, std::abs(p.lambda))) {
                return true;
            }
        }
        return false;
    };
    // The discriminant has real coefficients, so EPs come in exact conjugate
    // pairs: whenever one converges, its mirror is refined right away (it
    // converges on the first gap evaluation).
    std::function<void(const RefineResult&)> try_accept =
        [&](const RefineResult& r) {
            if (!r.converged) {
                unconverged.push_back({r.lambda, r.gap, r.iters, false});
                return;
            }
            if (known(r.lambda)) return;
            set.points.push_back({r.lambda, r.gap, r.iters, true});
            const Complex mirror = std::conj(r.lambda);
            if (static_cast<int>(set.points.size()) < target && !known(mirror)) {
                try_accept(refine_candidate(h0, sub, mirror, config, 0.5 * radius));
            }
        };

    // Pairwise seeds: reducing the pencil to the (k, l) level pair gives the
    // closed-form two-level EP estimate
    //   lambda = -(E_k - E_l) / ((P_kk - P_ll) -+ 2 i |P_kl|),
    // which lands close enough for Newton whenever that pair dominates the
    // coalescence. The EP cloud spans more than a decade in |lambda|, so
    // these local starts reach the roots a global circle scan cannot resolve.
    {
        const Eigen::MatrixXd p = sub.projector();
        for (int k = 0; k < d && static_cast<int>(set.points.size()) < target; ++k) {
            for (int l = k + 1; l < d && static_cast<int>(set.points.size()) < target;
                 ++l) {
                const double de = h0.energies[k] - h0.energies[l];
                const Complex denom(p(k, k) - p(l, l), 2.0 * std::abs(p(k, l)));
                if (std::abs(denom) < 1e-12) continue;
                const Complex seed = -de / denom;
                if (!std::isfinite(seed.real()) || !std::isfinite(seed.imag()) ||
                    std::abs(seed) > 20.0 * radius) {
                    continue;
                }
                try_accept(refine_candidate(h0, sub, seed, config, 0.5 * radius));
            }
        }
    }

    // radius ladder: the base circle first, two outward rungs for the far
    // tail of the EP cloud, then inward rungs all the way into the dense
    // small-|lambda| cluster where most of the roots sit
    std::vector<double> ladder = {radius, 1.8 * radius, 3.24 * radius};
    double in = radius;
    for (int round = 0; round < config.rescue_rounds; ++round) {
        in *= 0.6;
        ladder.push_back(in);
    }
    // repeated passes are cheap: the deflated degree shrinks with every
    // accepted root, so a rescan needs only (remaining + 1) circle samples
    for (int pass = 0; pass < 3; ++pass) {
        const int before = static_cast<int>(set.points.size());
        for (const double scan : ladder) {
            const int remaining = target - static_cast<int>(set.points.size());
            if (remaining <= 0) break;
            const std::vector<EpPoint> snapshot = set.points;
            const auto candidates =
                companion_candidates(h0, sub, remaining, scan, snapshot);
            for (const Complex& c : candidates) {
                if (static_cast<int>(set.points.size()) >= target) break;
                if (snapshot.empty()) {
                    try_accept(refine_candidate(h0, sub, c, config, 0.5 * radius));
                } else {
                    try_accept(refine_deflated(h0, sub, c, snapshot, config,
                                               0.5 * radius));
                }
            }
        }
        const int now = static_cast<int>(set.points.size());
        if (now >= target || now == before) break;
    }

    // last resort: seeded random starts, log-uniform over [0.2, 3] x radius
    if (static_cast<int>(set.points.size()) < target && config.random_starts > 0) {
        RngStream rng(sub.seed ^ 0xe7037ed1a0b428dbULL, sub.index);
        for (int k = 0; k < config.random_starts &&
                        static_cast<int>(set.points.size()) < target;
             ++k) {
            const double r =
                radius * 0.2 * std::pow(15.0, rng.uniform());
            const double a = 2.0 * std::numbers::pi * rng.uniform();
            const Complex start(r * std::cos(a), r * std::sin(a));
            try_accept(refine_candidate(h0, sub, start, config, 0.5 * radius));
        }
    }

    const int converged = static_cast<int>(set.points.size());
    if (converged != target) {
        EpSet partial = set;
        partial.points.insert(partial.points.end(), unconverged.begin(),
                              unconverged.end());
        throw EpCountError("EP count mismatch: found " + std::to_string(converged) +
                               " of " + std::to_string(target) + " (d = " +
                               std::to_string(d) + ", n = " + std::to_string(n) +
                               ", seed " + std::to_string(sub.seed) + ", index " +
                               std::to_string(sub.index) + ")",
                           std::move(partial), target - converged);
    }
    return set;
}

DensitySpec DensitySpec::standard(const InitialSpectrum& h0, int n, int bins) {
    const Cumulants cum = spectrum_cumulants(h0);
    const int d = h0.d;
    const double bound =
        std::sqrt(cum.variance / (d * static_cast<double>(d))) * d * d /
        std::sqrt(static_cast<double>(n) * (d - n));
    DensitySpec spec;
    spec.re_min = -1.5 * bound;
    spec.re_max = 1.5 * bound;
    spec.im_min = -1.5 * bound;
    spec.im_max = 1.5 * bound;
    spec.re_bins = bins;
    spec.im_bins = bins;
    return spec;
}

EpDensityGrid ep_density(Model model, int d, int n, int n_realizations,
                         const DensitySpec& spec, std::uint64_t seed,
                         int workers) {
    if (spec.re_bins < 1 || spec.im_bins < 1 ||
        spec.re_max <= spec.re_min || spec.im_max <= spec.im_min) {
        throw std::invalid_argument("ep_density: invalid grid specification");
    }
    const InitialSpectrum h0 = build_initial(model, (d - 1) / 2.0);

    EpDensityGrid grid;
    grid.spec = spec;
    grid.counts = Eigen::MatrixXd::Zero(spec.im_bins, spec.re_bins);
    grid.re_marginal = Eigen::VectorXd::Zero(spec.re_bins);
    grid.im_marginal = Eigen::VectorXd::Zero(spec.im_bins);
    grid.realizations = n_realizations;

    std::mutex merge_mutex;
    std::atomic<int> next{0};
    auto worker = [&]() {
        Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(spec.im_bins, spec.re_bins);
        Eigen::VectorXd re_marg = Eigen::VectorXd::Zero(spec.re_bins);
        Eigen::VectorXd im_marg = Eigen::VectorXd::Zero(spec.im_bins);
        long long total = 0, outside = 0;
        int skipped = 0;
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= n_realizations) break;
            EpSet set;
            try {
                set = find_eps(h0, sample_subspace(d, n, seed, r));
            } catch (const EpCountError&) {
                ++skipped;
                continue;
            } catch (const SolverError&) {
                ++skipped;
                continue;
            }
            for (const auto& p : set.points) {
                if (!p.converged) continue;
                ++total;
                const double re = p.lambda.real();
                const double im = p.lambda.imag();
                const int bi = static_cast<int>(std::floor(
                    (im - spec.im_min) / (spec.im_max - spec.im_min) * spec.im_bins));
                const int bj = static_cast<int>(std::floor(
                    (re - spec.re_min) / (spec.re_max - spec.re_min) * spec.re_bins));
                const bool in_re = bj >= 0 && bj < spec.re_bins;
                const bool in_im = bi >= 0 && bi < spec.im_bins;
                if (in_re) re_marg[bj] += 1.0;
                if (in_im) im_marg[bi] += 1.0;
                if (in_re && in_im) {
                    counts(bi, bj) += 1.0;
                } else {
                    ++outside;
                }
            }
        }
        const std::lock_guard<std::mutex> lock(merge_mutex);
        grid.counts += counts;
        grid.re_marginal += re_marg;
        grid.im_marginal += im_marg;
        grid.total_points += total;
        grid.out_of_range += outside;
        grid.skipped_realizations += skipped;
    };

    workers = std::max(1, workers);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return grid;
}

}  // namespace nhsr
