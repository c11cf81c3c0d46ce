#include "nhsr/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace nhsr {

WidthHistogram width_histogram(std::span<const Eigen::VectorXcd> spectra,
                               int bins, double eps, double gamma, int d,
                               int n) {
    if (bins < 1) throw std::invalid_argument("width_histogram: bins must be >= 1");
    WidthHistogram h;
    h.eps = eps;
    h.gamma = gamma;
    h.d = d;
    h.n = n;
    h.n_realizations = static_cast<int>(spectra.size());

    const double clamp = kSlopeClamp * gamma;
    std::vector<double> logs;
    for (const auto& vals : spectra) {
        for (int k = 0; k < vals.size(); ++k) {
            const double w = -vals[k].imag();
            if (w > clamp) {
                logs.push_back(std::log10(w));
            } else {
                ++h.underflow;
            }
        }
    }
    h.counted = static_cast<long long>(logs.size());
    if (logs.empty()) return h;

    const auto [lo_it, hi_it] = std::minmax_element(logs.begin(), logs.end());
    double lo = *lo_it, hi = *hi_it;
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    h.bin_width = (hi - lo) / bins;
    h.bin_centers.resize(bins);
    h.density.assign(bins, 0.0);
    for (int b = 0; b < bins; ++b) h.bin_centers[b] = lo + (b + 0.5) * h.bin_width;
    for (const double v : logs) {
        int b = static_cast<int>((v - lo) / h.bin_width);
        b = std::clamp(b, 0, bins - 1);
        h.density[b] += 1.0;
    }
    const double norm = 1.0 / (h.counted * h.bin_width);
    for (double& v : h.density) v *= norm;
    return h;
}

ModeInfo detect_modes(const WidthHistogram& h) {
    ModeInfo info;
    const int bins = static_cast<int>(h.density.size());
    if (bins == 0) return info;

    // Gaussian smoothing, bandwidth 3 bins
    const double bw = 3.0;
    std::vector<double> smooth(bins, 0.0);
    for (int b = 0; b < bins; ++b) {
        double acc = 0, wsum = 0;
        const int half = static_cast<int>(4 * bw);
        for (int k = std::max(0, b - half); k <= std::min(bins - 1, b + half); ++k) {
            const double w = std::exp(-0.5 * (k - b) * (k - b) / (bw * bw));
            acc += w * h.density[k];
            wsum += w;
        }
        smooth[b] = acc / wsum;
    }

    // local maxima
    std::vector<int> peaks;
    for (int b = 0; b < bins; ++b) {
        const double left = (b > 0) ? smooth[b - 1] : -1;
        const double right = (b < bins - 1) ? smooth[b + 1] : -1;
        if (smooth[b] > left && smooth[b] >= right && smooth[b] > 0) peaks.push_back(b);
    }
    // merge maxima not separated by a trough below 50% of the lower peak
    std::vector<int> modes;
    for (const int p : peaks) {
        if (modes.empty()) {
            modes.push_back(p);
            continue;
        }
        const int prev = modes.back();
        double trough = smooth[prev];
        for (int b = prev; b <= p; ++b) trough = std::min(trough, smooth[b]);
        const double lower_peak = std::min(smooth[prev], smooth[p]);
        if (trough < 0.5 * lower_peak) {
            modes.push_back(p);
        } else if (smooth[p] > smooth[prev]) {
            modes.back() = p;
        }
    }
    for (const int b : modes) {
        info.mode_locations.push_back(h.bin_centers[b]);
        info.mode_heights.push_back(smooth[b]);
    }
    info.bimodal = modes.size() >= 2;
    return info;
}

TraceIdentityReport trace_identities(const InitialSpectrum& h0,
                                     const DecayingSubspace& sub,
                                     const ComplexSpectrum& at_eps_gamma,
                                     const ComplexSpectrum& at_eps_0,
                                     double eps, double gamma) {
    const int d = h0.d;
    const int n = sub.n;
    if (at_eps_gamma.size() != d || at_eps_0.size() != d)
        throw std::invalid_argument("trace_identities: missing companion spectra");
    const double frac = static_cast<double>(n) / d;

    auto mean_of = [](const Eigen::ArrayXd& v) { return v.mean(); };
    auto var_of = [](const Eigen::ArrayXd& v) {
        return (v - v.mean()).square().mean();
    };

    const Eigen::ArrayXd e0 = h0.energies.array();
    const Eigen::ArrayXd e_eps0 = at_eps_0.eigenvalues.real().array();
    const Eigen::ArrayXd e_full = at_eps_gamma.eigenvalues.real().array();
    const Eigen::ArrayXd g_full = (-at_eps_gamma.eigenvalues.imag()).array();

    TraceIdentityReport r;

    // average-energy shift and average width are pure trace identities
    const double scale_e = std::max({1.0, std::abs(mean_of(e0)), std::abs(eps)});
    r.mean_shift_residual =
        std::abs(mean_of(e_full) - mean_of(e0) - frac * eps) / scale_e;
    r.mean_width_residual =
        std::abs(mean_of(g_full) - frac * gamma) / std::max(1.0, frac * gamma);

    // weight of each unperturbed level inside the decaying subspace
    const Eigen::ArrayXd pkk = sub.phi.array().square().rowwise().sum();
    r.A = ((e0 - mean_of(e0)) * pkk).sum() / n;
    r.eps_min = -r.A * d / static_cast<double>(d - n);

    const double lhs_var = var_of(e_eps0) - var_of(e0);
    const double rhs_var = 2.0 * eps * frac * r.A + eps * eps * frac * (1.0 - frac);
    r.variance_shift_residual = std::abs(lhs_var - rhs_var) /
                                std::max({std::abs(lhs_var), std::abs(rhs_var),
                                          var_of(e0)});

    const double lhs_rel = var_of(e_full) - var_of(e_eps0);
    const double rhs_rel = var_of(g_full) - gamma * gamma * frac * (1.0 - frac);
    r.variance_relation_rhs = rhs_rel;
    r.variance_relation_residual =
        std::abs(lhs_rel - rhs_rel) /
        std::max({std::abs(lhs_rel), std::abs(rhs_rel), var_of(e0),
                  gamma * gamma * frac * (1.0 - frac), 1.0});
    return r;
}

ContractionCurve contraction_curve(Model model, int d, int n,
                                   const GammaGrid& grid, int n_realizations,
                                   std::uint64_t seed, int workers) {
    const InitialSpectrum h0 = build_initial(model, (d - 1) / 2.0);
    const double var0 = spectrum_cumulants(h0).variance;
    const std::vector<double> gammas = grid.values();
    const int points = static_cast<int>(gammas.size());

    std::vector<std::vector<double>> ratios(points);  // per gamma, per realization
    for (auto& v : ratios) v.resize(n_realizations);

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= n_realizations) break;
            const DecayingSubspace sub = sample_subspace(d, n, seed, r);
            for (int i = 0; i < points; ++i) {
                const ComplexSpectrum sp =
                    eig(assemble(h0, sub, 0.0, gammas[i]), false);
                const Eigen::ArrayXd e = sp.eigenvalues.real().array();
                ratios[i][r] = (e - e.mean()).square().mean() / var0;
            }
        }
    };
    workers = std::max(1, workers);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    ContractionCurve curve;
    curve.gammas = gammas;
    curve.ratio.resize(points);
    curve.ratio_stderr.resize(points);
    for (int i = 0; i < points; ++i) {
        double mean = 0;
        for (const double v : ratios[i]) mean += v;
        mean /= n_realizations;
        double var = 0;
        for (const double v : ratios[i]) var += (v - mean) * (v - mean);
        var /= std::max(1, n_realizations - 1);
        curve.ratio[i] = mean;
        curve.ratio_stderr[i] = std::sqrt(var / n_realizations);
    }
    curve.asymptote = curve.ratio.back();
    return curve;
}

std::vector<MinWidthRow> min_width_ratio(std::span<const int> d_list,
                                         std::uint64_t seed,
                                         std::span<const int> nr_schedule,
                                         int workers) {
    if (d_list.size() != nr_schedule.size())
        throw std::invalid_argument("min_width_ratio: d list and N_R schedule differ in length");

    std::vector<MinWidthRow> rows;
    for (std::size_t i = 0; i < d_list.size(); ++i) {
        const int d = d_list[i];
        const int nr = nr_schedule[i];
        const int n = d / 2;
        const double gamma = 16.0 * d;
        const InitialSpectrum ho = build_initial(Model::HO, (d - 1) / 2.0);
        const InitialSpectrum pt2 = build_initial(Model::PT2, (d - 1) / 2.0);

        std::vector<double> ho_min(nr), pt2_min(nr);
        std::atomic<int> next{0};
        auto worker = [&]() {
            for (;;) {
                const int r = next.fetch_add(1);
                if (r >= nr) break;
                const DecayingSubspace sub = sample_subspace(d, n, seed, r);
                ho_min[r] = eig(assemble(ho, sub, 0.0, gamma), false).widths().minCoeff();
                pt2_min[r] = eig(assemble(pt2, sub, 0.0, gamma), false).widths().minCoeff();
            }
        };
        const int w = std::max(1, workers);
        std::vector<std::thread> pool;
        for (int k = 0; k < w; ++k) pool.emplace_back(worker);
        for (auto& t : pool) t.join();

        auto mean_std = [](const std::vector<double>& v) {
            double mean = 0;
            for (const double x : v) mean += x;
            mean /= v.size();
            double var = 0;
            for (const double x : v) var += (x - mean) * (x - mean);
            var /= std::max<std::size_t>(1, v.size() - 1);
            return std::pair<double, double>(mean, std::sqrt(var));
        };

        MinWidthRow row;
        row.d = d;
        row.n_realizations = nr;
        std::tie(row.ho_mean, row.ho_std) = mean_std(ho_min);
        std::tie(row.pt2_mean, row.pt2_std) = mean_std(pt2_min);
        std::vector<double> ratio(nr);
        for (int r = 0; r < nr; ++r) ratio[r] = pt2_min[r] / ho_min[r];
        std::tie(row.ratio_mean, row.ratio_std) = mean_std(ratio);
        row.ratio_unpaired = row.pt2_mean / row.ho_mean;
        rows.push_back(row);
    }
    return rows;
}

double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_two_sample_pvalue: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d_stat = 0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        const double x = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] <= x) ++ia;
        while (ib < b.size() && b[ib] <= x) ++ib;
        d_stat = std::max(d_stat, std::abs(ia / na - ib / nb));
    }
    const double en = std::sqrt(na * nb / (na + nb));
    const double t = (en + 0.12 + 0.11 / en) * d_stat;
    // Kolmogorov survival function
    double p = 0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) *
                            std::exp(-2.0 * k * k * t * t);
        p += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace nhsr
