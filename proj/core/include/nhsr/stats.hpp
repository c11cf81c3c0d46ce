// stats.hpp — ensemble statistics over the complex spectra: log-width
// histograms with mode detection, the exact trace-cumulant identities,
// spectral contraction curves, and the paired HO/PT2 minimal-width scaling
// study.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nhsr/ensemble.hpp"
#include "nhsr/open_system.hpp"
#include "nhsr/quasispin.hpp"
#include "nhsr/sweep.hpp"

namespace nhsr {

struct WidthHistogram {
    std::vector<double> bin_centers;  // in log10(Gamma)
    std::vector<double> density;      // normalized: sum(density)*bin_width = 1
    double bin_width = 0;
    long long counted = 0;
    long long underflow = 0;  // Gamma < 1e-14 * gamma, kept out of the log bins
    double eps = 0, gamma = 0;
    int d = 0, n = 0, n_realizations = 0;
};

WidthHistogram width_histogram(std::span<const Eigen::VectorXcd> spectra,
                               int bins, double eps, double gamma,
                               int d = 0, int n = 0);

struct ModeInfo {
    std::vector<double> mode_locations;  // log10(Gamma) of detected maxima
    std::vector<double> mode_heights;
    bool bimodal = false;
};

// Fixed rule: maxima of the histogram smoothed with a Gaussian kernel of
// 3-bin bandwidth, counted as separate modes only when split by a trough
// below 50% of the lower peak.
ModeInfo detect_modes(const WidthHistogram& h);

struct TraceIdentityReport {
    double mean_shift_residual = 0;       // average-energy shift vs (n/d) eps
    double mean_width_residual = 0;       // average width vs (n/d) gamma
    double variance_shift_residual = 0;   // gamma=0 variance shift vs 2e(n/d)A + ...
    double variance_relation_residual = 0;// E-vs-Gamma variance relation
    double variance_relation_rhs = 0;     // right-hand side (semi-negative)
    double A = 0;                         // subspace-weighted spectral asymmetry
    double eps_min = 0;                   // -A d/(d-n), maximal-compression point
};

// Needs companion spectra of the same realization: at (eps, gamma) and at
// (eps, 0) [the shifted Hermitian point].
TraceIdentityReport trace_identities(const InitialSpectrum& h0,
                                     const DecayingSubspace& sub,
                                     const ComplexSpectrum& at_eps_gamma,
                                     const ComplexSpectrum& at_eps_0,
                                     double eps, double gamma);

struct ContractionCurve {
    std::vector<double> gammas;
    std::vector<double> ratio;        // <var E(gamma)> / var E(0), ensemble mean
    std::vector<double> ratio_stderr;
    double asymptote = 0;             // ratio at the largest gamma
};

ContractionCurve contraction_curve(Model model, int d, int n,
                                   const GammaGrid& grid, int n_realizations,
                                   std::uint64_t seed, int workers = 1);

struct MinWidthRow {
    int d = 0;
    int n_realizations = 0;
    double ho_mean = 0, ho_std = 0;
    double pt2_mean = 0, pt2_std = 0;
    double ratio_mean = 0, ratio_std = 0;  // paired per-realization ratios
    double ratio_unpaired = 0;             // mean(PT2) / mean(HO)
};

// Paired HO/PT2 runs at lambda = -i * 16 d, n = d/2; identical subspace
// realizations for both models.
std::vector<MinWidthRow> min_width_ratio(std::span<const int> d_list,
                                         std::uint64_t seed,
                                         std::span<const int> nr_schedule,
                                         int workers = 1);

// Asymptotic two-sided Kolmogorov-Smirnov p-value for sample equality.
double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b);

}  // namespace nhsr
