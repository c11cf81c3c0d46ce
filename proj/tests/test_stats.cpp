#include <doctest.h>

#include <nhsr/rng.hpp>
#include <nhsr/stats.hpp>

#include <cmath>
#include <vector>

using namespace nhsr;

TEST_SUITE_BEGIN("stats");

TEST_CASE("histogram normalization and underflow") {
    Eigen::VectorXcd vals(4);
    vals << Complex(0, -1e-3), Complex(1, -1e-1), Complex(2, -1e-2),
        Complex(3, -1e-20);  // last one below the 1e-14 * gamma floor
    std::vector<Eigen::VectorXcd> spectra = {vals};
    const auto h = width_histogram(spectra, 10, 0.0, 1.0, 4, 2);
    CHECK(h.counted == 3);
    CHECK(h.underflow == 1);
    double mass = 0;
    for (const double v : h.density) mass += v * h.bin_width;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    // bins cover exactly [-3, -1] in log10
    CHECK(h.bin_centers.front() == doctest::Approx(-3 + 0.5 * h.bin_width));
    CHECK(h.bin_centers.back() == doctest::Approx(-1 - 0.5 * h.bin_width));
}

TEST_CASE("mode detection on synthetic shapes") {
    auto make = [](const std::vector<double>& density) {
        WidthHistogram h;
        h.density = density;
        h.bin_width = 0.1;
        h.bin_centers.resize(density.size());
        for (std::size_t i = 0; i < density.size(); ++i)
            h.bin_centers[i] = -5 + 0.1 * (i + 0.5);
        return h;
    };
    auto gauss = [](int bins, double c, double s, double amp) {
        std::vector<double> v(bins, 0.0);
        for (int b = 0; b < bins; ++b)
            v[b] = amp * std::exp(-0.5 * (b - c) * (b - c) / (s * s));
        return v;
    };

    const auto uni = detect_modes(make(gauss(80, 40, 6, 1.0)));
    CHECK_FALSE(uni.bimodal);
    REQUIRE(uni.mode_locations.size() == 1);

    auto two = gauss(80, 20, 4, 1.0);
    const auto peak2 = gauss(80, 60, 4, 0.8);
    for (int b = 0; b < 80; ++b) two[b] += peak2[b];
    const auto bi = detect_modes(make(two));
    CHECK(bi.bimodal);
    REQUIRE(bi.mode_locations.size() == 2);
    CHECK(bi.mode_locations[0] < bi.mode_locations[1]);

    // shallow trough (above 50% of the lower peak) merges into one mode
    auto shallow = gauss(80, 30, 10, 1.0);
    const auto near = gauss(80, 50, 10, 0.9);
    for (int b = 0; b < 80; ++b) shallow[b] += near[b];
    CHECK_FALSE(detect_modes(make(shallow)).bimodal);
}

TEST_CASE("trace identities on a random realization") {
    const auto h0 = build_initial(Model::PT2, 3.5);
    const auto sub = sample_subspace(8, 3, 101, 4);
    const double eps = 3.0, gamma = 7.0;
    const auto full = eig(assemble(h0, sub, eps, gamma), false);
    const auto herm = eig(assemble(h0, sub, eps, 0.0), false);
    const auto r = trace_identities(h0, sub, full, herm, eps, gamma);
    CHECK(r.mean_shift_residual < 1e-10);
    CHECK(r.mean_width_residual < 1e-10);
    CHECK(r.variance_shift_residual < 1e-8);
    CHECK(r.variance_relation_residual < 1e-8);
    CHECK(r.variance_relation_rhs <= 1e-12);
    CHECK(r.eps_min == doctest::Approx(-r.A * 8.0 / 5.0).epsilon(1e-12));
}

TEST_CASE("identities survive the trivial coupling") {
    const auto h0 = build_initial(Model::HO, 3.5);
    const auto sub = sample_subspace(8, 4, 7, 0);
    const auto at0 = eig(assemble(h0, sub, 0.0, 0.0), false);
    const auto r = trace_identities(h0, sub, at0, at0, 0.0, 0.0);
    CHECK(r.mean_shift_residual < 1e-12);
    CHECK(r.mean_width_residual < 1e-12);
    CHECK(r.variance_shift_residual < 1e-10);
    CHECK(r.variance_relation_residual < 1e-10);
}

TEST_CASE("subspace asymmetry averages out as one over sqrt N") {
    // <A> = 0 in ensemble average; the RMS of batch means falls like
    // N^{-1/2}. Compare batch sizes 25 and 400 drawn from one stream.
    const int d = 16, n = 8;
    const auto h0 = build_initial(Model::HO, 7.5);
    const double mean_e = h0.energies.mean();
    auto a_of = [&](int index) {
        const auto sub = sample_subspace(d, n, 505, static_cast<std::uint64_t>(index));
        const Eigen::ArrayXd pkk = sub.phi.array().square().rowwise().sum();
        return ((h0.energies.array() - mean_e) * pkk).sum() / n;
    };
    std::vector<double> a(4000);
    for (int i = 0; i < 4000; ++i) a[i] = a_of(i);

    auto rms_of_batch_means = [&](int batch) {
        const int nb = 4000 / batch;
        double acc = 0;
        for (int b = 0; b < nb; ++b) {
            double m = 0;
            for (int i = 0; i < batch; ++i) m += a[b * batch + i];
            m /= batch;
            acc += m * m;
        }
        return std::sqrt(acc / nb);
    };
    const double r25 = rms_of_batch_means(25);
    const double r400 = rms_of_batch_means(400);
    const double slope = std::log(r400 / r25) / std::log(400.0 / 25.0);
    CHECK(slope == doctest::Approx(-0.5).epsilon(0.4));
}

TEST_CASE("contraction curve") {
    GammaGrid grid{1e-2, 1e3, 24, GammaGrid::Spacing::Log};
    const auto c = contraction_curve(Model::HO, 16, 8, grid, 16, 2718, 2);
    REQUIRE(c.ratio.size() == 24);
    CHECK(c.ratio.front() == doctest::Approx(1.0).epsilon(1e-3));
    // n/d = 1/2: the strong-coupling asymptote is 1 - 2 (1/2)(1/2) = 0.5
    CHECK(c.asymptote == doctest::Approx(0.5).epsilon(0.3));
    CHECK(c.asymptote < 0.75);
    for (const double se : c.ratio_stderr) CHECK(se >= 0);
    // worker-count invariance, bit for bit
    const auto c1 = contraction_curve(Model::HO, 16, 8, grid, 16, 2718, 1);
    for (int i = 0; i < 24; ++i) CHECK(c.ratio[i] == c1.ratio[i]);
}

TEST_CASE("paired minimal width comparison") {
    const std::vector<int> ds = {64};
    const std::vector<int> nrs = {6};
    const auto rows = min_width_ratio(ds, 99, nrs, 2);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].d == 64);
    CHECK(rows[0].ho_mean > 0);
    CHECK(rows[0].pt2_mean > 0);
    CHECK(rows[0].ratio_mean < 1.0);
    CHECK(rows[0].ratio_unpaired ==
          doctest::Approx(rows[0].pt2_mean / rows[0].ho_mean));
}

TEST_CASE("two sample ks") {
    RngStream rng(31415, 0);
    std::vector<double> a(600), b(600), c(600);
    for (int i = 0; i < 600; ++i) {
        a[i] = rng.uniform();
        b[i] = rng.uniform();
        c[i] = rng.uniform() + 0.25;
    }
    CHECK(ks_two_sample_pvalue(a, b) > 0.01);
    CHECK(ks_two_sample_pvalue(a, c) < 1e-6);
    CHECK_THROWS_AS(ks_two_sample_pvalue({}, a), std::invalid_argument);
}

TEST_SUITE_END();
