#include <doctest.h>

#include <nhsr/exceptional_points.hpp>
#include <nhsr/rng.hpp>
#include <nhsr/two_level.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

using namespace nhsr;

TEST_SUITE_BEGIN("exceptional_points");

TEST_CASE("two level exceptional pair is found exactly") {
    TwoLevelModel m;
    const auto h0 = two_level_spectrum(m);
    const auto sub = two_level_subspace(m);
    const auto set = find_eps(h0, sub);
    REQUIRE(set.expected_count() == 2);
    REQUIRE(set.converged_count() == 2);
    CHECK(set.conjugate_paired());
    const auto [lp, lm] = analytic_eps(m);
    double best_p = 1e300, best_m = 1e300;
    for (const auto& p : set.points) {
        best_p = std::min(best_p, std::abs(p.lambda - lp));
        best_m = std::min(best_m, std::abs(p.lambda - lm));
    }
    CHECK(best_p < 1e-8);
    CHECK(best_m < 1e-8);
}

TEST_CASE("two level pair across random mixing angles") {
    RngStream rng(77, 0);
    for (int trial = 0; trial < 25; ++trial) {
        TwoLevelModel m;
        m.theta = 0.15 + (std::numbers::pi - 0.3) * rng.uniform();
        const auto h0 = two_level_spectrum(m);
        const auto sub = two_level_subspace(m);
        const auto set = find_eps(h0, sub);
        REQUIRE(set.converged_count() == 2);
        const auto [lp, lm] = analytic_eps(m);
        for (const auto target : {lp, lm}) {
            double best = 1e300;
            for (const auto& p : set.points)
                best = std::min(best, std::abs(p.lambda - target));
            CHECK(best < 1e-8);
        }
    }
}

TEST_CASE("count law at small dimensions") {
    struct Case { int d, n; };
    for (const Case c : {Case{4, 1}, Case{4, 2}, Case{6, 2}}) {
        const auto h0 = build_initial(Model::HO, (c.d - 1) / 2.0);
        const auto sub = sample_subspace(c.d, c.n, 1234, 0);
        const auto set = find_eps(h0, sub);
        CHECK(set.converged_count() == 2 * c.n * (c.d - c.n));
        CHECK(set.conjugate_paired());
        // no duplicates within the dedup tolerance
        for (std::size_t i = 0; i < set.points.size(); ++i)
            for (std::size_t k = i + 1; k < set.points.size(); ++k)
                CHECK(std::abs(set.points[i].lambda - set.points[k].lambda) >
                      1e-6 * (1 + std::abs(set.points[i].lambda)));
    }
}

TEST_CASE("eigenvalue pair coalesces at each refined point") {
    const auto h0 = build_initial(Model::PT2, 1.5);
    const auto sub = sample_subspace(4, 2, 55, 3);
    const auto set = find_eps(h0, sub);
    REQUIRE(set.converged_count() == 8);
    for (const auto& p : set.points) {
        const auto s = eig_matrix(assemble_matrix(h0, sub, p.lambda), true);
        double min_gap = 1e300;
        for (int i = 0; i < 4; ++i)
            for (int k = i + 1; k < 4; ++k)
                min_gap = std::min(min_gap,
                                   std::abs(s.eigenvalues[i] - s.eigenvalues[k]));
        CHECK(min_gap < 1e-6 * (4 + std::abs(p.lambda)));
        // the coalescing eigenvector is (numerically) self-orthogonal
        CHECK(s.any_ep_proximity());
    }
}

TEST_CASE("discriminant profile is real positive on the hermitian axis") {
    const auto h0 = build_initial(Model::HO, 3.5);
    const auto sub = sample_subspace(8, 3, 9, 1);
    std::vector<Complex> pts = {Complex(0.5, 0), Complex(-2.0, 0), Complex(7.0, 0)};
    const auto prof = discriminant_profile(h0, sub, pts);
    REQUIRE(prof.size() == 3);
    for (const auto& v : prof) {
        // D = prod (gap)^2 of a real spectrum: phase 0 mod 2*pi
        CHECK(std::abs(std::remainder(v.imag(), 2 * std::numbers::pi)) < 1e-6);
    }
}

TEST_CASE("discriminant respects the conjugation symmetry") {
    const auto h0 = build_initial(Model::PT1, 3.5);
    const auto sub = sample_subspace(8, 4, 21, 2);
    const Complex z(1.3, 2.1);
    std::vector<Complex> pts = {z, std::conj(z)};
    const auto prof = discriminant_profile(h0, sub, pts);
    CHECK(prof[0].real() == doctest::Approx(prof[1].real()).epsilon(1e-9));
    CHECK(std::abs(std::remainder(prof[0].imag() + prof[1].imag(),
                                  2 * std::numbers::pi)) < 1e-6);
}

TEST_CASE("finder rejects oversized problems") {
    const auto h0 = build_initial(Model::HO, 31.5);
    const auto sub = sample_subspace(64, 32, 1, 0);
    EpConfig cfg;
    cfg.max_dim = 32;
    CHECK_THROWS_AS(find_eps(h0, sub, cfg), std::invalid_argument);
}

TEST_CASE("density grid accounting") {
    const auto h0 = build_initial(Model::HO, 1.5);
    const auto spec = DensitySpec::standard(h0, 1, 32);
    CHECK(spec.re_bins == 32);
    CHECK(spec.im_bins == 32);
    CHECK(spec.re_max > 0);
    CHECK(spec.re_min == doctest::Approx(-spec.re_max));
    CHECK(spec.im_min == doctest::Approx(-spec.im_max));
    const auto grid = ep_density(Model::HO, 4, 1, 6, spec, 31337, 2);
    CHECK(grid.realizations == 6);
    const double binned = grid.counts.sum();
    CHECK(binned + grid.out_of_range == grid.total_points);
    // 2n(d-n) = 6 per non-skipped realization
    CHECK(grid.total_points == (6 - grid.skipped_realizations) * 6);
    // one-axis marginals may keep points the 2D grid drops
    CHECK(grid.re_marginal.sum() >= binned);
    CHECK(grid.im_marginal.sum() >= binned);
    CHECK(grid.re_marginal.sum() <= static_cast<double>(grid.total_points));
    // worker count does not change the counts
    const auto grid1 = ep_density(Model::HO, 4, 1, 6, spec, 31337, 1);
    CHECK((grid.counts - grid1.counts).norm() == 0.0);
}

TEST_SUITE_END();
