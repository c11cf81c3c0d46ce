#include <doctest.h>

#include <nhsr/sweep.hpp>
#include <nhsr/two_level.hpp>

#include <cmath>
#include <vector>

using namespace nhsr;

TEST_SUITE_BEGIN("sweep");

TEST_CASE("grid values") {
    GammaGrid g{1.0, 100.0, 3, GammaGrid::Spacing::Log};
    const auto v = g.values();
    REQUIRE(v.size() == 3);
    CHECK(v[0] == doctest::Approx(1.0));
    CHECK(v[1] == doctest::Approx(10.0));
    CHECK(v[2] == doctest::Approx(100.0));
    GammaGrid lin{0.0, 1.0, 5, GammaGrid::Spacing::Linear};
    const auto w = lin.values();
    CHECK(w[2] == doctest::Approx(0.5));
    const auto std16 = GammaGrid::standard(16);
    CHECK(std16.points == 200);
    CHECK(std16.gamma_min == doctest::Approx(1e-2));
    CHECK(std16.gamma_max == doctest::Approx(1e2));
    CHECK(GammaGrid::standard(64).gamma_max == doctest::Approx(4e2));
}

TEST_CASE("matching identity and a forced transposition") {
    Eigen::VectorXcd prev(3), next(3);
    prev << Complex(0, 0), Complex(1, 0), Complex(2, 0);
    next << Complex(0.05, 0), Complex(1.05, 0), Complex(2.05, 0);
    auto perm = match_levels(prev, next);
    CHECK(perm == std::vector<int>{0, 1, 2});
    // swap the two nearest targets
    next << Complex(1.05, 0), Complex(0.05, 0), Complex(2.05, 0);
    perm = match_levels(prev, next);
    CHECK(perm == std::vector<int>{1, 0, 2});
}

TEST_CASE("matching is globally optimal") {
    // greedy nearest-neighbour would pair prev[0] with next[1] and pay a
    // large cost for prev[1]; the assignment must avoid that
    Eigen::VectorXcd prev(2), next(2);
    prev << Complex(0, 0), Complex(1, 0);
    next << Complex(0.6, 0), Complex(0.9, 0);
    const auto perm = match_levels(prev, next);
    CHECK(perm == std::vector<int>{0, 1});
}

TEST_CASE("two level sweep reproduces the bifurcation") {
    TwoLevelModel m;
    const auto h0 = two_level_spectrum(m);
    const auto sub = two_level_subspace(m);
    GammaGrid grid{1e-2, 1e2, 120, GammaGrid::Spacing::Log};
    const auto r = run_sweep(h0, sub, 0.0, grid);
    REQUIRE(r.trajectories.rows() == 2);
    REQUIRE(r.trajectories.cols() == 120);
    const auto gammas = grid.values();
    for (int s = 0; s < 120; ++s) {
        const double g = gammas[s];
        const Complex a = r.trajectories(0, s);
        const Complex b = r.trajectories(1, s);
        if (g < 0.9) {
            CHECK(-a.imag() == doctest::Approx(g / 2).epsilon(1e-8));
            CHECK(-b.imag() == doctest::Approx(g / 2).epsilon(1e-8));
        } else if (g > 1.1) {
            CHECK(a.real() == doctest::Approx(b.real()).epsilon(1e-8));
        }
        // width sum is exact along the whole path
        CHECK(-(a.imag() + b.imag()) == doctest::Approx(g).epsilon(1e-10));
    }
    // each row is continuous: after the sweep the slopes at the top of the
    // grid are +1 (superradiant) for one row and -1 (trapped) for the other
    const double s_last0 = r.slopes(0, 119);
    const double s_last1 = r.slopes(1, 119);
    CHECK(std::abs(std::max(s_last0, s_last1) - 1.0) < 0.05);
    CHECK(std::abs(std::min(s_last0, s_last1) + 1.0) < 0.05);
}

TEST_CASE("slopes of injected power laws") {
    const int steps = 40;
    GammaGrid grid{1e-1, 1e3, steps, GammaGrid::Spacing::Log};
    const auto gammas = grid.values();
    Eigen::MatrixXcd traj(3, steps);
    for (int s = 0; s < steps; ++s) {
        traj(0, s) = Complex(0, -2.0 * gammas[s]);        // chi = +1
        traj(1, s) = Complex(0, -0.5 / gammas[s]);        // chi = -1
        traj(2, s) = Complex(0, -1e-20 * gammas[s]);      // clamped
    }
    const auto slopes = log_slopes(traj, gammas);
    for (int s = 0; s < steps; ++s) {
        CHECK(slopes(0, s) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(slopes(1, s) == doctest::Approx(-1.0).epsilon(1e-9));
        CHECK(std::isnan(slopes(2, s)));
    }
}

TEST_CASE("sixteen level sweep splits half and half") {
    const auto h0 = build_initial(Model::HO, 7.5);
    const auto sub = sample_subspace(16, 8, 2025, 0);
    GammaGrid grid{1e-2, 1e3, 80, GammaGrid::Spacing::Log};
    const auto r = run_sweep(h0, sub, 0.0, grid);
    int up = 0, down = 0;
    for (int k = 0; k < 16; ++k) {
        const double chi = r.slopes(k, 79);
        if (std::abs(chi - 1.0) < 0.1) ++up;
        if (std::abs(chi + 1.0) < 0.1) ++down;
    }
    CHECK(up == 8);
    CHECK(down == 8);
    // widths are conserved in total at every step
    const auto gammas = grid.values();
    for (int s = 0; s < 80; ++s) {
        double sum = 0;
        for (int k = 0; k < 16; ++k) sum -= r.trajectories(k, s).imag();
        CHECK(sum == doctest::Approx(8 * gammas[s]).epsilon(1e-9));
    }
    // matching cost was recorded per step
    CHECK(r.matching_cost.size() == 80);
}

TEST_SUITE_END();
