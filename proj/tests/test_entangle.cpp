#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qwalk/entangle.hpp"
#include "qwalk/oracles.hpp"

using namespace qwalk;

TEST_CASE("pair emission places the branches on opposite sources") {
    const auto ens = two_slit(1.0, 0.5);
    Rng rng(17);
    int first_plus = 0;
    for (int k = 0; k < 2000; ++k) {
        const auto pair = emit_pair(ens, 0.3, -0.4, rng);
        CHECK(pair.source[0] != pair.source[1]);
        CHECK(pair.branch[0].v0[0] == doctest::Approx(-pair.branch[1].v0[0]));
        CHECK(pair.branch[0].x[0] == -pair.branch[1].x[0]);
        CHECK(pair.delta == 2.0);
        for (int r = 0; r < 2; ++r) {
            const auto& b = pair.branch[r];
            CHECK(b.n_r == 2);
            CHECK(b.phi == pair.phi);
            CHECK(b.eps == (pair.source[r] == 0 ? pair.eps_delta[r] : 0.0));
        }
        first_plus += pair.source[0] == 0 ? 1 : 0;
    }
    CHECK(std::abs(first_plus - 1000) < 150);
    CHECK_THROWS_AS(emit_pair(two_slit(1.0, 0.3), 0.0, 0.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(emit_pair(comb(3, 1.0), 0.0, 0.0, rng), std::invalid_argument);
}

TEST_CASE("branch momentum solves the branch condition") {
    Rng rng(2);
    for (int k = 0; k < 500; ++k) {
        const double v0 = rng.uniform(-1.0, 1.0), eps = rng.uniform(-1.0, 1.0), phi = rng.uniform(-1.0, 1.0);
        const double vq = solve_branch(v0, eps, phi, 2.0);
        CHECK(std::fabs(branch_residual(vq, v0, eps, phi, 2.0)) < 1e-12);
    }
    CHECK_THROWS_AS(solve_branch(0.1, 0.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("trained branch relaxes to the solved momentum") {
    Rng rng(8);
    for (double v0 : {-0.5, 0.1, 0.7}) {
        const auto run = run_branch_trained(0, v0, 0.25, -0.3, 2.0, 400, 10, rng);
        CHECK(run.q == doctest::Approx(solve_branch(v0, 0.25, -0.3, 2.0)).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("coincidence counting") {
    ChshConfig cfg;
    cfg.np = 100000;
    cfg.t = 100;
    cfg.window = 2;
    CHECK(cfg.detector() == 25);
    const auto same = run_coincidences(cfg, 0.0, 0.0, 5);
    CHECK(same.pairs == cfg.np);
    std::uint64_t marginal = 0;
    for (const auto& [x, n] : same.marginal) marginal += n;
    CHECK(marginal == cfg.np);
    REQUIRE(same.coincidences() > 100);
    const auto r = same.rates();
    CHECK(r[0] + r[1] + r[2] + r[3] == doctest::Approx(1.0));
    CHECK(same.correlation() > 0.9);
    const auto opposite = run_coincidences(cfg, 1.0, 0.0, 5);
    CHECK(opposite.correlation() < -0.9);
    const auto half = run_coincidences(cfg, 0.5, 0.0, 5);
    CHECK(std::fabs(half.correlation() - correlation(0.5, 0.0)) < 0.15);
    CoincidenceCounts empty;
    CHECK_THROWS_AS(empty.correlation(), std::runtime_error);
}

TEST_CASE("coincidences do not depend on the thread count") {
    ChshConfig cfg;
    cfg.np = 5000;
    cfg.t = 60;
    cfg.window = 1;
    for (auto model : {ChshModel::Mstar, ChshModel::Mstarstar}) {
        cfg.model = model;
        cfg.threads = 1;
        const auto a = run_coincidences(cfg, 0.25, 0.0, 99);
        cfg.threads = 3;
        const auto b = run_coincidences(cfg, 0.25, 0.0, 99);
        CHECK(a.plus_plus == b.plus_plus);
        CHECK(a.minus_minus == b.minus_minus);
        CHECK(a.plus_minus == b.plus_minus);
        CHECK(a.minus_plus == b.minus_plus);
        CHECK(a.marginal == b.marginal);
    }
}

TEST_CASE("full model branches run on their own lattices") {
    ChshConfig cfg;
    cfg.np = 400;
    cfg.t = 40;
    cfg.window = 1;
    cfg.model = ChshModel::M;
    const auto c = run_coincidences(cfg, 0.0, 0.0, 3);
    CHECK(c.pairs == 400);
    CHECK(c.coincidences() > 0);
}

TEST_CASE("S estimate combines two settings") {
    ChshConfig cfg;
    cfg.np = 40000;
    cfg.t = 100;
    cfg.window = 2;
    const auto e = estimate_smax(cfg, kPi / 4, 12);
    CHECK(e.s_max == doctest::Approx(3.0 * e.c_theta - e.c_3theta));
    CHECK(e.s_max > 2.0);
}
