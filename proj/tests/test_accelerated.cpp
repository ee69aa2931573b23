#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "qwalk/accelerated.hpp"

using namespace qwalk;

namespace {

double brute_force(const SourceEnsemble& ens, double q) {
    double f = 0.0;
    const auto& s = ens.sources();
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (i == j) continue;
            const double d = s[i].x[0] - s[j].x[0];
            f += std::sqrt(s[i].p * s[j].p) * std::sin(kPi * (d * q - (s[i].eps - s[j].eps))) / (kPi * d);
        }
    }
    return f;
}

std::vector<SourceEnsemble> ensembles() {
    return {two_slit(1.0, 0.5),
            two_slit(1.0, 0.1, 0.3, -0.2),
            two_slit(2.5, 0.3),
            comb(4, 3.0),
            gaussian(2.0, 4.0, -0.3),
            SourceEnsemble(1, {{{0.0, 0.0}, 0.4, 0.1, false}, {{2.5, 0.0}, 0.6, 0.0, false}, {{-1.0, 0.0}, 0.2, 1.0, false}})};
}

}  // namespace

TEST_CASE("compressed kernel equals the pair sum") {
    for (const auto& ens : ensembles()) {
        const PairKernel k(ens);
        for (double q = -1.0; q <= 1.0; q += 0.0625) {
            CAPTURE(q);
            CHECK(k.force(q) == doctest::Approx(brute_force(ens, q)).epsilon(1e-12).scale(1.0));
            const double h = 1e-6;
            CHECK(k.slope(q) == doctest::Approx((k.force(q + h) - k.force(q - h)) / (2 * h)).epsilon(1e-6));
            CHECK(std::fabs(k.force(q)) <= k.bound() + 1e-12);
            CHECK(k.slope(q) <= k.max_slope() + 1e-2 * (1 + k.max_slope()));
        }
    }
    CHECK(PairKernel(single_source(0.0)).empty());
    CHECK(PairKernel(two_slit(1.0, 0.5)).weight_sum() == doctest::Approx(1.0));
    CHECK(PairKernel(comb(4, 3.0)).harmonic_count() == 9);
    CHECK(PairKernel(two_slit(1.25, 0.5)).direct_count() == 1);
}

TEST_CASE("momentum root satisfies the balance equation") {
    for (const auto& ens : ensembles()) {
        const PairKernel k(ens);
        for (double v0 = -0.95; v0 < 1.0; v0 += 0.1) {
            const auto s = solve_vq(v0, k);
            CAPTURE(v0);
            CHECK(std::fabs(s.vq - v0 + k.force(s.vq)) < 1e-11);
            CHECK(s.monotone == (k.weight_sum() <= 1.0));
        }
    }
    const auto free = solve_vq(0.3, PairKernel{});
    CHECK(free.vq == 0.3);
}

TEST_CASE("density inverse reproduces the monotone root map") {
    const auto ens = two_slit(1.0, 0.1);
    const PairKernel k(ens);
    REQUIRE(k.weight_sum() < 1.0);
    const MomentumInverse inv(k, 20001);
    CHECK(inv.grid_size() == 20001);
    for (double v0 = -0.99; v0 < 1.0; v0 += 0.03) {
        CAPTURE(v0);
        CHECK(inv(v0) == doctest::Approx(solve_vq(v0, k).vq).epsilon(1e-5).scale(1.0));
    }
    CHECK(inv(-1.0) == doctest::Approx(-1.0));
    CHECK(inv(1.0) == doctest::Approx(1.0));
    CHECK(MomentumInverse()(0.25) == 0.25);
    CHECK_THROWS_AS(MomentumInverse(k, 2), std::invalid_argument);
}

TEST_CASE("density inverse is monotone for non-monotone kernels") {
    const PairKernel k(comb(5, 2.0));
    REQUIRE(k.weight_sum() > 1.0);
    const MomentumInverse inv(k, 4001);
    double prev = -2.0;
    for (double v0 = -1.0; v0 <= 1.0; v0 += 0.01) {
        const double v = inv(v0);
        CHECK(v >= prev);
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
        prev = v;
    }
}

TEST_CASE("relaxation lag follows the kernel steepness") {
    CHECK(stable_lag(PairKernel{}) == kDefaultLag);
    CHECK(stable_lag(PairKernel(two_slit(1.0, 0.5))) == kDefaultLag);
    const PairKernel steep(gaussian(0.0, 10.0, 0.0));
    CHECK(steep.max_slope() > 10.0);
    CHECK(stable_lag(steep) == static_cast<std::int64_t>(std::ceil(1.0 + steep.max_slope())));
}

TEST_CASE("trained code relaxes to the momentum root") {
    const auto ens = two_slit(1.0, 0.1);
    const PairKernel k(ens);
    for (double v0 : {-0.7, -0.2, 0.4, 0.85}) {
        Rng rng(9);
        TrainedTrace trace;
        const auto r = run_trained(k, ForceField{}, TrainedOptions{}, 0, v0, 400, rng, &trace);
        CAPTURE(v0);
        CHECK(r.q == doctest::Approx(solve_vq(v0, k).vq).epsilon(1e-6).scale(1.0));
        CHECK(r.vq == doctest::Approx(r.u));
        CHECK(trace.x.size() == 400);
        for (std::size_t n = 1; n < trace.x.size(); ++n) CHECK(std::abs(trace.x[n] - trace.x[n - 1]) <= 1);
    }
}

TEST_CASE("trained code without a kernel keeps the source momentum") {
    Rng a(4), b(4);
    const auto ra = run_trained(PairKernel{}, ForceField{}, TrainedOptions{}, 3, 0.25, 100, a);
    const auto rb = run_trained(PairKernel{}, ForceField{}, TrainedOptions{}, 3, 0.25, 100, b);
    CHECK(ra.vq == 0.25);
    CHECK(ra.x == rb.x);
    Rng c(5);
    CHECK_THROWS_AS(run_trained(PairKernel{}, ForceField{}, TrainedOptions{}, 0, 0.1, 0, c), std::invalid_argument);
}

TEST_CASE("trained code reflects inside a box") {
    TrainedOptions opts;
    opts.box = 10;
    Rng rng(1);
    const auto r = run_trained(PairKernel{}, ForceField{}, opts, 0, 0.9, 300, rng);
    CHECK(r.wall_hits > 5);
    CHECK(std::abs(r.x) <= 14);
    CHECK(std::fabs(r.vq) == doctest::Approx(0.9));
}

TEST_CASE("expected trajectory is affine in the initial data") {
    const AbcPoint abc{0.5, 20.0, -3.0, 0.0, 1.0, 0.0};
    CHECK(expected_trajectory(4.0, 0.1, abc) == doctest::Approx(1.0));
}
