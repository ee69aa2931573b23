#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qwalk/oracles.hpp"

using namespace qwalk;

TEST_CASE("free pdfs integrate to one") {
    const double t = 300.0;
    for (const auto& ens : {single_source(0.0), two_slit(1.0, 0.5), two_slit(1.0, 0.1, 0.4, 0.0), comb(3, 2.0)}) {
        CHECK(integrate([&](double x) { return pdf_free(x, t, ens); }, -t, t) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(integrate([&](double v) { return pdf_momentum(v, ens); }, -1.0, 1.0) ==
              doctest::Approx(1.0).epsilon(1e-6));
    }
    CHECK(integrate([&](double x) { return gaussian_free_pdf(x, 500.0, 10.0, 10.0, -0.3); }, -2000.0, 2000.0) ==
          doctest::Approx(1.0).epsilon(1e-6));
    CHECK(integrate([&](double x) { return gaussian_faller_pdf(x, 200.0, 0.0, 5.0, 0.1, -0.001); }, -500.0,
                    500.0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(integrate([&](double x) { return gaussian_ho_pdf(x, 200.0, 5.0, 8.0, 0.2, 0.01); }, -500.0, 500.0) ==
          doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("bound-state pdfs integrate to one") {
    const double omega = 0.005;
    CHECK(integrate([&](double x) { return ho_single_pdf(x, 200.0, 0.0, omega); }, -168.2941, 168.2941) ==
          doctest::Approx(1.0).epsilon(1e-6));
    for (int n : {0, 1, 2, 4, 5}) {
        CHECK(integrate([&](double x) { return ho_stationary_pdf(x, n, 1e-3); }, -400.0, 400.0) ==
              doctest::Approx(1.0).epsilon(1e-6));
        CHECK(integrate([&](double v) { return ho_momentum_pdf(v, n, 1e-3); }, -0.3, 0.3) ==
              doctest::Approx(1.0).epsilon(1e-6));
    }
    for (int n : {1, 2, 3, 5}) {
        CHECK(integrate([&](double x) { return box_stationary_pdf(x, n, 10.0); }, -10.0, 10.0) ==
              doctest::Approx(1.0).epsilon(1e-6));
    }
    for (int n : {0, 1, 4}) {
        CHECK(integrate([&](double s) { return ring_stationary_pdf(s, n, 10.0); }, -10.0 * kPi, 10.0 * kPi) ==
              doctest::Approx(1.0).epsilon(1e-6));
    }
    for (int ell : {0, 2, 4}) {
        for (int m = 0; m <= ell; m += 2) {
            CHECK(2.0 * kPi * integrate([&](double th) { return sphere_stationary_weight(th, ell, m) * std::sin(th); },
                                        0.0, kPi) == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
}

TEST_CASE("cosine sums equal squared amplitude sums") {
    const double t = 137.0;
    for (const auto& ens : {two_slit(1.0, 0.5), two_slit(3.0, 0.2, 0.25, -0.1), comb(5, 2.0), plane_wave(6, 0.3)}) {
        for (double x = -150.0; x <= 150.0; x += 7.3) {
            CHECK(std::fabs(pdf_free(x, t, ens) - std::norm(amplitude_free(x, t, ens))) < 1e-12);
        }
        for (const auto& field : {ForceField::constant(-0.002), ForceField::harmonic(0.004)}) {
            const auto abc = abc_closed_form(field, t);
            for (double x = -150.0; x <= 150.0; x += 7.3) {
                CHECK(std::fabs(pdf_quadratic(x, ens, abc) - std::norm(amplitude_quadratic(x, ens, abc))) < 1e-12);
            }
        }
    }
    const auto e2 = comb_2d(3, 2.0, 1.0);
    for (double x1 = -20.0; x1 <= 20.0; x1 += 3.1) {
        for (double x2 = -20.0; x2 <= 20.0; x2 += 4.3) {
            CHECK(std::fabs(pdf_free_2d(x1, x2, 40.0, e2) - std::norm(amplitude_free_2d(x1, x2, 40.0, e2))) < 1e-12);
        }
    }
    for (double x = -300.0; x <= 300.0; x += 11.0) {
        CHECK(std::fabs(gaussian_free_pdf(x, 500.0, 10.0, 10.0, -0.3) -
                        std::norm(gaussian_free_amplitude(x, 500.0, 10.0, 10.0, -0.3))) < 1e-12);
    }
    for (double x1 = -90.0; x1 <= 90.0; x1 += 13.0) {
        for (double x2 = -90.0; x2 <= 90.0; x2 += 17.0) {
            CHECK(std::fabs(entangled_joint_pdf(x1, x2, 100.0, 2.0, 0.3, -0.2) -
                            std::norm(entangled_amplitude(x1, x2, 100.0, 1.0, 0.3, -0.2))) < 1e-12);
        }
    }
}

TEST_CASE("walk kernel is a normalized pmf with drift v") {
    for (double v : {-0.6, 0.0, 0.35}) {
        double sum = 0.0, mean = 0.0;
        for (std::int64_t x = -80; x <= 120; ++x) {
            const double p = walk_pmf(x, 100, 20, v);
            sum += p;
            mean += p * (x - 20);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(mean == doctest::Approx(100.0 * v).epsilon(1e-9).scale(1.0));
    }
    CHECK(walk_pmf(200, 100, 20, 0.3) == 0.0);
    const double avg = integrate([](double v) { return walk_pmf(7, 50, 0, v); }, -1.0, 1.0) / 2.0;
    CHECK(avg == doctest::Approx(single_source_pmf(50)).epsilon(1e-9));
}

TEST_CASE("Wigner function marginals") {
    const std::int64_t t = 500;
    const auto ens = two_slit(1.0, 0.1);
    const auto abc = abc_closed_form(ForceField{}, static_cast<double>(t));
    for (double v = -0.9; v <= 0.9; v += 0.15) {
        double sum = 0.0;
        for (std::int64_t x = -t - 1; x <= t + 1; ++x) sum += wigner(x, v, t, ens);
        CHECK(std::fabs(sum - pdf_momentum(v, ens)) < 1e-4);
    }
    for (std::int64_t x = -400; x <= 400; x += 37) {
        const double marginal = integrate([&](double v) { return wigner(x, v, t, ens); }, -1.0, 1.0);
        CHECK(std::fabs(marginal - position_from_momentum(static_cast<double>(x), ens, abc)) < 1e-4);
    }
}

TEST_CASE("momentum reconstruction of the free pdf") {
    const double t = 800.0;
    const auto ens = two_slit(1.0, 0.5);
    const auto abc = abc_closed_form(ForceField{}, t);
    for (double x = -700.0; x <= 700.0; x += 50.0) {
        CHECK(std::fabs(position_from_momentum(x, ens, abc) - pdf_free(x, t, ens)) < 2e-5);
    }
}

TEST_CASE("box propagation by images equals the eigenfunction expansion") {
    for (double t : {5.0, 80.0, 400.0}) {
        for (double x = -9.5; x <= 9.5; x += 1.5) {
            const auto a = box_gaussian_images(x, t, 10.0, 2.0, 2.0);
            const auto b = box_gaussian_eigen(x, t, 10.0, 2.0, 2.0);
            CHECK(std::abs(a - b) < 1e-8);
        }
    }
    // the image sum vanishes on the walls
    CHECK(std::abs(box_gaussian_images(10.0, 30.0, 10.0, 2.0, 2.0)) < 1e-12);
    CHECK(box_energy(3, 10.0) == doctest::Approx(9.0 / 800.0));
    CHECK(box_momentum_peak(5, 10.0) == doctest::Approx(0.25));
}

TEST_CASE("delta barrier transmission") {
    CHECK(tra_single(0.0) == 0.5);
    CHECK(tra_plane(0.0, -0.3) == 1.0);
    for (double lambda : {0.02, 0.1, 0.4, 2.0}) {
        CHECK(tra_single(lambda) < 0.5);
        CHECK(tra_single(lambda) > 0.0);
        // far from the source the single-source pdf integrates to the transmission
        const double t = 1e6, x0 = 10.0;
        const double left = integrate([&](double x) { return delta_single_pdf(x, t, x0, lambda); }, x0 - t, 0.0);
        CHECK(left == doctest::Approx(tra_single(lambda)).epsilon(1e-4));
    }
    const double t = 3000.0;
    for (double lambda : {0.0, 0.05, 0.1, 0.2}) {
        const double transmitted = integrate(
            [&](double x) { return std::norm(delta_gaussian_amplitude(x, t, 10.0, 10.0, -0.3, lambda)); }, -3000.0, 0.0);
        CHECK(std::fabs(transmitted - tra_plane(lambda, -0.3)) < 0.01);
    }
    for (double x = -50.0; x <= 50.0; x += 10.0) {
        CHECK(std::abs(delta_gaussian_amplitude(x, 100.0, 10.0, 10.0, -0.3, 0.0) -
                       gaussian_free_amplitude(x, 100.0, 10.0, 10.0, -0.3)) < 1e-15);
    }
}

TEST_CASE("stationarity of the oscillator states") {
    for (double x : {-30.0, 0.0, 12.0, 45.0}) {
        CHECK(ho_ground_residual(0.005, 137.0, x, 400) < 1e-3);
    }
    const double omega = 0.01;
    const auto field = ForceField::harmonic(omega);
    std::vector<double> xs;
    for (int x = -60; x <= 60; x += 3) xs.push_back(x);
    for (int n : {0, 1, 3}) {
        for (double t : {50.0, 120.0}) {
            CHECK(stationary_residual(ho_stationary(n, omega), abc_closed_form(field, t), xs) < 1e-3);
        }
    }
    CHECK(ho_energy(5, 1e-4) == doctest::Approx(5.5e-4 / kPi));
}

TEST_CASE("correlation and CHSH closed forms") {
    CHECK(correlation(0.0, 0.0) == doctest::Approx(1.0));
    CHECK(correlation(0.5, 0.0) == doctest::Approx(0.0).scale(1.0));
    CHECK(chsh_smax(kPi / 4) == doctest::Approx(2.0 * std::sqrt(2.0)));
    CHECK(chsh_smax(0.0) == doctest::Approx(2.0));
    for (double alpha : {0.0, 0.3, 0.75}) {
        CHECK(single_slit_detector_pdf(true, 100.0, alpha) + single_slit_detector_pdf(false, 100.0, alpha) ==
              doctest::Approx(0.01));
    }
}

TEST_CASE("peak locations") {
    CHECK(ring_momentum_peak(4, 10.0) == doctest::Approx(4.0 / (10.0 * kPi)));
    CHECK(sphere_theta_peak(4, 0, 1.0, 100.0) == doctest::Approx(std::sqrt(20.0) / (100.0 * kPi)));
    CHECK_THROWS_AS(sphere_theta_peak(2, 2, 0.3, 10.0), std::domain_error);
    CHECK(sphere_energy_peak(4, 100.0) == doctest::Approx(20.0 / (2.0 * kPi * kPi * 1e4)));
    CHECK(ring_plane_pdf(10.0) == doctest::Approx(1.0 / 63.0));
}

TEST_CASE("focal instants and bad arguments are rejected") {
    CHECK_THROWS_AS(pdf_free(0.0, 0.0, single_source(0.0)), std::domain_error);
    CHECK_THROWS_AS(ho_single_pdf(0.0, 0.0, 0.0, 0.01), std::domain_error);
    CHECK_THROWS_AS(tra_single(-1.0), std::domain_error);
    CHECK_THROWS_AS(walk_pmf(0, 10, 0, 1.5), std::domain_error);
    CHECK_THROWS_AS(box_eigenfunction(0, 10.0, 0.0), std::invalid_argument);
}
