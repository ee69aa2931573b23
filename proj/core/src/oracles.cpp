#include "qwalk/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qwalk/faddeeva.hpp"
#include "qwalk/lattice.hpp"

namespace qwalk {

namespace {

const Complex kI(0.0, 1.0);

Complex phase(double s) { return std::polar(1.0, kPi * s); }

double total_weight(const SourceEnsemble& ens) {
    double t = 0.0;
    for (const auto& s : ens.sources()) t += s.p;
    return t;
}

void require_positive_time(double t) {
    if (!(t > 0.0)) throw std::domain_error("lifetime must be positive");
}

}  // namespace

double pdf_free(double x, double t, const SourceEnsemble& ens) {
    require_positive_time(t);
    const auto& src = ens.sources();
    double acc = total_weight(ens);
    for (std::size_t i = 0; i < src.size(); ++i) {
        for (std::size_t j = 0; j < src.size(); ++j) {
            if (i == j) continue;
            const double delta = src[i].x[0] - src[j].x[0];
            const double mid = 0.5 * (src[i].x[0] + src[j].x[0]);
            acc += std::sqrt(src[i].p * src[j].p) *
                   std::cos(kPi * delta * (x - mid) / t - kPi * (src[i].eps - src[j].eps));
        }
    }
    return acc / (2.0 * t);
}

Complex amplitude_free(double x, double t, const SourceEnsemble& ens) {
    require_positive_time(t);
    Complex psi = 0.0;
    for (const auto& s : ens.sources()) {
        const double dx = x - s.x[0];
        psi += std::sqrt(s.p / (2.0 * t)) * phase(dx * dx / (2.0 * t) + s.eps);
    }
    return psi;
}

double pdf_free_2d(double x1, double x2, double t, const SourceEnsemble& ens) {
    require_positive_time(t);
    const auto& src = ens.sources();
    double acc = total_weight(ens);
    for (std::size_t i = 0; i < src.size(); ++i) {
        for (std::size_t j = 0; j < src.size(); ++j) {
            if (i == j) continue;
            double arg = 0.0;
            const double xs[2] = {x1, x2};
            for (int d = 0; d < 2; ++d) {
                const double delta = src[i].x[d] - src[j].x[d];
                const double mid = 0.5 * (src[i].x[d] + src[j].x[d]);
                arg += delta * (xs[d] - mid) / t;
            }
            acc += std::sqrt(src[i].p * src[j].p) * std::cos(kPi * arg - kPi * (src[i].eps - src[j].eps));
        }
    }
    return acc / (4.0 * t * t);
}

Complex amplitude_free_2d(double x1, double x2, double t, const SourceEnsemble& ens) {
    require_positive_time(t);
    Complex psi = 0.0;
    for (const auto& s : ens.sources()) {
        const double d1 = x1 - s.x[0];
        const double d2 = x2 - s.x[1];
        psi += std::sqrt(s.p) / (2.0 * t) * phase((d1 * d1 + d2 * d2) / (2.0 * t) + s.eps);
    }
    return psi;
}

double quadratic_action(double x, double x0, double eps, const AbcPoint& k) {
    if (k.B == 0.0) throw std::domain_error("focal instant: B(t) = 0");
    const double num = k.A * x0 * x0 - 2.0 * x * x0 + 2.0 * k.C * x0 + k.dB * x * x +
                       (2.0 * k.dC * k.B - 2.0 * k.dB * k.C) * x + 2.0 * k.C * k.C * k.dB;
    return num / (2.0 * k.B) + eps;
}

double pdf_quadratic(double x, const SourceEnsemble& ens, const AbcPoint& k) {
    if (k.B == 0.0) throw std::domain_error("focal instant: B(t) = 0");
    const auto& src = ens.sources();
    double acc = total_weight(ens);
    for (std::size_t i = 0; i < src.size(); ++i) {
        for (std::size_t j = 0; j < src.size(); ++j) {
            if (i == j) continue;
            const double delta = src[i].x[0] - src[j].x[0];
            const double mid = 0.5 * (src[i].x[0] + src[j].x[0]);
            acc += std::sqrt(src[i].p * src[j].p) *
                   std::cos(kPi * delta * (x - k.A * mid - k.C) / k.B - kPi * (src[i].eps - src[j].eps));
        }
    }
    return acc / (2.0 * std::fabs(k.B));
}

Complex amplitude_quadratic(double x, const SourceEnsemble& ens, const AbcPoint& k) {
    Complex psi = 0.0;
    for (const auto& s : ens.sources()) {
        psi += std::sqrt(s.p / (2.0 * std::fabs(k.B))) * phase(quadratic_action(x, s.x[0], s.eps, k));
    }
    return psi;
}

double walk_pmf(std::int64_t x, std::int64_t t, std::int64_t x0, double v) {
    if (t < 0) throw std::domain_error("negative lifetime");
    if (v < -1.0 || v > 1.0) throw std::domain_error("propensity outside [-1, 1]");
    const std::int64_t d = x - x0;
    if (d > t || d < -t) return 0.0;
    const double up = static_cast<double>(t + d);
    const double down = static_cast<double>(t - d);
    double lw = std::lgamma(2.0 * t + 1.0) - std::lgamma(up + 1.0) - std::lgamma(down + 1.0) -
                static_cast<double>(t) * std::log(4.0);
    if (up > 0.0) {
        if (v == -1.0) return 0.0;
        lw += up * std::log1p(v);
    }
    if (down > 0.0) {
        if (v == 1.0) return 0.0;
        lw += down * std::log1p(-v);
    }
    return std::exp(lw);
}

double gaussian_free_pdf(double x, double t, double centre, double width, double v_phi) {
    return gaussian_faller_pdf(x, t, centre, width, v_phi, 0.0);
}

double gaussian_faller_pdf(double x, double t, double centre, double width, double v_phi, double phi) {
    const double spread = width * width * (1.0 + t * t / (kPi * kPi * std::pow(width, 4)));
    const double dx = x - centre - v_phi * t - phi * t * t / 2.0;
    return std::exp(-dx * dx / spread) / std::sqrt(kPi * spread);
}

double gaussian_ho_pdf(double x, double t, double centre, double width, double v_phi, double omega) {
    if (omega == 0.0) return gaussian_free_pdf(x, t, centre, width, v_phi);
    const double c = std::cos(omega * t);
    const double s = std::sin(omega * t);
    const double q = 1.0 / (kPi * omega * width);
    const double spread = width * width * c * c + q * q * s * s;
    const double dx = x - centre * c - v_phi * s / omega;
    return std::exp(-dx * dx / spread) / std::sqrt(kPi * spread);
}

Complex gaussian_free_amplitude(double x, double t, double centre, double width, double v_phi) {
    const Complex mu = width * width + kI * t / kPi;
    const double dx = x - centre - v_phi * t;
    return std::sqrt(width / (std::sqrt(kPi) * mu)) *
           std::exp(-dx * dx / (2.0 * mu) + kI * kPi * v_phi * x - kI * kPi * v_phi * v_phi * t / 2.0);
}

double ho_single_pdf(double x, double t, double x0, double omega) {
    const double s = std::sin(omega * t);
    if (s == 0.0) throw std::domain_error("focal instant: sin(omega t) = 0");
    const double centre = x0 * std::cos(omega * t);
    const double reach = std::fabs(s) / omega;
    if (x < centre - reach || x > centre + reach) return 0.0;
    return omega / (2.0 * std::fabs(s));
}

double ho_stationary_pdf(double x, int n, double omega) { return ho_weight(n, omega, x); }

double ho_momentum_pdf(double v, int n, double omega) {
    const double y = std::sqrt(kPi / omega) * v;
    const double h = std::hermite(static_cast<unsigned>(n), y);
    return h * h * std::exp(-y * y) / (std::ldexp(std::tgamma(n + 1.0), n) * std::sqrt(omega));
}

double pdf_momentum(double v, const SourceEnsemble& ens) {
    Complex acc = 0.0;
    for (const auto& s : ens.sources()) acc += std::sqrt(s.p) * phase(s.x[0] * v - s.eps);
    return 0.5 * std::norm(acc);
}

double position_from_momentum(double x, const SourceEnsemble& ens, const AbcPoint& k) {
    if (k.B == 0.0) throw std::domain_error("focal instant: B(t) = 0");
    double acc = 0.0;
    for (const auto& s : ens.sources()) {
        if (s.image) continue;
        const double v = (x - k.A * s.x[0] - k.C) / k.B;
        if (v < -1.0 || v > 1.0) continue;
        acc += s.p * pdf_momentum(v, ens);
    }
    return acc / std::fabs(k.B);
}

double box_eigenfunction(int n, double a, double x) {
    if (n < 1) throw std::invalid_argument("box level must be >= 1");
    const double arg = n * kPi * x / (2.0 * a);
    return ((n % 2 == 1) ? std::cos(arg) : std::sin(arg)) / std::sqrt(a);
}

double box_energy(int n, double a) { return n * n / (8.0 * a * a); }

double box_stationary_pdf(double x, int n, double a) {
    if (x < -a || x > a) return 0.0;
    const double psi = box_eigenfunction(n, a, x);
    return psi * psi;
}

double box_momentum_peak(int n, double a) { return n / (2.0 * a); }

Complex box_kernel_images(double x, double t, double x0, double a, int images) {
    require_positive_time(t);
    Complex acc = 0.0;
    for (int l = -images; l <= images; ++l) {
        const double sgn = (l % 2 == 0) ? 1.0 : -1.0;
        const double y = 2.0 * l * a + sgn * x0;
        acc += sgn * phase((x - y) * (x - y) / (2.0 * t));
    }
    return acc * std::exp(-kI * kPi / 4.0) / std::sqrt(2.0 * t);
}

Complex box_kernel_eigen(double x, double t, double x0, double a, int levels) {
    Complex acc = 0.0;
    for (int n = 1; n <= levels; ++n) {
        acc += phase(-box_energy(n, a) * t) * box_eigenfunction(n, a, x0) * box_eigenfunction(n, a, x);
    }
    return acc;
}

Complex box_gaussian_eigen(double x, double t, double a, double centre, double width) {
    const double norm = std::pow(1.0 / (kPi * width * width), 0.25) * std::sqrt(2.0 * kPi) * width / std::sqrt(a);
    Complex acc = 0.0;
    for (int n = 1;; ++n) {
        const double k = n * kPi / (2.0 * a);
        const double damp = std::exp(-k * k * width * width / 2.0);
        if (damp < 1e-18) break;
        const double c = norm * damp * ((n % 2 == 1) ? std::cos(k * centre) : std::sin(k * centre));
        acc += c * phase(-box_energy(n, a) * t) * box_eigenfunction(n, a, x);
    }
    return acc;
}

Complex box_gaussian_images(double x, double t, double a, double centre, double width) {
    const Complex mu = width * width + kI * t / kPi;
    const Complex pre = std::pow(1.0 / (kPi * width * width), 0.25) * std::sqrt(width * width / mu);
    auto term = [&](int l) {
        const double sgn = (l % 2 == 0) ? 1.0 : -1.0;
        const double c = 2.0 * l * a + sgn * centre;
        return sgn * pre * std::exp(-(x - c) * (x - c) / (2.0 * mu));
    };
    Complex acc = term(0);
    for (int l = 1;; ++l) {
        const Complex up = term(l);
        const Complex down = term(-l);
        acc += up + down;
        if (std::abs(up) + std::abs(down) < 1e-17 && std::abs(2.0 * l * a) > std::fabs(x) + std::fabs(centre)) break;
    }
    return acc;
}

double tra_single(double lambda) {
    if (lambda < 0.0) throw std::domain_error("negative barrier strength");
    if (lambda == 0.0) return 0.5;
    const double c = lambda * kPi;
    return 0.5 - 0.5 * c * std::atan(1.0 / c);
}

double tra_plane(double lambda, double v_phi) {
    if (v_phi == 0.0) throw std::domain_error("plane-wave transmission needs v_phi != 0");
    const double r = kPi * lambda / v_phi;
    return 1.0 / (1.0 + r * r);
}

double delta_single_pdf(double x, double t, double x0, double lambda) {
    require_positive_time(t);
    const double c2 = lambda * lambda * kPi * kPi * t * t;
    if (x < 0.0) {
        const double d2 = (x - x0) * (x - x0);
        return d2 == 0.0 && c2 == 0.0 ? 1.0 / (2.0 * t) : d2 / (c2 + d2) / (2.0 * t);
    }
    const double s2 = (x + x0) * (x + x0);
    return (s2 + 2.0 * c2) / (s2 + c2) / (2.0 * t);
}

Complex delta_gaussian_amplitude(double x, double t, double centre, double width, double v_phi, double lambda) {
    const Complex psi0 = gaussian_free_amplitude(x, t, centre, width, v_phi);
    if (lambda == 0.0) return psi0;
    const Complex mu = width * width + kI * t / kPi;
    const double d2 = width * width;
    const Complex D = (kPi * kPi * lambda * mu + (centre + std::fabs(x)) + kI * kPi * v_phi * d2) / std::sqrt(2.0 * mu);
    const Complex tail = erfcx(D) * std::exp((x + std::fabs(x)) / mu * (-kI * kPi * v_phi * d2 - centre));
    const Complex psi1 = 1.0 - kPi * kPi * lambda * std::sqrt(kPi * mu / 2.0) * tail;
    return psi0 * psi1;
}

double ring_momentum_peak(int m, double r) { return m / (kPi * r); }

double ring_plane_pdf(double r) { return 1.0 / (std::floor(2.0 * kPi * r) + 1.0); }

double ring_stationary_pdf(double s, int n, double r) {
    if (n == 0) return 1.0 / (2.0 * kPi * r);
    const double phi = s / r;
    const double a = (n % 2 != 0) ? std::sin(n * phi) : std::cos(n * phi);
    return a * a / (kPi * r);
}

double sphere_stationary_weight(double theta, int ell, int m) {
    const double p = std::assoc_legendre(static_cast<unsigned>(ell), static_cast<unsigned>(m), std::cos(theta));
    return (2.0 * ell + 1.0) / (4.0 * kPi) * std::tgamma(ell - m + 1.0) / std::tgamma(ell + m + 1.0) * p * p;
}

double sphere_theta_peak(int ell, int m, double theta, double r) {
    const double s = std::sin(theta);
    const double arg = ell * (ell + 1.0) - (m == 0 ? 0.0 : m * m / (s * s));
    if (arg < 0.0) throw std::domain_error("no latitudinal peak at this colatitude");
    return std::sqrt(arg) / (kPi * r);
}

double sphere_energy_peak(int ell, double r) { return ell * (ell + 1.0) / (2.0 * kPi * kPi * r * r); }

double wigner(std::int64_t x, double v, std::int64_t t, const SourceEnsemble& ens) {
    const double rv = pdf_momentum(v, ens);
    double acc = 0.0;
    for (const auto& s : ens.sources()) {
        if (s.image) continue;
        acc += s.p * walk_pmf(x, t, std::llround(s.x[0]), v);
    }
    return acc * rv;
}

double entangled_joint_pdf(double x1, double x2, double t, double delta, double eps1, double eps2) {
    require_positive_time(t);
    return (1.0 + std::cos(kPi * (eps2 - eps1) + kPi * delta * (x1 - x2) / t)) / (4.0 * t * t);
}

Complex entangled_amplitude(double x1, double x2, double t, double half_separation, double eps1, double eps2) {
    require_positive_time(t);
    const double a = half_separation;
    auto psi = [&](double x, double src, double eps) {
        return phase((x - src) * (x - src) / (2.0 * t) + eps) / std::sqrt(2.0 * t);
    };
    // source a = +D carries the branch phase, source b = -D carries none
    return (psi(x1, a, eps1) * psi(x2, -a, 0.0) + psi(x1, -a, 0.0) * psi(x2, a, eps2)) / std::sqrt(2.0);
}

double correlation(double alpha, double beta) { return std::cos(kPi * (beta - alpha)); }

double chsh_smax(double theta) { return 3.0 * std::cos(theta) - std::cos(3.0 * theta); }

double single_slit_detector_pdf(bool plus, double t, double alpha) {
    return (1.0 + (plus ? 1.0 : -1.0) * std::sin(kPi * alpha)) / (2.0 * t);
}

double stationary_residual(const SourceEnsemble& ens, const AbcPoint& abc, const std::vector<double>& xs) {
    std::map<std::int64_t, double> weight;
    for (const auto& s : ens.sources()) {
        if (!s.image) weight[std::llround(s.x[0])] += s.p;
    }
    double peak = 0.0;
    for (const auto& [k, p] : weight) peak = std::max(peak, p);
    double worst = 0.0;
    for (double x : xs) {
        auto it = weight.find(std::llround(x));
        const double target = it == weight.end() ? 0.0 : it->second;
        const double rho = std::norm(amplitude_quadratic(x, ens, abc));
        worst = std::max(worst, std::fabs(rho - target));
    }
    return worst / peak;
}

double ho_ground_residual(double omega, double t, double x, std::int64_t reach) {
    const double s = std::sin(omega * t);
    const double c = std::cos(omega * t);
    if (s == 0.0) throw std::domain_error("focal instant: sin(omega t) = 0");
    Complex acc = 0.0;
    for (std::int64_t k = -reach; k <= reach; ++k) {
        const double y = static_cast<double>(k);
        acc += std::pow(omega, 0.25) * std::exp(-kPi * omega * y * y / 2.0) *
               phase(omega / s * (y * y * c / 2.0 - x * y));
    }
    const double closed = 2.0 / std::sqrt(omega) * std::exp(-kPi * omega * x * x) * s;
    return std::fabs(std::norm(acc) - closed) / std::fabs(closed);
}

double integrate(const std::function<double(double)>& f, double lo, double hi) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-12);
}

double action_pmf(std::int64_t sigma, std::int64_t x, std::int64_t t, std::int64_t x0) {
    if (t < 0) throw std::domain_error("negative lifetime");
    const std::int64_t d = x - x0;
    if (d > t || d < -t) return 0.0;
    if (sigma < 0 || sigma > t || ((sigma + d) % 2 != 0) || sigma < (d < 0 ? -d : d)) return 0.0;
    const std::int64_t plus = (sigma + d) / 2;
    const std::int64_t minus = sigma - plus;
    const std::int64_t zeros = t - sigma;
    auto lchoose = [](double n, double k) { return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1); };
    const double lw = static_cast<double>(zeros) * std::log(2.0) + lchoose(static_cast<double>(t), static_cast<double>(plus)) +
                      lchoose(static_cast<double>(t - plus), static_cast<double>(minus)) -
                      lchoose(2.0 * t, static_cast<double>(t + d));
    return std::exp(lw);
}

}  // namespace qwalk
