#include "qwalk/accelerated.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>

#include "qwalk/lattice.hpp"
#include "qwalk/numeric.hpp"

namespace qwalk {

namespace {

constexpr double kIntegerTol = 1e-9;

bool is_integer(double d) { return std::fabs(d - std::round(d)) < kIntegerTol; }

}  // namespace

PairKernel::PairKernel(const SourceEnsemble& ensemble, int axis) {
    if (axis < 0 || axis >= ensemble.dims()) throw std::invalid_argument("kernel axis out of range");
    const auto& src = ensemble.sources();
    std::map<std::pair<double, double>, double> direct;
    for (std::size_t i = 0; i < src.size(); ++i) {
        for (std::size_t j = 0; j < src.size(); ++j) {
            if (i == j) continue;
            double d = src[i].x[axis] - src[j].x[axis];
            double eps = src[i].eps - src[j].eps;
            const double w = std::sqrt(src[i].p * src[j].p);
            if (w == 0.0) continue;
            if (d == 0.0) continue;
            if (d < 0.0) {
                d = -d;
                eps = -eps;
            }
            weight_sum_ += w;
            bound_ += w / (kPi * d);
            if (is_integer(d)) {
                const auto m = static_cast<std::size_t>(std::llround(d));
                if (harmonics_.size() < m) harmonics_.resize(m);
                harmonics_[m - 1].a += w * std::cos(kPi * eps) / (kPi * static_cast<double>(m));
                harmonics_[m - 1].b += w * std::sin(kPi * eps) / (kPi * static_cast<double>(m));
            } else {
                direct[{d, wrap_unit(eps)}] += w;
            }
        }
    }
    for (const auto& [key, w] : direct) direct_.push_back({key.first, key.second, w});
    if (!empty()) {
        constexpr int kSamples = 4000;
        for (int k = 0; k <= kSamples; ++k) {
            max_slope_ = std::max(max_slope_, slope(-1.0 + 2.0 * k / kSamples));
        }
    }
}

double PairKernel::force(double q) const {
    double f = 0.0;
    if (!harmonics_.empty()) {
        const std::complex<double> z(std::cos(kPi * q), std::sin(kPi * q));
        std::complex<double> zm = z;
        for (const auto& h : harmonics_) {
            f += h.a * zm.imag() - h.b * zm.real();
            zm *= z;
        }
    }
    for (const auto& d : direct_) f += d.w * std::sin(kPi * (d.d * q - d.eps)) / (kPi * d.d);
    return f;
}

double PairKernel::slope(double q) const {
    double s = 0.0;
    if (!harmonics_.empty()) {
        const std::complex<double> z(std::cos(kPi * q), std::sin(kPi * q));
        std::complex<double> zm = z;
        double m = 1.0;
        for (const auto& h : harmonics_) {
            s += kPi * m * (h.a * zm.real() + h.b * zm.imag());
            zm *= z;
            m += 1.0;
        }
    }
    for (const auto& d : direct_) s += d.w * std::cos(kPi * (d.d * q - d.eps));
    return s;
}

namespace {

// Bisection with Newton steps kept inside the bracket.
double polish_root(const PairKernel& k, double v0, double lo, double hi, int& iters) {
    auto g = [&](double v) { return v - v0 + k.force(v); };
    double glo = g(lo);
    if (glo == 0.0) return lo;
    double x = 0.5 * (lo + hi);
    for (iters = 0; iters < 200; ++iters) {
        const double gx = g(x);
        if (std::fabs(gx) < 1e-13 || hi - lo < 1e-14) return x;
        if ((gx < 0) == (glo < 0)) {
            lo = x;
            glo = gx;
        } else {
            hi = x;
        }
        const double dg = 1.0 + k.slope(x);
        double nx = dg != 0.0 ? x - gx / dg : 0.5 * (lo + hi);
        if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
        x = nx;
    }
    return x;
}

}  // namespace

VqSolution solve_vq(double v0, const PairKernel& kernel) {
    VqSolution out;
    if (kernel.empty()) {
        out.vq = v0;
        return out;
    }
    auto g = [&](double v) { return v - v0 + kernel.force(v); };
    out.monotone = kernel.weight_sum() <= 1.0;
    if (out.monotone) {
        double lo = -1.0, hi = 1.0;
        if (g(lo) > 0.0 || g(hi) < 0.0) {
            lo = v0 - kernel.bound();
            hi = v0 + kernel.bound();
            out.fallback = true;
        }
        out.vq = polish_root(kernel, v0, lo, hi, out.iterations);
        return out;
    }
    // Scan outwards from v0 for the nearest sign change.
    const double reach = kernel.bound();
    const double step = std::min(1e-3, reach / 64.0);
    const double g0 = g(v0);
    if (g0 == 0.0) {
        out.vq = v0;
        return out;
    }
    double best = v0;
    bool found = false;
    double prev_l = v0, prev_r = v0, gl = g0, gr = g0;
    for (double off = step; off <= reach + step && !found; off += step) {
        const double r = v0 + off;
        const double l = v0 - off;
        const double gr_new = g(r);
        const double gl_new = g(l);
        if ((gr_new < 0) != (gr < 0)) {
            best = polish_root(kernel, v0, prev_r, r, out.iterations);
            found = true;
        }
        if ((gl_new < 0) != (gl < 0)) {
            const double cand = polish_root(kernel, v0, l, prev_l, out.iterations);
            if (!found || std::fabs(cand - v0) < std::fabs(best - v0)) best = cand;
            found = true;
        }
        prev_r = r;
        prev_l = l;
        gr = gr_new;
        gl = gl_new;
    }
    if (!found) throw std::runtime_error("solve_vq: no root within the force bound");
    out.vq = best;
    return out;
}

MomentumInverse::MomentumInverse(const PairKernel& kernel, std::size_t grid) {
    if (grid < 3) throw std::invalid_argument("momentum grid too small");
    v_.resize(grid);
    cdf_.resize(grid);
    const double h = 2.0 / static_cast<double>(grid - 1);
    double prev = std::max(0.0, 1.0 + kernel.slope(-1.0));
    v_[0] = -1.0;
    cdf_[0] = 0.0;
    for (std::size_t k = 1; k < grid; ++k) {
        v_[k] = -1.0 + h * static_cast<double>(k);
        const double cur = std::max(0.0, 1.0 + kernel.slope(v_[k]));
        cdf_[k] = cdf_[k - 1] + 0.5 * h * (prev + cur);
        prev = cur;
    }
    const double total = cdf_.back();
    if (total <= 0.0) throw std::runtime_error("momentum density vanishes on [-1, 1]");
    for (auto& c : cdf_) c = -1.0 + 2.0 * c / total;
}

double MomentumInverse::operator()(double v0) const {
    if (v_.empty()) return v0;
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), v0);
    if (it == cdf_.begin()) return v_.front();
    if (it == cdf_.end()) return v_.back();
    const std::size_t k = static_cast<std::size_t>(it - cdf_.begin());
    const double c0 = cdf_[k - 1], c1 = cdf_[k];
    const double w = c1 > c0 ? (v0 - c0) / (c1 - c0) : 0.5;
    return v_[k - 1] + w * (v_[k] - v_[k - 1]);
}

std::int64_t stable_lag(const PairKernel& kernel) {
    const auto bound = static_cast<std::int64_t>(std::ceil(1.0 + kernel.max_slope()));
    return std::max(kDefaultLag, bound);
}

double expected_trajectory(double x0, double vq, const AbcPoint& abc) { return abc.A * x0 + abc.B * vq + abc.C; }

TrainedResult run_trained(const PairKernel& kernel, const ForceField& field, const TrainedOptions& options,
                          std::int64_t x0, double v0, std::int64_t n_t, Rng& rng, TrainedTrace* trace) {
    if (n_t < 1) throw std::invalid_argument("run length must be >= 1");
    const double n_tau = static_cast<double>(options.n_tau > 0 ? options.n_tau : stable_lag(kernel));
    const bool has_field = field.kind != FieldKind::none;
    TrainedResult r;
    r.x = x0;
    double q = v0;
    double u = kernel.empty() ? v0 : v0 - kernel.force(q);
    double vf = 0.0;
    int sigma = 1;
    // The kernel is 2-periodic in momentum, so roots outside [-1, 1] are
    // read modulo 2.
    auto reduced = [&](double m) { return kernel.empty() ? m : wrap_unit(m); };
    for (std::int64_t n = 0; n < n_t; ++n) {
        const double prop = clamp_unit(sigma * reduced(u) + vf);
        const auto p = step_probabilities(prop);
        const double w = rng.uniform();
        r.x += w < p.plus ? 1 : (w < p.plus + p.zero ? 0 : -1);
        if (has_field) vf += field.at(r.x);
        if (options.box) {
            const std::int64_t a = *options.box;
            const double vq = sigma * reduced(u);
            if ((r.x >= a && vq > 0.0) || (r.x <= -a && vq < 0.0)) {
                sigma = -sigma;
                ++r.wall_hits;
            }
        }
        if (!kernel.empty()) {
            u = v0 - kernel.force(q);
            q = q * (n_tau - 1.0) / n_tau + u / n_tau;
        }
        if (trace) {
            trace->x.push_back(r.x);
            trace->u.push_back(u);
            trace->q.push_back(q);
        }
    }
    r.u = u;
    r.q = q;
    r.vq = sigma * reduced(u);
    return r;
}

}  // namespace qwalk
