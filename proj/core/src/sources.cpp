#include "qwalk/sources.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qwalk/numeric.hpp"

namespace qwalk {

SourceEnsemble::SourceEnsemble(int dims, std::vector<Source> sources) : dims_(dims), sources_(std::move(sources)) {
    if (dims_ < 1 || dims_ > 2) throw std::invalid_argument("source ensembles support 1 or 2 dimensions");
    double total = 0.0;
    for (std::size_t k = 0; k < sources_.size(); ++k) {
        if (sources_[k].p < 0.0) throw std::invalid_argument("negative source probability");
        if (!sources_[k].image) {
            emitters_.push_back(k);
            total += sources_[k].p;
        }
    }
    if (emitters_.empty() || total <= 0.0) throw std::invalid_argument("source ensemble has no emitting mass");
    for (auto& s : sources_) s.p /= total;
    cdf_.reserve(emitters_.size());
    double acc = 0.0;
    for (auto k : emitters_) {
        acc += sources_[k].p;
        cdf_.push_back(acc);
    }
    cdf_.back() = 1.0;
}

void SourceEnsemble::build_pairs() {
    pairs_.clear();
    const std::size_t n = sources_.size();
    pairs_.reserve(n * (n > 0 ? n - 1 : 0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            PairEntry e;
            e.i = i;
            e.j = j;
            bool zero = true;
            for (int d = 0; d < dims_; ++d) {
                e.delta[d] = sources_[i].x[d] - sources_[j].x[d];
                if (e.delta[d] != 0.0) zero = false;
            }
            if (zero) throw std::invalid_argument("two sources share a location");
            e.eps = sources_[i].eps - sources_[j].eps;
            e.p = sources_[i].p * sources_[j].p;
            pairs_.push_back(e);
        }
    }
    pairs_built_ = true;
}

std::size_t SourceEnsemble::pair_count() const {
    const std::size_t n = sources_.size();
    return n * (n > 0 ? n - 1 : 0);
}

std::size_t SourceEnsemble::pick(double u) const {
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return emitters_[static_cast<std::size_t>(it - cdf_.begin())];
}

SourceDraw SourceEnsemble::sample(Rng& rng) const {
    SourceDraw d;
    d.index = emitters_.size() == 1 ? emitters_.front() : pick(rng.uniform());
    const Source& s = sources_[d.index];
    d.x0 = s.x;
    d.eps = s.eps;
    for (int k = 0; k < dims_; ++k) d.v0[k] = rng.uniform(-1.0, 1.0);
    return d;
}

double SourceEnsemble::total_probability() const {
    double t = 0.0;
    for (auto k : emitters_) t += sources_[k].p;
    return t;
}

double SourceEnsemble::pair_weight_sum() const {
    double root_sum = 0.0;
    double p_sum = 0.0;
    for (const auto& s : sources_) {
        root_sum += std::sqrt(s.p);
        p_sum += s.p;
    }
    return root_sum * root_sum - p_sum;
}

void SourceEnsemble::shift_phases(double c) {
    for (auto& s : sources_) s.eps += c;
    for (auto& e : pairs_) e.eps = sources_[e.i].eps - sources_[e.j].eps;
}

SourceEnsemble single_source(double x0) { return SourceEnsemble(1, {Source{{x0, 0.0}, 1.0, 0.0, false}}); }

SourceEnsemble single_source_2d(double x1, double x2) {
    return SourceEnsemble(2, {Source{{x1, x2}, 1.0, 0.0, false}});
}

SourceEnsemble two_slit(double half_separation, double p_plus, double eps_plus, double eps_minus) {
    if (half_separation <= 0.0) throw std::invalid_argument("slit half-separation must be positive");
    if (p_plus <= 0.0 || p_plus >= 1.0) throw std::invalid_argument("slit probability must lie in (0, 1)");
    return SourceEnsemble(1, {Source{{-half_separation, 0.0}, 1.0 - p_plus, eps_minus, false},
                              Source{{half_separation, 0.0}, p_plus, eps_plus, false}});
}

SourceEnsemble comb(int n, double a) {
    if (n < 1) throw std::invalid_argument("comb needs at least one source");
    std::vector<Source> s;
    for (int k = 0; k < n; ++k) {
        const double pos = (k - (n - 1) / 2.0) * a;
        s.push_back({{pos, 0.0}, 1.0, 0.0, false});
    }
    return SourceEnsemble(1, std::move(s));
}

SourceEnsemble comb_2d(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("comb needs at least one source");
    std::vector<Source> s;
    for (int k = 0; k < n; ++k) {
        const double c = k - (n - 1) / 2.0;
        s.push_back({{c * a, c * b}, 1.0, 0.0, false});
    }
    return SourceEnsemble(2, std::move(s));
}

SourceEnsemble plane_wave(std::int64_t ell, double v_phi) {
    if (ell < 0) throw std::invalid_argument("plane wave length must be non-negative");
    std::vector<Source> s;
    const std::int64_t lo = -ell / 2;
    for (std::int64_t k = lo; k <= lo + ell; ++k) {
        s.push_back({{static_cast<double>(k), 0.0}, 1.0, static_cast<double>(k) * v_phi, false});
    }
    return SourceEnsemble(1, std::move(s));
}

SourceEnsemble gaussian(double centre, double width, double v_phi) {
    if (width <= 0.0) throw std::invalid_argument("gaussian width must be positive");
    std::vector<Source> s;
    const auto lo = static_cast<std::int64_t>(std::ceil(centre - 3.0 * width));
    const auto hi = static_cast<std::int64_t>(std::floor(centre + 3.0 * width));
    const double norm = std::sqrt(1.0 / (kPi * width * width));
    for (std::int64_t k = lo; k <= hi; ++k) {
        const double dk = static_cast<double>(k) - centre;
        const double p = norm * std::exp(-dk * dk / (width * width));
        if (p < kPruneThreshold) continue;
        s.push_back({{static_cast<double>(k), 0.0}, p, dk * v_phi, false});
    }
    return SourceEnsemble(1, std::move(s));
}

double ho_amplitude(int n, double omega, double x) {
    if (n < 0) throw std::invalid_argument("oscillator level must be non-negative");
    const double y = std::sqrt(kPi * omega) * x;
    const double norm = std::pow(omega, 0.25) / std::sqrt(std::ldexp(std::tgamma(n + 1.0), n));
    return norm * std::hermite(static_cast<unsigned>(n), y) * std::exp(-y * y / 2.0);
}

double ho_weight(int n, double omega, double x) {
    const double a = ho_amplitude(n, omega, x);
    return a * a;
}

SourceEnsemble ho_stationary(int n, double omega) {
    if (omega <= 0.0) throw std::invalid_argument("oscillator frequency must be positive");
    std::vector<Source> s;
    // the weight decays as exp(-pi omega x^2); beyond this reach it is far below the threshold
    const auto reach = static_cast<std::int64_t>(std::ceil((std::sqrt(2.0 * n + 1.0) + 6.0) / std::sqrt(kPi * omega)));
    for (std::int64_t k = -reach; k <= reach; ++k) {
        const double a = ho_amplitude(n, omega, static_cast<double>(k));
        if (a * a < kPruneThreshold) continue;
        s.push_back({{static_cast<double>(k), 0.0}, a * a, sign_phase(a), false});
    }
    return SourceEnsemble(1, std::move(s));
}

namespace {

double box_amplitude(int n, double a, double x) {
    const double arg = n * kPi * x / (2.0 * a);
    return (n % 2 == 1) ? std::cos(arg) : std::sin(arg);
}

void add_box_images(std::vector<Source>& out, const std::vector<Source>& base, std::int64_t a, int images) {
    for (int l = -images; l <= images; ++l) {
        if (l == 0) continue;
        const double sgn = (l % 2 == 0) ? 1.0 : -1.0;
        for (const auto& b : base) {
            Source img = b;
            img.x[0] = 2.0 * l * static_cast<double>(a) + sgn * b.x[0];
            img.eps = b.eps + (sgn < 0 ? 1.0 : 0.0);
            img.image = true;
            out.push_back(img);
        }
    }
}

}  // namespace

SourceEnsemble box_stationary(int n, std::int64_t a, int images) {
    if (n < 1 || a < 1 || images < 0) throw std::invalid_argument("bad box stationary parameters");
    std::vector<Source> base;
    for (std::int64_t x = -a; x <= a; ++x) {
        const double amp = box_amplitude(n, static_cast<double>(a), static_cast<double>(x));
        const double p = amp * amp / static_cast<double>(a);
        if (p < kPruneThreshold) continue;
        base.push_back({{static_cast<double>(x), 0.0}, p, sign_phase(amp), false});
    }
    std::vector<Source> all = base;
    add_box_images(all, base, a, images);
    return SourceEnsemble(1, std::move(all));
}

SourceEnsemble box_single(double x0, std::int64_t a, int images) {
    if (std::fabs(x0) >= static_cast<double>(a)) throw std::invalid_argument("box source must lie strictly inside");
    std::vector<Source> base{{{x0, 0.0}, 1.0, 0.0, false}};
    std::vector<Source> all = base;
    add_box_images(all, base, a, images);
    return SourceEnsemble(1, std::move(all));
}

SourceEnsemble ring_plane_wave(std::int64_t r, int m) {
    if (r < 1) throw std::invalid_argument("ring radius must be >= 1");
    std::vector<Source> s;
    const auto half = static_cast<std::int64_t>(std::floor(kPi * static_cast<double>(r)));
    for (std::int64_t k = -half; k <= half; ++k) {
        const double phi = static_cast<double>(k) / static_cast<double>(r);
        s.push_back({{static_cast<double>(k), 0.0}, 1.0, m * phi / kPi, false});
    }
    return SourceEnsemble(1, std::move(s));
}

SourceEnsemble ring_stationary(std::int64_t r, int n) {
    if (r < 1 || n < 0) throw std::invalid_argument("bad ring stationary parameters");
    std::vector<Source> s;
    const auto half = static_cast<std::int64_t>(std::floor(kPi * static_cast<double>(r)));
    for (std::int64_t k = -half; k <= half; ++k) {
        const double phi = static_cast<double>(k) / static_cast<double>(r);
        const double amp = (n % 2 != 0) ? std::sin(n * phi) : std::cos(n * phi);
        if (amp * amp < kPruneThreshold) continue;
        s.push_back({{static_cast<double>(k), 0.0}, amp * amp, sign_phase(amp), false});
    }
    return SourceEnsemble(1, std::move(s));
}

SourceEnsemble sphere_arc(std::int64_t r, int ell, int m) {
    if (r < 1 || ell < 0 || m < 0 || m > ell) throw std::invalid_argument("bad sphere parameters");
    std::vector<Source> s;
    const auto end = static_cast<std::int64_t>(std::floor(kPi * static_cast<double>(r)));
    for (std::int64_t k = 0; k <= end; ++k) {
        const double cos_theta = std::cos(static_cast<double>(k) / static_cast<double>(r));
        const double amp = std::assoc_legendre(static_cast<unsigned>(ell), static_cast<unsigned>(m), cos_theta);
        if (amp * amp < kPruneThreshold) continue;
        s.push_back({{static_cast<double>(k), 0.0}, amp * amp, sign_phase(amp), false});
    }
    return SourceEnsemble(1, std::move(s));
}

}  // namespace qwalk
