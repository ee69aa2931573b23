#include "qwalk/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace qwalk {

void NodeHistogram::add(std::int64_t node, std::uint64_t n) {
    if (n == 0) return;
    counts_[node] += n;
    total_ += n;
}

void NodeHistogram::merge(const NodeHistogram& other) {
    for (const auto& [x, n] : other.counts_) counts_[x] += n;
    total_ += other.total_;
}

std::uint64_t NodeHistogram::count(std::int64_t node) const {
    auto it = counts_.find(node);
    return it == counts_.end() ? 0 : it->second;
}

std::map<std::int64_t, double> NodeHistogram::pmf() const {
    if (total_ == 0) throw std::runtime_error("empty histogram");
    std::map<std::int64_t, double> out;
    for (const auto& [x, n] : counts_) out[x] = static_cast<double>(n) / static_cast<double>(total_);
    return out;
}

BinnedHistogram::BinnedHistogram(double lo, double hi, std::size_t bins) : lo_(lo), hi_(hi), counts_(bins, 0) {
    if (!(hi > lo) || bins == 0) throw std::invalid_argument("histogram needs hi > lo and at least one bin");
}

std::size_t BinnedHistogram::index(double value) const {
    const double f = (value - lo_) / (hi_ - lo_) * static_cast<double>(counts_.size());
    const auto k = static_cast<std::size_t>(std::floor(f));
    return std::min(k, counts_.size() - 1);
}

void BinnedHistogram::add(double value, std::uint64_t n) {
    total_ += n;
    if (value < lo_) underflow_ += n;
    else if (value > hi_) overflow_ += n;
    else counts_[index(value)] += n;
}

void BinnedHistogram::merge(const BinnedHistogram& other) {
    if (other.lo_ != lo_ || other.hi_ != hi_ || other.counts_.size() != counts_.size()) {
        throw std::invalid_argument("cannot merge histograms with different binning");
    }
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    underflow_ += other.underflow_;
    overflow_ += other.overflow_;
    total_ += other.total_;
}

void MeanAccumulator::add(double value) {
    if (!std::isfinite(value) || std::fabs(value) > 0x1.0p60) throw std::domain_error("value out of accumulator range");
    sum_ += static_cast<Wide>(std::nearbyint(std::ldexp(value, 48)));
    ++n_;
}

void MeanAccumulator::merge(const MeanAccumulator& other) {
    sum_ += other.sum_;
    n_ += other.n_;
}

double MeanAccumulator::mean() const {
    if (n_ == 0) throw std::runtime_error("mean of an empty sample");
    return std::ldexp(static_cast<double>(sum_), -48) / static_cast<double>(n_);
}

void EnsembleStats::merge(const EnsembleStats& other) {
    positions.merge(other.positions);
    momentum.merge(other.momentum);
    energy.merge(other.energy);
    arrivals += other.arrivals;
}

double tv_distance(const std::vector<double>& empirical, const std::vector<double>& theoretical) {
    if (empirical.size() != theoretical.size()) throw std::invalid_argument("tv_distance: support mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < empirical.size(); ++i) acc += std::fabs(empirical[i] - theoretical[i]);
    return 0.5 * acc;
}

double tv_distance(const NodeHistogram& h, const std::function<double(std::int64_t)>& pmf, std::int64_t lo,
                   std::int64_t hi, std::int64_t pool) {
    if (h.empty()) throw std::runtime_error("empty histogram");
    if (hi < lo || pool < 1) throw std::invalid_argument("tv_distance: bad support");
    const double n = static_cast<double>(h.total());
    std::vector<double> emp, theo;
    double inside_emp = 0.0, inside_theo = 0.0;
    for (std::int64_t b = lo; b <= hi; b += pool) {
        double e = 0.0, p = 0.0;
        for (std::int64_t x = b; x < b + pool && x <= hi; ++x) {
            e += static_cast<double>(h.count(x)) / n;
            p += pmf(x);
        }
        emp.push_back(e);
        theo.push_back(p);
        inside_emp += e;
        inside_theo += p;
    }
    emp.push_back(std::max(0.0, 1.0 - inside_emp));
    theo.push_back(std::max(0.0, 1.0 - inside_theo));
    return tv_distance(emp, theo);
}

ChiSquare chi_square(const std::vector<double>& observed, const std::vector<double>& expected, int constraints) {
    if (observed.size() != expected.size()) throw std::invalid_argument("chi_square: support mismatch");
    std::vector<std::pair<double, double>> pooled;
    double o = 0.0, e = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        o += observed[i];
        e += expected[i];
        if (e >= 5.0) {
            pooled.emplace_back(o, e);
            o = e = 0.0;
        }
    }
    if (e > 0.0 || o > 0.0) {
        if (pooled.empty()) pooled.emplace_back(o, e);
        else {
            pooled.back().first += o;
            pooled.back().second += e;
        }
    }
    ChiSquare out;
    for (const auto& [ob, ex] : pooled) {
        if (ex <= 0.0) {
            if (ob > 0.0) throw std::invalid_argument("chi_square: counts where nothing is expected");
            continue;
        }
        out.statistic += (ob - ex) * (ob - ex) / ex;
    }
    out.dof = static_cast<int>(pooled.size()) - constraints;
    if (out.dof < 1) throw std::invalid_argument("chi_square: not enough pooled bins");
    out.p_value = boost::math::gamma_q(0.5 * out.dof, 0.5 * out.statistic);
    return out;
}

double fringe_visibility(const NodeHistogram& h, double period, double origin, std::int64_t lo, std::int64_t hi,
                         int phase_bins) {
    if (phase_bins < 2) throw std::invalid_argument("visibility needs at least two phase bins");
    if (!(period > 0.0) || period > static_cast<double>(hi - lo + 1)) {
        throw std::invalid_argument("fringe period longer than the support");
    }
    if (h.empty()) throw std::runtime_error("empty histogram");
    std::vector<double> sum(static_cast<std::size_t>(phase_bins), 0.0);
    std::vector<double> nodes(static_cast<std::size_t>(phase_bins), 0.0);
    for (std::int64_t x = lo; x <= hi; ++x) {
        double ph = std::fmod((static_cast<double>(x) - origin) / period, 1.0);
        if (ph < 0.0) ph += 1.0;
        const auto k = std::min(static_cast<std::size_t>(ph * phase_bins + 1e-9), sum.size() - 1);
        sum[k] += static_cast<double>(h.count(x));
        nodes[k] += 1.0;
    }
    double mx = 0.0, mn = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < sum.size(); ++k) {
        if (nodes[k] == 0.0) continue;
        const double m = sum[k] / nodes[k];
        mx = std::max(mx, m);
        mn = std::min(mn, m);
    }
    if (mx + mn == 0.0) throw std::runtime_error("no counts inside the fringe window");
    return (mx - mn) / (mx + mn);
}

std::vector<Peak> peak_detect(const BinnedHistogram& h) {
    const auto& c = h.counts();
    const std::size_t n = c.size();
    if (h.in_range() == 0) throw std::runtime_error("empty histogram");
    std::vector<double> smooth(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        int m = 0;
        for (std::size_t j = (i == 0 ? 0 : i - 1); j <= std::min(n - 1, i + 1); ++j) {
            s += static_cast<double>(c[j]);
            ++m;
        }
        smooth[i] = s / m;
    }
    const double mean = static_cast<double>(h.in_range()) / static_cast<double>(n);
    const double floor = mean + 3.0 * std::sqrt(mean);
    std::vector<Peak> out;
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i == 0 ? -1.0 : smooth[i - 1];
        const double right = i + 1 == n ? -1.0 : smooth[i + 1];
        if (smooth[i] > floor && smooth[i] >= left && smooth[i] > right) out.push_back({h.center(i), smooth[i]});
    }
    std::sort(out.begin(), out.end(), [](const Peak& a, const Peak& b) { return a.height > b.height; });
    return out;
}

double reflection_ratio(const NodeHistogram& h, std::int64_t boundary, int side) {
    if (h.empty()) throw std::runtime_error("empty histogram");
    double mass = 0.0;
    for (const auto& [x, n] : h.counts()) {
        const auto d = static_cast<double>(n);
        if (x == boundary) mass += 0.5 * d;
        else if ((side > 0) == (x > boundary)) mass += d;
    }
    return mass / static_cast<double>(h.total());
}

double energy_mean(const std::vector<double>& samples) {
    if (samples.empty()) throw std::runtime_error("mean of an empty sample");
    MeanAccumulator acc;
    for (double s : samples) acc.add(s);
    return acc.mean();
}

}  // namespace qwalk
