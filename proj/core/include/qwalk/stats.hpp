#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace qwalk {

// Counts per lattice node.
class NodeHistogram {
public:
    void add(std::int64_t node, std::uint64_t n = 1);
    void merge(const NodeHistogram& other);

    std::uint64_t total() const { return total_; }
    std::uint64_t count(std::int64_t node) const;
    const std::map<std::int64_t, std::uint64_t>& counts() const { return counts_; }
    bool empty() const { return total_ == 0; }
    // Empirical pmf keyed by node.
    std::map<std::int64_t, double> pmf() const;

    friend bool operator==(const NodeHistogram&, const NodeHistogram&) = default;

private:
    std::map<std::int64_t, std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

// Uniform bins on [lo, hi]; values outside are tallied separately.
class BinnedHistogram {
public:
    BinnedHistogram() = default;
    BinnedHistogram(double lo, double hi, std::size_t bins);

    void add(double value, std::uint64_t n = 1);
    // Throws std::invalid_argument when the binning differs.
    void merge(const BinnedHistogram& other);

    std::size_t bins() const { return counts_.size(); }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double width() const { return (hi_ - lo_) / static_cast<double>(counts_.size()); }
    double center(std::size_t i) const { return lo_ + (static_cast<double>(i) + 0.5) * width(); }
    std::size_t index(double value) const;
    const std::vector<std::uint64_t>& counts() const { return counts_; }
    std::uint64_t underflow() const { return underflow_; }
    std::uint64_t overflow() const { return overflow_; }
    std::uint64_t total() const { return total_; }
    // Counts inside the range only.
    std::uint64_t in_range() const { return total_ - underflow_ - overflow_; }

    friend bool operator==(const BinnedHistogram&, const BinnedHistogram&) = default;

private:
    double lo_ = -1.0;
    double hi_ = 1.0;
    std::vector<std::uint64_t> counts_;
    std::uint64_t underflow_ = 0;
    std::uint64_t overflow_ = 0;
    std::uint64_t total_ = 0;
};

// Exact running mean: values are stored in fixed point with 2^-48 resolution,
// so merging in any order yields the same bits.
class MeanAccumulator {
public:
    void add(double value);
    void merge(const MeanAccumulator& other);
    std::uint64_t count() const { return n_; }
    double mean() const;

    friend bool operator==(const MeanAccumulator& a, const MeanAccumulator& b) {
        return a.n_ == b.n_ && a.sum_ == b.sum_;
    }

private:
    __extension__ using Wide = __int128;
    Wide sum_ = 0;
    std::uint64_t n_ = 0;
};

struct EnsembleStats {
    NodeHistogram positions;
    BinnedHistogram momentum{-1.0, 1.0, 201};
    MeanAccumulator energy;
    std::uint64_t arrivals = 0;
    std::uint64_t scenario_hash = 0;
    std::uint64_t seed = 0;

    void merge(const EnsembleStats& other);
    friend bool operator==(const EnsembleStats&, const EnsembleStats&) = default;
};

// Half the L1 distance between two pmfs given on the same support.
double tv_distance(const std::vector<double>& empirical, const std::vector<double>& theoretical);
// Node histogram against a pmf; nodes are pooled into groups of `pool`
// consecutive nodes over [lo, hi]. Mass outside [lo, hi] counts fully.
double tv_distance(const NodeHistogram& h, const std::function<double(std::int64_t)>& pmf, std::int64_t lo,
                   std::int64_t hi, std::int64_t pool = 1);

struct ChiSquare {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

// Pearson test of observed counts against expected counts. Adjacent bins are
// pooled until every expected count is at least 5. `constraints` is subtracted
// from the number of pooled bins.
ChiSquare chi_square(const std::vector<double>& observed, const std::vector<double>& expected, int constraints = 1);

// Folds the histogram over `period` nodes starting at `origin`, averages the
// counts per phase bin and returns (max - min) / (max + min).
double fringe_visibility(const NodeHistogram& h, double period, double origin, std::int64_t lo, std::int64_t hi,
                         int phase_bins = 10);

struct Peak {
    double location;
    double height;
};

// Local maxima of the 3-bin moving average above mean + 3 sqrt(mean),
// highest first.
std::vector<Peak> peak_detect(const BinnedHistogram& h);

// Share of the histogram on the source side of `boundary` (side = +1 for
// nodes above it). The boundary node contributes half its count.
double reflection_ratio(const NodeHistogram& h, std::int64_t boundary, int side);

double energy_mean(const std::vector<double>& samples);

}  // namespace qwalk
