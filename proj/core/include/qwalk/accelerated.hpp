#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qwalk/forces.hpp"
#include "qwalk/rng.hpp"
#include "qwalk/sources.hpp"

namespace qwalk {

// Sum over source pairs of sqrt(P) sin(pi (d q - eps)) / (pi d), compressed by
// separation. Integer separations are folded into harmonic coefficients.
class PairKernel {
public:
    PairKernel() = default;
    explicit PairKernel(const SourceEnsemble& ensemble, int axis = 0);

    double force(double q) const;
    // d/dq of force(q): sum of sqrt(P) cos(pi (d q - eps)).
    double slope(double q) const;

    bool empty() const { return harmonics_.empty() && direct_.empty(); }
    // Sum of sqrt(P) over ordered pairs.
    double weight_sum() const { return weight_sum_; }
    // Upper bound on |force(q)|.
    double bound() const { return bound_; }
    std::size_t harmonic_count() const { return harmonics_.size(); }
    std::size_t direct_count() const { return direct_.size(); }
    // Largest slope on [-1, 1], sampled on a 4001-point grid.
    double max_slope() const { return max_slope_; }

private:
    struct Harmonic {
        double a = 0.0;  // sin coefficient
        double b = 0.0;  // -cos coefficient
    };
    struct Direct {
        double d, eps, w;
    };

    std::vector<Harmonic> harmonics_;  // index m-1 for separation m
    std::vector<Direct> direct_;
    double weight_sum_ = 0.0;
    double bound_ = 0.0;
    double max_slope_ = 0.0;
};

struct VqSolution {
    double vq = 0.0;
    bool monotone = true;
    // Root found in the fallback bracket [v0 - S, v0 + S] instead of [-1, 1].
    bool fallback = false;
    int iterations = 0;
};

// Root of vq - v0 + force(vq) = 0 to 1e-12. For non-monotone maps the root
// nearest v0 is returned and monotone is false.
VqSolution solve_vq(double v0, const PairKernel& kernel);

// Inverse of the cumulative of max(0, 1 + slope(v)) on [-1, 1], rescaled to
// map [-1, 1] onto itself. Equals the root map whenever that map is monotone
// and fixes [-1, 1].
class MomentumInverse {
public:
    MomentumInverse() = default;
    MomentumInverse(const PairKernel& kernel, std::size_t grid);

    double operator()(double v0) const;
    std::size_t grid_size() const { return v_.size(); }

private:
    std::vector<double> v_;
    std::vector<double> cdf_;
};

double expected_trajectory(double x0, double vq, const AbcPoint& abc);

inline constexpr std::int64_t kDefaultLag = 10;

// Smallest lag, not below kDefaultLag, for which the lagged relaxation towards
// a root converges without oscillating: 1 + max slope.
std::int64_t stable_lag(const PairKernel& kernel);

struct TrainedOptions {
    std::int64_t n_tau = 0;  // 0 selects stable_lag(kernel)
    std::optional<std::int64_t> box;
};

struct TrainedResult {
    std::int64_t x = 0;
    double vq = 0.0;  // signed quantum momentum at arrival
    double u = 0.0;   // unsigned trained momentum
    double q = 0.0;
    std::int64_t wall_hits = 0;
};

struct TrainedTrace {
    std::vector<std::int64_t> x;
    std::vector<double> u;
    std::vector<double> q;
};

// One emission of the trained code.
TrainedResult run_trained(const PairKernel& kernel, const ForceField& field, const TrainedOptions& options,
                          std::int64_t x0, double v0, std::int64_t n_t, Rng& rng, TrainedTrace* trace = nullptr);

}  // namespace qwalk
