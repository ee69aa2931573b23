#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qwalk/rng.hpp"

namespace qwalk {

struct Source {
    std::array<double, 2> x{};
    double p = 0.0;
    double eps = 0.0;
    // Image sources take part in the pair table but never emit.
    bool image = false;
};

struct PairEntry {
    std::size_t i = 0;
    std::size_t j = 0;
    // Signed separation x_i - x_j per dimension.
    std::array<double, 2> delta{};
    double eps = 0.0;
    double p = 0.0;
};

struct SourceDraw {
    std::size_t index = 0;
    std::array<double, 2> x0{};
    std::array<double, 2> v0{};
    double eps = 0.0;
};

class SourceEnsemble {
public:
    SourceEnsemble() = default;
    SourceEnsemble(int dims, std::vector<Source> sources);

    int dims() const { return dims_; }
    const std::vector<Source>& sources() const { return sources_; }
    const std::vector<PairEntry>& pairs() const { return pairs_; }
    std::size_t emitter_count() const { return emitters_.size(); }

    // Builds the ordered pair table. Pairs are not built automatically since
    // some families only need the compressed kernel.
    void build_pairs();
    bool has_pairs() const { return pairs_built_; }
    std::size_t pair_count() const;

    SourceDraw sample(Rng& rng) const;
    // Emitter chosen by a uniform u in [0, 1).
    std::size_t pick(double u) const;

    double total_probability() const;
    // Sum over ordered pairs of sqrt(P_i P_j).
    double pair_weight_sum() const;

    // Adds a constant to every phase.
    void shift_phases(double c);

private:
    int dims_ = 1;
    std::vector<Source> sources_;
    std::vector<std::size_t> emitters_;
    std::vector<double> cdf_;
    std::vector<PairEntry> pairs_;
    bool pairs_built_ = false;
};

// Phase (in units of pi) of a real amplitude: 0 when non-negative, 1 otherwise.
inline double sign_phase(double amplitude) { return amplitude < 0.0 ? 1.0 : 0.0; }

inline constexpr double kPruneThreshold = 1e-8;

SourceEnsemble single_source(double x0);
SourceEnsemble single_source_2d(double x1, double x2);
SourceEnsemble two_slit(double half_separation, double p_plus, double eps_plus = 0.0, double eps_minus = 0.0);
// n equiprobable sources spaced by a, centred on the origin.
SourceEnsemble comb(int n, double a);
SourceEnsemble comb_2d(int n, double a, double b);
SourceEnsemble plane_wave(std::int64_t ell, double v_phi);
// Window of +-3d around the centre, pruned below kPruneThreshold.
SourceEnsemble gaussian(double centre, double width, double v_phi);
SourceEnsemble ho_stationary(int n, double omega);
// Stationary state n in [-a, a] plus images l = -images..images at 2la + (-1)^l x.
SourceEnsemble box_stationary(int n, std::int64_t a, int images);
SourceEnsemble box_single(double x0, std::int64_t a, int images);
// Arc coordinate k in [-pi r, pi r].
SourceEnsemble ring_plane_wave(std::int64_t r, int m);
SourceEnsemble ring_stationary(std::int64_t r, int n);
// Meridian from the north pole (arc 0) to the south pole (arc pi r).
SourceEnsemble sphere_arc(std::int64_t r, int ell, int m);

// Normalized harmonic-oscillator source weight at node x.
double ho_weight(int n, double omega, double x);
double ho_amplitude(int n, double omega, double x);

}  // namespace qwalk
