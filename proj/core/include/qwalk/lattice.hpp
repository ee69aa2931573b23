#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qwalk/numeric.hpp"
#include "qwalk/rational.hpp"

namespace qwalk {

template <int D>
using IVec = std::array<std::int64_t, D>;

template <class Real, int D>
using RVec = std::array<Real, D>;

template <class Real, int D>
using RMat = std::array<std::array<Real, D>, D>;

template <class Real>
struct StepProbabilities {
    Real plus;
    Real zero;
    Real minus;
};

template <class Real>
StepProbabilities<Real> step_probabilities(const Real& v) {
    if (!(v == v) || v > Real(1) || v < Real(-1)) {
        throw std::domain_error("momentum propensity outside [-1, 1]");
    }
    const Real e = (Real(1) + v * v) / Real(2);
    return {(e + v) / Real(2), Real(1) - e, (e - v) / Real(2)};
}

// Ordered source-pair label: i is the image source of the visiting particle,
// j the one recorded in the cell.
template <int D>
struct PairLabel {
    IVec<D> i{};
    IVec<D> j{};
    friend bool operator==(const PairLabel&, const PairLabel&) = default;
};

template <class Real, int D>
struct ParticleBoson {
    PairLabel<D> label{};
    Real momentum{};
    std::int64_t k = 0;
    // Projection of the boson onto each axis; starts at the particle's split
    // weights and is carried through barrier reflections.
    RVec<Real, D> direction{};
    // Constant phase shift carried by entangled particles; zero otherwise.
    Real offset{};
};

template <class Real, int D>
struct LatticeBoson {
    PairLabel<D> label{};
    Real omega{};
    Real omega_bar{};
    std::int64_t kappa = 0;
};

template <class Real, int D>
void pb_decay(ParticleBoson<Real, D>& b) {
    ++b.k;
    b.momentum *= Real(1) - Real(1) / Real(2 * b.k);
}

template <class Real, int D>
void lb_decay(LatticeBoson<Real, D>& b) {
    ++b.kappa;
    const Real r = b.omega_bar / Real(b.kappa);
    b.omega *= Real(1) - r * r;
}

template <class Real, int D>
struct ParticleState {
    std::int64_t t = 0;
    IVec<D> x{};
    IVec<D> ell{};
    // +1 or -1; flipped on every external-boson capture so that the span keeps
    // measuring distance from the source image in a consistent direction.
    int orientation = 1;
    Real eps{};
    RVec<Real, D> v0{};
    RVec<Real, D> vQ{};
    RVec<Real, D> vF{};
    RVec<Real, D> rho{};
    std::int64_t action = 0;
    // Entanglement multiplicity and shared hidden phase; 1 and 0 for single particles.
    int n_r = 1;
    Real phi{};
    std::vector<ParticleBoson<Real, D>> bosons;
};

template <class Real, int D>
ParticleState<Real, D> make_particle(const IVec<D>& x0, const RVec<Real, D>& v0, const Real& eps,
                                     const RVec<Real, D>& rho) {
    ParticleState<Real, D> p;
    p.x = x0;
    p.eps = eps;
    p.v0 = v0;
    p.vQ = v0;
    p.rho = rho;
    return p;
}

template <class Real>
ParticleState<Real, 1> make_particle(std::int64_t x0, const Real& v0, const Real& eps = Real(0)) {
    return make_particle<Real, 1>({x0}, {v0}, eps, {Real(1)});
}

template <class Real, int D>
struct LatticeCell {
    IVec<D> trace{};
    Real eps_trace{};
    std::vector<LatticeBoson<Real, D>> bosons;

    LatticeBoson<Real, D>* find(const PairLabel<D>& label) {
        for (auto& b : bosons) {
            if (b.label == label) return &b;
        }
        return nullptr;
    }
};

template <int D>
struct CellKey {
    IVec<D> x{};
    std::int64_t t = 0;
    friend bool operator==(const CellKey&, const CellKey&) = default;
};

template <int D>
struct CellKeyHash {
    std::size_t operator()(const CellKey<D>& k) const noexcept {
        std::uint64_t h = static_cast<std::uint64_t>(k.t) * 0x9e3779b97f4a7c15ULL;
        for (int d = 0; d < D; ++d) {
            h ^= static_cast<std::uint64_t>(k.x[d]) + 0x632be59bd9b4e019ULL + (h << 6) + (h >> 2);
        }
        h ^= h >> 31;
        h *= 0xbf58476d1ce4e5b9ULL;
        h ^= h >> 29;
        return static_cast<std::size_t>(h);
    }
};

// Sparse store of visited (node, lifetime) cells. Unvisited keys are absent;
// there is no default trace.
template <class Real, int D>
class LatticeStore {
public:
    using Cell = LatticeCell<Real, D>;

    Cell* find(const IVec<D>& x, std::int64_t t) {
        auto it = cells_.find(CellKey<D>{x, t});
        return it == cells_.end() ? nullptr : &it->second;
    }

    const Cell* find(const IVec<D>& x, std::int64_t t) const {
        auto it = cells_.find(CellKey<D>{x, t});
        return it == cells_.end() ? nullptr : &it->second;
    }

    Cell& create(const IVec<D>& x, std::int64_t t, const IVec<D>& trace, const Real& eps) {
        auto [it, inserted] = cells_.try_emplace(CellKey<D>{x, t});
        if (!inserted) throw std::logic_error("lattice cell already exists");
        it->second.trace = trace;
        it->second.eps_trace = eps;
        return it->second;
    }

    std::size_t size() const { return cells_.size(); }
    void clear() { cells_.clear(); }
    void reserve(std::size_t n) { cells_.reserve(n); }

    std::size_t boson_count() const {
        std::size_t n = 0;
        for (const auto& kv : cells_) n += kv.second.bosons.size();
        return n;
    }

    const auto& cells() const { return cells_; }

private:
    std::unordered_map<CellKey<D>, Cell, CellKeyHash<D>> cells_;
};

// Linear maps applied at a barrier hit: one to momenta, one to spans.
template <class Real, int D>
struct Reflection {
    RMat<Real, D> momentum{};
    RMat<Real, D> span{};
};

// Environment with no external bosons and no barriers.
template <class Real, int D>
struct FreeEnvironment {
    bool force(const IVec<D>&, std::int64_t, RVec<Real, D>&) const { return false; }
    bool barrier(const IVec<D>&, const RVec<Real, D>&, Reflection<Real, D>&) const { return false; }
};

struct EngineOptions {
    bool quantum_forces = true;
    // Maximum number of bosons per cell and per particle; 0 disables the cap.
    std::size_t boson_cap = 0;
};

class BosonCapError : public std::runtime_error {
public:
    explicit BosonCapError(std::size_t cap)
        : std::runtime_error("boson table exceeded cap of " + std::to_string(cap) +
                             " entries (raise boson_cap or disable quantum forces)"),
          cap_(cap) {}
    std::size_t cap() const { return cap_; }

private:
    std::size_t cap_;
};

template <int D>
struct StepRecord {
    IVec<D> v{};
    IVec<D> span_candidate{};
    bool reset = false;
    bool created_cell = false;
    bool captured_force = false;
    bool barrier_hit = false;
    PairLabel<D> label{};
};

template <class Real, int D>
bool reset_condition(const IVec<D>& span_candidate, const LatticeCell<Real, D>* cell) {
    return cell != nullptr && cell->trace != span_candidate;
}

namespace detail {

inline bool negligible(double x) { return std::fabs(x) < 1e-12; }
inline bool negligible(const Rational& x) { return x == Rational(0); }

template <class Real, int D>
RVec<Real, D> apply(const RMat<Real, D>& m, const RVec<Real, D>& v) {
    RVec<Real, D> out{};
    for (int r = 0; r < D; ++r) {
        Real acc(0);
        for (int c = 0; c < D; ++c) acc += m[r][c] * v[c];
        out[r] = acc;
    }
    return out;
}

template <int D>
int lex_sign(const IVec<D>& d) {
    for (int k = 0; k < D; ++k) {
        if (d[k] > 0) return 1;
        if (d[k] < 0) return -1;
    }
    return 0;
}

}  // namespace detail

template <class Real, int D>
void recompute_quantum_momentum(ParticleState<Real, D>& p) {
    for (int d = 0; d < D; ++d) {
        Real acc = p.v0[d];
        for (const auto& b : p.bosons) acc -= b.direction[d] * (b.momentum - b.offset);
        p.vQ[d] = D > 1 ? wrap_unit(acc) : acc;
    }
}

// Full microscopic model. One call to advance() is one iteration of one
// particle on a lattice it shares with every earlier emission.
template <class Real, int D>
class Engine {
public:
    explicit Engine(EngineOptions options = {}) : options_(options) {}

    const EngineOptions& options() const { return options_; }

    // `draw(p_plus, p_zero)` returns the step in {-1, 0, 1}.
    template <class Env, class Draw>
    StepRecord<D> advance(ParticleState<Real, D>& p, LatticeStore<Real, D>& lattice, const Env& env,
                          Draw&& draw) const {
        StepRecord<D> rec;
        for (int d = 0; d < D; ++d) {
            const Real prop = clamp_unit(p.vQ[d] + p.vF[d]);
            const auto pr = step_probabilities(prop);
            rec.v[d] = draw(to_double(pr.plus), to_double(pr.zero));
        }

        p.t += 1;
        for (int d = 0; d < D; ++d) {
            p.x[d] += rec.v[d];
            p.action += rec.v[d] < 0 ? -rec.v[d] : rec.v[d];
            rec.span_candidate[d] = p.ell[d] + p.orientation * rec.v[d];
        }

        const RVec<Real, D> vq_prev = p.vQ;
        auto* cell = lattice.find(p.x, p.t);
        if (reset_condition<Real, D>(rec.span_candidate, cell)) {
            rec.reset = true;
            if (options_.quantum_forces) create_pair(p, *cell, rec, vq_prev);
            p.ell = cell->trace;
            cell->trace = rec.span_candidate;
            std::swap(p.eps, cell->eps_trace);
        } else {
            if (cell == nullptr) {
                lattice.create(p.x, p.t, rec.span_candidate, p.eps);
                rec.created_cell = true;
            } else {
                for (auto& b : cell->bosons) lb_decay(b);
            }
            for (auto& b : p.bosons) pb_decay(b);
            p.ell = rec.span_candidate;
        }

        RVec<Real, D> f{};
        if (env.force(p.x, p.t, f)) {
            rec.captured_force = true;
            for (int d = 0; d < D; ++d) {
                p.vF[d] += f[d];
                p.ell[d] = -p.ell[d];
            }
            p.orientation = -p.orientation;
        }

        Reflection<Real, D> refl;
        if (env.barrier(p.x, p.vQ, refl)) {
            rec.barrier_hit = true;
            p.v0 = detail::apply<Real, D>(refl.momentum, p.v0);
            for (auto& b : p.bosons) b.direction = detail::apply<Real, D>(refl.momentum, b.direction);
            IVec<D> spans{};
            for (int r = 0; r < D; ++r) {
                Real acc(0);
                for (int c = 0; c < D; ++c) acc += refl.span[r][c] * Real(p.ell[c]);
                spans[r] = static_cast<std::int64_t>(std::llround(to_double(acc)));
            }
            p.ell = spans;
        }

        recompute_quantum_momentum(p);
        return rec;
    }

private:
    void create_pair(ParticleState<Real, D>& p, LatticeCell<Real, D>& cell, StepRecord<D>& rec,
                     const RVec<Real, D>& vq_prev) const {
        PairLabel<D> label;
        IVec<D> diff{};
        for (int d = 0; d < D; ++d) {
            label.i[d] = p.x[d] - rec.span_candidate[d];
            label.j[d] = p.x[d] - cell.trace[d];
            diff[d] = label.i[d] - label.j[d];
        }
        rec.label = label;
        const int s = detail::lex_sign<D>(diff);
        if (s == 0) throw std::logic_error("reset with zero path difference");
        const Real eps_ij = p.eps - cell.eps_trace;

        Real old_omega(0);
        if (auto* lb = cell.find(label)) old_omega = lb->omega;
        Real denom(0);
        for (int d = 0; d < D; ++d) denom += p.rho[d] * Real(diff[d]);
        denom *= Real(s);
        const Real n_r(static_cast<std::int64_t>(p.n_r));
        const Real pb_momentum = detail::negligible(denom) ? Real(0) : old_omega / (n_r * denom);
        Real offset(0);
        if ((p.n_r != 1 || !detail::negligible(p.phi)) && !detail::negligible(denom)) {
            offset = (Real(s) * eps_ij - p.phi) / denom;
        }

        bool replaced = false;
        for (auto& b : p.bosons) {
            if (b.label == label) {
                b.momentum = pb_momentum;
                b.offset = offset;
                b.k = 0;
                b.direction = p.rho;
                replaced = true;
            } else {
                pb_decay(b);
            }
        }
        if (!replaced) {
            if (options_.boson_cap != 0 && p.bosons.size() >= options_.boson_cap) {
                throw BosonCapError(options_.boson_cap);
            }
            p.bosons.push_back({label, pb_momentum, 0, p.rho, offset});
        }

        Real projected(0);
        for (int d = 0; d < D; ++d) projected += Real(diff[d]) * vq_prev[d];
        const Real omega_bar = wrap_unit(n_r * (Real(s) * (projected - eps_ij) + p.phi));
        replaced = false;
        for (auto& b : cell.bosons) {
            if (b.label == label) {
                b.omega = omega_bar;
                b.omega_bar = omega_bar;
                b.kappa = 0;
                replaced = true;
            } else {
                lb_decay(b);
            }
        }
        if (!replaced) {
            if (options_.boson_cap != 0 && cell.bosons.size() >= options_.boson_cap) {
                throw BosonCapError(options_.boson_cap);
            }
            cell.bosons.push_back({label, omega_bar, omega_bar, 0});
        }
    }

    EngineOptions options_;
};

template <class Real, int D>
struct EmissionResult {
    IVec<D> arrival{};
    RVec<Real, D> vQ{};
    std::int64_t action = 0;
    std::uint64_t resets = 0;
    std::uint64_t barrier_hits = 0;
};

struct NoObserver {
    template <class P, class R>
    void operator()(const P&, const R&) const {}
};

template <class Real, int D, class Env, class Draw, class Observer = NoObserver>
EmissionResult<Real, D> run_emission(const Engine<Real, D>& engine, ParticleState<Real, D>& p,
                                     LatticeStore<Real, D>& lattice, const Env& env, std::int64_t n_t,
                                     Draw&& draw, Observer&& observer = {}) {
    EmissionResult<Real, D> out;
    for (std::int64_t n = 0; n < n_t; ++n) {
        const auto rec = engine.advance(p, lattice, env, draw);
        out.resets += rec.reset ? 1 : 0;
        out.barrier_hits += rec.barrier_hit ? 1 : 0;
        observer(p, rec);
    }
    out.arrival = p.x;
    out.vQ = p.vQ;
    out.action = p.action;
    return out;
}

// Expected action seen at node x after t steps from x0 with no forces.
inline Rational expected_action(std::int64_t x, std::int64_t t, std::int64_t x0) {
    if (t < 1) throw std::domain_error("expected_action needs t >= 1");
    const std::int64_t dx = x - x0;
    return Rational(dx * dx + t * t - t, 2 * t - 1);
}

// Probability that a free walk reaching x at time t has accumulated action sigma.
double action_pmf(std::int64_t sigma, std::int64_t x, std::int64_t t, std::int64_t x0);

}  // namespace qwalk
