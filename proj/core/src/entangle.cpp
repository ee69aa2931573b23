#include "qwalk/entangle.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qwalk/accelerated.hpp"
#include "qwalk/numeric.hpp"
#include "qwalk/parallel.hpp"

namespace qwalk {

namespace {

constexpr std::uint64_t kPairStream = 0x656e74;

int draw_step(Rng& rng, double p_plus, double p_zero) {
    const double w = rng.uniform();
    if (w < p_plus) return 1;
    if (w < p_plus + p_zero) return 0;
    return -1;
}

std::int64_t nearest_node(double x) { return static_cast<std::int64_t>(std::llround(x)); }

}  // namespace

EntangledPair emit_pair(const SourceEnsemble& ensemble, double alpha, double beta, Rng& rng) {
    const auto& src = ensemble.sources();
    if (ensemble.dims() != 1 || src.size() != 2 || src[0].image || src[1].image) {
        throw std::invalid_argument("entangled emission needs exactly two emitting sources");
    }
    if (std::fabs(src[0].p - src[1].p) > 1e-12) throw std::invalid_argument("entangled sources must be equiprobable");
    const std::size_t plus = src[0].x[0] > src[1].x[0] ? 0 : 1;
    const double x_plus = src[plus].x[0];
    const double x_minus = src[1 - plus].x[0];
    if (x_plus == x_minus) throw std::invalid_argument("entangled sources share a location");

    EntangledPair pair;
    pair.delta = x_plus - x_minus;
    pair.eps_delta = {alpha, beta};
    pair.v0 = rng.uniform(-1.0, 1.0);
    pair.phi = rng.uniform(-1.0, 1.0);
    const int first = rng.uniform() < 0.5 ? 0 : 1;
    pair.source = {first, 1 - first};
    for (std::size_t r = 0; r < 2; ++r) {
        const bool at_plus = pair.source[r] == 0;
        const double x0 = at_plus ? x_plus : x_minus;
        const double eps = at_plus ? pair.eps_delta[r] : 0.0;
        const double v0 = r == 0 ? pair.v0 : -pair.v0;
        auto& b = pair.branch[r];
        b = make_particle<double>(nearest_node(x0), v0, eps);
        b.n_r = 2;
        b.phi = pair.phi;
    }
    return pair;
}

double solve_branch(double v0, double eps, double phi, double delta) {
    if (delta <= 0.0) throw std::invalid_argument("branch separation must be positive");
    // g + sin(2 pi g) / (2 pi) = delta v0 is monotone in g
    const double target = delta * v0;
    auto h = [&](double g) { return g + std::sin(2.0 * kPi * g) / (2.0 * kPi) - target; };
    double lo = target - 1.0 / (2.0 * kPi);
    double hi = target + 1.0 / (2.0 * kPi);
    double g = target;
    for (int it = 0; it < 200; ++it) {
        const double hg = h(g);
        if (std::fabs(hg) < 1e-14 || hi - lo < 1e-15) break;
        if (hg < 0.0) lo = g;
        else hi = g;
        const double dh = 1.0 + std::cos(2.0 * kPi * g);
        double ng = dh > 0.0 ? g - hg / dh : 0.5 * (lo + hi);
        if (!(ng > lo && ng < hi)) ng = 0.5 * (lo + hi);
        g = ng;
    }
    return (g + eps - phi) / delta;
}

double branch_residual(double velocity, double v0, double eps, double phi, double delta) {
    const double f = kPi * delta * velocity - kPi * eps + kPi * phi;
    return v0 - velocity + (eps - phi) / delta - std::sin(2.0 * f) / (2.0 * kPi * delta);
}

BranchRun run_branch_trained(std::int64_t x0, double v0, double eps, double phi, double delta, std::int64_t n_t,
                             std::int64_t n_tau, Rng& rng) {
    if (n_t < 1) throw std::invalid_argument("run length must be >= 1");
    const double tau = static_cast<double>(n_tau > 0 ? n_tau : kDefaultLag);
    auto momentum = [&](double q) {
        const double f = kPi * delta * q - kPi * eps + kPi * phi;
        return v0 + (eps - phi) / delta - std::sin(2.0 * f) / (2.0 * kPi * delta);
    };
    BranchRun out;
    out.x = x0;
    double q = v0;
    double u = momentum(q);
    for (std::int64_t n = 0; n < n_t; ++n) {
        const auto p = step_probabilities(clamp_unit(u));
        out.x += draw_step(rng, p.plus, p.zero);
        u = momentum(q);
        q = q * (tau - 1.0) / tau + u / tau;
    }
    out.q = q;
    return out;
}

std::int64_t ChshConfig::detector() const {
    if (half_separation <= 0.0) throw std::invalid_argument("half-separation must be positive");
    return nearest_node(static_cast<double>(t) / (4.0 * half_separation));
}

std::array<double, 4> CoincidenceCounts::rates() const {
    const double n = static_cast<double>(coincidences());
    if (n == 0.0) throw std::runtime_error("no detector coincidences recorded; increase the number of emissions");
    return {plus_plus / n, minus_minus / n, plus_minus / n, minus_plus / n};
}

double CoincidenceCounts::correlation() const {
    const double n = static_cast<double>(coincidences());
    if (n == 0.0) throw std::runtime_error("no detector coincidences recorded; increase the number of emissions");
    const double same = static_cast<double>(plus_plus + minus_minus);
    const double opp = static_cast<double>(plus_minus + minus_plus);
    return (same - opp) / n;
}

void CoincidenceCounts::merge(const CoincidenceCounts& other) {
    plus_plus += other.plus_plus;
    minus_minus += other.minus_minus;
    plus_minus += other.plus_minus;
    minus_plus += other.minus_plus;
    pairs += other.pairs;
    for (const auto& [x, n] : other.marginal) marginal[x] += n;
}

namespace {

// +1 at the positive detector, -1 at the negative one, 0 elsewhere.
int detector_hit(std::int64_t x, std::int64_t det, std::int64_t window) {
    if (x >= det - window && x <= det + window) return 1;
    if (x >= -det - window && x <= -det + window) return -1;
    return 0;
}

void record(CoincidenceCounts& c, std::int64_t x1, std::int64_t x2, std::int64_t det, std::int64_t window) {
    ++c.pairs;
    ++c.marginal[x1];
    const int a = detector_hit(x1, det, window);
    const int b = detector_hit(x2, det, window);
    if (a == 0 || b == 0) return;
    if (a > 0 && b > 0) ++c.plus_plus;
    else if (a < 0 && b < 0) ++c.minus_minus;
    else if (a > 0) ++c.plus_minus;
    else ++c.minus_plus;
}

}  // namespace

CoincidenceCounts run_coincidences(const ChshConfig& config, double alpha, double beta, std::uint64_t seed) {
    if (config.t < 1 || config.np < 1) throw std::invalid_argument("CHSH run needs t >= 1 and np >= 1");
    const std::int64_t det = config.detector();
    const SourceEnsemble ens = two_slit(config.half_separation, 0.5);
    const double t = static_cast<double>(config.t);

    if (config.model == ChshModel::M) {
        // Each branch shares one lattice across all emissions, so pairs run in order.
        CoincidenceCounts out;
        Engine<double, 1> engine;
        std::array<LatticeStore<double, 1>, 2> lattices;
        for (std::uint64_t k = 0; k < config.np; ++k) {
            Rng rng(derive_seed(seed, kPairStream, k));
            EntangledPair pair = emit_pair(ens, alpha, beta, rng);
            for (int r = 0; r < 2; ++r) {
                auto draw = [&](double pp, double pz) { return draw_step(rng, pp, pz); };
                for (std::int64_t n = 0; n < config.t; ++n) step_entangled(pair, r, lattices[r], engine, draw);
            }
            record(out, pair.branch[0].x[0], pair.branch[1].x[0], det, config.window);
        }
        return out;
    }

    const std::size_t chunks = 64;
    std::vector<CoincidenceCounts> parts(chunks);
    for_chunks(config.np, chunks, config.threads, [&](std::size_t c, std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            Rng rng(derive_seed(seed, kPairStream, k));
            const EntangledPair pair = emit_pair(ens, alpha, beta, rng);
            std::array<std::int64_t, 2> x{};
            for (std::size_t r = 0; r < 2; ++r) {
                const auto& b = pair.branch[r];
                if (config.model == ChshModel::Mstarstar) {
                    const double vq = solve_branch(b.v0[0], pair.eps_delta[r], pair.phi, pair.delta);
                    x[r] = nearest_node(static_cast<double>(b.x[0]) + vq * t);
                } else {
                    x[r] = run_branch_trained(b.x[0], b.v0[0], pair.eps_delta[r], pair.phi, pair.delta, config.t,
                                              config.n_tau, rng)
                               .x;
                }
            }
            record(parts[c], x[0], x[1], det, config.window);
        }
    });
    CoincidenceCounts out;
    for (const auto& p : parts) out.merge(p);
    return out;
}

ChshEstimate estimate_smax(const ChshConfig& config, double theta, std::uint64_t seed) {
    ChshEstimate e;
    e.at_theta = run_coincidences(config, theta / kPi, 0.0, seed);
    e.at_3theta = run_coincidences(config, 3.0 * theta / kPi, 0.0, derive_seed(seed, 3, 0));
    e.c_theta = e.at_theta.correlation();
    e.c_3theta = e.at_3theta.correlation();
    e.s_max = 3.0 * e.c_theta - e.c_3theta;
    return e;
}

}  // namespace qwalk
