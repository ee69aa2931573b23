#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "qwalk/entangle.hpp"
#include "qwalk/forces.hpp"
#include "qwalk/lattice.hpp"
#include "qwalk/oracles.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/runner.hpp"
#include "qwalk/scenario.hpp"

using namespace qwalk;

namespace {

using Clock = std::chrono::steady_clock;

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

struct Verdict {
    bool pass = true;
    std::string detail;
    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [miss]");
    }
};

int failures = 0;

void report(int id, const std::string& title, const Verdict& v) {
    std::printf("%s criterion %d %s: %s\n", v.pass ? "PASS" : "FAIL", id, title.c_str(), v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failures;
}

ScenarioSpec catalog_spec(const std::string& name) {
    const auto* e = find_catalog(name);
    if (!e) throw std::runtime_error("missing catalog entry " + name);
    return parse_scenario_text(e->text);
}

double summary_value(const RunResult& r, const std::string& key) {
    for (const auto& [k, v] : r.summary) {
        if (k == key) return std::stod(v);
    }
    throw std::runtime_error("summary has no key " + key);
}

struct Draw {
    Rng& rng;
    int operator()(double p_plus, double p_zero) const {
        const double w = rng.uniform();
        return w < p_plus ? 1 : (w < p_plus + p_zero ? 0 : -1);
    }
};

Verdict table_replay() {
    using R = Rational;
    using Label = PairLabel<1>;
    const auto start = Clock::now();
    LatticeStore<R, 1> lat;
    lat.create({3}, 3, {3}, R(0)).bosons.push_back({Label{{2}, {0}}, R(1, 5), R(1, 5), 0});
    lat.create({2}, 4, {2}, R(0)).bosons.push_back({Label{{2}, {0}}, R(1, 10), R(0), 0});
    lat.create({1}, 5, {1}, R(0)).bosons.push_back({Label{{2}, {0}}, R(0), R(0), 0});
    lat.create({2}, 6, {0}, R(0)).bosons.push_back({Label{{0}, {2}}, R(-1, 10), R(-1, 10), 0});
    auto p = make_particle<R>(2, R(3, 10));
    const Engine<R, 1> engine;
    const FreeEnvironment<R, 1> env;
    const int moves[] = {1, 0, 0, -1, -1, 1};
    std::size_t next = 0;
    auto forced = [&](double, double) { return moves[next++]; };

    const std::int64_t spans[] = {1, 1, 3, 2, 1, 0};
    const int resets[] = {0, 0, 1, 0, 0, 1};
    const std::int64_t lambda33[] = {3, 3, 1, 1, 1, 1};
    const std::int64_t lambda62[] = {0, 0, 0, 0, 0, 2};
    const double printed_vq[] = {0.3, 0.3, 0.2, 0.25, 0.2625, 0.3188};
    int exact = 0, vq_ok = 0;
    for (int n = 0; n < 6; ++n) {
        const auto rec = engine.advance(p, lat, env, forced);
        const bool rows = p.ell[0] == spans[n] && int(rec.reset) == resets[n] &&
                          lat.find({3}, 3)->trace[0] == lambda33[n] && lat.find({2}, 6)->trace[0] == lambda62[n] &&
                          lat.find({2}, 4)->trace[0] == 2 && lat.find({1}, 5)->trace[0] == 1;
        exact += rows ? 1 : 0;
        vq_ok += std::fabs(p.vQ[0].to_double() - printed_vq[n]) < 5e-5 ? 1 : 0;
    }
    const double elapsed = seconds_since(start);
    Verdict v;
    v.check(exact == 6, "span/reset/trace rows exact " + std::to_string(exact) + "/6");
    v.check(vq_ok == 6, "momentum rows to 4 decimals " + std::to_string(vq_ok) + "/6");
    v.check(elapsed < 1.0, "runtime " + format("%.4f s", elapsed));
    return v;
}

Verdict decay_identities() {
    const auto start = Clock::now();
    Verdict v;
    double worst = 0.0;
    for (int tenth = 1; tenth <= 9; ++tenth) {
        const double wbar = tenth / 10.0;
        LatticeBoson<double, 1> b{{}, wbar, wbar, 0};
        for (int k = 0; k < 100000; ++k) lb_decay(b);
        worst = std::max(worst, std::fabs(b.omega - std::sin(kPi * wbar) / kPi));
    }
    v.check(worst < 1e-4, "lattice product max error " + format("%.2e", worst));

    bool exact = true;
    ParticleBoson<Rational, 1> pb;
    pb.momentum = Rational(1);
    std::int64_t central = 1;
    for (int k = 1; k <= 20; ++k) {
        pb_decay(pb);
        central = central * (2 * k) * (2 * k - 1) / (k * k);
        exact = exact && pb.momentum == Rational(central) / Rational(std::int64_t{1} << (2 * k));
    }
    v.check(exact, "particle factors exact for k <= 20");

    Rng rng(2024);
    double worst_sigma = 0.0;
    for (const double P : {0.05, 0.2, 0.5, 0.8}) {
        const double v0 = 0.6;
        const int n = 400000;
        double sum = 0.0, sum2 = 0.0;
        for (int s = 0; s < n; ++s) {
            ParticleBoson<double, 1> b;
            b.momentum = v0;
            while (rng.uniform() >= P) pb_decay(b);
            sum += b.momentum;
            sum2 += b.momentum * b.momentum;
        }
        const double mean = sum / n;
        const double se = std::sqrt((sum2 / n - mean * mean) / n);
        worst_sigma = std::max(worst_sigma, std::fabs(mean - v0 * std::sqrt(P)) / se);
    }
    v.check(worst_sigma < 3.0, "reset mean worst deviation " + format("%.2f sigma", worst_sigma));
    const double elapsed = seconds_since(start);
    v.check(elapsed < 10.0, "runtime " + format("%.2f s", elapsed));
    return v;
}

Verdict free_single_source() {
    const auto start = Clock::now();
    const auto s = catalog_spec("free_single");
    const Engine<double, 1> engine;
    const FreeEnvironment<double, 1> env;
    const auto ens = build_ensemble(s);
    const std::int64_t t = s.nt;
    struct Part {
        NodeHistogram positions;
        std::map<std::int64_t, double> action;
    };
    std::vector<Part> parts(s.replicas);
    for_chunks(s.np, s.replicas, threads(), [&](std::size_t c, std::size_t begin, std::size_t end) {
        LatticeStore<double, 1> lattice;
        for (std::size_t k = begin; k < end; ++k) {
            Rng rng(derive_seed(s.seed, 1, k));
            const auto d = ens.sample(rng);
            auto p = make_particle<double>(std::llround(d.x0[0]), d.v0[0], d.eps);
            const auto res = run_emission(engine, p, lattice, env, t, Draw{rng});
            parts[c].positions.add(res.arrival[0]);
            parts[c].action[res.arrival[0]] += static_cast<double>(res.action);
        }
    });
    NodeHistogram positions;
    std::map<std::int64_t, double> action;
    for (const auto& p : parts) {
        positions.merge(p.positions);
        for (const auto& [x, a] : p.action) action[x] += a;
    }
    Verdict v;
    const double flat = single_source_pmf(t);
    const double tv = tv_distance(positions, [&](std::int64_t) { return flat; }, -t, t, s.stats.pool);
    v.check(tv < 0.05, "TV " + format("%.4f", tv));

    // pooled windows of 11 nodes around sampled nodes
    double worst = 0.0;
    for (std::int64_t centre : {-400, -250, -100, 0, 100, 250, 400}) {
        double observed = 0.0, expected = 0.0;
        for (std::int64_t x = centre - 5; x <= centre + 5; ++x) {
            const double n = static_cast<double>(positions.count(x));
            observed += action.count(x) ? action.at(x) : 0.0;
            expected += n * expected_action(x, t, 0).to_double();
        }
        worst = std::max(worst, std::fabs(observed / expected - 1.0));
    }
    v.check(worst < 0.02, "action mean worst relative error " + format("%.4f", worst));
    v.detail += "; runtime " + format("%.1f s", seconds_since(start));
    return v;
}

Verdict two_source_interference() {
    Verdict v;
    for (const char* name : {"two_slit", "two_slit_asym"}) {
        const auto r = run_scenario(catalog_spec(name), threads());
        const double vis = summary_value(r, "visibility");
        const double theory = summary_value(r, "visibility_theory");
        const double p = summary_value(r, "position_chi2_p");
        const std::string tag = std::string(name) + " ";
        v.check(std::fabs(vis - theory) <= 0.1 * theory,
                tag + "visibility " + format("%.3f", vis) + " vs " + format("%.3f", theory));
        v.check(p > 1e-3, tag + "chi2 p " + format("%.3g", p));
    }
    return v;
}

bool has_peak_near(const BinnedHistogram& h, double where) {
    for (const auto& pk : peak_detect(h)) {
        if (std::fabs(pk.location - where) <= h.width()) return true;
    }
    return false;
}

Verdict quantization_peaks() {
    Verdict v;
    for (const char* name : {"box_n3", "box_n5"}) {
        const auto s = catalog_spec(name);
        const auto r = run_scenario(s, threads());
        const double peak = s.source.level / 20.0;
        v.check(has_peak_near(r.stats.momentum, peak) && has_peak_near(r.stats.momentum, -peak),
                std::string(name) + " peaks at +-" + format("%.3f", peak));
    }
    {
        const auto r = run_scenario(catalog_spec("ring_m4"), threads());
        v.check(has_peak_near(r.stats.momentum, 4.0 / (10.0 * kPi)), "ring peak at " + format("%.4f", 4.0 / (10.0 * kPi)));
    }
    {
        const auto r = run_scenario(catalog_spec("sphere_l4"), threads());
        v.check(has_peak_near(r.stats.momentum, 0.0142) && has_peak_near(r.stats.momentum, -0.0142),
                "sphere peaks at +-0.0142");
    }
    return v;
}

Verdict harmonic_oscillator() {
    Verdict v;
    {
        const auto s = catalog_spec("ho_single");
        const auto r = run_scenario(s, threads());
        const double flat = 1.0 / 337.0;
        const double tv = tv_distance(r.stats.positions, [&](std::int64_t x) { return std::abs(x) <= 168 ? flat : 0.0; },
                                      -168, 168, s.stats.pool);
        v.check(tv < 0.05, "single-source flat TV " + format("%.4f", tv));
    }
    for (int n : {5, 1, 2, 4}) {
        auto s = catalog_spec("ho_stationary");
        s.source.level = n;
        const auto r = run_scenario(s, threads());
        const std::string tag = "n=" + std::to_string(n) + " ";
        if (n == 5) {
            const double e = summary_value(r, "energy_mean"), th = summary_value(r, "energy_theory");
            v.check(std::fabs(e / th - 1.0) < 0.05, tag + "energy ratio " + format("%.4f", e / th));
            continue;
        }
        const auto& h = r.stats.momentum;
        const double total = static_cast<double>(h.total());
        std::vector<double> obs, exp;
        double mass = 0.0;
        for (std::size_t i = 0; i < h.bins(); ++i) {
            const double lo = h.lo() + static_cast<double>(i) * h.width();
            const double m = integrate([&](double q) { return ho_momentum_pdf(q, n, s.source.omega); }, lo, lo + h.width());
            obs.push_back(static_cast<double>(h.counts()[i]));
            exp.push_back(m * total);
            mass += m;
        }
        obs.push_back(static_cast<double>(h.underflow() + h.overflow()));
        exp.push_back(std::max(0.0, 1.0 - mass) * total);
        const auto chi = chi_square(obs, exp);
        v.check(chi.p_value > 1e-3, tag + "momentum chi2 p " + format("%.3g", chi.p_value));
    }
    return v;
}

Verdict tunnelling() {
    Verdict v;
    double worst = 0.0;
    for (double lambda : {0.0, 0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.5, 0.8, 1.2}) {
        auto s = catalog_spec("delta_single");
        s.force.lambda = lambda;
        const auto r = run_scenario(s, threads());
        worst = std::max(worst, std::fabs(summary_value(r, "ref") - (1.0 - tra_single(lambda))));
    }
    v.check(worst <= 0.05, "single source worst |REF - theory| " + format("%.3f", worst));
    for (double lambda : {0.05, 0.1, 0.2}) {
        auto s = catalog_spec("delta_gaussian");
        s.force.lambda = lambda;
        const auto r = run_scenario(s, threads());
        const double ref = summary_value(r, "ref"), th = 1.0 - tra_plane(lambda, s.source.v_phi);
        v.check(std::fabs(ref - th) <= 0.08,
                "Gaussian lambda " + format("%.2f", lambda) + " REF " + format("%.3f", ref) + " vs " + format("%.3f", th));
    }
    return v;
}

double marginal_tv(const CoincidenceCounts& a, const CoincidenceCounts& b) {
    std::map<std::int64_t, std::pair<double, double>> m;
    for (const auto& [x, n] : a.marginal) m[x].first = static_cast<double>(n) / static_cast<double>(a.pairs);
    for (const auto& [x, n] : b.marginal) m[x].second = static_cast<double>(n) / static_cast<double>(b.pairs);
    double tv = 0.0;
    for (const auto& [x, p] : m) tv += std::fabs(p.first - p.second);
    return 0.5 * tv;
}

Verdict entanglement() {
    ChshConfig cfg;
    cfg.np = 2000000;
    cfg.t = 100;
    cfg.window = 2;
    cfg.threads = threads();
    Verdict v;
    double worst = 0.0;
    std::vector<CoincidenceCounts> replicas;
    for (double alpha : {0.0, 0.25, 0.5, 0.75}) {
        const auto c = run_coincidences(cfg, alpha, 0.0, derive_seed(7, 2, static_cast<std::uint64_t>(alpha * 100)));
        const double corr = correlation(alpha, 0.0);
        const auto r = c.rates();
        const double same = (1 + corr) / 4, opposite = (1 - corr) / 4;
        worst = std::max({worst, std::fabs(r[0] - same), std::fabs(r[1] - same), std::fabs(r[2] - opposite),
                          std::fabs(r[3] - opposite)});
        if (alpha == 0.25) replicas.push_back(c);
    }
    v.check(worst <= 0.1, "rates worst deviation " + format("%.3f", worst));

    const auto e = estimate_smax(cfg, kPi / 4, derive_seed(7, 4, 0));
    v.check(e.s_max > 2.5, "S_max " + format("%.3f", e.s_max));

    for (std::uint64_t k = 1; k <= 3; ++k) replicas.push_back(run_coincidences(cfg, 0.25, 0.0, derive_seed(8, 2, k)));
    std::vector<double> noise;
    for (std::size_t i = 0; i < replicas.size(); ++i) {
        for (std::size_t j = i + 1; j < replicas.size(); ++j) noise.push_back(marginal_tv(replicas[i], replicas[j]));
    }
    double mean = 0.0, var = 0.0;
    for (double x : noise) mean += x / noise.size();
    for (double x : noise) var += (x - mean) * (x - mean) / (noise.size() - 1);
    const double floor = mean + 3.0 * std::sqrt(var);
    const auto remote = run_coincidences(cfg, 0.25, 0.5, derive_seed(9, 2, 0));
    const double tv = marginal_tv(replicas.front(), remote);
    v.check(tv <= floor, "remote-setting marginal TV " + format("%.5f", tv) + " vs floor " + format("%.5f", floor));
    return v;
}

Verdict oracle_consistency() {
    Verdict v;
    double norm = 0.0;
    auto track = [&](double value) { norm = std::max(norm, std::fabs(value - 1.0)); };
    for (const auto& ens : {single_source(0.0), two_slit(1.0, 0.5), two_slit(1.0, 0.1), comb(3, 2.0)}) {
        track(integrate([&](double x) { return pdf_free(x, 500.0, ens); }, -500.0, 500.0));
        track(integrate([&](double q) { return pdf_momentum(q, ens); }, -1.0, 1.0));
    }
    track(integrate([](double x) { return gaussian_free_pdf(x, 500.0, 10.0, 10.0, -0.3); }, -2000.0, 2000.0));
    track(integrate([](double x) { return gaussian_faller_pdf(x, 200.0, 0.0, 5.0, 0.1, -0.001); }, -500.0, 500.0));
    track(integrate([](double x) { return ho_single_pdf(x, 200.0, 0.0, 0.005); }, -168.2941, 168.2941));
    for (int n : {0, 1, 2, 4, 5}) {
        track(integrate([&](double x) { return ho_stationary_pdf(x, n, 1e-3); }, -400.0, 400.0));
        track(integrate([&](double q) { return ho_momentum_pdf(q, n, 1e-3); }, -0.3, 0.3));
    }
    for (int n : {1, 3, 5}) track(integrate([&](double x) { return box_stationary_pdf(x, n, 10.0); }, -10.0, 10.0));
    for (int n : {0, 4}) {
        track(integrate([&](double s) { return ring_stationary_pdf(s, n, 10.0); }, -10.0 * kPi, 10.0 * kPi));
    }
    track(2.0 * kPi * integrate([](double th) { return sphere_stationary_weight(th, 4, 0) * std::sin(th); }, 0.0, kPi));
    v.check(norm < 1e-6, "normalization " + format("%.1e", norm));

    double cosine = 0.0;
    const double t = 137.0;
    for (const auto& ens : {two_slit(1.0, 0.5), two_slit(3.0, 0.2, 0.25, -0.1), comb(5, 2.0), plane_wave(6, 0.3)}) {
        const auto abc = abc_closed_form(ForceField::harmonic(0.004), t);
        for (double x = -150.0; x <= 150.0; x += 7.3) {
            cosine = std::max(cosine, std::fabs(pdf_free(x, t, ens) - std::norm(amplitude_free(x, t, ens))));
            cosine = std::max(cosine, std::fabs(pdf_quadratic(x, ens, abc) - std::norm(amplitude_quadratic(x, ens, abc))));
        }
    }
    const auto e2 = comb_2d(3, 2.0, 1.0);
    for (double x1 = -20.0; x1 <= 20.0; x1 += 3.1) {
        for (double x2 = -20.0; x2 <= 20.0; x2 += 4.3) {
            cosine = std::max(cosine, std::fabs(pdf_free_2d(x1, x2, 40.0, e2) - std::norm(amplitude_free_2d(x1, x2, 40.0, e2))));
        }
    }
    v.check(cosine < 1e-12, "cosine sums " + format("%.1e", cosine));

    double wig = 0.0;
    const std::int64_t tw = 500;
    const auto ens = two_slit(1.0, 0.1);
    const auto abc = abc_closed_form(ForceField{}, static_cast<double>(tw));
    for (double q = -0.9; q <= 0.9; q += 0.15) {
        double sum = 0.0;
        for (std::int64_t x = -tw - 1; x <= tw + 1; ++x) sum += wigner(x, q, tw, ens);
        wig = std::max(wig, std::fabs(sum - pdf_momentum(q, ens)));
    }
    for (std::int64_t x = -400; x <= 400; x += 37) {
        const double marginal = integrate([&](double q) { return wigner(x, q, tw, ens); }, -1.0, 1.0);
        wig = std::max(wig, std::fabs(marginal - position_from_momentum(static_cast<double>(x), ens, abc)));
        wig = std::max(wig, std::fabs(marginal - pdf_free(static_cast<double>(x), static_cast<double>(tw), ens)));
    }
    v.check(wig < 1e-4, "Wigner marginals " + format("%.1e", wig));

    double wr = 0.0;
    for (const auto& field : {ForceField::free_field(), ForceField::constant(0.02), ForceField::harmonic(0.005)}) {
        const auto c = quadratic_abc(field, 500);
        for (std::size_t k = 0; k < c.size(); ++k) wr = std::max(wr, std::fabs(c.wronskian(k) - 1.0));
    }
    v.check(wr < 1e-9, "Wronskian " + format("%.1e", wr));

    double res = 0.0;
    for (double x : {-30.0, 0.0, 12.0, 45.0}) res = std::max(res, ho_ground_residual(0.005, 137.0, x, 400));
    v.check(res < 1e-3, "oscillator ground residual " + format("%.1e", res));
    return v;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"worked-example replay", table_replay},
        {"decay identities", decay_identities},
        {"free single source", free_single_source},
        {"two-source interference", two_source_interference},
        {"quantization peaks", quantization_peaks},
        {"harmonic oscillator", harmonic_oscillator},
        {"tunnelling", tunnelling},
        {"entanglement and CHSH", entanglement},
        {"oracle self-consistency", oracle_consistency},
    };
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v.check(false, std::string("error: ") + e.what());
        }
        report(static_cast<int>(i + 1), criteria[i].first, v);
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
