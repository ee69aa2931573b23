#include "qwalk/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "qwalk/accelerated.hpp"
#include "qwalk/oracles.hpp"
#include "qwalk/parallel.hpp"

namespace qwalk {

namespace {

constexpr std::uint64_t kEmissionStream = 1;
constexpr std::size_t kChunks = 256;
constexpr std::size_t kInverseGrid = 20001;

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

std::int64_t nearest_node(double x) { return static_cast<std::int64_t>(std::llround(x)); }

bool is_arc_family(const std::string& f) { return f == "ring_plane_wave" || f == "ring_stationary" || f == "sphere_arc"; }

bool is_box(const ScenarioSpec& s) { return s.force.kind == "box"; }

double arc_half_length(const ScenarioSpec& s) { return kPi * static_cast<double>(s.source.r); }

double wrap_arc(double x, double half) {
    const double period = 2.0 * half;
    double y = std::fmod(x + half, period);
    if (y < 0.0) y += period;
    return y - half;
}

double energy_sample(const ScenarioSpec& s, double vq) {
    // in a harmonic field the expected position is vq / omega, so both terms agree
    if (s.force.kind == "harmonic") return vq * vq;
    return 0.5 * vq * vq;
}

EnsembleStats empty_stats(const ScenarioSpec& s, std::uint64_t hash) {
    EnsembleStats st;
    st.momentum = BinnedHistogram(s.stats.momentum_lo, s.stats.momentum_hi, s.stats.momentum_bins);
    st.scenario_hash = hash;
    st.seed = s.seed;
    return st;
}

void record(EnsembleStats& st, const ScenarioSpec& s, std::int64_t x, double vq) {
    st.positions.add(x);
    st.momentum.add(vq);
    st.energy.add(energy_sample(s, vq));
    ++st.arrivals;
}

struct Draw {
    Rng& rng;
    int operator()(double p_plus, double p_zero) const {
        const double w = rng.uniform();
        if (w < p_plus) return 1;
        if (w < p_plus + p_zero) return 0;
        return -1;
    }
};

void run_full_model(const ScenarioSpec& s, const SourceEnsemble& ens, unsigned threads, RunResult& out) {
    const Environment1d env(build_field(s));
    EngineOptions opts;
    opts.quantum_forces = s.force.quantum_forces;
    opts.boson_cap = s.force.boson_cap;
    const Engine<double, 1> engine(opts);
    std::vector<EnsembleStats> parts(s.replicas, empty_stats(s, out.hash));
    std::vector<std::uint64_t> cells(s.replicas, 0);
    for_chunks(s.np, s.replicas, threads, [&](std::size_t c, std::size_t begin, std::size_t end) {
        LatticeStore<double, 1> lattice;
        for (std::size_t k = begin; k < end; ++k) {
            Rng rng(derive_seed(s.seed, kEmissionStream, k));
            const SourceDraw d = ens.sample(rng);
            auto p = make_particle<double>(nearest_node(d.x0[0]), d.v0[0], d.eps);
            const auto res = run_emission(engine, p, lattice, env, s.nt, Draw{rng});
            record(parts[c], s, res.arrival[0], res.vQ[0]);
        }
        cells[c] = lattice.size();
    });
    for (std::size_t c = 0; c < parts.size(); ++c) {
        out.stats.merge(parts[c]);
        out.lattice_cells += cells[c];
    }
}

void run_accelerated(const ScenarioSpec& s, const SourceEnsemble& ens, unsigned threads, RunResult& out) {
    const PairKernel kernel(ens);
    const ForceField field = build_field(s);
    const bool star = s.model == Model::Mstar;
    TrainedOptions topts;
    topts.n_tau = s.n_tau;
    if (is_box(s)) topts.box = s.force.a;
    MomentumInverse inverse;
    const bool use_inverse = !star && !kernel.empty() && kernel.weight_sum() > 1.0;
    if (use_inverse) inverse = MomentumInverse(kernel, kInverseGrid);
    const double t = static_cast<double>(s.nt);
    const AbcPoint abc =
        (!star && !is_box(s) && !is_arc_family(s.source.family)) ? abc_closed_form(field, t) : AbcPoint{1, t, 0, 0, 1, 0};

    std::vector<EnsembleStats> parts(kChunks, empty_stats(s, out.hash));
    for_chunks(s.np, kChunks, threads, [&](std::size_t c, std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            Rng rng(derive_seed(s.seed, kEmissionStream, k));
            const SourceDraw d = ens.sample(rng);
            const double v0 = d.v0[0];
            if (star) {
                const auto r = run_trained(kernel, field, topts, nearest_node(d.x0[0]), v0, s.nt, rng);
                std::int64_t x = r.x;
                if (is_arc_family(s.source.family)) x = nearest_node(wrap_arc(static_cast<double>(x), arc_half_length(s)));
                record(parts[c], s, x, r.vq);
                continue;
            }
            const double vq = use_inverse ? inverse(v0) : solve_vq(v0, kernel).vq;
            double x;
            if (is_box(s)) x = box_trajectory(d.x0[0], vq, static_cast<double>(s.force.a), t);
            else if (is_arc_family(s.source.family)) x = wrap_arc(d.x0[0] + vq * t, arc_half_length(s));
            else x = expected_trajectory(d.x0[0], vq, abc);
            record(parts[c], s, nearest_node(x), vq);
        }
    });
    for (const auto& p : parts) out.stats.merge(p);
}

void run_entangled(const ScenarioSpec& s, unsigned threads, RunResult& out) {
    ChshConfig cfg;
    cfg.half_separation = s.source.half_separation;
    cfg.t = s.nt;
    cfg.np = s.np;
    cfg.window = s.entangle.window;
    cfg.model = s.model == Model::M ? ChshModel::M : (s.model == Model::Mstar ? ChshModel::Mstar : ChshModel::Mstarstar);
    cfg.n_tau = s.n_tau;
    cfg.threads = threads;
    for (std::size_t i = 0; i < s.entangle.alphas.size(); ++i) {
        const double alpha = s.entangle.alphas[i];
        ChshRow row{alpha, s.entangle.beta, run_coincidences(cfg, alpha, s.entangle.beta, derive_seed(s.seed, 2, i))};
        out.chsh.push_back(std::move(row));
    }
    if (s.entangle.theta >= 0.0) out.smax = estimate_smax(cfg, s.entangle.theta, derive_seed(s.seed, 4, 0));
    // particle I arrivals of the first setting stand in for the position histogram
    if (!out.chsh.empty()) {
        for (const auto& [x, n] : out.chsh.front().counts.marginal) out.stats.positions.add(x, n);
        out.stats.arrivals = out.chsh.front().counts.pairs;
    }
}

std::vector<std::int64_t> source_nodes(const SourceEnsemble& ens) {
    std::vector<std::int64_t> xs;
    for (const auto& s : ens.sources()) {
        if (!s.image) xs.push_back(nearest_node(s.x[0]));
    }
    return xs;
}

void build_summary(RunResult& r, const SourceEnsemble& ens) {
    const auto& s = r.spec;
    Summary& out = r.summary;
    out.emplace_back("scenario", s.name);
    out.emplace_back("hash", hash_hex(r.hash));
    out.emplace_back("seed", std::to_string(s.seed));
    out.emplace_back("model", model_name(s.model));
    out.emplace_back("np", std::to_string(s.np));
    out.emplace_back("nt", std::to_string(s.nt));
    out.emplace_back("arrivals", std::to_string(r.stats.arrivals));
    if (s.model == Model::M && s.source.family != "entangled") {
        out.emplace_back("lattice_cells", std::to_string(r.lattice_cells));
    }

    if (s.source.family == "entangled") {
        for (const auto& row : r.chsh) {
            const std::string tag = "alpha=" + fmt(row.alpha);
            out.emplace_back("correlation[" + tag + "]",
                             row.counts.coincidences() ? fmt(row.counts.correlation()) : std::string("nan"));
            out.emplace_back("correlation_theory[" + tag + "]", fmt(correlation(row.alpha, row.beta)));
        }
        if (r.smax) {
            out.emplace_back("s_max", fmt(r.smax->s_max));
            out.emplace_back("s_max_theory", fmt(chsh_smax(s.entangle.theta)));
        }
        return;
    }

    const auto [lo, hi] = position_support(s, ens);
    const double n = static_cast<double>(r.stats.arrivals);
    if (auto pmf = position_theory(s, ens)) {
        out.emplace_back("position_tv", fmt(tv_distance(r.stats.positions, pmf, lo, hi, s.stats.pool)));
        const auto [clo, chi_hi] = fit_support(s, ens);
        std::vector<double> obs;
        double inside = 0.0;
        for (std::int64_t x = clo; x <= chi_hi; ++x) {
            obs.push_back(static_cast<double>(r.stats.positions.count(x)));
            inside += obs.back();
        }
        std::vector<double> expected;
        for (std::int64_t x = clo; x <= chi_hi; ++x) expected.push_back(pmf(x) * n);
        const double mass = std::accumulate(expected.begin(), expected.end(), 0.0);
        obs.push_back(n - inside);
        expected.push_back(std::max(0.0, n - mass));
        try {
            const auto chi = chi_square(obs, expected);
            out.emplace_back("position_chi2", fmt(chi.statistic));
            out.emplace_back("position_chi2_dof", std::to_string(chi.dof));
            out.emplace_back("position_chi2_p", fmt(chi.p_value));
        } catch (const std::invalid_argument&) {
            out.emplace_back("position_chi2", "nan");
        }
    }
    if (s.source.family == "two_slit") {
        const double delta = 2.0 * s.source.half_separation;
        const double period = 2.0 * static_cast<double>(s.nt) / delta;
        out.emplace_back("visibility", fmt(fringe_visibility(r.stats.positions, period, 0.0, lo, hi, s.stats.phase_bins)));
        out.emplace_back("visibility_theory", fmt(2.0 * std::sqrt(s.source.p_plus * (1.0 - s.source.p_plus))));
    }
    if (r.stats.momentum.in_range() > 0) {
        auto peaks = peak_detect(r.stats.momentum);
        if (peaks.size() > 4) peaks.resize(4);
        std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.location < b.location; });
        std::string list;
        for (std::size_t i = 0; i < peaks.size(); ++i) list += (i ? "," : "") + fmt(peaks[i].location);
        out.emplace_back("momentum_peaks", list);
    }
    if (s.force.kind == "delta") {
        const double x0 = s.source.family == "gaussian" ? s.source.centre : s.source.x0;
        const int side = x0 >= 0.0 ? 1 : -1;
        const double ref = reflection_ratio(r.stats.positions, 0, side);
        out.emplace_back("ref", fmt(ref));
        out.emplace_back("tra", fmt(1.0 - ref));
    }
    out.emplace_back("energy_mean", fmt(r.stats.energy.mean()));
    for (const auto& kv : theory_summary(s)) out.push_back(kv);
}

}  // namespace

std::pair<std::int64_t, std::int64_t> fit_support(const ScenarioSpec& s, const SourceEnsemble& ens) {
    const bool free_points = s.force.kind == "none" && !is_box(s) && !is_arc_family(s.source.family) &&
                             s.source.family != "gaussian";
    if (!free_points) return position_support(s, ens);
    // Only nodes strictly inside every light cone, where each source contributes.
    const auto xs = source_nodes(ens);
    const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
    return {*mx - s.nt + 1, *mn + s.nt - 1};
}

std::pair<std::int64_t, std::int64_t> position_support(const ScenarioSpec& s, const SourceEnsemble& ens) {
    if (is_box(s)) return {-s.force.a, s.force.a};
    if (is_arc_family(s.source.family)) {
        const auto h = nearest_node(arc_half_length(s));
        return {-h, h};
    }
    const auto xs = source_nodes(ens);
    const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
    if (s.force.kind == "harmonic" || s.force.kind == "constant") {
        const AbcPoint abc = abc_closed_form(build_field(s), static_cast<double>(s.nt));
        const double a = abc.A * static_cast<double>(*mn) + abc.C;
        const double b = abc.A * static_cast<double>(*mx) + abc.C;
        const double reach = std::fabs(abc.B) + 2.0;
        return {static_cast<std::int64_t>(std::floor(std::min(a, b) - reach)),
                static_cast<std::int64_t>(std::ceil(std::max(a, b) + reach))};
    }
    return {*mn - s.nt, *mx + s.nt};
}

std::function<double(std::int64_t)> position_theory(const ScenarioSpec& s, const SourceEnsemble& ens) {
    const auto& f = s.source.family;
    const auto& k = s.force.kind;
    const double t = static_cast<double>(s.nt);
    const auto& src = s.source;
    if (f == "entangled" || f == "sphere_arc") return {};
    if (k == "none") {
        if (f == "single") {
            const auto x0 = nearest_node(src.x0);
            return [x0, n = s.nt](std::int64_t x) { return std::llabs(x - x0) <= n ? single_source_pmf(n) : 0.0; };
        }
        if (f == "gaussian") {
            return [=](std::int64_t x) { return gaussian_free_pdf(static_cast<double>(x), t, src.centre, src.width, src.v_phi); };
        }
        if (f == "ring_plane_wave") return [r = static_cast<double>(src.r)](std::int64_t) { return ring_plane_pdf(r); };
        if (f == "ring_stationary") {
            return [=](std::int64_t x) { return ring_stationary_pdf(static_cast<double>(x), src.level, static_cast<double>(src.r)); };
        }
        return [ens, t](std::int64_t x) { return pdf_free(static_cast<double>(x), t, ens); };
    }
    if (k == "constant" || k == "harmonic") {
        const ForceField field = build_field(s);
        const AbcPoint abc = abc_closed_form(field, t);
        if (f == "single" && k == "harmonic") {
            return [=](std::int64_t x) { return ho_single_pdf(static_cast<double>(x), t, src.x0, s.force.omega); };
        }
        if (f == "ho_stationary") return [=](std::int64_t x) { return ho_stationary_pdf(static_cast<double>(x), src.level, src.omega); };
        if (f == "gaussian" && k == "harmonic") {
            return [=](std::int64_t x) {
                return gaussian_ho_pdf(static_cast<double>(x), t, src.centre, src.width, src.v_phi, s.force.omega);
            };
        }
        if (f == "gaussian") {
            return [=](std::int64_t x) {
                return gaussian_faller_pdf(static_cast<double>(x), t, src.centre, src.width, src.v_phi, s.force.phi);
            };
        }
        if (f == "single") {
            return [=](std::int64_t x) {
                const double c = abc.A * src.x0 + abc.C;
                return std::fabs(static_cast<double>(x) - c) <= std::fabs(abc.B) ? 1.0 / (2.0 * std::fabs(abc.B)) : 0.0;
            };
        }
        return [ens, abc](std::int64_t x) { return pdf_quadratic(static_cast<double>(x), ens, abc); };
    }
    if (k == "box") {
        const double a = static_cast<double>(s.force.a);
        if (f == "box_stationary") return [=](std::int64_t x) { return box_stationary_pdf(static_cast<double>(x), src.level, a); };
        if (f == "box_single") {
            return [=](std::int64_t x) { return std::norm(box_kernel_images(static_cast<double>(x), t, src.x0, a, 64)); };
        }
        return {};
    }
    if (k == "delta") {
        const double lambda = s.force.lambda;
        if (f == "single") return [=](std::int64_t x) { return delta_single_pdf(static_cast<double>(x), t, src.x0, lambda); };
        if (f == "gaussian") {
            return [=](std::int64_t x) {
                return std::norm(delta_gaussian_amplitude(static_cast<double>(x), t, src.centre, src.width, src.v_phi, lambda));
            };
        }
    }
    return {};
}

std::function<double(double)> momentum_theory(const ScenarioSpec& s, const SourceEnsemble& ens) {
    if (s.source.family == "entangled") return {};
    if (s.source.family == "ho_stationary") {
        return [n = s.source.level, w = s.source.omega](double v) { return ho_momentum_pdf(v, n, w); };
    }
    return [ens](double v) { return std::fabs(v) <= 1.0 ? pdf_momentum(v, ens) : 0.0; };
}

Summary theory_summary(const ScenarioSpec& s) {
    Summary out;
    const auto& src = s.source;
    const auto& f = src.family;
    if (f == "ho_stationary") out.emplace_back("energy_theory", fmt(ho_energy(src.level, src.omega)));
    if (f == "box_stationary") {
        out.emplace_back("energy_theory", fmt(box_energy(src.level, static_cast<double>(src.a))));
        out.emplace_back("momentum_peak_theory", fmt(box_momentum_peak(src.level, static_cast<double>(src.a))));
    }
    if (f == "ring_plane_wave") {
        const double v = ring_momentum_peak(src.m, static_cast<double>(src.r));
        out.emplace_back("energy_theory", fmt(0.5 * v * v));
        out.emplace_back("momentum_peak_theory", fmt(v));
    }
    if (f == "sphere_arc") {
        out.emplace_back("energy_theory", fmt(sphere_energy_peak(src.ell, static_cast<double>(src.r))));
        out.emplace_back("momentum_peak_theory",
                         fmt(sphere_theta_peak(src.ell, src.m, kPi / 2.0, static_cast<double>(src.r))));
    }
    if (s.force.kind == "delta") {
        if (f == "gaussian") {
            out.emplace_back("ref_theory", fmt(1.0 - tra_plane(s.force.lambda, src.v_phi)));
        } else {
            out.emplace_back("ref_theory", fmt(1.0 - tra_single(s.force.lambda)));
        }
    }
    if (f == "entangled" && s.entangle.theta >= 0.0) out.emplace_back("s_max_theory", fmt(chsh_smax(s.entangle.theta)));
    return out;
}

RunResult run_scenario(const ScenarioSpec& spec, unsigned threads) {
    validate(spec);
    RunResult r;
    r.spec = spec;
    r.hash = scenario_hash(spec);
    r.stats = empty_stats(spec, r.hash);
    if (spec.source.family == "entangled") {
        run_entangled(spec, threads, r);
        build_summary(r, SourceEnsemble{});
        return r;
    }
    const SourceEnsemble ens = build_ensemble(spec);
    if (spec.model == Model::M) run_full_model(spec, ens, threads, r);
    else run_accelerated(spec, ens, threads, r);
    build_summary(r, ens);
    return r;
}

std::string csv_header(const RunResult& r) {
    return "# qwalk-csv v1 scenario=" + hash_hex(r.hash) + " seed=" + std::to_string(r.spec.seed) + "\n";
}

std::string positions_csv(const RunResult& r) {
    std::ostringstream os;
    os << csv_header(r) << "node,count,theory\n";
    if (r.spec.source.family == "entangled") {
        for (const auto& [x, n] : r.stats.positions.counts()) os << x << ',' << n << ",nan\n";
        return os.str();
    }
    const SourceEnsemble ens = build_ensemble(r.spec);
    const auto pmf = position_theory(r.spec, ens);
    auto [lo, hi] = position_support(r.spec, ens);
    if (!r.stats.positions.empty()) {
        lo = std::min(lo, r.stats.positions.counts().begin()->first);
        hi = std::max(hi, r.stats.positions.counts().rbegin()->first);
    }
    const double n = static_cast<double>(r.stats.arrivals);
    for (std::int64_t x = lo; x <= hi; ++x) {
        os << x << ',' << r.stats.positions.count(x) << ',' << (pmf ? fmt(pmf(x) * n) : std::string("nan")) << '\n';
    }
    return os.str();
}

std::string momentum_csv(const RunResult& r) {
    std::ostringstream os;
    os << csv_header(r) << "bin_center,count,theory\n";
    const auto& h = r.stats.momentum;
    std::function<double(double)> pdf;
    if (r.spec.source.family != "entangled") pdf = momentum_theory(r.spec, build_ensemble(r.spec));
    const double n = static_cast<double>(r.stats.arrivals);
    for (std::size_t i = 0; i < h.bins(); ++i) {
        const double c = h.center(i);
        os << fmt(c) << ',' << h.counts()[i] << ',' << (pdf ? fmt(pdf(c) * h.width() * n) : std::string("nan")) << '\n';
    }
    return os.str();
}

std::string chsh_csv(const RunResult& r) {
    std::ostringstream os;
    os << csv_header(r) << "alpha,beta,plus_plus,minus_minus,plus_minus,minus_plus,coincidences,correlation,theory\n";
    for (const auto& row : r.chsh) {
        const auto& c = row.counts;
        os << fmt(row.alpha) << ',' << fmt(row.beta) << ',' << c.plus_plus << ',' << c.minus_minus << ','
           << c.plus_minus << ',' << c.minus_plus << ',' << c.coincidences() << ','
           << (c.coincidences() ? fmt(c.correlation()) : std::string("nan")) << ','
           << fmt(correlation(row.alpha, row.beta)) << '\n';
    }
    return os.str();
}

std::string summary_text(const Summary& s) {
    std::string out;
    for (const auto& [k, v] : s) out += k + "=" + v + "\n";
    return out;
}

std::vector<std::string> write_artifacts(const RunResult& r, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<std::string> written;
    auto put = [&](const std::string& name, const std::string& body) {
        const fs::path p = fs::path(dir) / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + p.string());
        out << body;
        written.push_back(p.string());
    };
    put("positions.csv", positions_csv(r));
    put("momentum.csv", momentum_csv(r));
    if (r.spec.source.family == "entangled") put("chsh.csv", chsh_csv(r));
    put("summary.txt", summary_text(r.summary));
    return written;
}

}  // namespace qwalk
