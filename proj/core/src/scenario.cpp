#include "qwalk/scenario.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace qwalk {

Model parse_model(const std::string& s) {
    if (s == "M") return Model::M;
    if (s == "Mstar") return Model::Mstar;
    if (s == "Mstarstar") return Model::Mstarstar;
    throw ConfigError("scenario.model", "expected M, Mstar or Mstarstar, got '" + s + "'");
}

std::string model_name(Model m) {
    switch (m) {
        case Model::M:
            return "M";
        case Model::Mstar:
            return "Mstar";
        case Model::Mstarstar:
            return "Mstarstar";
    }
    return "?";
}

namespace {

template <class T>
T parse_number(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    T out{};
    in >> out;
    if (in.fail() || !(in >> std::ws).eof()) throw ConfigError(key, "cannot parse '" + value + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw ConfigError(key, "expected a boolean, got '" + value + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse_number<double>(key, item));
    if (out.empty()) throw ConfigError(key, "empty list");
    return out;
}

using Setter = std::function<void(ScenarioSpec&, const std::string& key, const std::string& value)>;

template <class T, class Field>
Setter num(Field field) {
    return [field](ScenarioSpec& s, const std::string& k, const std::string& v) { s.*field = parse_number<T>(k, v); };
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        t["scenario.name"] = [](ScenarioSpec& s, const std::string&, const std::string& v) { s.name = v; };
        t["scenario.description"] = [](ScenarioSpec& s, const std::string&, const std::string& v) {
            s.description = v;
        };
        t["scenario.model"] = [](ScenarioSpec& s, const std::string&, const std::string& v) { s.model = parse_model(v); };
        t["scenario.dims"] = num<int>(&ScenarioSpec::dims);
        t["scenario.np"] = num<std::uint64_t>(&ScenarioSpec::np);
        t["scenario.nt"] = num<std::int64_t>(&ScenarioSpec::nt);
        t["scenario.seed"] = num<std::uint64_t>(&ScenarioSpec::seed);
        t["scenario.replicas"] = num<unsigned>(&ScenarioSpec::replicas);
        t["scenario.n_tau"] = num<std::int64_t>(&ScenarioSpec::n_tau);
        t["output.dir"] = [](ScenarioSpec& s, const std::string&, const std::string& v) { s.out_dir = v; };

        auto src = [&t](const std::string& key, auto member) {
            using T = std::remove_reference_t<decltype(SourceSpec{}.*member)>;
            t["source." + key] = [member](ScenarioSpec& s, const std::string& k, const std::string& v) {
                s.source.*member = parse_number<T>(k, v);
            };
        };
        t["source.family"] = [](ScenarioSpec& s, const std::string&, const std::string& v) { s.source.family = v; };
        src("x0", &SourceSpec::x0);
        src("half_separation", &SourceSpec::half_separation);
        src("p_plus", &SourceSpec::p_plus);
        src("eps_plus", &SourceSpec::eps_plus);
        src("eps_minus", &SourceSpec::eps_minus);
        src("count", &SourceSpec::count);
        src("spacing", &SourceSpec::spacing);
        src("length", &SourceSpec::length);
        src("v_phi", &SourceSpec::v_phi);
        src("centre", &SourceSpec::centre);
        src("width", &SourceSpec::width);
        src("level", &SourceSpec::level);
        src("omega", &SourceSpec::omega);
        src("a", &SourceSpec::a);
        src("images", &SourceSpec::images);
        src("r", &SourceSpec::r);
        src("m", &SourceSpec::m);
        src("ell", &SourceSpec::ell);

        auto frc = [&t](const std::string& key, auto member) {
            using T = std::remove_reference_t<decltype(ForceSpec{}.*member)>;
            t["force." + key] = [member](ScenarioSpec& s, const std::string& k, const std::string& v) {
                s.force.*member = parse_number<T>(k, v);
            };
        };
        t["force.kind"] = [](ScenarioSpec& s, const std::string&, const std::string& v) { s.force.kind = v; };
        frc("phi", &ForceSpec::phi);
        frc("omega", &ForceSpec::omega);
        frc("lambda", &ForceSpec::lambda);
        frc("width", &ForceSpec::width);
        frc("a", &ForceSpec::a);
        frc("boson_cap", &ForceSpec::boson_cap);
        t["force.quantum_forces"] = [](ScenarioSpec& s, const std::string& k, const std::string& v) {
            s.force.quantum_forces = parse_bool(k, v);
        };

        t["stats.momentum_bins"] = [](ScenarioSpec& s, const std::string& k, const std::string& v) {
            s.stats.momentum_bins = parse_number<std::size_t>(k, v);
        };
        t["stats.momentum_lo"] = [](ScenarioSpec& s, const std::string& k, const std::string& v) {
            s.stats.momentum_lo = parse_number<double>(k, v);
        };
        t["stats.momentum_hi"] = [](ScenarioSpec& s, const std::string& k, const std::string& v) {
            s.stats.momentum_hi = parse_number<double>(k, v);
        };
        t["stats.pool"] = [](ScenarioSpec& s, const std::string& k, const std::string& v) {
            s.stats.pool = parse_number<std::int64_t>(k, v);
        };
        t["stats.phase_bins"] = [](ScenarioSpec& s, const std::string& k, const std::string& v) {
            s.stats.phase_bins = parse_number<int>(k, v);
        };

        t["entangle.alphas"] = [](ScenarioSpec& s, const std::string& k, const std::string& v) {
            s.entangle.alphas = parse_list(k, v);
        };
        t["entangle.beta"] = [](ScenarioSpec& s, const std::string& k, const std::string& v) {
            s.entangle.beta = parse_number<double>(k, v);
        };
        t["entangle.window"] = [](ScenarioSpec& s, const std::string& k, const std::string& v) {
            s.entangle.window = parse_number<std::int64_t>(k, v);
        };
        t["entangle.theta"] = [](ScenarioSpec& s, const std::string& k, const std::string& v) {
            s.entangle.theta = parse_number<double>(k, v);
        };
        return t;
    }();
    return table;
}

const std::set<std::string> kFamilies = {"single",         "two_slit",        "comb",          "plane_wave",
                                         "gaussian",       "ho_stationary",   "box_stationary", "box_single",
                                         "ring_plane_wave", "ring_stationary", "sphere_arc",    "entangled"};
const std::set<std::string> kForces = {"none", "constant", "harmonic", "delta", "box"};

}  // namespace

ScenarioSpec parse_scenario(std::istream& in) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("line " + std::to_string(e.line()), e.message());
    }
    ScenarioSpec spec;
    const auto& table = setters();
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError(section, "key outside of a section");
        for (const auto& [key, value] : body) {
            const std::string full = section + "." + key;
            auto it = table.find(full);
            if (it == table.end()) throw ConfigError(full, "unknown key");
            it->second(spec, full, value.data());
        }
    }
    validate(spec);
    return spec;
}

ScenarioSpec parse_scenario_text(const std::string& text) {
    std::istringstream in(text);
    return parse_scenario(in);
}

ScenarioSpec parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open configuration file");
    return parse_scenario(in);
}

void validate(const ScenarioSpec& s) {
    if (s.np < 1) throw ConfigError("scenario.np", "must be >= 1");
    if (s.nt < 1) throw ConfigError("scenario.nt", "must be >= 1");
    if (s.replicas < 1) throw ConfigError("scenario.replicas", "must be >= 1");
    if (s.replicas > s.np) throw ConfigError("scenario.replicas", "must not exceed np");
    if (s.n_tau < 0) throw ConfigError("scenario.n_tau", "must be >= 0");
    if (s.dims < 1 || s.dims > 3) throw ConfigError("scenario.dims", "must be 1, 2 or 3");
    if (s.dims != 1) {
        throw ConfigError("scenario.dims", "the runner simulates one lattice axis; rings and spheres use the arc coordinate");
    }
    if (!kFamilies.count(s.source.family)) throw ConfigError("source.family", "unknown family '" + s.source.family + "'");
    if (!kForces.count(s.force.kind)) throw ConfigError("force.kind", "unknown kind '" + s.force.kind + "'");
    const auto& f = s.source.family;
    const auto& k = s.force.kind;

    if (f == "two_slit" || f == "entangled") {
        if (s.source.half_separation <= 0.0) throw ConfigError("source.half_separation", "must be positive");
    }
    if (f == "two_slit" && (s.source.p_plus <= 0.0 || s.source.p_plus >= 1.0)) {
        throw ConfigError("source.p_plus", "must lie in (0, 1)");
    }
    if (f == "comb" && s.source.count < 1) throw ConfigError("source.count", "must be >= 1");
    if (f == "plane_wave" && s.source.length < 0) throw ConfigError("source.length", "must be >= 0");
    if (f == "gaussian" && s.source.width <= 0.0) throw ConfigError("source.width", "must be positive");
    if (f == "ho_stationary") {
        if (s.source.level < 0) throw ConfigError("source.level", "must be >= 0");
        if (k != "harmonic") throw ConfigError("force.kind", "oscillator states need the harmonic field");
        if (s.source.omega != s.force.omega) throw ConfigError("source.omega", "must equal force.omega");
    }
    if (f == "box_stationary" || f == "box_single") {
        if (s.source.a < 1) throw ConfigError("source.a", "must be >= 1");
        if (s.source.images < 0) throw ConfigError("source.images", "must be >= 0");
        if (f == "box_stationary" && s.source.level < 1) throw ConfigError("source.level", "must be >= 1");
        if (f == "box_single" && std::fabs(s.source.x0) >= static_cast<double>(s.source.a)) {
            throw ConfigError("source.x0", "must lie strictly inside the box");
        }
    }
    if (f == "ring_plane_wave" || f == "ring_stationary" || f == "sphere_arc") {
        if (s.source.r < 1) throw ConfigError("source.r", "must be >= 1");
        if (f == "ring_stationary" && s.source.level < 0) throw ConfigError("source.level", "must be >= 0");
        if (f == "sphere_arc" && (s.source.ell < 0 || s.source.m < 0 || s.source.m > s.source.ell)) {
            throw ConfigError("source.m", "needs 0 <= m <= ell");
        }
    }
    if (f == "entangled") {
        if (s.entangle.window < 0) throw ConfigError("entangle.window", "must be >= 0");
        if (k != "none") throw ConfigError("force.kind", "entangled pairs are simulated without external fields");
    }

    if (k == "harmonic" && s.force.omega <= 0.0) throw ConfigError("force.omega", "must be positive");
    if (k == "delta") {
        if (s.force.lambda < 0.0) throw ConfigError("force.lambda", "must be >= 0");
        if (s.force.width < 1) throw ConfigError("force.width", "must be >= 1");
        if (s.model == Model::Mstarstar) throw ConfigError("scenario.model", "the expected-values model cannot tunnel");
    }
    if (k == "box") {
        if (s.force.a < 1) throw ConfigError("force.a", "must be >= 1");
        if (s.model == Model::M) {
            throw ConfigError("scenario.model", "box scenarios run on the trained or expected-values model");
        }
    }
    if (s.model == Model::M && (f == "ring_plane_wave" || f == "ring_stationary" || f == "sphere_arc")) {
        throw ConfigError("scenario.model", "ring and sphere scenarios run on the trained or expected-values model");
    }
    if (s.stats.momentum_bins < 1) throw ConfigError("stats.momentum_bins", "must be >= 1");
    if (!(s.stats.momentum_hi > s.stats.momentum_lo)) throw ConfigError("stats.momentum_hi", "must exceed momentum_lo");
    if (s.stats.pool < 1) throw ConfigError("stats.pool", "must be >= 1");
    if (s.stats.phase_bins < 2) throw ConfigError("stats.phase_bins", "must be >= 2");
}

std::string canonical(const ScenarioSpec& s) {
    std::map<std::string, std::string> kv;
    auto put = [&kv](const std::string& k, const auto& v) {
        std::ostringstream os;
        os << std::setprecision(17) << v;
        kv[k] = os.str();
    };
    put("scenario.name", s.name);
    put("scenario.model", model_name(s.model));
    put("scenario.dims", s.dims);
    put("scenario.np", s.np);
    put("scenario.nt", s.nt);
    put("scenario.replicas", s.replicas);
    put("scenario.n_tau", s.n_tau);
    const auto& c = s.source;
    put("source.family", c.family);
    put("source.x0", c.x0);
    put("source.half_separation", c.half_separation);
    put("source.p_plus", c.p_plus);
    put("source.eps_plus", c.eps_plus);
    put("source.eps_minus", c.eps_minus);
    put("source.count", c.count);
    put("source.spacing", c.spacing);
    put("source.length", c.length);
    put("source.v_phi", c.v_phi);
    put("source.centre", c.centre);
    put("source.width", c.width);
    put("source.level", c.level);
    put("source.omega", c.omega);
    put("source.a", c.a);
    put("source.images", c.images);
    put("source.r", c.r);
    put("source.m", c.m);
    put("source.ell", c.ell);
    const auto& f = s.force;
    put("force.kind", f.kind);
    put("force.phi", f.phi);
    put("force.omega", f.omega);
    put("force.lambda", f.lambda);
    put("force.width", f.width);
    put("force.a", f.a);
    put("force.quantum_forces", f.quantum_forces ? "true" : "false");
    put("force.boson_cap", f.boson_cap);
    put("stats.momentum_bins", s.stats.momentum_bins);
    put("stats.momentum_lo", s.stats.momentum_lo);
    put("stats.momentum_hi", s.stats.momentum_hi);
    put("stats.pool", s.stats.pool);
    put("stats.phase_bins", s.stats.phase_bins);
    std::ostringstream alphas;
    alphas << std::setprecision(17);
    for (std::size_t i = 0; i < s.entangle.alphas.size(); ++i) alphas << (i ? "," : "") << s.entangle.alphas[i];
    put("entangle.alphas", alphas.str());
    put("entangle.beta", s.entangle.beta);
    put("entangle.window", s.entangle.window);
    put("entangle.theta", s.entangle.theta);
    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

std::uint64_t scenario_hash(const ScenarioSpec& spec) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical(spec)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = {
        {"free_single", "single source, full model",
         "[scenario]\nname = free_single\nmodel = M\nnp = 50000\nnt = 500\nreplicas = 8\n"
         "[source]\nfamily = single\nx0 = 0\n[stats]\npool = 10\n"},
        {"two_slit", "two equiprobable sources at +-1, trained model",
         "[scenario]\nname = two_slit\nmodel = Mstar\nnp = 50000\nnt = 500\n"
         "[source]\nfamily = two_slit\nhalf_separation = 1\np_plus = 0.5\n[stats]\npool = 10\n"},
        {"two_slit_asym", "two sources at +-1 with P = 0.1 and 0.9",
         "[scenario]\nname = two_slit_asym\nmodel = Mstar\nnp = 50000\nnt = 500\n"
         "[source]\nfamily = two_slit\nhalf_separation = 1\np_plus = 0.1\n[stats]\npool = 10\n"},
        {"faller_gaussian", "Gaussian wave under a constant force",
         "[scenario]\nname = faller_gaussian\nmodel = Mstarstar\nnp = 5000\nnt = 200\n"
         "[source]\nfamily = gaussian\ncentre = 0\nwidth = 5\nv_phi = 0.1\n"
         "[force]\nkind = constant\nphi = -0.001\n[stats]\npool = 5\n"},
        {"ho_single", "single source in a harmonic field",
         "[scenario]\nname = ho_single\nmodel = Mstar\nnp = 50000\nnt = 200\n"
         "[source]\nfamily = single\n[force]\nkind = harmonic\nomega = 0.005\n[stats]\npool = 8\n"},
        {"ho_stationary", "oscillator stationary state n = 5",
         "[scenario]\nname = ho_stationary\nmodel = Mstarstar\nnp = 50000\nnt = 200\n"
         "[source]\nfamily = ho_stationary\nlevel = 5\nomega = 0.0001\n"
         "[force]\nkind = harmonic\nomega = 0.0001\n"
         "[stats]\nmomentum_lo = -0.03\nmomentum_hi = 0.03\nmomentum_bins = 121\npool = 20\n"},
        {"box_n3", "box stationary state n = 3, a = 10",
         "[scenario]\nname = box_n3\nmodel = Mstarstar\nnp = 20000\nnt = 500\n"
         "[source]\nfamily = box_stationary\nlevel = 3\na = 10\nimages = 25\n[force]\nkind = box\na = 10\n"},
        {"box_n5", "box stationary state n = 5, a = 10",
         "[scenario]\nname = box_n5\nmodel = Mstarstar\nnp = 20000\nnt = 500\n"
         "[source]\nfamily = box_stationary\nlevel = 5\na = 10\nimages = 25\n[force]\nkind = box\na = 10\n"},
        {"ring_m4", "plane wave m = 4 on a ring of radius 10",
         "[scenario]\nname = ring_m4\nmodel = Mstarstar\nnp = 20000\nnt = 100\n"
         "[source]\nfamily = ring_plane_wave\nr = 10\nm = 4\n"},
        {"sphere_l4", "great-arc sources, l = 4, m = 0, r = 100",
         "[scenario]\nname = sphere_l4\nmodel = Mstarstar\nnp = 50000\nnt = 100\n"
         "[source]\nfamily = sphere_arc\nr = 100\nell = 4\nm = 0\n"
         "[stats]\nmomentum_lo = -0.05\nmomentum_hi = 0.05\nmomentum_bins = 201\n"},
        {"delta_single", "single source at x0 = 10 facing a Delta barrier",
         "[scenario]\nname = delta_single\nmodel = M\nnp = 5000\nnt = 200\n"
         "[source]\nfamily = single\nx0 = 10\n"
         "[force]\nkind = delta\nlambda = 0.1\nwidth = 15\nquantum_forces = false\n[stats]\npool = 10\n"},
        {"delta_gaussian", "Gaussian wave against a Delta barrier",
         "[scenario]\nname = delta_gaussian\nmodel = Mstar\nnp = 500\nnt = 3000\n"
         "[source]\nfamily = gaussian\ncentre = 10\nwidth = 10\nv_phi = -0.3\n"
         "[force]\nkind = delta\nlambda = 0.1\nwidth = 2\n[stats]\npool = 50\n"},
        {"chsh", "entangled double slit, CHSH sweep",
         "[scenario]\nname = chsh\nmodel = Mstarstar\nnp = 2000000\nnt = 100\n"
         "[source]\nfamily = entangled\nhalf_separation = 1\n"
         "[entangle]\nalphas = 0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1\nbeta = 0\nwindow = 2\ntheta = 0.7853981633974483\n"},
    };
    return entries;
}

const CatalogEntry* find_catalog(const std::string& name) {
    for (const auto& e : catalog()) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

SourceEnsemble build_ensemble(const ScenarioSpec& spec) {
    const auto& s = spec.source;
    const auto& f = s.family;
    if (f == "single") return single_source(s.x0);
    if (f == "two_slit") return two_slit(s.half_separation, s.p_plus, s.eps_plus, s.eps_minus);
    if (f == "entangled") return two_slit(s.half_separation, 0.5);
    if (f == "comb") return comb(s.count, s.spacing);
    if (f == "plane_wave") return plane_wave(s.length, s.v_phi);
    if (f == "gaussian") return gaussian(s.centre, s.width, s.v_phi);
    if (f == "ho_stationary") return ho_stationary(s.level, s.omega);
    if (f == "box_stationary") return box_stationary(s.level, s.a, s.images);
    if (f == "box_single") return box_single(s.x0, s.a, s.images);
    if (f == "ring_plane_wave") return ring_plane_wave(s.r, s.m);
    if (f == "ring_stationary") return ring_stationary(s.r, s.level);
    if (f == "sphere_arc") return sphere_arc(s.r, s.ell, s.m);
    throw ConfigError("source.family", "unknown family '" + f + "'");
}

ForceField build_field(const ScenarioSpec& spec) {
    const auto& f = spec.force;
    if (f.kind == "constant") return ForceField::constant(f.phi);
    if (f.kind == "harmonic") return ForceField::harmonic(f.omega);
    if (f.kind == "delta") return ForceField::rectangular(f.lambda, f.width);
    return ForceField::free_field();
}

}  // namespace qwalk
