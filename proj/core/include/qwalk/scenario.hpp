#pragma once

#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qwalk/forces.hpp"
#include "qwalk/sources.hpp"

namespace qwalk {

enum class Model { M, Mstar, Mstarstar };

Model parse_model(const std::string& s);
std::string model_name(Model m);

struct SourceSpec {
    std::string family = "single";
    double x0 = 0.0;
    double half_separation = 1.0;
    double p_plus = 0.5;
    double eps_plus = 0.0;
    double eps_minus = 0.0;
    int count = 2;
    double spacing = 1.0;
    std::int64_t length = 0;
    double v_phi = 0.0;
    double centre = 0.0;
    double width = 1.0;
    int level = 0;
    double omega = 0.0;
    std::int64_t a = 10;
    int images = 2;
    std::int64_t r = 10;
    int m = 0;
    int ell = 0;
};

struct ForceSpec {
    std::string kind = "none";
    double phi = 0.0;
    double omega = 0.0;
    double lambda = 0.0;
    std::int64_t width = 15;
    std::int64_t a = 10;
    bool quantum_forces = true;
    std::size_t boson_cap = 0;
};

struct StatsSpec {
    std::size_t momentum_bins = 201;
    double momentum_lo = -1.0;
    double momentum_hi = 1.0;
    std::int64_t pool = 1;
    int phase_bins = 10;
};

struct EntangleSpec {
    std::vector<double> alphas{0.0};
    double beta = 0.0;
    std::int64_t window = 0;
    // CHSH angle in radians; negative skips the estimate.
    double theta = -1.0;
};

struct ScenarioSpec {
    std::string name = "unnamed";
    std::string description;
    Model model = Model::Mstar;
    int dims = 1;
    std::uint64_t np = 1000;
    std::int64_t nt = 100;
    std::uint64_t seed = 1;
    unsigned replicas = 1;
    std::int64_t n_tau = 0;
    std::string out_dir = ".";
    SourceSpec source;
    ForceSpec force;
    StatsSpec stats;
    EntangleSpec entangle;
};

// Raised for invalid configuration; key() names the offending entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

ScenarioSpec parse_scenario(std::istream& in);
ScenarioSpec parse_scenario_text(const std::string& text);
ScenarioSpec parse_scenario_file(const std::string& path);

// Throws ConfigError on the first inconsistency.
void validate(const ScenarioSpec& spec);

// Sorted key = value lines of every physics-relevant field. Seed and output
// directory are excluded so the hash identifies the experiment.
std::string canonical(const ScenarioSpec& spec);
std::uint64_t scenario_hash(const ScenarioSpec& spec);
std::string hash_hex(std::uint64_t h);

struct CatalogEntry {
    std::string name;
    std::string description;
    std::string text;
};

const std::vector<CatalogEntry>& catalog();
const CatalogEntry* find_catalog(const std::string& name);

SourceEnsemble build_ensemble(const ScenarioSpec& spec);
ForceField build_field(const ScenarioSpec& spec);

}  // namespace qwalk
