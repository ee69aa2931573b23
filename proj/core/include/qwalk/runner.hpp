#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qwalk/entangle.hpp"
#include "qwalk/scenario.hpp"
#include "qwalk/stats.hpp"

namespace qwalk {

using Summary = std::vector<std::pair<std::string, std::string>>;

struct ChshRow {
    double alpha = 0.0;
    double beta = 0.0;
    CoincidenceCounts counts;
};

struct RunResult {
    ScenarioSpec spec;
    std::uint64_t hash = 0;
    EnsembleStats stats;
    std::vector<ChshRow> chsh;
    std::optional<ChshEstimate> smax;
    std::uint64_t lattice_cells = 0;
    Summary summary;
};

// Executes the scenario. Output depends only on the spec, never on `threads`.
RunResult run_scenario(const ScenarioSpec& spec, unsigned threads);

// Theoretical arrival pmf per node; empty when no closed form applies.
std::function<double(std::int64_t)> position_theory(const ScenarioSpec& spec, const SourceEnsemble& ens);
// Theoretical quantum-momentum pdf; empty when no closed form applies.
std::function<double(double)> momentum_theory(const ScenarioSpec& spec, const SourceEnsemble& ens);
// Node range holding all arrivals.
std::pair<std::int64_t, std::int64_t> position_support(const ScenarioSpec& spec, const SourceEnsemble& ens);
// Node range used for goodness-of-fit; narrower than the support for free point sources.
std::pair<std::int64_t, std::int64_t> fit_support(const ScenarioSpec& spec, const SourceEnsemble& ens);

// Closed-form reference values for the scenario as key/value pairs.
Summary theory_summary(const ScenarioSpec& spec);

std::string csv_header(const RunResult& r);
std::string positions_csv(const RunResult& r);
std::string momentum_csv(const RunResult& r);
std::string chsh_csv(const RunResult& r);
std::string summary_text(const Summary& s);

// Writes positions.csv, momentum.csv and summary.txt (chsh.csv for
// entangled scenarios) into `dir`, creating it if needed.
std::vector<std::string> write_artifacts(const RunResult& r, const std::string& dir);

}  // namespace qwalk
