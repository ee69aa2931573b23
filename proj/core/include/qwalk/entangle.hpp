#pragma once

#include <array>
#include <cstdint>
#include <map>

#include "qwalk/lattice.hpp"
#include "qwalk/rng.hpp"
#include "qwalk/sources.hpp"

namespace qwalk {

using BranchState = ParticleState<double, 1>;

// Two particles emitted together from opposite sources of a two-source
// ensemble. Branch 0 is particle I, branch 1 is particle II.
struct EntangledPair {
    double phi = 0.0;
    double v0 = 0.0;  // source momentum of particle I; particle II gets -v0
    std::array<BranchState, 2> branch;
    // Source of each branch: 0 for the source at +D, 1 for the one at -D.
    std::array<int, 2> source{};
    // Per-branch phase difference between the +D and -D sources.
    std::array<double, 2> eps_delta{};
    double delta = 0.0;  // source separation
};

// Settings are phase differences in units of pi: branch I gets alpha, branch II beta.
EntangledPair emit_pair(const SourceEnsemble& ensemble, double alpha, double beta, Rng& rng);

// One iteration of one branch on that branch's own lattice.
template <class Draw>
StepRecord<1> step_entangled(EntangledPair& pair, int branch, LatticeStore<double, 1>& lattice,
                             const Engine<double, 1>& engine, Draw&& draw) {
    return engine.advance(pair.branch[static_cast<std::size_t>(branch)], lattice, FreeEnvironment<double, 1>{},
                          draw);
}

// Expected-values branch momentum: the solution of the free-particle branch
// condition for source momentum v0, phase difference eps and hidden phase phi.
double solve_branch(double v0, double eps, double phi, double delta);

// Residual of the branch condition at x/t = velocity.
double branch_residual(double velocity, double v0, double eps, double phi, double delta);

struct BranchRun {
    std::int64_t x = 0;
    double q = 0.0;  // trained momentum at arrival
};

// Trained-code emission of one branch from x0.
BranchRun run_branch_trained(std::int64_t x0, double v0, double eps, double phi, double delta, std::int64_t n_t,
                             std::int64_t n_tau, Rng& rng);

enum class ChshModel { M, Mstar, Mstarstar };

struct ChshConfig {
    double half_separation = 1.0;
    std::int64_t t = 100;
    std::uint64_t np = 2000000;
    // Detector capture half-width in nodes; 0 is exact node equality.
    std::int64_t window = 0;
    ChshModel model = ChshModel::Mstarstar;
    std::int64_t n_tau = 0;
    unsigned threads = 1;

    std::int64_t detector() const;
};

struct CoincidenceCounts {
    std::uint64_t plus_plus = 0;
    std::uint64_t minus_minus = 0;
    std::uint64_t plus_minus = 0;
    std::uint64_t minus_plus = 0;
    std::uint64_t pairs = 0;
    // Arrival histogram of particles I.
    std::map<std::int64_t, std::uint64_t> marginal;

    std::uint64_t coincidences() const { return plus_plus + minus_minus + plus_minus + minus_plus; }
    // Fractions of coincidences in the order ++, --, +-, -+.
    std::array<double, 4> rates() const;
    // (N_same - N_opp) / (N_same + N_opp); throws when there are no coincidences.
    double correlation() const;
    void merge(const CoincidenceCounts& other);
};

CoincidenceCounts run_coincidences(const ChshConfig& config, double alpha, double beta, std::uint64_t seed);

struct ChshEstimate {
    double c_theta = 0.0;
    double c_3theta = 0.0;
    double s_max = 0.0;
    CoincidenceCounts at_theta;
    CoincidenceCounts at_3theta;
};

// Two runs with beta = 0 and alpha = theta/pi, then alpha = 3 theta/pi.
ChshEstimate estimate_smax(const ChshConfig& config, double theta, std::uint64_t seed);

}  // namespace qwalk
