#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "iasc/agents.hpp"
#include "iasc/policy.hpp"
#include "iasc/rng.hpp"

namespace iasc {

// ---- batch sizing ledger ----

struct SizingSpec {
    UnitPrior type1_prior;  // belief of the population being incentivized
    double C = 0.125;
    double M = 1.0;
    double sigma = 0.0;
    int T1 = 1;
    double alpha = 0.0;        // confidence half-width plug-in (0 = idealized)
    double delta_bic = 0.0;    // failure budget inside the batch-size bound
    double delta_eps = 0.0;    // noise-concentration component
    double delta_sizing = 0.5; // budget for the N0 / B counting rules
    double p_low = 0.5;        // minimum fraction of the explored type
    int r_tau = 1;             // dimension of the explored type's subspace
    enum class Rule { single_hit, chernoff } rule = Rule::single_hit;
};

struct SizingLedger {
    SizingSpec spec;
    int N0 = 0;
    int B = 0;
    SizingResult L;
    double mu0 = 0.0, mu1 = 0.0;
};

SizingLedger compute_sizing(const SizingSpec& spec);
void print_sizing(std::ostream& os, const SizingLedger& ledger);

// The idealized two-arm configuration: control belief Unif[0, 0.5]
// (mean 0.25), treatment belief Unif[0, 1], C = 0.125, no noise, no slack,
// one-dimensional explored type with frequency 1/2, delta = 0.5.
SizingSpec idealized_sizing_spec();

// Type-1 belief used by the simulation study: control Unif[0, 0.5] and
// treatment Unif[0, 0.5 + 2 gap], so the prior mean gap is `gap`.
UnitPrior sim_type1_prior(double gap);
UnitPrior sim_type0_prior(double gap);

// Batch bound for the exact-span policy under the simulation beliefs.
NoiselessBound sim_noiseless_bound(double gap);

// ---- experiment orchestration ----

struct ExperimentConfig {
    int n = 500;
    int r = 4;
    int T0 = 100;
    int T1 = 100;
    double noise_var = 0.01;
    bool normalize = false;
    double gap = 0.4;      // type-1 prior mean gap
    double C = 0.125;
    double delta = 0.1;    // total failure budget for sizing rules
    std::string policy = "alg1";  // alg1 | none | racing | noiseless
    int runs = 10;
    std::uint64_t seed = 1;
    std::string outdir;    // empty: nothing written
    bool rational_units = false;
    bool empirical_sizing = false;  // size L from the fitted confidence bound
    int workers = 0;       // 0: IASC_WORKERS env or hardware concurrency
    double racing_epsilon = 0.05;

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct InfeasibleSizing : std::runtime_error {
    SizingLedger ledger;
    InfeasibleSizing(const std::string& what, SizingLedger lg)
        : std::runtime_error(what), ledger(std::move(lg)) {}
};

struct RunSeries {
    std::vector<double> probe_error;  // per arrival
    double seconds = 0.0;
};

struct ExperimentResult {
    std::vector<RunSeries> series;       // one per repetition
    double mean_last100 = 0.0;           // probe error over the final 100 units
    double std_last100 = 0.0;
    SizingLedger sizing;
};

// Stream n units through the selected policy, tracking the control-arm
// counterfactual estimation error for a fixed fresh type-1 probe unit after
// every arrival. Writes results.csv / summary.csv / sizing.txt / replay logs
// into outdir when set. Repetitions run on a worker pool; output order is
// deterministic under a fixed seed.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// ---- impossibility demonstration ----

struct ImpossibilityRow {
    double e_hat = 0.0;
    double analytic = 0.0;  // (c^2 + e^2) / (2c)
    double mc = 0.0;
};

struct ImpossibilityTable {
    std::vector<ImpossibilityRow> rows;
    double min_analytic = 0.0;
    double min_mc = 0.0;
};

// Expected |H - e| over H ~ Unif[-c, c] for estimator values e on a grid,
// analytically and by Monte Carlo; the minimum over the grid is c/2.
ImpossibilityTable impossibility_demo(double c, int grid, long samples, Rng& rng);

// ---- command line ----

int cli_main(int argc, const char* const* argv);

}  // namespace iasc
