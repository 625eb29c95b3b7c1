#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "iasc/agents.hpp"
#include "iasc/pcr.hpp"
#include "iasc/rng.hpp"

namespace iasc {

struct DeltaSplit {
    double d0 = 0.0;     // first-stage span failure
    double d_pcr = 0.0;  // confidence-bound failure
    double d_eps = 0.0;  // post-period noise concentration failure

    static DeltaSplit thirds(double total) { return {total / 3, total / 3, total / 3}; }
    double total() const { return d0 + d_pcr + d_eps; }
};

// Parameters of the batched explore/exploit recommendation engine.
struct PolicyConfig {
    int N0 = 0;       // first-stage length (no recommendations)
    int L = 2;        // batch size, >= 2
    int B = 1;        // batch count target
    double C = 0.1;   // exploit margin, in (0,1)
    DeltaSplit delta;
    int rank = 1;     // PCR truncation for the treatment arm
    double rho = kAutoRho;
    int T1 = 1;       // post-period length
    double M = 1.0;   // outcome bound

    void validate() const;
};

enum class RecMeta { first_stage, explore, exploit, racing_coin };

const char* to_string(RecMeta meta);

// d = -1 with meta == first_stage means "no recommendation" (self-selection).
// meta is internal bookkeeping, never exposed to units.
struct Recommendation {
    int d = -1;
    RecMeta meta = RecMeta::first_stage;
};

struct HistoryEntry {
    Eigen::VectorXd y_pre;
    int d_hat = -1;  // recommendation (-1 in the first stage)
    int d = 0;       // intervention actually taken
    Eigen::VectorXd y_post;
};

// Sequential state owned by exactly one simulation run. History is
// append-only; one hidden explore index per batch, drawn uniformly.
struct PolicyState {
    explicit PolicyState(std::uint64_t seed) : rng(seed) {}

    std::vector<HistoryEntry> history;
    int arrivals = 0;        // units recommended-and-recorded so far
    int explore_index = -1;  // hidden index within the current batch
    std::optional<PCRModel> treatment_fit;
    std::optional<int> winner;  // racing absorbing state
    Rng rng;

    void record(Eigen::VectorXd y_pre, int d_hat, int d, Eigen::VectorXd y_post);
    // All recorded history rows for one intervention arm.
    DonorSet donors(int d) const;
    int arm_count(int d) const;
};

// One step of the batched policy: first N0 units get no recommendation;
// afterwards one hidden explore slot per batch recommends control, and the
// exploit branch recommends control iff the prior lower bound beats the
// fitted treatment estimate by the margin C. The treatment-arm PCR model is
// refit at batch boundaries only.
Recommendation recommend_next(PolicyState& state, const PolicyConfig& cfg,
                              const Eigen::VectorXd& y_pre,
                              const PopulationKnowledge& knowledge);

// Outcome of a sizing formula; carries the term ledger so printed values can
// be re-derived exactly.
struct SizingResult {
    bool feasible = false;
    int value = 0;
    double numerator = 0.0;
    double slack = 0.0;       // alpha + noise concentration term
    double event_prob = 0.0;
    double denominator = 0.0;
    std::string note;
};

// First-stage length from the two-sided singular value bound for
// sub-gaussian isotropic rows: smallest N with
// 2 exp(-(sqrt(N p_min)/(c K^2) - sqrt(r_tau))^2) <= delta.
int required_n0(int r_tau, double delta, double K = 1.0, double c_ver = 1.0,
                double p_min = 1.0);

// Single-hit first-stage rule for one-dimensional sub-populations: number of
// arrivals so that at least one unit of a type with frequency >= p shows up
// with probability 1 - delta.
int single_hit_count(double delta, double p);

// Batch-count heuristic: enough batches that explore slots of the needed
// type cover its subspace with probability 1 - delta0 (Chernoff argument).
int default_batch_count(double p_low, int r_tau, double delta0);

// Failure probability achievable for a gap C: the inverse confidence bound
// evaluated at epsilon = C/2 on the first-stage treatment donor matrix.
double delta_pcr_for_gap(const ConfidenceParams& params, double C);

// Minimum BIC batch size maximized over the supplied type-1 priors.
SizingResult required_batch_L(const std::vector<UnitPrior>& type1_priors, double C,
                              double alpha, double sigma, int T1, double delta_eps,
                              double delta_total, double M);

// Conservative variant evaluated at the population knowledge bounds.
SizingResult required_batch_L(const PopulationKnowledge& knowledge, double C,
                              double alpha, double sigma, int T1, double delta_eps,
                              double delta_total, double M);

// ---- noiseless policies (exact span checks) ----

struct NoiselessConfig {
    int N0 = 2;
    int L = 2;
    int batches = 1;          // the random-types variant runs k' batches
    bool random_types = false;
    double lsi_tol = 1e-9;
};

// Batch count k' for the random-types variant: ceil(2k + 2 sqrt(k ln(1/delta))).
int noiseless_kprime(int k_samples, double delta);

// Exact span-inclusion policy: estimate an arm exactly from spanning weights
// whenever the unit's expected pre-period row lies in that arm's donor span,
// fall back to the prior mean otherwise. Explore units get the arm whose
// span check fails; exploit units (and the ambiguous explore cases) get the
// argmax estimate.
Recommendation noiseless_recommend(PolicyState& state, const NoiselessConfig& cfg,
                                   const Eigen::VectorXd& expected_pre,
                                   const UnitPrior& prior);

struct NoiselessBound {
    bool feasible = false;
    double psi0 = 0.0;
    double psi1 = 0.0;
    int L = 0;
    std::string note;
};

// Categorical-prior batch bound: psi per type from the conditional-gain
// identity, L = ceil(1 + max{psi0, psi1}), floored at the minimum legal
// batch of 2. type0/type1 each hold the pair of reward marginals.
NoiselessBound noiseless_batch_bound(const UnitPrior& type0, const UnitPrior& type1);

// ---- racing (active arm elimination) ----

struct RacingConfig {
    int rank = 1;
    double rho = kAutoRho;
    int T1 = 1;
    double epsilon = 0.1;  // gap threshold for declaring a winner
};

// Recommend the leading arm once the estimated gap exceeds epsilon (the
// winner is absorbing, recommended to everyone after); fair coin before.
// Requires both arms to hold at least `rank` donors.
Recommendation racing_recommend(PolicyState& state, const RacingConfig& cfg,
                                const Eigen::VectorXd& y_pre);

// delta_pcr <= tau P / (2P + 4)  and  delta_n <= tau P / 4.
bool racing_bic_preconditions(double tau, double P, double delta_pcr, double delta_n);

}  // namespace iasc
