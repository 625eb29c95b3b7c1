#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "iasc/agents.hpp"
#include "iasc/pcr.hpp"
#include "iasc/policy.hpp"

namespace iasc {

// Parameters of the k-intervention engine run for one unit sub-type.
// The explore schedule loops from the least-preferred intervention
// subtype[k-1] up to subtype[1], B batches of L units each.
struct KPolicyConfig {
    std::vector<int> subtype;  // preference ordering, subtype[0] most preferred
    int N0 = 0;
    int L = 2;
    int B = 1;
    double C = 0.1;
    DeltaSplit delta;
    int rank = 1;
    double rho = kAutoRho;
    int T1 = 1;
    double M = 1.0;
    std::vector<MuBound> mu_bounds;  // per intervention, for this sub-type
    // Follow the printed listing's label window {ell-1, ..., subtype[k-1]}
    // instead of the position-indexed exploit event used by the analysis.
    bool literal_window = false;

    int k() const { return static_cast<int>(subtype.size()); }
    void validate() const;
};

struct KPolicyState {
    explicit KPolicyState(std::uint64_t seed) : rng(seed) {}

    std::vector<HistoryEntry> history;
    int arrivals = 0;
    int explore_index = -1;
    std::vector<std::optional<PCRModel>> fits;  // per intervention
    Rng rng;

    void record(Eigen::VectorXd y_pre, int d_hat, int d, Eigen::VectorXd y_post);
    DonorSet donors(int d) const;
    int arm_count(int d) const;
};

// Exploit event for explore intervention `ell`: the top choice's estimate
// trails every intermediate explored arm by C, and all arms ahead of `ell`
// in the ordering sit below ell's prior lower bound by C.
// `estimates` is indexed by intervention label; entries required by the
// event must be present (throws std::invalid_argument otherwise).
bool exploit_event(const std::vector<std::optional<double>>& estimates,
                   double prior_lower_ell, double C, int ell,
                   const std::vector<int>& subtype, bool literal_window = false);

// One step of the k-intervention engine. Explore slots recommend the current
// loop intervention ell; exploit slots recommend ell iff the exploit event
// holds, otherwise the sub-type's top choice. Arms with no donors yet fail
// the event (conservative). Estimates refit at batch boundaries.
Recommendation recommend_next_k(KPolicyState& state, const KPolicyConfig& cfg,
                                const Eigen::VectorXd& y_pre);

// Current loop intervention for arrival index i (after the first stage),
// or -1 when all loops are complete.
int loop_intervention(const KPolicyConfig& cfg, int arrival_index);

// Batch size for the k-intervention engine:
// L >= 1 + (mu_top - mu_bottom) / ((C - 2 alpha - 2 sigma sqrt(2 ln(1/d_eps)/T1)) (1-delta) P[E] - 2 M delta).
SizingResult required_batch_L_k(double mu_top, double mu_bottom, double prob_event,
                                double C, double alpha, double sigma, int T1,
                                double delta_eps, double delta_total, double M);

}  // namespace iasc
