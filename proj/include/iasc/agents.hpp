#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "iasc/rng.hpp"

namespace iasc {

// One marginal belief over a unit's average post-intervention outcome.
struct Marginal {
    enum class Family { categorical, uniform };

    Family family = Family::uniform;
    std::vector<double> values;  // categorical support (sorted not required)
    std::vector<double> probs;   // categorical masses, sum to 1
    double lo = 0.0, hi = 1.0;   // uniform interval

    static Marginal categorical(std::vector<double> values, std::vector<double> probs);
    static Marginal uniform_interval(double lo, double hi);
    static Marginal point_mass(double x) { return uniform_interval(x, x); }

    double mean() const;
    double cdf(double x) const;                  // P(X <= x)
    double truncated_mean_below(double x) const; // E[X | X <= x]; throws if P = 0
    double sample(Rng& rng) const;
};

// A unit's belief: one marginal per intervention, independent product joint
// unless a custom joint sampler is supplied.
struct UnitPrior {
    std::vector<Marginal> marginals;
    std::function<std::vector<double>(Rng&)> joint_sampler;  // optional

    int k() const { return static_cast<int>(marginals.size()); }
    std::vector<double> sample(Rng& rng) const;
};

double prior_mean(const UnitPrior& prior, int d);

// Intervention with the highest prior mean; ties break toward the lower index.
int unit_type(const UnitPrior& prior);

// Full preference ordering (descending prior means, ties toward lower index).
std::vector<int> subtype(const UnitPrior& prior);

struct EventProb {
    double value = 0.0;
    double mc_halfwidth = 0.0;  // nonzero only for the Monte-Carlo fallback
    bool analytic = true;
};

// Pr[ ybar^(1) <= mu^(0) - C + slack ] under the unit's prior; the
// "fighting chance" event with estimation slack. Analytic for supported
// families; Monte-Carlo for custom joints.
EventProb event_prob_xi(const UnitPrior& prior, double C, double slack,
                        Rng* rng = nullptr, long samples = 200000);

// Threshold event on one marginal: {ybar^(d) <= threshold} (below = true)
// or {ybar^(d) >= threshold}.
struct ThresholdEvent {
    int d = 0;
    double threshold = 0.0;
    bool below = true;
    bool everything = false;  // the sure event
};

// E[ ybar^(d_to) - ybar^(d_from) | event ]. Throws on a zero-probability event.
double conditional_gain(const UnitPrior& prior, int d_from, int d_to,
                        const ThresholdEvent& event);

// The published randomization of a batch policy, as seen by a unit doing a
// Bayesian compliance check: explore probability, explore target, and the
// exploit threshold rule used when not exploring.
struct PolicyDescriptor {
    int k = 2;
    double explore_prob = 0.0;  // 1/L
    int explore_target = 0;
    int exploit_default = 1;    // arm recommended when the exploit event fails
    double mu0_lower = 0.0;     // principal's lower bound on the explore arm's prior mean
    double gap = 0.0;           // margin C in the exploit rule
    // Optional custom exploit rule: world outcomes -> recommended arm.
    std::function<int(const std::vector<double>&)> exploit_rule;

    int simulate(const std::vector<double>& world, Rng& rng) const;
};

struct BicEstimate {
    double estimate = 0.0;      // E[ybar^(d) - ybar^(d') | rec = d] * Pr[rec = d], worst d'
    double ci_halfwidth = 0.0;  // normal-approximation CI
    long recommended = 0;       // samples where the policy recommended d
    bool degenerate = false;    // Pr[rec = d] estimated zero
    int worst_alternative = -1;
};

// Unbiased Monte-Carlo check of the compliance condition for recommendation d.
BicEstimate verify_bic_mc(const PolicyDescriptor& policy, const UnitPrior& prior,
                          int d, long samples, Rng& rng);

enum class ResponseMode { trusting, rational };

// Unit response to a recommendation. Trusting units follow; rational units
// follow iff the Monte-Carlo compliance estimate clears -mc_tolerance,
// otherwise they take their prior-preferred intervention.
int respond(const UnitPrior& prior, int recommendation, const PolicyDescriptor& policy,
            ResponseMode mode, Rng& rng, long samples = 100000,
            double mc_tolerance = 0.01);

// Prior-mean bounds per (type, intervention) cell.
struct MuBound {
    double lo = 0.0;
    double hi = 0.0;
};

// Aggregate population facts assumed common knowledge.
struct PopulationKnowledge {
    double p_low = 0.0, p_high = 0.0;        // bounds on the explored type's fraction
    std::vector<std::vector<MuBound>> mu;    // mu[type][d]
    double zeta_c = 0.0;                     // lower bound on the event probability
    int n0_required = 0;
    double c_gap = 0.0;
};

}  // namespace iasc
