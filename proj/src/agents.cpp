#include "iasc/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace iasc {

Marginal Marginal::categorical(std::vector<double> values, std::vector<double> probs) {
    if (values.size() != probs.size() || values.empty())
        throw std::invalid_argument("Marginal: categorical sizes mismatch");
    double total = 0.0;
    for (double p : probs) {
        if (p < 0) throw std::invalid_argument("Marginal: negative probability");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("Marginal: probabilities must sum to 1");
    Marginal m;
    m.family = Family::categorical;
    m.values = std::move(values);
    m.probs = std::move(probs);
    return m;
}

Marginal Marginal::uniform_interval(double lo, double hi) {
    if (lo > hi) throw std::invalid_argument("Marginal: need lo <= hi");
    Marginal m;
    m.family = Family::uniform;
    m.lo = lo;
    m.hi = hi;
    return m;
}

double Marginal::mean() const {
    if (family == Family::categorical) {
        double acc = 0.0;
        for (size_t i = 0; i < values.size(); ++i) acc += values[i] * probs[i];
        return acc;
    }
    return 0.5 * (lo + hi);
}

double Marginal::cdf(double x) const {
    if (family == Family::categorical) {
        double acc = 0.0;
        for (size_t i = 0; i < values.size(); ++i)
            if (values[i] <= x) acc += probs[i];
        return acc;
    }
    if (hi == lo) return x >= lo ? 1.0 : 0.0;
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    return (x - lo) / (hi - lo);
}

double Marginal::truncated_mean_below(double x) const {
    const double p = cdf(x);
    if (p <= 0.0)
        throw std::invalid_argument("Marginal: conditioning event has probability 0");
    if (family == Family::categorical) {
        double acc = 0.0;
        for (size_t i = 0; i < values.size(); ++i)
            if (values[i] <= x) acc += values[i] * probs[i];
        return acc / p;
    }
    if (hi == lo) return lo;
    return 0.5 * (lo + std::min(x, hi));
}

double Marginal::sample(Rng& rng) const {
    if (family == Family::categorical) {
        double u = rng.uniform();
        for (size_t i = 0; i < values.size(); ++i) {
            if (u < probs[i]) return values[i];
            u -= probs[i];
        }
        return values.back();
    }
    return rng.uniform(lo, hi);
}

std::vector<double> UnitPrior::sample(Rng& rng) const {
    if (joint_sampler) return joint_sampler(rng);
    std::vector<double> world(marginals.size());
    for (size_t d = 0; d < marginals.size(); ++d) world[d] = marginals[d].sample(rng);
    return world;
}

double prior_mean(const UnitPrior& prior, int d) {
    if (d < 0 || d >= prior.k()) throw std::out_of_range("prior_mean: intervention index");
    return prior.marginals[static_cast<size_t>(d)].mean();
}

int unit_type(const UnitPrior& prior) {
    if (prior.k() < 1) throw std::invalid_argument("unit_type: empty prior");
    int best = 0;
    double best_mean = prior_mean(prior, 0);
    for (int d = 1; d < prior.k(); ++d) {
        const double m = prior_mean(prior, d);
        if (m > best_mean) {  // strict: ties go to the lower index
            best = d;
            best_mean = m;
        }
    }
    return best;
}

std::vector<int> subtype(const UnitPrior& prior) {
    std::vector<int> order(static_cast<size_t>(prior.k()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return prior_mean(prior, a) > prior_mean(prior, b);
    });
    return order;
}

EventProb event_prob_xi(const UnitPrior& prior, double C, double slack,
                        Rng* rng, long samples) {
    if (prior.k() < 2) throw std::invalid_argument("event_prob_xi: need k >= 2");
    if (slack < 0) throw std::invalid_argument("event_prob_xi: slack must be >= 0");
    const double threshold = prior_mean(prior, 0) - C + slack;

    if (!prior.joint_sampler) {
        EventProb out;
        out.value = prior.marginals[1].cdf(threshold);
        return out;
    }
    if (!rng)
        throw std::invalid_argument("event_prob_xi: custom joint needs an rng for Monte Carlo");
    long hits = 0;
    for (long s = 0; s < samples; ++s)
        if (prior.sample(*rng)[1] <= threshold) ++hits;
    EventProb out;
    out.analytic = false;
    out.value = static_cast<double>(hits) / samples;
    out.mc_halfwidth = 1.959964 * std::sqrt(out.value * (1.0 - out.value) / samples);
    return out;
}

double conditional_gain(const UnitPrior& prior, int d_from, int d_to,
                        const ThresholdEvent& event) {
    if (d_from < 0 || d_from >= prior.k() || d_to < 0 || d_to >= prior.k())
        throw std::out_of_range("conditional_gain: intervention index");
    if (event.everything) return prior_mean(prior, d_to) - prior_mean(prior, d_from);
    if (!event.below)
        throw std::invalid_argument("conditional_gain: only 'below' threshold events supported analytically");

    const Marginal& cond = prior.marginals[static_cast<size_t>(event.d)];
    const double p = cond.cdf(event.threshold);
    if (p <= 0.0) throw std::invalid_argument("conditional_gain: event has probability 0");

    auto conditional_mean = [&](int d) {
        if (d == event.d) return cond.truncated_mean_below(event.threshold);
        return prior_mean(prior, d);  // independent marginals
    };
    return conditional_mean(d_to) - conditional_mean(d_from);
}

int PolicyDescriptor::simulate(const std::vector<double>& world, Rng& rng) const {
    if (explore_prob > 0 && rng.bernoulli(explore_prob)) return explore_target;
    if (exploit_rule) return exploit_rule(world);
    // two-arm default: recommend the explore target iff its prior lower bound
    // beats the realized alternative by the margin
    return (mu0_lower - world[static_cast<size_t>(exploit_default)] >= gap)
               ? explore_target
               : exploit_default;
}

BicEstimate verify_bic_mc(const PolicyDescriptor& policy, const UnitPrior& prior,
                          int d, long samples, Rng& rng) {
    if (samples < 1000) throw std::invalid_argument("verify_bic_mc: samples must be >= 1000");
    const int k = prior.k();
    if (d < 0 || d >= k) throw std::out_of_range("verify_bic_mc: recommendation index");

    // accumulate E[(ybar^(d) - ybar^(d')) 1{rec = d}] per alternative
    std::vector<double> sum(static_cast<size_t>(k), 0.0);
    std::vector<double> sumsq(static_cast<size_t>(k), 0.0);
    long recommended = 0;
    for (long s = 0; s < samples; ++s) {
        const std::vector<double> world = prior.sample(rng);
        const int rec = policy.simulate(world, rng);
        if (rec != d) continue;  // indicator zero, term contributes 0
        ++recommended;
        for (int alt = 0; alt < k; ++alt) {
            if (alt == d) continue;
            const double diff = world[static_cast<size_t>(d)] - world[static_cast<size_t>(alt)];
            sum[static_cast<size_t>(alt)] += diff;
            sumsq[static_cast<size_t>(alt)] += diff * diff;
        }
    }

    BicEstimate out;
    out.recommended = recommended;
    if (recommended == 0) {
        out.degenerate = true;
        return out;
    }
    double worst = std::numeric_limits<double>::infinity();
    int worst_alt = -1;
    double worst_var = 0.0;
    for (int alt = 0; alt < k; ++alt) {
        if (alt == d) continue;
        const double mean = sum[static_cast<size_t>(alt)] / samples;
        if (mean < worst) {
            worst = mean;
            worst_alt = alt;
            // variance of the indicator-weighted term
            worst_var = sumsq[static_cast<size_t>(alt)] / samples - mean * mean;
        }
    }
    out.estimate = worst;
    out.worst_alternative = worst_alt;
    out.ci_halfwidth = 1.959964 * std::sqrt(std::max(worst_var, 0.0) / samples);
    return out;
}

int respond(const UnitPrior& prior, int recommendation, const PolicyDescriptor& policy,
            ResponseMode mode, Rng& rng, long samples, double mc_tolerance) {
    if (mode == ResponseMode::trusting) return recommendation;
    const BicEstimate check = verify_bic_mc(policy, prior, recommendation, samples, rng);
    if (!check.degenerate && check.estimate >= -mc_tolerance) return recommendation;
    return unit_type(prior);
}

}  // namespace iasc
