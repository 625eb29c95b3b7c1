#include "iasc/policy.hpp"

#include <cmath>
#include <stdexcept>

namespace iasc {

namespace {
// ceil with a tolerance so values that are integers up to float noise do not
// round up an extra step
int ceil_int(double x) { return static_cast<int>(std::ceil(x - 1e-9)); }
}  // namespace

void PolicyConfig::validate() const {
    if (N0 < 0) throw std::invalid_argument("PolicyConfig: N0 must be >= 0");
    if (L < 2) throw std::invalid_argument("PolicyConfig: L must be >= 2");
    if (C <= 0 || C >= 1) throw std::invalid_argument("PolicyConfig: C must be in (0,1)");
    if (rank < 1) throw std::invalid_argument("PolicyConfig: rank must be >= 1");
    if (T1 < 1) throw std::invalid_argument("PolicyConfig: T1 must be >= 1");
    for (double d : {delta.d0, delta.d_pcr, delta.d_eps})
        if (d < 0 || d >= 1) throw std::invalid_argument("PolicyConfig: delta components in [0,1)");
}

const char* to_string(RecMeta meta) {
    switch (meta) {
        case RecMeta::first_stage: return "first_stage";
        case RecMeta::explore: return "explore";
        case RecMeta::exploit: return "exploit";
        case RecMeta::racing_coin: return "racing_coin";
    }
    return "?";
}

void PolicyState::record(Eigen::VectorXd y_pre, int d_hat, int d, Eigen::VectorXd y_post) {
    history.push_back({std::move(y_pre), d_hat, d, std::move(y_post)});
    ++arrivals;
}

DonorSet PolicyState::donors(int d) const {
    const int m = arm_count(d);
    DonorSet set;
    set.d = d;
    if (m == 0) return set;
    const auto t0 = history.front().y_pre.size();
    set.pre.resize(m, t0);
    set.post_sum.resize(m);
    int row = 0;
    for (const auto& h : history) {
        if (h.d != d) continue;
        set.pre.row(row) = h.y_pre;
        set.post_sum(row) = h.y_post.sum();
        ++row;
    }
    return set;
}

int PolicyState::arm_count(int d) const {
    int m = 0;
    for (const auto& h : history)
        if (h.d == d) ++m;
    return m;
}

Recommendation recommend_next(PolicyState& state, const PolicyConfig& cfg,
                              const Eigen::VectorXd& y_pre,
                              const PopulationKnowledge& knowledge) {
    cfg.validate();
    const int i = state.arrivals;
    if (i < cfg.N0) return {-1, RecMeta::first_stage};

    const int pos = i - cfg.N0;
    const int j = pos % cfg.L;
    if (j == 0) {
        // batch boundary: draw the hidden explore index and refit estimates
        state.explore_index = static_cast<int>(state.rng.uniform_int(
            static_cast<std::uint64_t>(cfg.L)));
        const DonorSet treat = state.donors(1);
        if (treat.m() < cfg.rank)
            throw std::runtime_error(
                "recommend_next: first stage under-sized, treatment arm has fewer "
                "donors than the PCR rank");
        state.treatment_fit = fit_pcr(treat, cfg.rank, cfg.rho);
    }

    if (j == state.explore_index) return {0, RecMeta::explore};

    const double est = predict_avg_post(*state.treatment_fit, y_pre, cfg.T1);
    const double mu0_lower = knowledge.mu.at(1).at(0).lo;
    return (mu0_lower - est >= cfg.C) ? Recommendation{0, RecMeta::exploit}
                                      : Recommendation{1, RecMeta::exploit};
}

int required_n0(int r_tau, double delta, double K, double c_ver, double p_min) {
    if (r_tau < 1) throw std::invalid_argument("required_n0: r_tau must be >= 1");
    if (delta <= 0) throw std::invalid_argument("required_n0: delta must be > 0");
    if (p_min <= 0 || p_min > 1) throw std::invalid_argument("required_n0: p_min in (0,1]");
    if (delta >= 2.0) return 1;  // bound is vacuous
    const double root = c_ver * K * K *
                        (std::sqrt(static_cast<double>(r_tau)) + std::sqrt(std::log(2.0 / delta)));
    return std::max(1, ceil_int(root * root / p_min));
}

int single_hit_count(double delta, double p) {
    if (delta <= 0 || delta >= 1) throw std::invalid_argument("single_hit_count: delta in (0,1)");
    if (p <= 0 || p >= 1) throw std::invalid_argument("single_hit_count: p in (0,1)");
    return std::max(1, ceil_int(std::log(1.0 / delta) / std::log(1.0 / (1.0 - p))));
}

int default_batch_count(double p_low, int r_tau, double delta0) {
    if (p_low <= 0 || p_low > 1) throw std::invalid_argument("default_batch_count: p_low in (0,1]");
    if (delta0 <= 0 || delta0 >= 1)
        throw std::invalid_argument("default_batch_count: delta0 in (0,1)");
    return std::max(1, ceil_int((2.0 / p_low) * (r_tau + std::log(1.0 / delta0))));
}

double delta_pcr_for_gap(const ConfidenceParams& params, double C) {
    if (C <= 0 || C >= 1) throw std::invalid_argument("delta_pcr_for_gap: C in (0,1)");
    return delta_for_epsilon(params, C / 2.0);
}

namespace {

double noise_concentration(double sigma, int T1, double delta_eps) {
    if (sigma == 0) return 0.0;
    if (delta_eps <= 0 || delta_eps >= 1)
        throw std::invalid_argument("required_batch_L: delta_eps in (0,1) when sigma > 0");
    return sigma * std::sqrt(2.0 * std::log(1.0 / delta_eps) / T1);
}

SizingResult batch_from_terms(double numerator, double effective_gap, double event_prob,
                              double delta_total, double M) {
    SizingResult out;
    out.numerator = numerator;
    out.event_prob = event_prob;
    out.denominator = effective_gap * event_prob - 2.0 * M * delta_total;
    if (numerator <= 0) {
        // already incentivized; minimum legal batch
        out.feasible = true;
        out.value = 2;
        out.note = "prior already favors the recommended arm";
        return out;
    }
    if (out.denominator <= 0) {
        out.note = "C too small for achievable accuracy";
        return out;
    }
    out.feasible = true;
    out.value = std::max(2, ceil_int(1.0 + numerator / out.denominator));
    return out;
}

}  // namespace

SizingResult required_batch_L(const std::vector<UnitPrior>& type1_priors, double C,
                              double alpha, double sigma, int T1, double delta_eps,
                              double delta_total, double M) {
    if (type1_priors.empty())
        throw std::invalid_argument("required_batch_L: no priors supplied");
    const double slack = alpha + noise_concentration(sigma, T1, delta_eps);

    SizingResult worst;
    worst.feasible = true;
    worst.value = 2;
    bool first = true;
    for (const auto& prior : type1_priors) {
        const double numerator = prior_mean(prior, 1) - prior_mean(prior, 0);
        const double p = event_prob_xi(prior, C, slack).value;
        SizingResult cand = batch_from_terms(numerator, C - slack, p, delta_total, M);
        cand.slack = slack;
        if (!cand.feasible) return cand;
        if (first || cand.value > worst.value) worst = cand;
        first = false;
    }
    return worst;
}

SizingResult required_batch_L(const PopulationKnowledge& knowledge, double C,
                              double alpha, double sigma, int T1, double delta_eps,
                              double delta_total, double M) {
    const double slack = alpha + noise_concentration(sigma, T1, delta_eps);
    const double numerator = knowledge.mu.at(1).at(1).hi - knowledge.mu.at(1).at(0).lo;
    SizingResult out = batch_from_terms(numerator, C - slack, knowledge.zeta_c,
                                        delta_total, M);
    out.slack = slack;
    return out;
}

// ---- noiseless policies ----

int noiseless_kprime(int k_samples, double delta) {
    if (k_samples < 1) throw std::invalid_argument("noiseless_kprime: k must be >= 1");
    if (delta <= 0 || delta >= 1) throw std::invalid_argument("noiseless_kprime: delta in (0,1)");
    return ceil_int(2.0 * k_samples + 2.0 * std::sqrt(k_samples * std::log(1.0 / delta)));
}

Recommendation noiseless_recommend(PolicyState& state, const NoiselessConfig& cfg,
                                   const Eigen::VectorXd& expected_pre,
                                   const UnitPrior& prior) {
    if (cfg.L < 2) throw std::invalid_argument("noiseless_recommend: L must be >= 2");
    const int i = state.arrivals;
    if (i < cfg.N0) return {-1, RecMeta::first_stage};

    const int pos = i - cfg.N0;
    const int batch = pos / cfg.L;
    const int j = pos % cfg.L;
    const bool in_batches = batch < cfg.batches;
    if (in_batches && j == 0)
        state.explore_index = static_cast<int>(state.rng.uniform_int(
            static_cast<std::uint64_t>(cfg.L)));

    // span check + exact or prior-based estimate per arm
    const int k = prior.k();
    std::vector<bool> lsi_holds(static_cast<size_t>(k), false);
    std::vector<double> estimate(static_cast<size_t>(k), 0.0);
    for (int d = 0; d < k; ++d) {
        const DonorSet set = state.donors(d);
        if (set.m() > 0 &&
            lsi_residual(set.pre, expected_pre) <= cfg.lsi_tol) {
            lsi_holds[static_cast<size_t>(d)] = true;
            const Eigen::VectorXd w = span_weights(set.pre, expected_pre);
            const int t1 = static_cast<int>(state.history.front().y_post.size());
            estimate[static_cast<size_t>(d)] = w.dot(set.post_sum) / t1;
        } else {
            estimate[static_cast<size_t>(d)] = prior_mean(prior, d);
        }
    }

    auto argmax_est = [&]() {
        int best = 0;
        for (int d = 1; d < k; ++d)
            if (estimate[static_cast<size_t>(d)] > estimate[static_cast<size_t>(best)]) best = d;
        return best;
    };

    if (in_batches && j == state.explore_index) {
        int failing = -1, fail_count = 0;
        for (int d = 0; d < k; ++d)
            if (!lsi_holds[static_cast<size_t>(d)]) {
                failing = d;
                ++fail_count;
            }
        if (fail_count == 1) return {failing, RecMeta::explore};
        return {argmax_est(), RecMeta::explore};  // both-hold / both-fail tie handling
    }
    return {argmax_est(), RecMeta::exploit};
}

NoiselessBound noiseless_batch_bound(const UnitPrior& type0, const UnitPrior& type1) {
    NoiselessBound out;
    // psi for one type: preferred arm `pref`, other arm `other`.
    auto psi = [&](const UnitPrior& prior, int pref, int other,
                   double& psi_out) -> bool {
        const double mu_pref = prior_mean(prior, pref);
        const double mu_other = prior_mean(prior, other);
        const double numerator = mu_pref - mu_other;
        if (numerator <= 0) {
            psi_out = 0.0;  // already indifferent or better
            return true;
        }
        const Marginal& reward_pref = prior.marginals[static_cast<size_t>(pref)];
        const double p = reward_pref.cdf(mu_other);
        if (p <= 0) return false;
        const double cond = reward_pref.truncated_mean_below(mu_other);
        const double denom = (mu_other - cond) * p;
        if (denom <= 0) return false;
        psi_out = numerator / denom;
        return true;
    };

    const bool ok0 = psi(type0, 0, 1, out.psi0);
    const bool ok1 = psi(type1, 1, 0, out.psi1);
    if (!ok0 || !ok1) {
        out.note = "conditioning event has probability 0";
        return out;
    }
    out.feasible = true;
    out.L = std::max(2, ceil_int(1.0 + std::max(out.psi0, out.psi1)));
    return out;
}

// ---- racing ----

Recommendation racing_recommend(PolicyState& state, const RacingConfig& cfg,
                                const Eigen::VectorXd& y_pre) {
    if (state.winner) return {*state.winner, RecMeta::exploit};

    const DonorSet d0 = state.donors(0), d1 = state.donors(1);
    if (d0.m() < cfg.rank || d1.m() < cfg.rank)
        throw std::runtime_error("racing_recommend: both arms need at least `rank` donors");
    const PCRModel m0 = fit_pcr(d0, cfg.rank, cfg.rho);
    const PCRModel m1 = fit_pcr(d1, cfg.rank, cfg.rho);
    const double est0 = predict_avg_post(m0, y_pre, cfg.T1);
    const double est1 = predict_avg_post(m1, y_pre, cfg.T1);

    if (est0 - est1 >= cfg.epsilon) {
        state.winner = 0;
        return {0, RecMeta::exploit};
    }
    if (est1 - est0 >= cfg.epsilon) {
        state.winner = 1;
        return {1, RecMeta::exploit};
    }
    return {state.rng.bernoulli(0.5) ? 1 : 0, RecMeta::racing_coin};
}

bool racing_bic_preconditions(double tau, double P, double delta_pcr, double delta_n) {
    if (tau <= 0 || tau >= 1) throw std::invalid_argument("racing_bic: tau in (0,1)");
    if (P < 0 || P > 1) throw std::invalid_argument("racing_bic: P in [0,1]");
    const double bound_pcr = tau * P / (2.0 * P + 4.0);
    const double bound_n = tau * P / 4.0;
    return delta_pcr <= bound_pcr && delta_n <= bound_n;
}

}  // namespace iasc
