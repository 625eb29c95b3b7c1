#include "iasc/policy_k.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace iasc {

namespace {
int ceil_int(double x) { return static_cast<int>(std::ceil(x - 1e-9)); }

int position_of(const std::vector<int>& subtype, int ell) {
    for (size_t p = 0; p < subtype.size(); ++p)
        if (subtype[p] == ell) return static_cast<int>(p);
    throw std::invalid_argument("exploit_event: intervention not in the sub-type ordering");
}
}  // namespace

void KPolicyConfig::validate() const {
    const int kk = k();
    if (kk < 2) throw std::invalid_argument("KPolicyConfig: need k >= 2");
    std::vector<bool> seen(static_cast<size_t>(kk), false);
    for (int d : subtype) {
        if (d < 0 || d >= kk || seen[static_cast<size_t>(d)])
            throw std::invalid_argument("KPolicyConfig: subtype must be a permutation of 0..k-1");
        seen[static_cast<size_t>(d)] = true;
    }
    if (L < 2) throw std::invalid_argument("KPolicyConfig: L must be >= 2");
    if (B < 1) throw std::invalid_argument("KPolicyConfig: B must be >= 1");
    if (C <= 0 || C >= 1) throw std::invalid_argument("KPolicyConfig: C in (0,1)");
    if (static_cast<int>(mu_bounds.size()) != kk)
        throw std::invalid_argument("KPolicyConfig: mu_bounds must have one entry per intervention");
}

void KPolicyState::record(Eigen::VectorXd y_pre, int d_hat, int d, Eigen::VectorXd y_post) {
    history.push_back({std::move(y_pre), d_hat, d, std::move(y_post)});
    ++arrivals;
}

DonorSet KPolicyState::donors(int d) const {
    DonorSet set;
    set.d = d;
    const int m = arm_count(d);
    if (m == 0) return set;
    set.pre.resize(m, history.front().y_pre.size());
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

int KPolicyState::arm_count(int d) const {
    int m = 0;
    for (const auto& h : history)
        if (h.d == d) ++m;
    return m;
}

bool exploit_event(const std::vector<std::optional<double>>& estimates,
                   double prior_lower_ell, double C, int ell,
                   const std::vector<int>& subtype, bool literal_window) {
    const int k = static_cast<int>(subtype.size());
    const int pos = position_of(subtype, ell);

    auto need = [&](int d) -> double {
        if (d < 0 || d >= k || !estimates[static_cast<size_t>(d)])
            throw std::invalid_argument("exploit_event: missing estimate for intervention " +
                                        std::to_string(d));
        return *estimates[static_cast<size_t>(d)];
    };

    if (literal_window) {
        // every intervention label in {subtype[k-1], ..., ell-1} must sit
        // strictly between the top estimate + C and the prior bound - C
        const int lo = std::min(subtype[static_cast<size_t>(k - 1)], ell - 1);
        const int hi = std::max(subtype[static_cast<size_t>(k - 1)], ell - 1);
        if (ell - 1 < subtype[static_cast<size_t>(k - 1)]) return true;  // empty window
        const double top = need(subtype[0]);
        for (int d = lo; d <= hi; ++d) {
            const double est = need(d);
            if (!(top + C < est && est < prior_lower_ell - C)) return false;
        }
        return true;
    }

    // analysis version: positions are 1-indexed in the ordering, ell sits at
    // 1-indexed position pos+1
    const double top = need(subtype[0]);
    for (int j = 1; j < pos; ++j) {  // 1-indexed 1 < j < pos+1
        if (!(top <= need(subtype[static_cast<size_t>(j)]) - C)) return false;
    }
    for (int j = 0; j < pos; ++j) {  // 1-indexed 1 <= j < pos+1
        if (!(need(subtype[static_cast<size_t>(j)]) <= prior_lower_ell - C)) return false;
    }
    return true;
}

int loop_intervention(const KPolicyConfig& cfg, int arrival_index) {
    const int k = cfg.k();
    const int block = cfg.B * cfg.L;
    const int loop = (arrival_index - cfg.N0) / block;
    if (loop >= k - 1) return -1;
    return cfg.subtype[static_cast<size_t>(k - 1 - loop)];
}

Recommendation recommend_next_k(KPolicyState& state, const KPolicyConfig& cfg,
                                const Eigen::VectorXd& y_pre) {
    cfg.validate();
    const int i = state.arrivals;
    if (i < cfg.N0) return {-1, RecMeta::first_stage};

    const int k = cfg.k();
    const int top = cfg.subtype[0];
    const int ell = loop_intervention(cfg, i);
    if (ell < 0) return {top, RecMeta::exploit};  // all loops complete

    const int pos = (i - cfg.N0) % (cfg.B * cfg.L);
    const int j = pos % cfg.L;
    if (j == 0) {
        state.explore_index = static_cast<int>(state.rng.uniform_int(
            static_cast<std::uint64_t>(cfg.L)));
        state.fits.assign(static_cast<size_t>(k), std::nullopt);
        for (int d = 0; d < k; ++d) {
            const DonorSet set = state.donors(d);
            if (set.m() >= cfg.rank) state.fits[static_cast<size_t>(d)] = fit_pcr(set, cfg.rank, cfg.rho);
        }
        if (!state.fits[static_cast<size_t>(top)])
            throw std::runtime_error("recommend_next_k: first stage under-sized for the top arm");
    }

    if (j == state.explore_index) return {ell, RecMeta::explore};

    std::vector<std::optional<double>> estimates(static_cast<size_t>(k));
    for (int d = 0; d < k; ++d)
        if (state.fits[static_cast<size_t>(d)])
            estimates[static_cast<size_t>(d)] =
                predict_avg_post(*state.fits[static_cast<size_t>(d)], y_pre, cfg.T1);

    // arms without estimates fail the event (conservative)
    bool event = false;
    try {
        event = exploit_event(estimates, cfg.mu_bounds[static_cast<size_t>(ell)].lo, cfg.C,
                              ell, cfg.subtype, cfg.literal_window);
    } catch (const std::invalid_argument&) {
        event = false;
    }
    return {event ? ell : top, RecMeta::exploit};
}

SizingResult required_batch_L_k(double mu_top, double mu_bottom, double prob_event,
                                double C, double alpha, double sigma, int T1,
                                double delta_eps, double delta_total, double M) {
    if (prob_event < 0 || prob_event > 1)
        throw std::invalid_argument("required_batch_L_k: prob_event in [0,1]");
    double noise = 0.0;
    if (sigma > 0) {
        if (delta_eps <= 0 || delta_eps >= 1)
            throw std::invalid_argument("required_batch_L_k: delta_eps in (0,1) when sigma > 0");
        noise = sigma * std::sqrt(2.0 * std::log(1.0 / delta_eps) / T1);
    }

    SizingResult out;
    out.numerator = mu_top - mu_bottom;
    out.slack = 2.0 * alpha + 2.0 * noise;
    out.event_prob = prob_event;
    out.denominator = (C - out.slack) * (1.0 - delta_total) * prob_event -
                      2.0 * M * delta_total;
    if (out.numerator <= 0) {
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
    out.value = std::max(2, ceil_int(1.0 + out.numerator / out.denominator));
    return out;
}

}  // namespace iasc
