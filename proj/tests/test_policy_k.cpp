#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <set>

#include "iasc/policy_k.hpp"
#include "iasc/rng.hpp"

using namespace iasc;

namespace {

std::vector<std::optional<double>> est3(double e0, double e1, double e2) {
    return {e0, e1, e2};
}

KPolicyConfig k3_config() {
    KPolicyConfig cfg;
    cfg.subtype = {2, 1, 0};
    cfg.N0 = 2;
    cfg.L = 3;
    cfg.B = 2;
    cfg.C = 0.1;
    cfg.rank = 1;
    cfg.rho = 0.0;
    cfg.T1 = 2;
    cfg.mu_bounds = {MuBound{0.6, 0.6}, MuBound{0.5, 0.5}, MuBound{0.9, 0.9}};
    return cfg;
}

}  // namespace

TEST_CASE("exploit_event: hand-checked cases and boundaries") {
    const std::vector<int> tau{2, 1, 0};
    // loop end: ell = 0 sits at the last position; estimates
    // est(top=2) = 0.1, est(1) = 0.4, prior lower for 0 is 0.6, C = 0.1:
    // 0.1 <= 0.4 - 0.1 and max(0.1, 0.4) <= 0.6 - 0.1
    CHECK(exploit_event(est3(0.0, 0.4, 0.1), 0.6, 0.1, 0, tau));

    // boundary: an estimate equal to prior_lower - C still passes
    CHECK(exploit_event(est3(0.0, 0.5, 0.1), 0.6, 0.1, 0, tau));

    // the top estimate exceeding min - C fails the first condition
    CHECK_FALSE(exploit_event(est3(0.0, 0.4, 0.35), 0.6, 0.1, 0, tau));

    // second condition fails when an explored arm sits above the bound
    CHECK_FALSE(exploit_event(est3(0.0, 0.55, 0.1), 0.6, 0.1, 0, tau));

    // ell at position 2: only the top estimate is constrained
    CHECK(exploit_event(est3(0.0, 0.0, 0.3), 0.5, 0.1, 1, tau));
    CHECK_FALSE(exploit_event(est3(0.0, 0.0, 0.45), 0.5, 0.1, 1, tau));

    // estimates required by the event must be present
    std::vector<std::optional<double>> missing{std::nullopt, 0.4, std::nullopt};
    CHECK_THROWS_AS(exploit_event(missing, 0.6, 0.1, 0, tau), std::invalid_argument);

    // literal label-window variant: empty window is vacuously true
    CHECK(exploit_event(est3(0.0, 0.0, 0.3), 0.5, 0.1, 0, tau, true));
    // non-empty window {0}: needs top + C < est(0) < bound - C
    CHECK(exploit_event(est3(0.3, 0.0, 0.1), 0.5, 0.1, 1, tau, true));
    CHECK_FALSE(exploit_event(est3(0.45, 0.0, 0.1), 0.5, 0.1, 1, tau, true));
}

TEST_CASE("recommend_next_k: loop schedule and the {top, ell} invariant") {
    KPolicyConfig cfg = k3_config();

    KPolicyState state(55);
    // first stage: sub-type units self-select the top arm (2)
    for (int i = 0; i < cfg.N0; ++i)
        state.record(Eigen::VectorXd::Ones(4), -1, 2, Eigen::VectorXd::Constant(2, 0.2));

    // loop order: least-preferred first
    CHECK(loop_intervention(cfg, cfg.N0) == 0);
    CHECK(loop_intervention(cfg, cfg.N0 + cfg.B * cfg.L) == 1);
    CHECK(loop_intervention(cfg, cfg.N0 + 2 * cfg.B * cfg.L) == -1);

    std::set<int> seen;
    int explores = 0;
    const int horizon = 2 * cfg.B * cfg.L + 4;
    for (int i = 0; i < horizon; ++i) {
        const int ell = loop_intervention(cfg, state.arrivals);
        const Recommendation rec = recommend_next_k(state, cfg, Eigen::VectorXd::Ones(4));
        if (rec.meta == RecMeta::explore) {
            ++explores;
            CHECK(rec.d == ell);
        } else if (ell >= 0) {
            CHECK((rec.d == cfg.subtype[0] || rec.d == ell));
        } else {
            CHECK(rec.d == cfg.subtype[0]);  // loops complete
        }
        seen.insert(rec.d);
        state.record(Eigen::VectorXd::Ones(4), rec.d, rec.d,
                     Eigen::VectorXd::Constant(2, 0.2));
    }
    CHECK(explores == 2 * cfg.B);  // one per batch per loop
}

TEST_CASE("recommend_next_k: missing arms fail the event conservatively") {
    KPolicyConfig cfg = k3_config();
    KPolicyState state(56);
    for (int i = 0; i < cfg.N0; ++i)
        state.record(Eigen::VectorXd::Ones(4), -1, 2, Eigen::VectorXd::Constant(2, 0.2));

    // first batch of the ell = 0 loop: arms 0 and 1 have no donors, so the
    // exploit branch must recommend the top arm
    for (int j = 0; j < cfg.L; ++j) {
        const Recommendation rec = recommend_next_k(state, cfg, Eigen::VectorXd::Ones(4));
        if (rec.meta == RecMeta::exploit) CHECK(rec.d == 2);
        state.record(Eigen::VectorXd::Ones(4), rec.d, 2, Eigen::VectorXd::Constant(2, 0.2));
    }
}

TEST_CASE("recommend_next_k: under-sized first stage raises") {
    KPolicyConfig cfg = k3_config();
    KPolicyState state(57);
    for (int i = 0; i < cfg.N0; ++i)
        state.record(Eigen::VectorXd::Ones(4), -1, 0, Eigen::VectorXd::Constant(2, 0.2));
    CHECK_THROWS_AS(recommend_next_k(state, cfg, Eigen::VectorXd::Ones(4)),
                    std::runtime_error);
}

TEST_CASE("k = 2 collapse agrees with the two-arm branch structure") {
    // with subtype (1, 0) the event reduces to est(1) <= mu0_lower - C,
    // which is the two-arm exploit rule on the same inputs; drive both
    // engines over one stream and compare (agreement is expected here but
    // not asserted exactly: the engines own separate fits)
    KPolicyConfig kcfg;
    kcfg.subtype = {1, 0};
    kcfg.N0 = 2;
    kcfg.L = 3;
    kcfg.B = 3;
    kcfg.C = 0.125;
    kcfg.rank = 1;
    kcfg.rho = 0.0;
    kcfg.T1 = 2;
    kcfg.mu_bounds = {MuBound{0.25, 0.25}, MuBound{0.5, 0.5}};

    PolicyConfig cfg2;
    cfg2.N0 = 2;
    cfg2.L = 3;
    cfg2.B = 3;
    cfg2.C = 0.125;
    cfg2.rank = 1;
    cfg2.rho = 0.0;
    cfg2.T1 = 2;
    PopulationKnowledge knowledge;
    knowledge.mu = {{MuBound{0.5, 0.5}, MuBound{0.25, 0.25}},
                    {MuBound{0.25, 0.25}, MuBound{0.5, 0.5}}};

    KPolicyState ks(99);
    PolicyState ps(99);  // same seed: identical explore draws
    Rng data(1234);
    int agree = 0, total = 0;
    for (int i = 0; i < 2 + 9; ++i) {
        Eigen::VectorXd y_pre(4);
        for (int t = 0; t < 4; ++t) y_pre(t) = data.uniform();
        Eigen::VectorXd y_post(2);
        for (int t = 0; t < 2; ++t) y_post(t) = data.uniform() - 0.6;

        const Recommendation rk = recommend_next_k(ks, kcfg, y_pre);
        const Recommendation r2 = recommend_next(ps, cfg2, y_pre, knowledge);
        if (rk.d >= 0 && r2.d >= 0) {
            ++total;
            if (rk.d == r2.d) ++agree;
        }
        const int d = rk.d < 0 ? (i % 2) : rk.d;
        ks.record(y_pre, rk.d, d, y_post);
        ps.record(y_pre, r2.d, d, y_post);
    }
    CHECK(total > 0);
    CHECK(agree >= total * 9 / 10);
}

TEST_CASE("after all loops the sub-type covers every arm with full span") {
    // k = 3 world, one sub-type whose latent subspace has dimension 2: after
    // the explore loops every arm must hold at least a spanning set of
    // sub-type units
    int successes = 0;
    const int runs = 100;
    for (int rep = 0; rep < runs; ++rep) {
        Rng rng = Rng::stream(808, static_cast<std::uint64_t>(rep));
        const int T0 = 16, T1 = 8, n_units = 70;
        Eigen::MatrixXd U0(T0 + T1, 2);
        for (int t = 0; t < T0; ++t)
            U0.row(t) << rng.uniform(0.25, 0.75), rng.uniform(0.25, 0.75);
        std::array<Eigen::MatrixXd, 3> U{U0, U0, U0};
        for (int t = T0; t < T0 + T1; ++t) {
            U[0].row(t) << rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0);
            U[1].row(t) << rng.uniform(-1.0, 0.0), rng.uniform(-1.0, 0.0);
            U[2].row(t) << rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5);
        }

        KPolicyConfig cfg;
        cfg.subtype = {2, 1, 0};
        cfg.N0 = 4;
        cfg.L = 4;
        cfg.B = 8;
        cfg.C = 0.1;
        cfg.rank = 2;
        cfg.rho = 0.0;
        cfg.T1 = T1;
        cfg.mu_bounds = {MuBound{0.2, 0.2}, MuBound{0.3, 0.3}, MuBound{0.8, 0.8}};

        KPolicyState state(900 + static_cast<std::uint64_t>(rep));
        std::array<std::vector<Eigen::Vector2d>, 3> taken;
        for (int i = 0; i < n_units; ++i) {
            Eigen::Vector2d v(rng.uniform(0.25, 0.75), rng.uniform(0.25, 0.75));
            Eigen::VectorXd y_pre = U0.topRows(T0) * v;
            for (int t = 0; t < T0; ++t) y_pre(t) += rng.normal(0.0, 0.05);
            const Recommendation rec = recommend_next_k(state, cfg, y_pre);
            const int d = rec.d < 0 ? 2 : rec.d;  // self-select the top arm at first
            Eigen::VectorXd y_post(T1);
            for (int t = 0; t < T1; ++t)
                y_post(t) = U[static_cast<size_t>(d)].row(T0 + t).dot(v) + rng.normal(0.0, 0.05);
            state.record(y_pre, rec.d, d, y_post);
            taken[static_cast<size_t>(d)].push_back(v);
        }

        bool covered = true;
        for (int d = 0; d < 3; ++d) {
            if (taken[static_cast<size_t>(d)].size() < 2) {
                covered = false;
                break;
            }
            Eigen::MatrixXd F(static_cast<int>(taken[static_cast<size_t>(d)].size()), 2);
            for (size_t row = 0; row < taken[static_cast<size_t>(d)].size(); ++row)
                F.row(static_cast<int>(row)) = taken[static_cast<size_t>(d)][row];
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(F);
            if (svd.singularValues()(1) <= 1e-8 * svd.singularValues()(0)) covered = false;
        }
        if (covered) ++successes;
    }
    CHECK(successes >= 95);
}

TEST_CASE("required_batch_L_k: closed form, infeasibility, k = 2 shape") {
    const SizingResult sized =
        required_batch_L_k(0.5, 0.25, 0.2, 0.1, 0.0, 0.0, 1, 0.0, 0.0, 1.0);
    CHECK(sized.feasible);
    CHECK(sized.value == 14);  // ceil(1 + 0.25 / 0.02)

    const SizingResult infeasible =
        required_batch_L_k(0.5, 0.25, 0.2, 0.1, 0.0, 0.0, 1, 0.0, 0.2, 1.0);
    CHECK_FALSE(infeasible.feasible);

    // with Pr[E] = 1 and no failure budget the denominator matches the
    // two-intervention formula with doubled slack coefficients
    const double alpha = 0.01, sigma = 0.1;
    const int T1 = 100;
    const double d_eps = 0.1;
    const SizingResult k_version =
        required_batch_L_k(0.5, 0.25, 1.0, 0.3, alpha, sigma, T1, d_eps, 0.0, 1.0);
    const double noise = sigma * std::sqrt(2.0 * std::log(1.0 / d_eps) / T1);
    CHECK(k_version.slack == doctest::Approx(2.0 * (alpha + noise)).epsilon(1e-12));
    CHECK(k_version.denominator ==
          doctest::Approx(0.3 - 2.0 * alpha - 2.0 * noise).epsilon(1e-12));
}
