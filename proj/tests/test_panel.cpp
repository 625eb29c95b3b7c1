#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "iasc/panel.hpp"

using namespace iasc;

namespace {

LatentFactorModel tiny_model(const Eigen::MatrixXd& V, const Eigen::MatrixXd& U0,
                             const Eigen::MatrixXd& U1) {
    LatentFactorModel m;
    m.unit_factors = V;
    m.time_factors = {U0, U1};
    m.type_labels.assign(static_cast<size_t>(V.rows()), 0);
    return m;
}

}  // namespace

TEST_CASE("expected_outcome is the exact inner product") {
    Eigen::MatrixXd V(3, 2);
    V << 0, 1, 0, 0, 0.5, 0.5;
    Eigen::MatrixXd U0(2, 2), U1(2, 2);
    U0 << 0, 1, 0.5, 0.5;
    U1 = U0;
    const LatentFactorModel m = tiny_model(V, U0, U1);

    CHECK(expected_outcome(m, 0, 0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(expected_outcome(m, 1, 0, 0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(expected_outcome(m, 2, 1, 0) == doctest::Approx(0.5).epsilon(1e-15));

    CHECK_THROWS_AS(expected_outcome(m, 3, 0, 0), std::out_of_range);
    CHECK_THROWS_AS(expected_outcome(m, 0, 2, 0), std::out_of_range);
    CHECK_THROWS_AS(expected_outcome(m, 0, 0, 2), std::out_of_range);
}

TEST_CASE("realize_panel: zero noise reproduces the hidden expectations") {
    Rng rng(42);
    SimDgpConfig dgp;
    dgp.r = 2;
    dgp.T0 = 6;
    dgp.T1 = 4;
    dgp.noise_var = 0.0;
    auto [cfg, model] = generate_sim_instance(dgp, 4, rng);
    std::vector<int> assign{0, 1, 1, 0};
    Rng noise(7);
    const PanelRealization panel = realize_panel(cfg, model, assign, noise);

    for (int i = 0; i < cfg.n; ++i) {
        for (int t = 0; t < cfg.T0; ++t)
            CHECK(panel.pre(i, t) ==
                  doctest::Approx(panel.hidden_expectations[0](i, t)).epsilon(1e-15));
        for (int t = 0; t < cfg.t1(); ++t)
            CHECK(panel.post(i, t) ==
                  doctest::Approx(
                      panel.hidden_expectations[static_cast<size_t>(assign[static_cast<size_t>(i)])](
                          i, cfg.T0 + t))
                      .epsilon(1e-15));
    }
}

TEST_CASE("realize_panel: noise is centered (CLT scale) and seed-deterministic") {
    Rng rng(3);
    SimDgpConfig dgp;
    dgp.r = 2;
    dgp.T0 = 100;
    dgp.T1 = 4;
    dgp.noise_var = 0.01;  // sigma = 0.1
    auto [cfg, model] = generate_sim_instance(dgp, 100, rng);  // 100x100 pre entries
    std::vector<int> assign(100, 0);

    Rng noise_a(11), noise_b(11);
    const PanelRealization a = realize_panel(cfg, model, assign, noise_a);
    const PanelRealization b = realize_panel(cfg, model, assign, noise_b);
    CHECK((a.pre - b.pre).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.post - b.post).cwiseAbs().maxCoeff() == 0.0);

    const double mean_dev =
        (a.pre - a.hidden_expectations[0].leftCols(cfg.T0)).sum() / (100.0 * cfg.T0);
    CHECK(std::abs(mean_dev) <= 4.0 * 0.1 / 100.0);
}

TEST_CASE("sim instance: alternating types in orthogonal half-spaces") {
    Rng rng(5);
    SimDgpConfig dgp;
    dgp.r = 4;
    dgp.T0 = 8;
    dgp.T1 = 4;
    auto [cfg, model] = generate_sim_instance(dgp, 4, rng);

    // units 1 and 3 (1-based) are type 0
    CHECK(model.type_labels == std::vector<int>{0, 1, 0, 1});

    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (model.type_labels[static_cast<size_t>(i)] !=
                model.type_labels[static_cast<size_t>(j)])
                CHECK(model.unit_factors.row(i).dot(model.unit_factors.row(j)) == 0.0);

    // pre factors alternate: internal even t sits in the type-0 half, so a
    // type-1 unit is orthogonal to it
    const Eigen::MatrixXd& U0 = model.time_factors[0];
    for (int t = 0; t < cfg.T0; t += 2) {
        CHECK(U0.row(t).tail(2).cwiseAbs().maxCoeff() == 0.0);
        CHECK(U0.row(t).dot(model.unit_factors.row(1)) == 0.0);
    }
    for (int t = 1; t < cfg.T0; t += 2) CHECK(U0.row(t).head(2).cwiseAbs().maxCoeff() == 0.0);

    // pre-period factors identical across interventions
    for (int t = 0; t < cfg.T0; ++t)
        CHECK((model.time_factors[0].row(t) - model.time_factors[1].row(t)).norm() == 0.0);

    CHECK_THROWS_AS(generate_sim_instance(SimDgpConfig{.r = 3}, 4, rng),
                    std::invalid_argument);
}

TEST_CASE("hand-built type-1 unit under constant treatment factors") {
    // back-half factor 0.5 each, treatment post factor -0.5 everywhere: dot is -0.5
    Eigen::MatrixXd V(1, 4);
    V << 0, 0, 0.5, 0.5;
    Eigen::MatrixXd U0 = Eigen::MatrixXd::Zero(6, 4);
    Eigen::MatrixXd U1 = Eigen::MatrixXd::Zero(6, 4);
    for (int t = 2; t < 6; ++t)
        for (int j = 0; j < 4; ++j) U1(t, j) = -0.5;
    LatentFactorModel m = tiny_model(V, U0, U1);
    ModelConfig cfg;
    cfg.n = 1;
    cfg.T = 6;
    cfg.T0 = 2;
    cfg.r = 4;
    CHECK(avg_post_expected(cfg, m, 0, 1) == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("normalize flag keeps every expected outcome within the bound") {
    Rng rng(9);
    SimDgpConfig dgp;
    dgp.r = 8;
    dgp.T0 = 12;
    dgp.T1 = 8;
    dgp.normalize = true;
    auto [cfg, model] = generate_sim_instance(dgp, 30, rng);
    for (int d = 0; d < cfg.k; ++d)
        for (int i = 0; i < cfg.n; ++i)
            for (int t = 0; t < cfg.T; ++t)
                CHECK(std::abs(expected_outcome(model, i, t, d)) <= cfg.outcome_bound + 1e-12);
}

TEST_CASE("impossibility instance matches the construction") {
    {
        auto [cfg, model] = generate_impossibility_instance(1.0, 0.0);
        CHECK(avg_post_expected(cfg, model, 1, 0) == doctest::Approx(0.0).epsilon(1e-15));
    }
    {
        auto [cfg, model] = generate_impossibility_instance(1.0, 0.7);
        CHECK(avg_post_expected(cfg, model, 1, 0) == doctest::Approx(0.7).epsilon(1e-14));
        CHECK(avg_post_expected(cfg, model, 0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    }
    for (double H : {-0.9, -0.3, 0.2, 0.55}) {
        auto [cfg, model] = generate_impossibility_instance(1.0, H);
        CHECK(avg_post_expected(cfg, model, 0, 0) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(cfg.sigma == 0.0);
    }
    CHECK_THROWS_AS(generate_impossibility_instance(0.5, 0.7), std::invalid_argument);
}

TEST_CASE("avg_post_expected equals the brute-force window mean") {
    Rng rng(13);
    SimDgpConfig dgp;
    dgp.r = 4;
    dgp.T0 = 10;
    dgp.T1 = 7;
    auto [cfg, model] = generate_sim_instance(dgp, 6, rng);
    for (int i = 0; i < cfg.n; ++i)
        for (int d = 0; d < cfg.k; ++d) {
            double acc = 0.0;
            for (int t = cfg.T0; t < cfg.T; ++t) acc += expected_outcome(model, i, t, d);
            CHECK(std::abs(avg_post_expected(cfg, model, i, d) - acc / cfg.t1()) <= 1e-12);
        }

    // constant post factors give the constant back
    Eigen::MatrixXd V(1, 2);
    V << 1, 1;
    Eigen::MatrixXd U0 = Eigen::MatrixXd::Zero(4, 2);
    for (int t = 2; t < 4; ++t) U0.row(t) << 0.4, 0.3;
    LatentFactorModel m = tiny_model(V, U0, U0);
    ModelConfig cc;
    cc.n = 1;
    cc.T = 4;
    cc.T0 = 2;
    cc.r = 2;
    CHECK(avg_post_expected(cc, m, 0, 0) == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("pluggable noise sampler is honored") {
    Rng rng(21);
    SimDgpConfig dgp;
    dgp.r = 2;
    dgp.T0 = 4;
    dgp.T1 = 2;
    auto [cfg, model] = generate_sim_instance(dgp, 2, rng);
    cfg.sigma = 0.5;  // would be Gaussian by default
    const NoiseSampler constant = [](Rng&) { return 0.25; };
    Rng noise(1);
    std::vector<int> assign{0, 1};
    const PanelRealization panel = realize_panel(cfg, model, assign, noise, &constant);
    for (int t = 0; t < cfg.T0; ++t)
        CHECK(panel.pre(0, t) - panel.hidden_expectations[0](0, t) ==
              doctest::Approx(0.25).epsilon(1e-15));
}
