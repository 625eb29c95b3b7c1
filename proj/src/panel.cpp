#include "iasc/panel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace iasc {

void ModelConfig::validate() const {
    if (n < 1) throw std::invalid_argument("ModelConfig: n must be >= 1");
    if (T0 <= 0 || T0 >= T) throw std::invalid_argument("ModelConfig: need 0 < T0 < T");
    if (r < 1) throw std::invalid_argument("ModelConfig: r must be >= 1");
    if (sigma < 0) throw std::invalid_argument("ModelConfig: sigma must be >= 0");
    if (k < 2) throw std::invalid_argument("ModelConfig: k must be >= 2");
    if (gamma <= 0) throw std::invalid_argument("ModelConfig: gamma must be > 0");
}

double expected_outcome(const LatentFactorModel& model, int i, int t, int d) {
    if (i < 0 || i >= model.unit_factors.rows())
        throw std::out_of_range("expected_outcome: unit index " + std::to_string(i));
    if (d < 0 || d >= static_cast<int>(model.time_factors.size()))
        throw std::out_of_range("expected_outcome: intervention " + std::to_string(d));
    const Eigen::MatrixXd& U = model.time_factors[static_cast<size_t>(d)];
    if (t < 0 || t >= U.rows())
        throw std::out_of_range("expected_outcome: time index " + std::to_string(t));
    return U.row(t).dot(model.unit_factors.row(i));
}

double avg_post_expected(const ModelConfig& config, const LatentFactorModel& model,
                         int i, int d) {
    double acc = 0.0;
    for (int t = config.T0; t < config.T; ++t) acc += expected_outcome(model, i, t, d);
    return acc / config.t1();
}

PanelRealization realize_panel(const ModelConfig& config, const LatentFactorModel& model,
                               const std::vector<int>& assignments, Rng& rng,
                               const NoiseSampler* noise) {
    config.validate();
    if (static_cast<int>(assignments.size()) != config.n)
        throw std::invalid_argument("realize_panel: assignments size != n");
    for (int d : assignments)
        if (d < 0 || d >= config.k)
            throw std::invalid_argument("realize_panel: invalid intervention assignment");

    const int n = config.n, T0 = config.T0, T1 = config.t1();
    PanelRealization out;
    out.chosen = assignments;
    out.pre.resize(n, T0);
    out.post.resize(n, T1);
    out.hidden_expectations.assign(static_cast<size_t>(config.k),
                                   Eigen::MatrixXd(n, config.T));
    for (int d = 0; d < config.k; ++d)
        for (int i = 0; i < n; ++i)
            for (int t = 0; t < config.T; ++t)
                out.hidden_expectations[static_cast<size_t>(d)](i, t) =
                    expected_outcome(model, i, t, d);

    auto draw = [&](Rng& r) {
        return noise ? (*noise)(r) : (config.sigma > 0 ? r.normal(0.0, config.sigma) : 0.0);
    };
    for (int i = 0; i < n; ++i) {
        for (int t = 0; t < T0; ++t)
            out.pre(i, t) = out.hidden_expectations[0](i, t) + draw(rng);
        const auto d = static_cast<size_t>(assignments[static_cast<size_t>(i)]);
        for (int t = 0; t < T1; ++t)
            out.post(i, t) = out.hidden_expectations[d](i, T0 + t) + draw(rng);
    }
    return out;
}

std::pair<ModelConfig, LatentFactorModel> generate_sim_instance(const SimDgpConfig& dgp,
                                                                int n, Rng& rng) {
    if (n < 2) throw std::invalid_argument("generate_sim_instance: n must be >= 2");
    if (dgp.r < 2 || dgp.r % 2 != 0)
        throw std::invalid_argument("generate_sim_instance: r must be even and >= 2");

    ModelConfig cfg;
    cfg.n = n;
    cfg.T0 = dgp.T0;
    cfg.T = dgp.T0 + dgp.T1;
    cfg.r = dgp.r;
    cfg.k = 2;
    cfg.sigma = std::sqrt(dgp.noise_var);

    const int r = dgp.r, half = r / 2;
    const double unit_scale = dgp.normalize ? 2.0 / r : 1.0;

    LatentFactorModel model;
    model.unit_factors = Eigen::MatrixXd::Zero(n, r);
    model.type_labels.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int type = i % 2;  // unit 0 is type 0, alternating arrivals
        model.type_labels[static_cast<size_t>(i)] = type;
        const int offset = (type == 0) ? 0 : half;
        for (int j = 0; j < half; ++j)
            model.unit_factors(i, offset + j) =
                unit_scale * rng.uniform(dgp.unit_value_range.first, dgp.unit_value_range.second);
    }

    // Pre-period factors alternate subspaces: internal even t lies in the
    // type-0 half, internal odd t in the type-1 half.
    Eigen::MatrixXd U0 = Eigen::MatrixXd::Zero(cfg.T, r);
    for (int t = 0; t < cfg.T0; ++t) {
        const int offset = (t % 2 == 0) ? 0 : half;
        for (int j = 0; j < half; ++j)
            U0(t, offset + j) = rng.uniform(dgp.pre_factor_range.first, dgp.pre_factor_range.second);
    }
    Eigen::MatrixXd U1 = U0;
    for (int t = cfg.T0; t < cfg.T; ++t)
        for (int j = 0; j < r; ++j) {
            U0(t, j) = rng.uniform(dgp.control_post_range.first, dgp.control_post_range.second);
            U1(t, j) = rng.uniform(dgp.treat_post_range.first, dgp.treat_post_range.second);
        }
    model.time_factors = {U0, U1};
    return {cfg, model};
}

std::pair<ModelConfig, LatentFactorModel> generate_impossibility_instance(
    double c, double H, int n, int T0, int T1) {
    if (c <= 0) throw std::invalid_argument("impossibility instance: c must be > 0");
    if (std::abs(H) > c) throw std::invalid_argument("impossibility instance: |H| must be <= c");

    ModelConfig cfg;
    cfg.n = n;
    cfg.T0 = T0;
    cfg.T = T0 + T1;
    cfg.r = 2;
    cfg.k = 2;
    cfg.sigma = 0.0;

    LatentFactorModel model;
    model.unit_factors = Eigen::MatrixXd::Zero(n, 2);
    model.type_labels.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int type = i % 2;
        model.type_labels[static_cast<size_t>(i)] = type;
        if (type == 0)
            model.unit_factors.row(i) << 0.0, 1.0;
        else
            model.unit_factors.row(i) << 1.0, 0.0;
    }

    // Internal even t corresponds to the first pre-period step, so the
    // type-0 expected sequence is 1,0,1,0,... and type-1 is 0,1,0,1,...
    Eigen::MatrixXd U0 = Eigen::MatrixXd::Zero(cfg.T, 2);
    for (int t = 0; t < T0; ++t) {
        if (t % 2 == 0)
            U0.row(t) << 0.0, 1.0;
        else
            U0.row(t) << 1.0, 0.0;
    }
    Eigen::MatrixXd U1 = U0;
    for (int t = T0; t < cfg.T; ++t) {
        U0.row(t) << H, 1.0;    // control: type 0 sees 1, type 1 sees H
        U1.row(t) << 1.0, -1.0; // treatment completion: type 1 sees 1
    }
    model.time_factors = {U0, U1};
    return {cfg, model};
}

}  // namespace iasc
