#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "iasc/rng.hpp"

namespace iasc {

// Dimensions and knowledge bounds of a latent factor panel instance.
struct ModelConfig {
    int n = 0;        // number of units
    int T = 0;        // total time steps
    int T0 = 0;       // pre-period length
    int r = 1;        // latent dimension
    int k = 2;        // number of interventions (>= 2)
    double sigma = 0.0;         // noise sd upper bound
    double gamma = 1.0;         // bound on ||theta^(d)||_2
    double outcome_bound = 1.0; // bound M on |E[y]|

    int t1() const { return T - T0; }
    void validate() const;  // throws std::invalid_argument
};

// Ground truth: unit factors v_i and per-intervention time factors u_t^(d).
// Pre-period rows of every time_factors[d] coincide with time_factors[0].
struct LatentFactorModel {
    Eigen::MatrixXd unit_factors;               // n x r, row i = v_i
    std::vector<Eigen::MatrixXd> time_factors;  // k matrices, T x r
    std::vector<int> type_labels;               // per-unit type tag
};

// One realized panel. Post outcomes exist only for the chosen intervention.
// hidden_expectations carries the noiseless E[y_{i,t}^{(d)}] for every d and
// is oracle-only: policies never see it.
struct PanelRealization {
    Eigen::MatrixXd pre;                             // n x T0
    std::vector<int> chosen;                         // per-unit d
    Eigen::MatrixXd post;                            // n x T1, under chosen[i]
    std::vector<Eigen::MatrixXd> hidden_expectations;  // k matrices, n x T
};

// Simulation data-generating process: two alternating unit types living in
// orthogonal halves of the latent space.
struct SimDgpConfig {
    int r = 4;  // even
    std::pair<double, double> unit_value_range{0.25, 0.75};
    std::pair<double, double> pre_factor_range{0.25, 0.75};
    std::pair<double, double> control_post_range{0.0, 1.0};
    std::pair<double, double> treat_post_range{-1.0, 0.0};
    double noise_var = 0.01;
    bool normalize = false;  // scale unit factors by 2/r to keep |E[y]| <= 1
    int T0 = 100;
    int T1 = 100;
};

// Exact expected outcome <u_t^(d), v_i>. Throws on out-of-range indices.
double expected_outcome(const LatentFactorModel& model, int i, int t, int d);

// (1/T1) * sum_{t > T0} <u_t^(d), v_i>
double avg_post_expected(const ModelConfig& config, const LatentFactorModel& model,
                         int i, int d);

// Pluggable noise family; default is N(0, sigma^2).
using NoiseSampler = std::function<double(Rng&)>;

// Realize pre and post outcomes with additive noise. Pure function of
// (config, model, assignments, rng state): same seed gives identical output.
PanelRealization realize_panel(const ModelConfig& config, const LatentFactorModel& model,
                               const std::vector<int>& assignments, Rng& rng,
                               const NoiseSampler* noise = nullptr);

// Simulation instance with n units of alternating types (unit 0 has type 0).
std::pair<ModelConfig, LatentFactorModel> generate_sim_instance(const SimDgpConfig& dgp,
                                                                int n, Rng& rng);

// The two-dimensional adversarial construction: two orthogonal unit types,
// pre factors alternating [1,0]/[0,1], control post factor [H, 1], no noise.
// Requires |H| <= c. The treatment arm is a fixed completion ([1,-1] post)
// so the instance is runnable with k = 2.
std::pair<ModelConfig, LatentFactorModel> generate_impossibility_instance(
    double c, double H, int n = 10, int T0 = 8, int T1 = 4);

}  // namespace iasc
