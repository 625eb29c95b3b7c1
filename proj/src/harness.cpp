#include "iasc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "iasc/io.hpp"
#include "iasc/panel.hpp"
#include "iasc/pcr.hpp"
#include "iasc/policy_k.hpp"

namespace iasc {

namespace fs = std::filesystem;

// ---- sizing ----

UnitPrior sim_type1_prior(double gap) {
    UnitPrior prior;
    prior.marginals = {Marginal::uniform_interval(0.0, 0.5),
                       Marginal::uniform_interval(0.0, 0.5 + 2.0 * gap)};
    return prior;
}

UnitPrior sim_type0_prior(double gap) {
    UnitPrior prior;
    prior.marginals = {Marginal::uniform_interval(0.0, 0.5 + 2.0 * gap),
                       Marginal::uniform_interval(0.0, 0.5)};
    return prior;
}

NoiselessBound sim_noiseless_bound(double gap) {
    return noiseless_batch_bound(sim_type0_prior(gap), sim_type1_prior(gap));
}

SizingSpec idealized_sizing_spec() {
    SizingSpec spec;
    spec.type1_prior = sim_type1_prior(0.25);  // treatment belief Unif[0,1]
    spec.C = 0.125;
    spec.T1 = 1;
    spec.delta_sizing = 0.5;
    spec.rule = SizingSpec::Rule::single_hit;
    return spec;
}

SizingLedger compute_sizing(const SizingSpec& spec) {
    SizingLedger ledger;
    ledger.spec = spec;
    ledger.mu0 = prior_mean(spec.type1_prior, 0);
    ledger.mu1 = prior_mean(spec.type1_prior, 1);
    if (spec.rule == SizingSpec::Rule::single_hit) {
        ledger.N0 = single_hit_count(spec.delta_sizing, spec.p_low);
        ledger.B = ledger.N0;
    } else {
        ledger.N0 = required_n0(spec.r_tau, spec.delta_sizing, 1.0, 1.0, spec.p_low);
        ledger.B = default_batch_count(spec.p_low, spec.r_tau, spec.delta_sizing);
    }
    ledger.L = required_batch_L({spec.type1_prior}, spec.C, spec.alpha, spec.sigma,
                                spec.T1, spec.delta_eps, spec.delta_bic, spec.M);
    return ledger;
}

void print_sizing(std::ostream& os, const SizingLedger& lg) {
    const auto& s = lg.spec;
    os << "sizing_rule = "
       << (s.rule == SizingSpec::Rule::single_hit ? "single_hit" : "chernoff") << '\n';
    os << "p_low = " << format_double(s.p_low) << '\n';
    os << "r_tau = " << s.r_tau << '\n';
    os << "delta_sizing = " << format_double(s.delta_sizing) << '\n';
    os << "mu0 = " << format_double(lg.mu0) << '\n';
    os << "mu1 = " << format_double(lg.mu1) << '\n';
    os << "C = " << format_double(s.C) << '\n';
    os << "M = " << format_double(s.M) << '\n';
    os << "sigma = " << format_double(s.sigma) << '\n';
    os << "T1 = " << s.T1 << '\n';
    os << "alpha = " << format_double(s.alpha) << '\n';
    os << "delta_bic = " << format_double(s.delta_bic) << '\n';
    os << "delta_eps = " << format_double(s.delta_eps) << '\n';
    os << "slack = " << format_double(lg.L.slack) << '\n';
    os << "event_prob = " << format_double(lg.L.event_prob) << '\n';
    os << "numerator = " << format_double(lg.L.numerator) << '\n';
    os << "denominator = " << format_double(lg.L.denominator) << '\n';
    os << "N0 = " << lg.N0 << '\n';
    os << "B = " << lg.B << '\n';
    if (lg.L.feasible) {
        os << "L = " << lg.L.value << '\n';
    } else {
        os << "L = infeasible\n";
        os << "note = " << lg.L.note << '\n';
    }
}

// ---- experiment ----

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.n = j.value("n", cfg.n);
    cfg.r = j.value("r", cfg.r);
    cfg.T0 = j.value("T0", cfg.T0);
    cfg.T1 = j.value("T1", cfg.T1);
    if (j.contains("T")) {
        const int T = j.at("T").get<int>();
        cfg.T1 = T - cfg.T0;
    }
    cfg.noise_var = j.value("noise_var", cfg.noise_var);
    if (j.contains("sigma")) {
        const double s = j.at("sigma").get<double>();
        cfg.noise_var = s * s;
    }
    if (j.value("k", 2) != 2)
        throw std::invalid_argument(
            "ExperimentConfig: this harness streams two interventions (k = 2); "
            "drive the k-intervention engine through the library API");
    cfg.normalize = j.value("normalize", cfg.normalize);
    cfg.gap = j.value("gap", cfg.gap);
    cfg.C = j.value("C", cfg.C);
    cfg.delta = j.value("delta", cfg.delta);
    cfg.policy = j.value("policy", cfg.policy);
    cfg.runs = j.value("runs", cfg.runs);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.outdir = j.value("out", cfg.outdir);
    cfg.rational_units = j.value("rational_units", cfg.rational_units);
    cfg.empirical_sizing = j.value("empirical_sizing", cfg.empirical_sizing);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.racing_epsilon = j.value("racing_epsilon", cfg.racing_epsilon);
    return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
    return nlohmann::json{{"n", n},
                          {"r", r},
                          {"T0", T0},
                          {"T1", T1},
                          {"noise_var", noise_var},
                          {"normalize", normalize},
                          {"gap", gap},
                          {"C", C},
                          {"delta", delta},
                          {"policy", policy},
                          {"runs", runs},
                          {"seed", seed},
                          {"out", outdir},
                          {"rational_units", rational_units},
                          {"empirical_sizing", empirical_sizing},
                          {"workers", workers},
                          {"racing_epsilon", racing_epsilon}};
}

namespace {

struct RunEnv {
    const ExperimentConfig& cfg;
    ModelConfig model_cfg;
    LatentFactorModel model;
    Eigen::VectorXd probe_pre;   // realized pre outcomes of the probe unit
    double probe_truth = 0.0;    // E[ybar^(0)] of the probe
};

Eigen::VectorXd unit_pre(const RunEnv& env, int i, Rng& noise) {
    Eigen::VectorXd y(env.model_cfg.T0);
    for (int t = 0; t < env.model_cfg.T0; ++t)
        y(t) = expected_outcome(env.model, i, t, 0) +
               (env.model_cfg.sigma > 0 ? noise.normal(0.0, env.model_cfg.sigma) : 0.0);
    return y;
}

Eigen::VectorXd unit_post(const RunEnv& env, int i, int d, Rng& noise) {
    Eigen::VectorXd y(env.model_cfg.t1());
    for (int t = 0; t < env.model_cfg.t1(); ++t)
        y(t) = expected_outcome(env.model, i, env.model_cfg.T0 + t, d) +
               (env.model_cfg.sigma > 0 ? noise.normal(0.0, env.model_cfg.sigma) : 0.0);
    return y;
}

RunSeries simulate_one_run(const ExperimentConfig& cfg, const SizingLedger& sizing,
                           int rep, std::ostream* replay) {
    const auto t_start = std::chrono::steady_clock::now();

    Rng model_rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(rep) * 8 + 0);
    Rng noise_rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(rep) * 8 + 1);
    Rng policy_rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(rep) * 8 + 2);
    Rng probe_rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(rep) * 8 + 3);
    Rng respond_rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(rep) * 8 + 4);

    SimDgpConfig dgp;
    dgp.r = cfg.r;
    dgp.T0 = cfg.T0;
    dgp.T1 = cfg.T1;
    dgp.noise_var = cfg.noise_var;
    dgp.normalize = cfg.normalize;

    RunEnv env{cfg, {}, {}, {}, 0.0};
    std::tie(env.model_cfg, env.model) = generate_sim_instance(dgp, cfg.n, model_rng);

    // fixed fresh type-1 probe unit; its factor lives in the type-1 half
    const int half = cfg.r / 2;
    const double unit_scale = cfg.normalize ? 2.0 / cfg.r : 1.0;
    Eigen::VectorXd probe_factor = Eigen::VectorXd::Zero(cfg.r);
    for (int j = 0; j < half; ++j)
        probe_factor(half + j) = unit_scale * probe_rng.uniform(0.25, 0.75);
    env.probe_pre.resize(cfg.T0);
    double truth = 0.0;
    const Eigen::MatrixXd& U0 = env.model.time_factors[0];
    for (int t = 0; t < cfg.T0; ++t)
        env.probe_pre(t) = U0.row(t).dot(probe_factor) +
                           (env.model_cfg.sigma > 0
                                ? probe_rng.normal(0.0, env.model_cfg.sigma)
                                : 0.0);
    for (int t = cfg.T0; t < env.model_cfg.T; ++t) truth += U0.row(t).dot(probe_factor);
    env.probe_truth = truth / cfg.T1;

    PolicyConfig pcfg;
    pcfg.N0 = sizing.N0;
    pcfg.L = sizing.L.feasible ? sizing.L.value : 2;
    pcfg.B = sizing.B;
    pcfg.C = cfg.C;
    pcfg.delta = DeltaSplit::thirds(cfg.delta);
    pcfg.rank = std::max(1, cfg.r / 2);  // treatment arm spans the type-1 half
    pcfg.T1 = cfg.T1;

    PopulationKnowledge knowledge;
    knowledge.p_low = 0.5;
    knowledge.p_high = 0.5;
    knowledge.mu = {{MuBound{0.25 + cfg.gap, 0.25 + cfg.gap}, MuBound{0.25, 0.25}},
                    {MuBound{0.25, 0.25}, MuBound{0.25 + cfg.gap, 0.25 + cfg.gap}}};
    knowledge.zeta_c = sizing.L.event_prob;
    knowledge.n0_required = sizing.N0;
    knowledge.c_gap = cfg.C;

    const UnitPrior prior1 = sim_type1_prior(cfg.gap);
    const UnitPrior prior0 = sim_type0_prior(cfg.gap);
    PolicyDescriptor descriptor;
    descriptor.explore_prob = 1.0 / pcfg.L;
    descriptor.mu0_lower = knowledge.mu[1][0].lo;
    descriptor.gap = cfg.C;

    PolicyState state(policy_rng.next_u64());
    RacingConfig rcfg{pcfg.rank, kAutoRho, cfg.T1, cfg.racing_epsilon};

    // the k-intervention engine run for the treatment-preferring sub-type
    KPolicyConfig kcfg;
    kcfg.subtype = {1, 0};
    kcfg.N0 = pcfg.N0;
    kcfg.L = pcfg.L;
    kcfg.B = pcfg.B;
    kcfg.C = cfg.C;
    kcfg.rank = pcfg.rank;
    kcfg.T1 = cfg.T1;
    kcfg.mu_bounds = {knowledge.mu[1][0], knowledge.mu[1][1]};
    KPolicyState kstate(policy_rng.next_u64());

    NoiselessConfig ncfg;
    if (cfg.policy == "noiseless") {
        if (cfg.noise_var != 0.0)
            throw std::invalid_argument("run_experiment: the noiseless policy needs noise_var 0");
        const NoiselessBound bound = sim_noiseless_bound(cfg.gap);
        if (!bound.feasible)
            throw std::invalid_argument("run_experiment: noiseless bound infeasible");
        ncfg.N0 = pcfg.N0;
        ncfg.L = bound.L;
        ncfg.batches = noiseless_kprime(std::max(1, cfg.r / 2), cfg.delta / 3.0);
        ncfg.random_types = true;
    }

    const int ctrl_rank = cfg.r;
    RunSeries series;
    series.probe_error.resize(static_cast<size_t>(cfg.n));
    double current_error = std::abs(env.probe_truth);  // no estimate yet
    int last_fit_m = -1;

    for (int i = 0; i < cfg.n; ++i) {
        const Eigen::VectorXd y_pre = unit_pre(env, i, noise_rng);
        const int type = env.model.type_labels[static_cast<size_t>(i)];
        const UnitPrior& prior = type == 1 ? prior1 : prior0;

        Recommendation rec{-1, RecMeta::first_stage};
        int ell = -1;
        if (cfg.policy == "alg1") {
            rec = recommend_next(state, pcfg, y_pre, knowledge);
        } else if (cfg.policy == "alg2") {
            ell = loop_intervention(kcfg, kstate.arrivals);
            rec = recommend_next_k(kstate, kcfg, y_pre);
        } else if (cfg.policy == "racing") {
            if (i >= pcfg.N0) rec = racing_recommend(state, rcfg, y_pre);
        } else if (cfg.policy == "noiseless") {
            rec = noiseless_recommend(state, ncfg, y_pre, prior);
        } else if (cfg.policy != "none") {
            throw std::invalid_argument("run_experiment: unknown policy " + cfg.policy);
        }

        int d;
        if (rec.d < 0) {
            d = type;  // self-selection
        } else if (cfg.rational_units) {
            d = respond(prior, rec.d, descriptor, ResponseMode::rational, respond_rng);
        } else {
            d = rec.d;
        }

        const Eigen::VectorXd y_post = unit_post(env, i, d, noise_rng);
        if (cfg.policy == "alg2")
            kstate.record(y_pre, rec.d, d, y_post);
        else
            state.record(y_pre, rec.d, d, y_post);

        if (replay) {
            ReplayRecord row;
            row.unit = i;
            row.stage = (rec.meta == RecMeta::first_stage) ? "first_stage" : "batch";
            row.d_hat = rec.d;
            row.meta = to_string(rec.meta);
            row.d = d;
            row.ell = ell;
            if (i >= pcfg.N0) {
                const int L = cfg.policy == "noiseless" ? ncfg.L : pcfg.L;
                row.batch = (i - pcfg.N0) / L;
                row.slot = (i - pcfg.N0) % L;
            }
            write_replay_line(*replay, row);
        }

        // refresh the probe's counterfactual estimate when the control arm grew
        const int m = cfg.policy == "alg2" ? kstate.arm_count(0) : state.arm_count(0);
        if (m >= ctrl_rank && m != last_fit_m) {
            const DonorSet ctrl_donors =
                cfg.policy == "alg2" ? kstate.donors(0) : state.donors(0);
            const PCRModel ctrl = fit_pcr(ctrl_donors, ctrl_rank, kAutoRho);
            const double est = predict_avg_post(ctrl, env.probe_pre, cfg.T1);
            current_error = std::abs(est - env.probe_truth);
            last_fit_m = m;
        }
        series.probe_error[static_cast<size_t>(i)] = current_error;
    }

    series.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return series;
}

int resolve_workers(int requested, int runs) {
    if (requested > 0) return std::min(requested, runs);
    if (const char* env = std::getenv("IASC_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return std::min(w, runs);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return std::max(1, std::min<int>(runs, hw ? static_cast<int>(hw) : 1));
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.runs < 1) throw std::invalid_argument("run_experiment: runs must be >= 1");

    SizingSpec spec;
    spec.type1_prior = sim_type1_prior(cfg.gap);
    spec.C = cfg.C;
    spec.sigma = 0.0;  // idealized sizing: slack and failure budget zero
    spec.T1 = cfg.T1;
    spec.delta_sizing = cfg.delta / 3.0;
    spec.p_low = 0.5;
    spec.r_tau = std::max(1, cfg.r / 2);
    spec.rule = SizingSpec::Rule::chernoff;
    if (cfg.empirical_sizing) {
        spec.sigma = std::sqrt(cfg.noise_var);
        spec.delta_bic = cfg.delta;
        spec.delta_eps = cfg.delta / 3.0;
        // conservative plug-in for the confidence half-width at desk scale;
        // computed from a pilot first stage below
    }

    SizingLedger sizing = compute_sizing(spec);
    if (cfg.empirical_sizing) {
        // pilot run of the first stage to expose the fitted confidence bound
        Rng model_rng = Rng::stream(cfg.seed, 7777);
        SimDgpConfig dgp;
        dgp.r = cfg.r;
        dgp.T0 = cfg.T0;
        dgp.T1 = cfg.T1;
        dgp.noise_var = cfg.noise_var;
        dgp.normalize = cfg.normalize;
        auto [mc, model] = generate_sim_instance(dgp, std::max(2 * sizing.N0, 4), model_rng);
        std::vector<int> assign(static_cast<size_t>(mc.n));
        for (int i = 0; i < mc.n; ++i) assign[static_cast<size_t>(i)] = model.type_labels[static_cast<size_t>(i)];
        Rng noise_rng = Rng::stream(cfg.seed, 7778);
        PanelRealization panel = realize_panel(mc, model, assign, noise_rng);
        DonorSet treat;
        treat.d = 1;
        const int m1 = static_cast<int>(std::count(assign.begin(), assign.end(), 1));
        treat.pre.resize(m1, cfg.T0);
        treat.post_sum.resize(m1);
        int row = 0;
        for (int i = 0; i < mc.n; ++i) {
            if (assign[static_cast<size_t>(i)] != 1) continue;
            treat.pre.row(row) = panel.pre.row(i);
            treat.post_sum(row) = panel.post.row(i).sum();
            ++row;
        }
        const int rank = std::max(1, cfg.r / 2);
        const PCRModel fit = fit_pcr(treat, rank, kAutoRho);
        const ConfidenceParams params = ConfidenceParams::from_model(
            fit, m1, cfg.T0, cfg.T1, 1.0, std::sqrt(cfg.noise_var), 2);
        const double delta_pcr = delta_pcr_for_gap(params, cfg.C);
        double alpha = std::numeric_limits<double>::infinity();
        try {
            alpha = alpha_bound(params, std::min(0.999, std::max(1e-12, delta_pcr)));
        } catch (const InsufficientSignal&) {
            // keep infinity; the ledger below reports infeasibility
        }
        spec.alpha = alpha;
        sizing = compute_sizing(spec);
        if (!sizing.L.feasible) {
            std::ostringstream msg;
            msg << "empirical sizing infeasible: " << sizing.L.note;
            throw InfeasibleSizing(msg.str(), sizing);
        }
    }

    ExperimentResult result;
    result.sizing = sizing;
    result.series.resize(static_cast<size_t>(cfg.runs));

    const bool want_files = !cfg.outdir.empty();
    std::vector<std::string> replay_buffers(static_cast<size_t>(cfg.runs));

    const int workers = resolve_workers(cfg.workers, cfg.runs);
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (;;) {
                    const int rep = next.fetch_add(1);
                    if (rep >= cfg.runs) break;
                    std::ostringstream replay;
                    result.series[static_cast<size_t>(rep)] = simulate_one_run(
                        cfg, sizing, rep, want_files ? &replay : nullptr);
                    replay_buffers[static_cast<size_t>(rep)] = replay.str();
                }
            } catch (...) {
                errors[static_cast<size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);

    // aggregate the final-100 window
    const int window = std::min(100, cfg.n);
    std::vector<double> run_means;
    run_means.reserve(static_cast<size_t>(cfg.runs));
    for (const auto& s : result.series) {
        double acc = 0.0;
        for (int i = cfg.n - window; i < cfg.n; ++i)
            acc += s.probe_error[static_cast<size_t>(i)];
        run_means.push_back(acc / window);
    }
    double mean = 0.0;
    for (double v : run_means) mean += v;
    mean /= cfg.runs;
    double var = 0.0;
    for (double v : run_means) var += (v - mean) * (v - mean);
    result.mean_last100 = mean;
    result.std_last100 = cfg.runs > 1 ? std::sqrt(var / (cfg.runs - 1)) : 0.0;

    if (want_files) {
        fs::create_directories(cfg.outdir);
        const std::string method = cfg.policy == "none" ? "baseline" : cfg.policy;
        {
            std::ofstream os(fs::path(cfg.outdir) / "results.csv");
            os << "run,unit,method,probe_error\n";
            for (int rep = 0; rep < cfg.runs; ++rep)
                for (int i = 0; i < cfg.n; ++i)
                    os << rep << ',' << i << ',' << method << ','
                       << format_double(result.series[static_cast<size_t>(rep)]
                                            .probe_error[static_cast<size_t>(i)])
                       << '\n';
        }
        {
            std::ofstream os(fs::path(cfg.outdir) / "summary.csv");
            os << "unit,mean,std\n";
            for (int i = 0; i < cfg.n; ++i) {
                double m = 0.0;
                for (const auto& s : result.series) m += s.probe_error[static_cast<size_t>(i)];
                m /= cfg.runs;
                double v = 0.0;
                for (const auto& s : result.series) {
                    const double Z = s.probe_error[static_cast<size_t>(i)] - m;
                    v += Z * Z;
                }
                const double sd = cfg.runs > 1 ? std::sqrt(v / (cfg.runs - 1)) : 0.0;
                os << i << ',' << format_double(m) << ',' << format_double(sd) << '\n';
            }
        }
        {
            std::ofstream os(fs::path(cfg.outdir) / "sizing.txt");
            print_sizing(os, sizing);
        }
        {
            // wall times are diagnostics only; results.csv stays byte-stable
            std::ofstream os(fs::path(cfg.outdir) / "timings.csv");
            os << "run,seconds\n";
            for (int rep = 0; rep < cfg.runs; ++rep)
                os << rep << ',' << result.series[static_cast<size_t>(rep)].seconds << '\n';
        }
        for (int rep = 0; rep < cfg.runs; ++rep) {
            std::ofstream os(fs::path(cfg.outdir) /
                             ("replay-run" + std::to_string(rep) + ".jsonl"));
            os << replay_buffers[static_cast<size_t>(rep)];
        }
        {
            std::ofstream os(fs::path(cfg.outdir) / "plot_results.py");
            os << "#!/usr/bin/env python3\n"
                  "# quick look at summary.csv (mean probe error vs arrivals)\n"
                  "import csv, sys\n"
                  "import matplotlib.pyplot as plt\n"
                  "units, means = [], []\n"
                  "with open(sys.argv[1] if len(sys.argv) > 1 else 'summary.csv') as fh:\n"
                  "    for row in csv.DictReader(fh):\n"
                  "        units.append(int(row['unit']))\n"
                  "        means.append(float(row['mean']))\n"
                  "plt.plot(units, means)\n"
                  "plt.xlabel('units observed')\n"
                  "plt.ylabel('probe estimation error')\n"
                  "plt.savefig('probe_error.png', dpi=150)\n";
        }
    }
    return result;
}

// ---- impossibility ----

ImpossibilityTable impossibility_demo(double c, int grid, long samples, Rng& rng) {
    if (c <= 0) throw std::invalid_argument("impossibility_demo: c must be > 0");
    if (grid < 3) throw std::invalid_argument("impossibility_demo: grid must be >= 3");

    std::vector<double> draws(static_cast<size_t>(samples));
    for (long s = 0; s < samples; ++s) draws[static_cast<size_t>(s)] = rng.uniform(-c, c);

    ImpossibilityTable table;
    table.min_analytic = std::numeric_limits<double>::infinity();
    table.min_mc = std::numeric_limits<double>::infinity();
    for (int g = 0; g < grid; ++g) {
        ImpossibilityRow row;
        row.e_hat = -c + 2.0 * c * g / (grid - 1);
        row.analytic = (c * c + row.e_hat * row.e_hat) / (2.0 * c);
        double acc = 0.0;
        for (double h : draws) acc += std::abs(h - row.e_hat);
        row.mc = acc / samples;
        table.min_analytic = std::min(table.min_analytic, row.analytic);
        table.min_mc = std::min(table.min_mc, row.mc);
        table.rows.push_back(row);
    }
    return table;
}

}  // namespace iasc
