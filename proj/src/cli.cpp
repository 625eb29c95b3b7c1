#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "iasc/harness.hpp"
#include "iasc/io.hpp"
#include "iasc/overlap.hpp"
#include "iasc/pcr.hpp"

namespace iasc {

namespace {

constexpr const char* kUsage =
    "usage: iasc <subcommand> [options]\n"
    "\n"
    "subcommands:\n"
    "  simulate      run the streaming recommendation experiment\n"
    "  batch-size    print the sizing ledger (N0, B, L and every term)\n"
    "  overlap-test  test the unit overlap hypothesis on a panel CSV\n"
    "  impossibility evaluate the no-overlap lower-bound construction\n"
    "  verify-bic    Monte-Carlo compliance check for a batch policy\n"
    "\n"
    "common flags: --seed, --config, --out; see README.md for details.\n";

Marginal marginal_from_json(const nlohmann::json& j) {
    const std::string family = j.at("family").get<std::string>();
    if (family == "uniform")
        return Marginal::uniform_interval(j.at("lo").get<double>(), j.at("hi").get<double>());
    if (family == "categorical")
        return Marginal::categorical(j.at("values").get<std::vector<double>>(),
                                     j.at("probs").get<std::vector<double>>());
    throw std::invalid_argument("unknown prior family: " + family);
}

SizingSpec sizing_spec_from_json(const nlohmann::json& j) {
    SizingSpec spec = idealized_sizing_spec();
    if (j.contains("prior")) {
        spec.type1_prior.marginals = {marginal_from_json(j.at("prior").at("control")),
                                      marginal_from_json(j.at("prior").at("treatment"))};
    } else if (j.contains("gap")) {
        spec.type1_prior = sim_type1_prior(j.at("gap").get<double>());
    }
    spec.C = j.value("C", spec.C);
    spec.M = j.value("M", spec.M);
    spec.sigma = j.value("sigma", spec.sigma);
    spec.T1 = j.value("T1", spec.T1);
    spec.alpha = j.value("alpha", spec.alpha);
    spec.delta_bic = j.value("delta_bic", spec.delta_bic);
    spec.delta_eps = j.value("delta_eps", spec.delta_eps);
    spec.delta_sizing = j.value("delta", spec.delta_sizing);
    spec.p_low = j.value("p_low", spec.p_low);
    spec.r_tau = j.value("r_tau", spec.r_tau);
    if (j.value("rule", std::string("single_hit")) == "chernoff")
        spec.rule = SizingSpec::Rule::chernoff;
    return spec;
}

std::vector<int> parse_id_list(const std::string& text) {
    // comma-separated 1-based ids, ranges like 3-17 allowed
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto dash = item.find('-', 1);
        if (dash == std::string::npos) {
            out.push_back(std::stoi(item));
        } else {
            const int lo = std::stoi(item.substr(0, dash));
            const int hi = std::stoi(item.substr(dash + 1));
            for (int v = lo; v <= hi; ++v) out.push_back(v);
        }
    }
    return out;
}

int cmd_simulate(int argc, const char* const* argv) {
    // pass 1: locate a config file, if any
    std::string config_path;
    {
        CLI::App pre{"simulate"};
        pre.allow_extras();
        pre.add_option("--config", config_path);
        pre.parse(argc, argv);
    }
    ExperimentConfig cfg;
    if (!config_path.empty()) {
        std::ifstream is(config_path);
        if (!is) {
            std::cerr << "cannot open config: " << config_path << "\n";
            return 1;
        }
        nlohmann::json j;
        is >> j;
        cfg = ExperimentConfig::from_json(j);
    }

    // pass 2: command-line flags override the file
    CLI::App app{"run the streaming recommendation experiment"};
    std::string ignored_config;
    long long seed = -1;
    std::string out;
    app.add_option("--config", ignored_config, "JSON experiment config");
    app.add_option("--n", cfg.n, "units per run");
    app.add_option("--r", cfg.r, "latent dimension (even)");
    app.add_option("--T0", cfg.T0, "pre-period length");
    app.add_option("--T1", cfg.T1, "post-period length");
    app.add_option("--gap", cfg.gap, "type-1 prior mean gap");
    app.add_option("--noise-var", cfg.noise_var, "outcome noise variance");
    app.add_option("--C", cfg.C, "exploit margin");
    app.add_option("--delta", cfg.delta, "total failure budget for sizing");
    app.add_option("--policy", cfg.policy, "alg1 | alg2 | noiseless | racing | none");
    app.add_option("--runs", cfg.runs, "repetitions");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--out", out, "output directory");
    app.add_option("--workers", cfg.workers, "worker pool size (0 = auto)");
    app.add_flag("--normalize", cfg.normalize, "scale factors to keep |E[y]| <= 1");
    app.add_flag("--rational", cfg.rational_units, "units run the compliance check");
    app.add_flag("--empirical-sizing", cfg.empirical_sizing,
                 "size L from the fitted confidence bound");
    app.parse(argc, argv);
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (!out.empty()) cfg.outdir = out;

    try {
        const ExperimentResult result = run_experiment(cfg);
        std::cout << "method = " << (cfg.policy == "none" ? "baseline" : cfg.policy) << '\n'
                  << "runs = " << cfg.runs << '\n'
                  << "L = " << (result.sizing.L.feasible ? result.sizing.L.value : -1) << '\n'
                  << "N0 = " << result.sizing.N0 << '\n'
                  << "mean_last100 = " << format_double(result.mean_last100) << '\n'
                  << "std_last100 = " << format_double(result.std_last100) << '\n';
        return 0;
    } catch (const InfeasibleSizing& e) {
        std::cerr << "infeasible sizing: " << e.what() << "\n";
        print_sizing(std::cerr, e.ledger);
        return 2;
    }
}

int cmd_batch_size(int argc, const char* const* argv) {
    CLI::App app{"print the sizing ledger"};
    std::string preset = "idealized", config_path;
    double delta = -1, C = -1, gap = -1;
    app.add_option("--preset", preset, "idealized");
    app.add_option("--config", config_path, "JSON sizing config");
    app.add_option("--delta", delta, "sizing failure budget");
    app.add_option("--C", C, "exploit margin");
    app.add_option("--gap", gap, "prior mean gap for the simulation prior family");
    app.parse(argc, argv);

    SizingSpec spec;
    if (!config_path.empty()) {
        std::ifstream is(config_path);
        if (!is) {
            std::cerr << "cannot open config: " << config_path << "\n";
            return 1;
        }
        nlohmann::json j;
        is >> j;
        spec = sizing_spec_from_json(j);
    } else if (preset == "idealized") {
        spec = idealized_sizing_spec();
    } else {
        std::cerr << "unknown preset: " << preset << "\n";
        return 1;
    }
    if (delta > 0) spec.delta_sizing = delta;
    if (C > 0) spec.C = C;
    if (gap >= 0) spec.type1_prior = sim_type1_prior(gap);

    const SizingLedger ledger = compute_sizing(spec);
    print_sizing(std::cout, ledger);
    const DeltaSplit split = DeltaSplit::thirds(spec.delta_bic);
    std::cout << "delta_0 = " << format_double(split.d0) << '\n'
              << "delta_pcr = " << format_double(split.d_pcr) << '\n'
              << "delta_eps_split = " << format_double(split.d_eps) << '\n';
    return ledger.L.feasible ? 0 : 2;
}

int cmd_overlap(int argc, const char* const* argv) {
    CLI::App app{"overlap hypothesis test"};
    std::string method = "asym", panel_path, donor_spec;
    int test_id = 0, rank = 1;
    double delta = 0.05, sigma = 0.0, gamma = -1;
    app.add_option("--method", method, "nonasym | asym")->required();
    app.add_option("--panel", panel_path, "panel CSV (rows = units)")->required();
    app.add_option("--donors", donor_spec, "1-based donor ids, e.g. 1,2,5-30")->required();
    app.add_option("--test", test_id, "1-based test unit id")->required();
    app.add_option("--rank", rank, "truncation rank");
    app.add_option("--delta", delta, "confidence level (nonasym)");
    app.add_option("--sigma", sigma, "noise sd bound (nonasym)");
    app.add_option("--gamma", gamma, "slope norm bound (nonasym; default max(1,||theta||))");
    app.parse(argc, argv);

    const Eigen::MatrixXd panel = read_matrix_csv(panel_path);
    const std::vector<int> donor_ids = parse_id_list(donor_spec);
    if (donor_ids.empty()) {
        std::cerr << "no donors given\n";
        return 1;
    }
    Eigen::MatrixXd donors(static_cast<int>(donor_ids.size()), panel.cols());
    for (size_t row = 0; row < donor_ids.size(); ++row) {
        const int id = donor_ids[row];
        if (id < 1 || id > panel.rows()) {
            std::cerr << "donor id out of range: " << id << "\n";
            return 1;
        }
        donors.row(static_cast<int>(row)) = panel.row(id - 1);
    }
    if (test_id < 1 || test_id > panel.rows()) {
        std::cerr << "test id out of range: " << test_id << "\n";
        return 1;
    }
    const Eigen::VectorXd test = panel.row(test_id - 1);

    OverlapTestResult result;
    if (method == "nonasym") {
        result = nonasymptotic_overlap_test(
            donors, test, delta, sigma, rank,
            gamma > 0 ? std::optional<double>(gamma) : std::nullopt);
    } else if (method == "asym") {
        result = asymptotic_overlap_test(donors, test, rank);
    } else {
        std::cerr << "unknown method: " << method << "\n";
        return 1;
    }

    std::cout << "statistic=" << format_double(result.statistic)
              << " threshold=" << format_double(result.threshold)
              << " decision=" << (result.accept ? "accept" : "reject") << '\n';
    std::cout << "# accept means the overlap hypothesis is violated\n"
              << "# alpha = " << format_double(result.diagnostics.alpha) << '\n'
              << "# noise_term = " << format_double(result.diagnostics.noise_term) << '\n'
              << "# sigma_hat = " << format_double(result.diagnostics.sigma_hat) << '\n'
              << "# omega_norm = " << format_double(result.diagnostics.omega_norm) << '\n'
              << "# fit_residual_rms = "
              << format_double(result.diagnostics.fit_residual_rms) << '\n';
    return 0;
}

int cmd_impossibility(int argc, const char* const* argv) {
    CLI::App app{"no-overlap lower bound"};
    double c = 1.0;
    int grid = 41;
    long samples = 100000;
    long long seed = 17;
    app.add_option("--c", c, "outcome range half-width");
    app.add_option("--grid", grid, "estimator grid points");
    app.add_option("--samples", samples, "Monte-Carlo draws");
    app.add_option("--seed", seed, "rng seed");
    app.parse(argc, argv);

    Rng rng(static_cast<std::uint64_t>(seed));
    const ImpossibilityTable table = impossibility_demo(c, grid, samples, rng);
    std::cout << "e_hat,analytic,mc\n";
    for (const auto& row : table.rows)
        std::cout << format_double(row.e_hat) << ',' << format_double(row.analytic) << ','
                  << format_double(row.mc) << '\n';
    std::cout << "min_analytic = " << format_double(table.min_analytic) << '\n'
              << "min_mc = " << format_double(table.min_mc) << '\n';
    return 0;
}

int cmd_verify_bic(int argc, const char* const* argv) {
    CLI::App app{"Monte-Carlo compliance check"};
    int L = 17;
    double gap = 0.25, C = 0.125;
    long samples = 100000;
    long long seed = 1;
    app.add_option("--L", L, "batch size")->required();
    app.add_option("--gap", gap, "type-1 prior mean gap");
    app.add_option("--C", C, "exploit margin");
    app.add_option("--samples", samples, "Monte-Carlo draws");
    app.add_option("--seed", seed, "rng seed");
    app.parse(argc, argv);

    const UnitPrior prior = sim_type1_prior(gap);
    PolicyDescriptor descriptor;
    descriptor.explore_prob = 1.0 / L;
    descriptor.mu0_lower = prior_mean(prior, 0);
    descriptor.gap = C;
    Rng rng(static_cast<std::uint64_t>(seed));
    const BicEstimate est = verify_bic_mc(descriptor, prior, 0, samples, rng);
    std::cout << "estimate = " << format_double(est.estimate) << '\n'
              << "ci_halfwidth = " << format_double(est.ci_halfwidth) << '\n'
              << "recommended = " << est.recommended << '\n'
              << "degenerate = " << (est.degenerate ? 1 : 0) << '\n';
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    static const std::set<std::string> known{"simulate", "batch-size", "overlap-test",
                                             "impossibility", "verify-bic"};
    if (argc < 2 || !known.count(argv[1])) {
        std::cerr << kUsage;
        return 64;
    }
    const std::string sub = argv[1];

    try {
        // hand the remaining args to the subcommand parser
        const int sub_argc = argc - 1;
        const char* const* sub_argv = argv + 1;
        if (sub == "simulate") return cmd_simulate(sub_argc, sub_argv);
        if (sub == "batch-size") return cmd_batch_size(sub_argc, sub_argv);
        if (sub == "overlap-test") return cmd_overlap(sub_argc, sub_argv);
        if (sub == "impossibility") return cmd_impossibility(sub_argc, sub_argv);
        if (sub == "verify-bic") return cmd_verify_bic(sub_argc, sub_argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0;  // --help
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const InsufficientSignal& e) {
        std::cerr << "insufficient signal: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 64;
}

}  // namespace iasc
