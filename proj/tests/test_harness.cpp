#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "iasc/harness.hpp"
#include "iasc/io.hpp"

using namespace iasc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("impossibility table: closed form and Monte Carlo") {
    Rng rng(123);
    const ImpossibilityTable table = impossibility_demo(1.0, 41, 100000, rng);

    CHECK(table.min_analytic == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(table.min_mc - 0.5) <= 0.01);

    // endpoints evaluate to c
    CHECK(table.rows.front().analytic == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(table.rows.back().analytic == doctest::Approx(1.0).epsilon(1e-12));

    for (const auto& row : table.rows)
        CHECK(std::abs(row.mc - row.analytic) <= 0.01);

    CHECK_THROWS_AS(impossibility_demo(0.0, 41, 1000, rng), std::invalid_argument);
    CHECK_THROWS_AS(impossibility_demo(1.0, 2, 1000, rng), std::invalid_argument);
}

TEST_CASE("sizing ledger: idealized configuration and reproducibility") {
    const SizingLedger ledger = compute_sizing(idealized_sizing_spec());
    CHECK(ledger.N0 == 1);
    CHECK(ledger.B == 1);
    CHECK(ledger.L.feasible);
    CHECK(ledger.L.value == 17);
    CHECK(ledger.mu0 == doctest::Approx(0.25));
    CHECK(ledger.mu1 == doctest::Approx(0.5));

    // every printed quantity re-derives from the printed terms
    const double denom_check =
        (ledger.spec.C - ledger.L.slack) * ledger.L.event_prob -
        2.0 * ledger.spec.M * ledger.spec.delta_bic;
    CHECK(std::abs(denom_check - ledger.L.denominator) <= 1e-9);
    CHECK(ledger.L.value ==
          static_cast<int>(std::ceil(1.0 + ledger.L.numerator / ledger.L.denominator - 1e-9)));
    CHECK(ledger.N0 ==
          static_cast<int>(std::ceil(std::log(1.0 / ledger.spec.delta_sizing) /
                                         std::log(1.0 / (1.0 - ledger.spec.p_low)) -
                                     1e-9)));

    // a smaller sizing budget needs more first-stage units
    SizingSpec tighter = idealized_sizing_spec();
    tighter.delta_sizing = 0.125;
    CHECK(compute_sizing(tighter).N0 == 3);

    // the printout carries the ledger
    std::stringstream ss;
    print_sizing(ss, ledger);
    const std::string text = ss.str();
    CHECK(text.find("L = 17") != std::string::npos);
    CHECK(text.find("N0 = 1") != std::string::npos);
    CHECK(text.find("B = 1") != std::string::npos);
    CHECK(text.find("event_prob = 0.125") != std::string::npos);
}

TEST_CASE("experiment config: JSON round trip") {
    ExperimentConfig cfg;
    cfg.n = 120;
    cfg.r = 6;
    cfg.gap = 0.6;
    cfg.policy = "racing";
    cfg.runs = 3;
    cfg.seed = 99;
    cfg.normalize = true;
    const ExperimentConfig back = ExperimentConfig::from_json(cfg.to_json());
    CHECK(back.n == cfg.n);
    CHECK(back.r == cfg.r);
    CHECK(back.gap == cfg.gap);
    CHECK(back.policy == cfg.policy);
    CHECK(back.runs == cfg.runs);
    CHECK(back.seed == cfg.seed);
    CHECK(back.normalize == cfg.normalize);

    // sigma / T aliases
    const ExperimentConfig alias =
        ExperimentConfig::from_json(nlohmann::json{{"sigma", 0.2}, {"T0", 50}, {"T", 80}});
    CHECK(alias.noise_var == doctest::Approx(0.04));
    CHECK(alias.T1 == 30);
}

TEST_CASE("matrix CSV round trip and header shape") {
    Rng rng(5);
    Eigen::MatrixXd m(3, 4);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = rng.normal() * std::pow(10.0, i - 1);

    std::stringstream ss;
    write_matrix_csv(ss, m);
    std::string header;
    std::getline(ss, header);
    CHECK(header == "t1,t2,t3,t4");
    ss.seekg(0);
    const Eigen::MatrixXd back = read_matrix_csv(ss);
    REQUIRE(back.rows() == 3);
    REQUIRE(back.cols() == 4);
    CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);  // %.17g round-trips exactly
}

TEST_CASE("replay log round trip") {
    std::stringstream ss;
    ReplayRecord a;
    a.unit = 12;
    a.stage = "batch";
    a.d_hat = 0;
    a.meta = "explore";
    a.d = 0;
    a.batch = 3;
    a.slot = 1;
    write_replay_line(ss, a);
    ReplayRecord b;
    b.unit = 13;
    b.stage = "batch";
    b.d_hat = 1;
    b.meta = "exploit";
    b.d = 1;
    b.est = 0.25;
    write_replay_line(ss, b);

    const auto rows = read_replay(ss);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].unit == 12);
    CHECK(rows[0].meta == "explore");
    CHECK(rows[0].batch == 3);
    CHECK(rows[1].est == doctest::Approx(0.25));
}

TEST_CASE("run_experiment: smoke test, output files, determinism") {
    ExperimentConfig cfg;
    cfg.n = 80;
    cfg.r = 2;
    cfg.T0 = 20;
    cfg.T1 = 20;
    cfg.gap = 0.4;
    cfg.runs = 2;
    cfg.seed = 31;
    cfg.policy = "alg1";
    const fs::path dir = fs::temp_directory_path() / "iasc_test_exp";
    fs::remove_all(dir);
    cfg.outdir = dir.string();

    const ExperimentResult first = run_experiment(cfg);
    CHECK(first.series.size() == 2);
    CHECK(first.mean_last100 >= 0.0);
    CHECK(fs::exists(dir / "results.csv"));
    CHECK(fs::exists(dir / "summary.csv"));
    CHECK(fs::exists(dir / "sizing.txt"));
    CHECK(fs::exists(dir / "replay-run0.jsonl"));

    // golden header and byte-identical rerun
    {
        std::ifstream is(dir / "results.csv");
        std::string header;
        std::getline(is, header);
        CHECK(header == "run,unit,method,probe_error");
    }
    const std::string first_bytes = slurp(dir / "results.csv");
    const ExperimentResult second = run_experiment(cfg);
    CHECK(slurp(dir / "results.csv") == first_bytes);
    CHECK(second.mean_last100 == first.mean_last100);

    // replay log structure: exactly one explore per completed batch
    const auto replay = read_replay_file((dir / "replay-run0.jsonl").string());
    CHECK(static_cast<int>(replay.size()) == cfg.n);
    const int N0 = first.sizing.N0;
    const int L = first.sizing.L.value;
    std::map<int, int> explores_per_batch;
    for (const auto& row : replay)
        if (row.meta == "explore") ++explores_per_batch[row.batch];
    const int complete_batches = (cfg.n - N0) / L;
    for (int b = 0; b < complete_batches; ++b) CHECK(explores_per_batch[b] == 1);

    fs::remove_all(dir);
}

TEST_CASE("run_experiment: baseline never improves the probe") {
    ExperimentConfig cfg;
    cfg.n = 60;
    cfg.r = 2;
    cfg.T0 = 20;
    cfg.T1 = 20;
    cfg.runs = 1;
    cfg.seed = 77;
    cfg.policy = "none";
    const ExperimentResult res = run_experiment(cfg);
    CHECK(res.mean_last100 >= 0.1);
}

TEST_CASE("run_experiment: alternate policies run end to end") {
    ExperimentConfig cfg;
    cfg.n = 80;
    cfg.r = 2;
    cfg.T0 = 20;
    cfg.T1 = 20;
    cfg.gap = 0.4;
    cfg.runs = 1;
    cfg.seed = 5;

    for (const char* policy : {"alg2", "racing"}) {
        cfg.policy = policy;
        const ExperimentResult res = run_experiment(cfg);
        CHECK(res.series.size() == 1);
        CHECK(res.mean_last100 >= 0.0);
    }

    cfg.policy = "noiseless";
    cfg.noise_var = 0.0;
    const ExperimentResult res = run_experiment(cfg);
    CHECK(res.mean_last100 >= 0.0);

    cfg.policy = "bogus";
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

namespace {

struct CliResult {
    int code = -1;
    std::string out;
};

CliResult cli(const std::string& args) {
    CliResult res;
    const std::string cmd = std::string(IASC_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    while (size_t n = fread(buf, 1, sizeof(buf), pipe)) res.out.append(buf, n);
    res.code = WEXITSTATUS(pclose(pipe));
    return res;
}

}  // namespace

TEST_CASE("CLI: exit codes and machine-readable output") {
    CHECK(cli("frobnicate").code == 64);  // unknown subcommand -> usage
    CHECK(cli("").code == 64);
    CHECK(cli("overlap-test --method asym").code == 1);  // missing required flags
    CHECK(cli("batch-size --preset idealized").code == 0);
    // an exploit margin the prior can never clear is infeasible
    CHECK(cli("batch-size --preset idealized --gap 0.25 --C 0.26").code == 2);

    // overlap-test round trip through the CSV interface
    Rng rng(8);
    const int m = 40, T0 = 20;
    Eigen::MatrixXd panel(m + 1, T0);
    Eigen::VectorXd u(T0);
    for (int t = 0; t < T0; ++t) u(t) = rng.uniform(0.5, 1.5);
    for (int i = 0; i < m; ++i) {
        const double v = rng.uniform(0.5, 1.5);
        for (int t = 0; t < T0; ++t) panel(i, t) = v * u(t) + rng.normal(0.0, 0.05);
    }
    panel.row(m) = panel.row(0);  // the test unit repeats a donor
    const fs::path csv = fs::temp_directory_path() / "iasc_cli_panel.csv";
    write_matrix_csv(csv.string(), panel);

    const CliResult res =
        cli("overlap-test --method asym --panel " + csv.string() + " --donors 1-40 --test 41 --rank 1");
    CHECK(res.code == 0);
    CHECK(res.out.find("decision=") != std::string::npos);
    CHECK(res.out.find("statistic=") != std::string::npos);

    const CliResult nonasym =
        cli("overlap-test --method nonasym --panel " + csv.string() +
            " --donors 1-40 --test 41 --rank 1 --delta 0.1 --sigma 0.05");
    CHECK(nonasym.code == 0);
    CHECK(nonasym.out.find("decision=reject") != std::string::npos);
    fs::remove(csv);

    // simulate: byte-identical CSV across invocations under one seed
    const fs::path dir = fs::temp_directory_path() / "iasc_cli_sim";
    fs::remove_all(dir);
    const std::string sim_args = "simulate --n 60 --r 2 --T0 20 --T1 20 --runs 1 --seed 4 --out " +
                                 dir.string();
    CHECK(cli(sim_args).code == 0);
    const std::string once = slurp(dir / "results.csv");
    CHECK(cli(sim_args).code == 0);
    CHECK(slurp(dir / "results.csv") == once);
    fs::remove_all(dir);
}
