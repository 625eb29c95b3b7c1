#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace iasc {

// Panel CSV: header row "t1,...,tT", one row per unit, values in %.17g so
// matrices round-trip exactly.
void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& matrix);
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& matrix);
Eigen::MatrixXd read_matrix_csv(std::istream& is);
Eigen::MatrixXd read_matrix_csv(const std::string& path);

// One line of the policy replay log (JSON lines). `ell` is used by the
// k-intervention engine, -1 otherwise; `est` is the exploit-branch estimate
// when one was computed.
struct ReplayRecord {
    long unit = 0;
    std::string stage;  // "first_stage" | "batch"
    int d_hat = -1;
    std::string meta;
    int d = 0;
    int ell = -1;
    double est = std::numeric_limits<double>::quiet_NaN();
    int batch = -1;
    int slot = -1;
};

void write_replay_line(std::ostream& os, const ReplayRecord& rec);
std::vector<ReplayRecord> read_replay(std::istream& is);
std::vector<ReplayRecord> read_replay_file(const std::string& path);

// Fixed-format double used everywhere output must be byte-stable.
std::string format_double(double x);

}  // namespace iasc
