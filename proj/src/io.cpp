#include "iasc/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace iasc {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& matrix) {
    for (int t = 0; t < matrix.cols(); ++t) {
        if (t) os << ',';
        os << 't' << (t + 1);
    }
    os << '\n';
    for (int i = 0; i < matrix.rows(); ++i) {
        for (int t = 0; t < matrix.cols(); ++t) {
            if (t) os << ',';
            os << format_double(matrix(i, t));
        }
        os << '\n';
    }
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& matrix) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    write_matrix_csv(os, matrix);
}

Eigen::MatrixXd read_matrix_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("matrix CSV: empty input");
    // header gives the column count
    int cols = 1;
    for (char c : line)
        if (c == ',') ++cols;

    std::vector<double> values;
    int rows = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        int found = 0;
        while (std::getline(ss, cell, ',')) {
            values.push_back(std::stod(cell));
            ++found;
        }
        if (found != cols) throw std::runtime_error("matrix CSV: ragged row");
        ++rows;
    }
    Eigen::MatrixXd out(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int t = 0; t < cols; ++t)
            out(i, t) = values[static_cast<size_t>(i) * cols + static_cast<size_t>(t)];
    return out;
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open for read: " + path);
    return read_matrix_csv(is);
}

void write_replay_line(std::ostream& os, const ReplayRecord& rec) {
    nlohmann::json j{{"unit", rec.unit}, {"stage", rec.stage},  {"d_hat", rec.d_hat},
                     {"meta", rec.meta}, {"d", rec.d},          {"ell", rec.ell},
                     {"batch", rec.batch}, {"slot", rec.slot}};
    if (!std::isnan(rec.est)) j["est"] = rec.est;
    os << j.dump() << '\n';
}

std::vector<ReplayRecord> read_replay(std::istream& is) {
    std::vector<ReplayRecord> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const nlohmann::json j = nlohmann::json::parse(line);
        ReplayRecord rec;
        rec.unit = j.at("unit").get<long>();
        rec.stage = j.at("stage").get<std::string>();
        rec.d_hat = j.at("d_hat").get<int>();
        rec.meta = j.at("meta").get<std::string>();
        rec.d = j.at("d").get<int>();
        rec.ell = j.value("ell", -1);
        rec.batch = j.value("batch", -1);
        rec.slot = j.value("slot", -1);
        rec.est = j.value("est", std::numeric_limits<double>::quiet_NaN());
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<ReplayRecord> read_replay_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open for read: " + path);
    return read_replay(is);
}

}  // namespace iasc
