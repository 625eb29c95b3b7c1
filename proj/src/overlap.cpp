#include "iasc/overlap.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "iasc/pcr.hpp"

namespace iasc {

OverlapTestResult nonasymptotic_overlap_test(const Eigen::MatrixXd& donor_pre,
                                             const Eigen::VectorXd& test_pre,
                                             double delta, double sigma, int rank,
                                             std::optional<double> gamma) {
    const int T0 = static_cast<int>(donor_pre.cols());
    const int m = static_cast<int>(donor_pre.rows());
    if (T0 % 2 != 0) throw std::invalid_argument("nonasymptotic_overlap_test: T0 must be even");
    if (test_pre.size() != T0)
        throw std::invalid_argument("nonasymptotic_overlap_test: test length mismatch");
    if (m < rank)
        throw std::invalid_argument("nonasymptotic_overlap_test: fewer donors than rank");
    if (delta <= 0 || delta >= 1)
        throw std::invalid_argument("nonasymptotic_overlap_test: delta in (0,1)");
    const int half = T0 / 2;

    DonorSet split;
    split.pre = donor_pre.leftCols(half);
    split.post_sum = donor_pre.rightCols(half).rowwise().sum();
    const PCRModel model = fit_pcr(split, rank, 0.0);

    const double pred = predict_avg_post(model, test_pre.head(half), half);
    const double obs = test_pre.tail(half).mean();

    const double gamma_eff = gamma.value_or(std::max(1.0, model.theta_hat.norm()));
    const ConfidenceParams params =
        ConfidenceParams::from_model(model, m, half, half, gamma_eff, sigma, 1);

    OverlapTestResult out;
    out.diagnostics.alpha = alpha_bound(params, delta);
    out.diagnostics.noise_term = 2.0 * sigma * std::sqrt(std::log(1.0 / delta) / T0);
    out.statistic = std::abs(pred - obs);
    out.threshold = out.diagnostics.alpha + out.diagnostics.noise_term;
    out.accept = out.statistic > out.threshold;

    double tail = 0.0;
    for (int l = rank; l < model.spectrum.size(); ++l)
        tail += model.spectrum(l) * model.spectrum(l);
    out.diagnostics.sigma_hat = std::sqrt(tail / (static_cast<double>(m) * half));
    return out;
}

SiWeights si_weights(const Eigen::MatrixXd& donor_pre, const Eigen::VectorXd& test_pre,
                     int rank) {
    const int T0 = static_cast<int>(donor_pre.cols());
    const int m = static_cast<int>(donor_pre.rows());
    if (T0 % 2 != 0) throw std::invalid_argument("si_weights: T0 must be even");
    if (test_pre.size() != T0) throw std::invalid_argument("si_weights: test length mismatch");
    const int half = T0 / 2;
    if (rank < 1 || rank > std::min(m, half))
        throw std::invalid_argument("si_weights: rank out of range");

    const Eigen::MatrixXd first = donor_pre.leftCols(half);
    const Eigen::VectorXd b = test_pre.head(half);

    SiWeights out;
    out.omega = span_weights(first, b, rank);

    const Eigen::VectorXd resid = b - first.transpose() * out.omega;
    out.fit_residual_rms = std::sqrt(resid.squaredNorm() / half);

    Eigen::BDCSVD<Eigen::MatrixXd> svd(donor_pre);
    const Eigen::VectorXd& s = svd.singularValues();
    double tail = 0.0;
    for (int l = rank; l < s.size(); ++l) tail += s(l) * s(l);
    out.sigma_hat = std::sqrt(tail / (static_cast<double>(m) * T0));
    return out;
}

OverlapTestResult asymptotic_overlap_test(const Eigen::MatrixXd& donor_pre,
                                          const Eigen::VectorXd& test_pre, int rank) {
    const int T0 = static_cast<int>(donor_pre.cols());
    const int half = T0 / 2;
    const SiWeights w = si_weights(donor_pre, test_pre, rank);
    if (w.omega.norm() == 0.0)
        throw std::runtime_error("asymptotic_overlap_test: degenerate weights");

    const Eigen::VectorXd donor_second_avg = donor_pre.rightCols(half).rowwise().mean();
    const double pred = w.omega.dot(donor_second_avg);
    const double obs = test_pre.tail(half).mean();
    const double gap = std::abs(pred - obs);

    OverlapTestResult out;
    out.diagnostics.sigma_hat = w.sigma_hat;
    out.diagnostics.omega_norm = w.omega.norm();
    out.diagnostics.fit_residual_rms = w.fit_residual_rms;
    out.threshold = kOverlapZ;

    const double scale =
        w.fit_residual_rms * std::sqrt(1.0 + w.omega.squaredNorm());
    const double tiny = 1e-10 * std::max(1.0, std::abs(obs));
    if (scale <= tiny * 1e-2) {
        // exact interpolation regime (noiseless in-span data)
        out.statistic = gap <= tiny ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
        out.statistic = std::sqrt(static_cast<double>(half)) * gap / scale;
    }
    out.accept = out.statistic > out.threshold;
    return out;
}

}  // namespace iasc
