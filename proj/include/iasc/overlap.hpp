#pragma once

#include <Eigen/Dense>
#include <optional>

namespace iasc {

struct OverlapDiagnostics {
    double alpha = 0.0;          // confidence half-width (non-asymptotic test)
    double noise_term = 0.0;     // Hoeffding allowance (non-asymptotic test)
    double sigma_hat = 0.0;      // donor-residual noise sd estimate
    double omega_norm = 0.0;     // ||omega_hat||_2 (asymptotic test)
    double fit_residual_rms = 0.0;  // test-unit first-half fit residual RMS
};

// accept = the overlap hypothesis is violated for the test unit.
struct OverlapTestResult {
    double statistic = 0.0;
    double threshold = 0.0;
    bool accept = false;  // statistic > threshold
    OverlapDiagnostics diagnostics;
};

// Non-asymptotic test: regress donors' second-half pre-period averages on
// their first halves, compare the prediction for the test unit against its
// observed second-half average, and accept the violation hypothesis when the
// gap exceeds alpha(delta) plus a Hoeffding noise allowance.
// gamma defaults to max(1, ||theta_hat||) when not supplied.
// Requires even T0 and at least `rank` donors; the confidence bound requires
// snr_hat >= 2 (InsufficientSignal otherwise).
OverlapTestResult nonasymptotic_overlap_test(const Eigen::MatrixXd& donor_pre,
                                             const Eigen::VectorXd& test_pre,
                                             double delta, double sigma, int rank,
                                             std::optional<double> gamma = std::nullopt);

struct SiWeights {
    Eigen::VectorXd omega;          // donor weights from the first-half fit
    double sigma_hat = 0.0;         // rank-r residual RMS over all donor pre entries
    double fit_residual_rms = 0.0;  // RMS of the test unit's first-half fit residual
};

// Vertical regression across units: omega is the rank-truncated
// pseudo-inverse of the donors' first-half pre matrix (transposed) applied
// to the test unit's first-half pre vector.
SiWeights si_weights(const Eigen::MatrixXd& donor_pre, const Eigen::VectorXd& test_pre,
                     int rank);

// z_{0.95}, two-sided convention.
inline constexpr double kOverlapZ = 1.959964;

// Asymptotic test: predict the test unit's second-half average from the
// donors' second-half averages with the si_weights fit, studentize by the
// fit-residual scale, and compare with z_{0.95}.
// The denominator uses fit_residual_rms * sqrt(1 + ||omega||^2): the
// sqrt(1 + .) accounts for the test unit's own noise at finite ||omega||
// (the plain sigma ||omega|| form is recovered as ||omega|| grows).
OverlapTestResult asymptotic_overlap_test(const Eigen::MatrixXd& donor_pre,
                                          const Eigen::VectorXd& test_pre, int rank);

}  // namespace iasc
