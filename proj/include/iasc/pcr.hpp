#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>

namespace iasc {

// Raised when a confidence-bound hypothesis fails (signal-to-noise below 2).
struct InsufficientSignal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Pre-period outcomes of the units that took one intervention, plus each
// donor's summed post-period outcomes.
struct DonorSet {
    Eigen::MatrixXd pre;       // m x T0
    Eigen::VectorXd post_sum;  // m, sum over the post window
    int d = 0;                 // intervention label

    int m() const { return static_cast<int>(pre.rows()); }
    int t0() const { return static_cast<int>(pre.cols()); }
};

struct TruncatedSvd {
    Eigen::MatrixXd denoised;   // rank-r reconstruction
    Eigen::VectorXd spectrum;   // all singular values, descending
    Eigen::MatrixXd projector;  // T0 x T0 projector onto top-r right space
    int rank = 0;
};

// Hard singular value thresholding at the given rank.
// Throws std::invalid_argument for rank out of [1, min(m, T0)] or non-finite input.
TruncatedSvd truncated_svd(const Eigen::MatrixXd& matrix, int rank);

struct PCRModel {
    Eigen::VectorXd theta_hat;  // T0
    int rank = 0;
    double rho = 0.0;
    Eigen::VectorXd spectrum;   // singular values of the donor pre matrix
    Eigen::MatrixXd projector;  // rank-r right-singular projector
    bool degraded = false;      // effective rank fell short of the request
};

// Sentinel: pick rho = 1e-8 * s_1^2 ("sufficiently small") from the data.
inline constexpr double kAutoRho = -1.0;

// Regularized principal component regression on the rank-truncated donor
// matrix: theta = (Yhat' Yhat + rho P)^-1 Yhat' post_sum, evaluated in the
// truncated singular basis. With rho = 0 this is the pseudo-inverse
// restricted to the truncated row space; zero singular values inside the
// requested rank degrade to the pseudo-inverse and set the flag.
PCRModel fit_pcr(const DonorSet& donors, int rank, double rho = 0.0);

// Minimum-norm least-squares weights w with donor_rows' w ~= target,
// optionally rank-truncated (rank = -1 keeps every nonzero direction).
Eigen::VectorXd span_weights(const Eigen::MatrixXd& donor_rows,
                             const Eigen::VectorXd& target, int rank = -1);

// (1/T1) * <theta_hat, y_pre>
double predict_avg_post(const PCRModel& model, const Eigen::VectorXd& y_pre, int T1);

struct SnrValue {
    double value = 0.0;
    bool clamped = false;  // inner log clamped at 1 (m < 3)
};

// sigma_r / (sqrt(m) + sqrt(T0) + sqrt(log(log(m)/delta))), with the inner
// log clamped at 1 when m < 3.
SnrValue snr_hat(const Eigen::VectorXd& spectrum, int m, int T0, int rank, double delta);

// Everything needed to evaluate the finite-sample confidence bound and its
// inverse. The observed (truncated) spectrum stands in for the unobservable
// noiseless signal matrix.
struct ConfidenceParams {
    double A = 0, F = 0, D = 0, E = 0;
    double kappa = 1;       // s_1 / s_r of the truncated pre matrix
    double sigma_r = 0;     // r-th singular value
    double alpha_comp = 0;  // A + F + D(sqrt(m)+sqrt(T0)) + sigma_r * E
    int m = 0, T0 = 0, T1 = 0, k = 2, rank = 0;
    double gamma = 1, sigma = 0;
    double err = 0;  // residual-energy term; default sum_{l>r} s_l^2 / (m T0)

    static ConfidenceParams from_model(const PCRModel& model, int m, int T0, int T1,
                                       double gamma, double sigma, int k,
                                       std::optional<double> err_override = std::nullopt);
};

// Finite-sample confidence half-width alpha(delta), evaluated term by term.
// Throws InsufficientSignal when snr_hat < 2.
double alpha_bound(const ConfidenceParams& params, double delta);

// Inverse bound: smallest failure probability delta such that the estimate
// is within epsilon, clamped to (0, 1]. Vacuous (1) when the gap is not
// resolvable at these parameters.
double delta_for_epsilon(const ConfidenceParams& params, double epsilon);

// Least-squares residual norm of projecting the target pre-period row onto
// the span of the donor rows; ~0 iff linear span inclusion holds.
double lsi_residual(const Eigen::MatrixXd& donor_expected_pre,
                    const Eigen::VectorXd& target_expected_pre);

// Optional heuristic: truncation rank at the largest multiplicative gap in
// the spectrum. Callers normally supply the rank; this is a convenience for
// exploratory use only.
int rank_by_spectral_gap(const Eigen::VectorXd& spectrum);

}  // namespace iasc
