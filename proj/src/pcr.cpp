#include "iasc/pcr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace iasc {

namespace {
constexpr double kRankTol = 1e-12;

SnrValue snr_from_sigma_r(double sigma_r, int m, int T0, double delta) {
    SnrValue out;
    double inner = std::log(static_cast<double>(m));
    if (inner < 1.0) {
        inner = 1.0;
        out.clamped = true;
    }
    const double denom = std::sqrt(static_cast<double>(m)) +
                         std::sqrt(static_cast<double>(T0)) +
                         std::sqrt(std::log(inner / delta));
    out.value = sigma_r / denom;
    return out;
}
}  // namespace

TruncatedSvd truncated_svd(const Eigen::MatrixXd& matrix, int rank) {
    if (!matrix.allFinite())
        throw std::invalid_argument("truncated_svd: non-finite entries");
    const int maxrank = static_cast<int>(std::min(matrix.rows(), matrix.cols()));
    if (rank < 1 || rank > maxrank)
        throw std::invalid_argument("truncated_svd: rank out of range");

    Eigen::BDCSVD<Eigen::MatrixXd> svd(matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
    TruncatedSvd out;
    out.spectrum = svd.singularValues();
    out.rank = rank;
    const auto& U = svd.matrixU();
    const auto& V = svd.matrixV();
    out.denoised = U.leftCols(rank) * out.spectrum.head(rank).asDiagonal() *
                   V.leftCols(rank).transpose();
    out.projector = V.leftCols(rank) * V.leftCols(rank).transpose();
    return out;
}

PCRModel fit_pcr(const DonorSet& donors, int rank, double rho) {
    if (donors.m() < 1) throw std::invalid_argument("fit_pcr: empty donor set");
    if (donors.post_sum.size() != donors.pre.rows())
        throw std::invalid_argument("fit_pcr: post_sum size mismatch");
    if (rho < 0 && rho != kAutoRho)
        throw std::invalid_argument("fit_pcr: rho must be >= 0");
    const int maxrank = static_cast<int>(std::min(donors.pre.rows(), donors.pre.cols()));
    if (rank < 1 || rank > maxrank)
        throw std::invalid_argument("fit_pcr: rank out of range");

    Eigen::BDCSVD<Eigen::MatrixXd> svd(donors.pre, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    if (rho == kAutoRho) rho = 1e-8 * s(0) * s(0);

    PCRModel model;
    model.rank = rank;
    model.rho = rho;
    model.spectrum = s;

    // In the truncated singular basis the normal system is diagonal:
    // theta = sum_l v_l * s_l / (s_l^2 + rho) * <u_l, post_sum>.
    const double tol = s.size() > 0 ? s(0) * kRankTol : 0.0;
    Eigen::VectorXd coeff = Eigen::VectorXd::Zero(rank);
    for (int l = 0; l < rank; ++l) {
        if (s(l) > tol) {
            coeff(l) = s(l) / (s(l) * s(l) + rho) *
                       svd.matrixU().col(l).dot(donors.post_sum);
        } else {
            model.degraded = true;  // singular direction inside the request
        }
    }
    model.theta_hat = svd.matrixV().leftCols(rank) * coeff;
    model.projector = svd.matrixV().leftCols(rank) * svd.matrixV().leftCols(rank).transpose();
    return model;
}

double predict_avg_post(const PCRModel& model, const Eigen::VectorXd& y_pre, int T1) {
    if (y_pre.size() != model.theta_hat.size())
        throw std::invalid_argument("predict_avg_post: pre-period length mismatch");
    if (T1 < 1) throw std::invalid_argument("predict_avg_post: T1 must be >= 1");
    return model.theta_hat.dot(y_pre) / T1;
}

SnrValue snr_hat(const Eigen::VectorXd& spectrum, int m, int T0, int rank, double delta) {
    if (m < 2) throw std::invalid_argument("snr_hat: m must be >= 2");
    if (delta <= 0 || delta >= 1) throw std::invalid_argument("snr_hat: delta in (0,1)");
    if (rank < 1 || rank > spectrum.size())
        throw std::invalid_argument("snr_hat: rank out of range");
    return snr_from_sigma_r(spectrum(rank - 1), m, T0, delta);
}

ConfidenceParams ConfidenceParams::from_model(const PCRModel& model, int m, int T0, int T1,
                                              double gamma, double sigma, int k,
                                              std::optional<double> err_override) {
    ConfidenceParams p;
    p.m = m;
    p.T0 = T0;
    p.T1 = T1;
    p.k = k;
    p.rank = model.rank;
    p.gamma = gamma;
    p.sigma = sigma;
    p.sigma_r = model.spectrum(model.rank - 1);
    p.kappa = p.sigma_r > 0 ? model.spectrum(0) / p.sigma_r
                            : std::numeric_limits<double>::infinity();
    if (err_override) {
        p.err = *err_override;
    } else {
        double tail = 0.0;
        for (int l = model.rank; l < model.spectrum.size(); ++l)
            tail += model.spectrum(l) * model.spectrum(l);
        p.err = tail / (static_cast<double>(m) * T0);
    }

    const double st0 = std::sqrt(static_cast<double>(T0));
    const double st1 = std::sqrt(static_cast<double>(T1));
    p.A = 3.0 * st0 * (gamma * (std::sqrt(74.0) + 12.0 * std::sqrt(6.0) * p.kappa) / T1 +
                       1.0 / st1);
    p.F = 2.0 * gamma * std::sqrt(24.0 * T0) / T1 +
          12.0 * gamma * p.kappa * std::sqrt(3.0 * T0) / T1 + 2.0 / st1;
    p.D = gamma * sigma * std::sqrt(74.0) / st1 +
          12.0 * sigma * p.kappa * std::sqrt(6.0) / st1 + sigma * std::sqrt(2.0);
    p.E = gamma * sigma / st1;
    p.alpha_comp = p.A + p.F + p.D * (std::sqrt(static_cast<double>(m)) + st0) +
                   p.sigma_r * p.E;
    return p;
}

double alpha_bound(const ConfidenceParams& p, double delta) {
    if (delta <= 0 || delta >= 1) throw std::invalid_argument("alpha_bound: delta in (0,1)");
    const double snr = snr_from_sigma_r(p.sigma_r, p.m, p.T0, delta).value;
    if (snr < 2.0)
        throw InsufficientSignal("alpha_bound: snr_hat < 2, insufficient signal");

    const double st0 = std::sqrt(static_cast<double>(p.T0));
    const double st1 = std::sqrt(static_cast<double>(p.T1));
    const double lg = std::log(static_cast<double>(p.k) / delta);
    const double sqlg = std::sqrt(std::max(lg, 0.0));
    const double sqerr = std::sqrt(p.err);

    double a = 0.0;
    a += (3.0 * st0 / snr) *
         (p.gamma * (std::sqrt(74.0) + 12.0 * std::sqrt(6.0) * p.kappa) / (p.T1 * snr));
    a += (3.0 * st0 / snr) * (sqerr / (st1 * p.sigma_r));
    a += 2.0 * p.gamma * std::sqrt(24.0 * p.T0) / (p.T1 * snr);
    a += 12.0 * p.gamma * p.kappa * std::sqrt(3.0 * p.T0) / (p.T1 * snr);
    a += 2.0 * sqerr / (st1 * p.sigma_r);
    a += p.gamma * p.sigma * sqlg / st1;
    a += p.gamma * p.sigma * std::sqrt(74.0) * sqlg / (snr * st1);
    a += 12.0 * p.sigma * p.kappa * std::sqrt(6.0) * sqlg / (snr * st1);
    a += p.sigma * std::sqrt(2.0 * p.err) * sqlg / p.sigma_r;
    return a;
}

double delta_for_epsilon(const ConfidenceParams& p, double epsilon) {
    if (epsilon <= 0) throw std::invalid_argument("delta_for_epsilon: epsilon must be > 0");
    const double X = p.sigma_r * epsilon -
                     (p.A + p.F) * (std::sqrt(static_cast<double>(p.m)) +
                                    std::sqrt(static_cast<double>(p.T0)));
    if (X <= 0) return 1.0;  // gap not resolvable; vacuous bound

    const double numer = std::max(std::log(static_cast<double>(p.m)),
                                  static_cast<double>(p.k));
    double root;
    if (p.D > 0) {
        const double half = p.alpha_comp / (2.0 * p.D);
        root = std::sqrt(X / p.D + half * half) - half;
    } else {
        // noiseless limit of the closed form as D -> 0
        if (p.alpha_comp <= 0) return 1.0;
        root = X / p.alpha_comp;
    }
    const double delta = numer / std::exp(root * root);
    return std::min(1.0, delta);
}

int rank_by_spectral_gap(const Eigen::VectorXd& spectrum) {
    if (spectrum.size() < 1) throw std::invalid_argument("rank_by_spectral_gap: empty spectrum");
    if (spectrum.size() == 1) return 1;
    int best = 1;
    double best_ratio = 0.0;
    for (int l = 0; l + 1 < spectrum.size(); ++l) {
        const double next = std::max(spectrum(l + 1), 1e-300);
        const double ratio = spectrum(l) / next;
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best = l + 1;
        }
    }
    return best;
}

Eigen::VectorXd span_weights(const Eigen::MatrixXd& donor_rows,
                             const Eigen::VectorXd& target, int rank) {
    if (donor_rows.rows() < 1) throw std::invalid_argument("span_weights: empty donor set");
    if (donor_rows.cols() != target.size())
        throw std::invalid_argument("span_weights: length mismatch");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(donor_rows.transpose(),
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    const double tol = s.size() > 0 ? s(0) * kRankTol * std::sqrt(double(s.size())) : 0.0;
    int keep = (rank < 0) ? static_cast<int>(s.size())
                          : std::min<int>(rank, static_cast<int>(s.size()));
    Eigen::VectorXd w = Eigen::VectorXd::Zero(donor_rows.rows());
    for (int l = 0; l < keep; ++l) {
        if (s(l) <= tol) break;
        w += svd.matrixV().col(l) * (svd.matrixU().col(l).dot(target) / s(l));
    }
    return w;
}

double lsi_residual(const Eigen::MatrixXd& donor_expected_pre,
                    const Eigen::VectorXd& target_expected_pre) {
    if (donor_expected_pre.rows() < 1)
        throw std::invalid_argument("lsi_residual: empty donor set");
    if (donor_expected_pre.cols() != target_expected_pre.size())
        throw std::invalid_argument("lsi_residual: pre-period length mismatch");

    // Project the target onto the donor row space via SVD.
    Eigen::BDCSVD<Eigen::MatrixXd> svd(donor_expected_pre, Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    const double tol = s.size() > 0 ? s(0) * kRankTol * std::sqrt(double(s.size())) : 0.0;
    Eigen::VectorXd resid = target_expected_pre;
    for (int l = 0; l < s.size(); ++l) {
        if (s(l) > tol) {
            const Eigen::VectorXd v = svd.matrixV().col(l);
            resid -= v * v.dot(target_expected_pre);
        }
    }
    return resid.norm();
}

}  // namespace iasc
