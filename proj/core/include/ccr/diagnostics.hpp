#pragma once

#include <optional>
#include <string>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "ccr/dataset.hpp"
#include "ccr/estimators.hpp"

namespace ccr {

// Scalar summaries of a design: noise-to-signal ratios, condition
// numbers, canonical correlations, effective ranks and the restricted
// eigenvalue constants of the overlap factors.
struct KeyQuantities {
    double nsr_x = 0.0;        // ||H_X||^2 / sigma_k(X)^2
    double nsr_w = 0.0;        // ||H_W||^2 / sigma_ell(W)^2
    double kappa_x = 1.0;
    double kappa_w = 1.0;
    double kappa_xw = 1.0;     // sigma_max(X) / sigma_min(W)
    double sigma_min_x = 0.0;
    double sigma_max_x = 0.0;
    double sigma_min_w = 0.0;
    double sigma_max_w = 0.0;
    Eigen::VectorXd overlap_cosines_true;       // spectrum of the true overlap
    Eigen::VectorXd overlap_cosines_empirical;  // spectrum of the noisy overlap
    Eigen::Index r = 0;                         // rank of the weighted overlap
    Eigen::Index r_star = 0;                    // rank of the oracle weighted overlap
    double sigma_bar_sq = 0.0;                  // disturbance variance bound
    double c_ell = 0.0;                         // lambda_min of the row-truncated left factor
    double c_k = 0.0;                           // lambda_min of the row-truncated right factor
};

KeyQuantities key_quantities(const GroundTruth& truth, const FirstStage& fs,
                             double sigma_bar_sq);

struct NoiseToSignal {
    double nsr_x = 0.0;
    double nsr_w = 0.0;
};

/// The two noise-to-signal ratios alone (cheaper than key_quantities).
NoiseToSignal noise_to_signal(const GroundTruth& truth);

/// The estimation target under the minimal-norm convention: the
/// projection of the drawn coefficient onto the row space of X.
Eigen::VectorXd min_norm_target(const GroundTruth& truth);

// Squared-norm split of the estimation error into the row-space,
// null-space, and out-of-span terms. The three sum to `total` up to
// roundoff (`residual`).
struct DecompositionReport {
    double term_row = 0.0;
    double term_null = 0.0;
    double term_perp = 0.0;
    double total = 0.0;
    double residual = 0.0;
};

DecompositionReport error_decomposition(const Eigen::VectorXd& beta_hat,
                                        const GroundTruth& truth, const FirstStage& fs);

/// Same, with the truth factors already decomposed (saves repeated SVDs
/// when several estimators share one dataset).
DecompositionReport error_decomposition(const Eigen::VectorXd& beta_hat,
                                        const GroundTruth& truth, const FirstStage& fs,
                                        const ThinSvd& x_svd, const ThinSvd& w_svd);

// Materialized p x p projectors; intended for verification at small p.
struct ProjectorSuite {
    Eigen::MatrixXd row;
    Eigen::MatrixXd null_space;
    Eigen::MatrixXd perp;
    std::optional<Eigen::MatrixXd> null_star;
    std::optional<Eigen::MatrixXd> perp_star;
};

ProjectorSuite projector_suite(const FirstStage& fs, const GroundTruth* truth = nullptr);

// Procrustes-aligned singular-subspace deviations against their
// perturbation bounds. `holds` is reported, not asserted: when the
// noise dominance precondition fails, that is flagged instead.
struct WedinReport {
    double lhs_v = 0.0;  // ||V_* - V_k Q|| after alignment
    double rhs_v = 0.0;  // sqrt(2) ||H_X|| / sigma_k(X)
    double lhs_u = 0.0;
    double rhs_u = 0.0;
    bool holds_v = false;
    bool holds_u = false;
    bool holds = false;
    bool assumption_noise_x = false;  // ||H_X|| <= sigma_k(X)
    bool assumption_noise_w = false;  // ||H_W|| <= sigma_ell(W)
    bool shape_truncated = false;     // compared ranks differed; leading columns used
};

WedinReport wedin_check(const GroundTruth& truth, const FirstStage& fs);

enum class ErrorRegime { BiasDominated, VarianceDominated, Indeterminate };

std::string error_regime_name(ErrorRegime regime);

/// Threshold rule: bias when nsr_total >= c_hi * sbar2 * r / kappa^2,
/// variance when nsr_total <= that minus c_lo / kappa^2, else indeterminate.
ErrorRegime classify_regime(double nsr_total, double kappa_xw, double sigma_bar_sq,
                            Eigen::Index r, double c_hi = 1.0, double c_lo = 1.0);

enum class Recommendation { Cca, Whiten, Pca, Boundary };

std::string recommendation_name(Recommendation rec);

/// Phase-diagram cell lookup. Gate value is sigma_max(W) in the variance
/// regime and kappa(W) in the bias regime; comparisons within 1e-9 of the
/// unit thresholds return Boundary.
Recommendation recommend_estimator(ErrorRegime regime, double sigma_min_x,
                                   double sigma_max_w, double kappa_w);

struct LowerBound {
    double value = 0.0;        // +inf when the packing denominator closes
    bool remark_low_rank = false;  // r_star below the single-term threshold
};

LowerBound minimax_lower_bound(double sigma_eps, double sigma_x_noise, Eigen::Index r_star,
                               double sigma_min_w, double sigma_max_overlap);

/// Flat JSON with snake_case keys; infinities encoded as the string "inf".
nlohmann::json key_quantities_to_json(const KeyQuantities& kq);
nlohmann::json decomposition_to_json(const DecompositionReport& report);
nlohmann::json wedin_to_json(const WedinReport& report);

}  // namespace ccr
