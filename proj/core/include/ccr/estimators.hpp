#pragma once

#include <string>

#include <Eigen/Core>

#include "ccr/speclin.hpp"

namespace ccr {

// Diagonal first-stage weights. The canonical members:
//   PCA:    left = Identity,                  right = CovariateSpectrum
//   Whiten: left = Identity,                  right = Identity
//   CCA:    left = InverseInstrumentSpectrum, right = Identity
struct WeightSpec {
    enum class Left { Identity, InverseInstrumentSpectrum, Custom };
    enum class Right { Identity, CovariateSpectrum, Custom };

    Left left = Left::Identity;
    Right right = Right::Identity;
    Eigen::VectorXd left_values;   // used when left == Custom; strictly positive
    Eigen::VectorXd right_values;  // used when right == Custom; strictly positive
};

enum class EstimatorKind { Naive2Sls, Pca2Sls, Whiten2Sls, Cca2Sls, OracleTsls, CustomCcr };

std::string estimator_kind_name(EstimatorKind kind);
EstimatorKind estimator_kind_from_name(const std::string& name);

struct EstimatorSpec {
    EstimatorKind kind = EstimatorKind::Cca2Sls;
    Eigen::Index k = 8;             // covariate truncation rank
    Eigen::Index ell = 10;          // instrument truncation rank
    double pinv_tol = kRankTol;     // relative pseudo-inverse threshold
    WeightSpec weights;             // used when kind == CustomCcr
    std::string label;              // CSV/report name; defaults to the kind name

    [[nodiscard]] std::string name() const;
    void validate() const;
};

struct Weights {
    Eigen::VectorXd left;   // diagonal of A_L, length = instrument rank
    Eigen::VectorXd right;  // diagonal of A_R, length = covariate rank
};

// First-stage state shared by every fit on the same design: truncated
// factors, the empirical overlap matrix, the weighted overlap delta and
// its SVD. Immutable after construction; safe to share across threads.
struct FirstStage {
    TruncatedSvd cov;             // Z_X at rank k
    TruncatedSvd inst;            // Z_W at rank ell
    Eigen::MatrixXd overlap;      // inst.left^T cov.left  (ell x k)
    Eigen::VectorXd left_weight;  // A_L diagonal
    Eigen::VectorXd right_weight; // A_R diagonal
    Eigen::MatrixXd delta;        // A_L overlap A_R
    ThinSvd delta_svd;
    bool rank_shortfall = false;  // requested (k, ell) exceeded numerical ranks

    [[nodiscard]] Eigen::Index rank() const { return delta_svd.rank(); }
};

Weights resolve_weights(const EstimatorSpec& spec, const TruncatedSvd& cov,
                        const TruncatedSvd& inst);

/// Build from precomputed thin SVDs of Z_X and Z_W (preferred when several
/// estimators share one design). Naive2Sls uses the full numerical ranks.
FirstStage build_first_stage(const ThinSvd& x_svd, const ThinSvd& w_svd,
                             const EstimatorSpec& spec);
FirstStage build_first_stage(const Eigen::MatrixXd& z_x, const Eigen::MatrixXd& z_w,
                             const EstimatorSpec& spec);

struct CcrFit {
    Eigen::VectorXd beta;
    bool zero_design = false;  // delta vanished; beta is the zero vector
};

/// beta = P^+ y for P = inst.left * delta * cov.right^T, computed in
/// factored form without materializing the n x p design.
CcrFit ccr_fit(const Eigen::VectorXd& y, const FirstStage& fs, double pinv_tol = kRankTol);

/// 2SLS on the clean covariates and instruments: (proj_W X)^+ y.
Eigen::VectorXd oracle_2sls(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                            const Eigen::MatrixXd& w);

/// 2SLS on the noisy data without spectral truncation: (proj_{Z_W} Z_X)^+ y.
Eigen::VectorXd naive_2sls(const Eigen::VectorXd& y, const Eigen::MatrixXd& z_x,
                           const Eigen::MatrixXd& z_w, double pinv_tol = kRankTol);

struct CcaCheck {
    double deviation = 0.0;           // max-norm gap between the two routes
    bool truncation_mismatch = false; // requested k exceeded rank of the cross-moment
};

/// Evaluates the CCA design two ways: explicit projection of the rank-k
/// truncated whitened cross-moment, and the factored inverse-spectrum
/// formula. The two agree up to roundoff whenever k is within rank.
CcaCheck cca_consistency_check(const FirstStage& fs, double pinv_tol = kRankTol);

}  // namespace ccr
