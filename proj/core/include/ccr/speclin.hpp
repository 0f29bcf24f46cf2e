#pragma once

#include <Eigen/Core>

#include "ccr/errors.hpp"

namespace ccr {

/// Relative cutoff for numerical rank and pseudo-inverse truncation.
inline constexpr double kRankTol = 1e-12;

// Thin SVD with a fixed sign gauge: in every left singular vector the
// entry of largest magnitude is nonnegative (right vector flipped in
// tandem), so equal input bytes give equal output bytes.
struct ThinSvd {
    Eigen::MatrixXd left;       // n x r, orthonormal columns
    Eigen::VectorXd singular;   // length r, nonincreasing, > rank_tol * sigma_max
    Eigen::MatrixXd right;      // d x r, orthonormal columns

    [[nodiscard]] Eigen::Index rank() const { return singular.size(); }
    [[nodiscard]] Eigen::MatrixXd reconstruct() const;
};

// Leading components of a parent ThinSvd. If the requested rank exceeds
// the numerical rank the available components are returned and
// `shortfall` is set; that is a flag, not an error.
struct TruncatedSvd {
    Eigen::MatrixXd left;
    Eigen::VectorXd singular;
    Eigen::MatrixXd right;
    Eigen::Index requested_rank = 0;
    bool shortfall = false;

    [[nodiscard]] Eigen::Index rank() const { return singular.size(); }
    [[nodiscard]] Eigen::MatrixXd reconstruct() const;
};

/// All singular triples with sigma > rank_tol * sigma_max.
ThinSvd thin_svd(const Eigen::MatrixXd& a, double rank_tol = kRankTol);

TruncatedSvd truncate(const ThinSvd& svd, Eigen::Index r);

/// Min-norm least squares A^+ y; singular values below tol * sigma_max are dropped.
Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                               double tol = kRankTol);

/// U U^T for U with orthonormal columns (checked at 1e-8).
Eigen::MatrixXd projector(const Eigen::MatrixXd& u);

/// Singular values of U2^T U1, clamped into [0, 1], nonincreasing.
Eigen::VectorXd principal_angle_cosines(const Eigen::MatrixXd& u1, const Eigen::MatrixXd& u2);

/// Orthogonal Q minimizing ||A - B Q||: Q = Ubar Vbar^T with B^T A = Ubar S Vbar^T.
Eigen::MatrixXd procrustes_rotation(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// sigma_max / sigma_min of a positive spectrum.
double condition_number(const Eigen::VectorXd& singular_values);

/// Generalized condition number sigma_max(A) / sigma_min(B).
double cross_condition(double sigma_max_a, double sigma_min_b);

/// All min(rows, cols) singular values including zeros, nonincreasing.
/// Computed from the Gram matrix on the smaller side, which is robust to
/// heavily tied spectra.
Eigen::VectorXd singular_values(const Eigen::MatrixXd& a);

/// Largest singular value; 0 for an empty matrix.
double operator_norm(const Eigen::MatrixXd& a);

/// Thin-QR orthonormalization with positive-diagonal gauge; preserves
/// column order (column j of the result spans the first j input columns).
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& a);

/// Max-norm deviation of U^T U from the identity.
double orthonormality_defect(const Eigen::MatrixXd& u);

}  // namespace ccr
