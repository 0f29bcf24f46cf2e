#include "ccr/speclin.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "ccr/rng.hpp"

namespace ccr {

namespace {

constexpr double kOrthoTol = 1e-8;

void require_finite(const Eigen::MatrixXd& a, const char* what) {
    if (!a.allFinite()) {
        throw NonFiniteError(std::string(what) + " contains NaN or Inf");
    }
}

void require_orthonormal(const Eigen::MatrixXd& u, const char* what) {
    if (orthonormality_defect(u) > kOrthoTol) {
        throw NotOrthonormalError(std::string(what) + " does not have orthonormal columns");
    }
}

// Gauge fix: largest-magnitude entry of each left vector made nonnegative.
void apply_sign_convention(Eigen::MatrixXd& left, Eigen::MatrixXd& right) {
    for (Eigen::Index j = 0; j < left.cols(); ++j) {
        Eigen::Index idx = 0;
        left.col(j).cwiseAbs().maxCoeff(&idx);
        if (left(idx, j) < 0.0) {
            left.col(j) = -left.col(j);
            right.col(j) = -right.col(j);
        }
    }
}

}  // namespace

Eigen::MatrixXd ThinSvd::reconstruct() const {
    return left * singular.asDiagonal() * right.transpose();
}

Eigen::MatrixXd TruncatedSvd::reconstruct() const {
    return left * singular.asDiagonal() * right.transpose();
}

namespace {

// Deterministic reconstruction probe: ||(A - U S V^T) g|| for fixed
// pseudo-random g. Eigen 3.4.0's divide-and-conquer SVD can mis-deflate
// matrices with many equal singular values and return factors that do not
// reproduce A; the probe costs two mat-vecs and catches that reliably.
bool svd_factors_reproduce(const Eigen::MatrixXd& a, const Eigen::MatrixXd& u,
                           const Eigen::VectorXd& sigma, const Eigen::MatrixXd& v) {
    const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
    if (sigma_max == 0.0) {
        return true;
    }
    Rng rng = RngKey(0x5BD1E995u).with("svd.probe").with(a.rows()).with(a.cols()).stream();
    for (int probe = 0; probe < 2; ++probe) {
        const Eigen::VectorXd g = rng.gaussian_vector(a.cols());
        const Eigen::VectorXd residual =
            a * g - u * (sigma.asDiagonal() * (v.transpose() * g));
        if (residual.norm() > 1e-9 * sigma_max * g.norm()) {
            return false;
        }
    }
    return true;
}

}  // namespace

ThinSvd thin_svd(const Eigen::MatrixXd& a, double rank_tol) {
    require_finite(a, "thin_svd input");
    if (a.rows() < 1 || a.cols() < 1) {
        throw DimensionError("thin_svd requires a nonempty matrix");
    }

    Eigen::MatrixXd full_u;
    Eigen::MatrixXd full_v;
    Eigen::VectorXd sigma;
    {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        full_u = svd.matrixU();
        full_v = svd.matrixV();
        sigma = svd.singularValues();
    }
    if (!svd_factors_reproduce(a, full_u, sigma, full_v)) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        full_u = svd.matrixU();
        full_v = svd.matrixV();
        sigma = svd.singularValues();
    }

    const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
    Eigen::Index r = 0;
    while (r < sigma.size() && sigma(r) > rank_tol * sigma_max && sigma(r) > 0.0) {
        ++r;
    }

    ThinSvd out;
    out.left = full_u.leftCols(r);
    out.singular = sigma.head(r);
    out.right = full_v.leftCols(r);
    apply_sign_convention(out.left, out.right);
    return out;
}

TruncatedSvd truncate(const ThinSvd& svd, Eigen::Index r) {
    if (r < 1) {
        throw InvalidInputError("truncate: requested rank must be >= 1");
    }
    const Eigen::Index kept = std::min(r, svd.rank());
    TruncatedSvd out;
    out.left = svd.left.leftCols(kept);
    out.singular = svd.singular.head(kept);
    out.right = svd.right.leftCols(kept);
    out.requested_rank = r;
    out.shortfall = kept < r;
    return out;
}

Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, double tol) {
    if (a.rows() != y.size()) {
        throw DimensionError("min_norm_solve: row count of A must match length of y");
    }
    require_finite(y, "min_norm_solve rhs");
    const ThinSvd svd = thin_svd(a, tol);
    if (svd.rank() == 0) {
        return Eigen::VectorXd::Zero(a.cols());
    }
    const Eigen::VectorXd coeffs =
        svd.singular.cwiseInverse().asDiagonal() * (svd.left.transpose() * y);
    return svd.right * coeffs;
}

Eigen::MatrixXd projector(const Eigen::MatrixXd& u) {
    require_finite(u, "projector input");
    require_orthonormal(u, "projector input");
    if (u.cols() == 0) {
        return Eigen::MatrixXd::Zero(u.rows(), u.rows());
    }
    return u * u.transpose();
}

Eigen::VectorXd principal_angle_cosines(const Eigen::MatrixXd& u1, const Eigen::MatrixXd& u2) {
    require_finite(u1, "principal_angle_cosines input");
    require_finite(u2, "principal_angle_cosines input");
    if (u1.rows() != u2.rows()) {
        throw DimensionError("principal_angle_cosines: ambient dimensions differ");
    }
    require_orthonormal(u1, "principal_angle_cosines first argument");
    require_orthonormal(u2, "principal_angle_cosines second argument");
    if (u1.cols() == 0 || u2.cols() == 0) {
        return Eigen::VectorXd();
    }
    const Eigen::MatrixXd overlap = u2.transpose() * u1;
    Eigen::VectorXd cosines = singular_values(overlap);
    for (Eigen::Index i = 0; i < cosines.size(); ++i) {
        cosines(i) = std::min(1.0, std::max(0.0, cosines(i)));
    }
    return cosines;
}

Eigen::MatrixXd procrustes_rotation(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError("procrustes_rotation: shapes must match");
    }
    require_finite(a, "procrustes_rotation input");
    require_finite(b, "procrustes_rotation input");
    require_orthonormal(a, "procrustes_rotation first argument");
    require_orthonormal(b, "procrustes_rotation second argument");
    const Eigen::MatrixXd m = b.transpose() * a;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().transpose();
}

double condition_number(const Eigen::VectorXd& singular_values) {
    if (singular_values.size() == 0) {
        throw DegenerateSpectrumError("condition_number: empty spectrum");
    }
    require_finite(singular_values, "condition_number input");
    const double sigma_min = singular_values.minCoeff();
    const double sigma_max = singular_values.maxCoeff();
    if (sigma_min <= 0.0) {
        throw DegenerateSpectrumError("condition_number: sigma_min <= 0");
    }
    return sigma_max / sigma_min;
}

double cross_condition(double sigma_max_a, double sigma_min_b) {
    if (sigma_max_a <= 0.0 || sigma_min_b <= 0.0) {
        throw DegenerateSpectrumError("cross_condition: spectrum endpoints must be positive");
    }
    return sigma_max_a / sigma_min_b;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& a) {
    if (a.rows() == 0 || a.cols() == 0) {
        return Eigen::VectorXd();
    }
    require_finite(a, "singular_values input");
    const bool wide = a.cols() > a.rows();
    const Eigen::MatrixXd gram =
        wide ? Eigen::MatrixXd(a * a.transpose()) : Eigen::MatrixXd(a.transpose() * a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd evals = eig.eigenvalues();  // ascending
    Eigen::VectorXd out(evals.size());
    for (Eigen::Index i = 0; i < evals.size(); ++i) {
        out(i) = std::sqrt(std::max(0.0, evals(evals.size() - 1 - i)));
    }
    return out;
}

double operator_norm(const Eigen::MatrixXd& a) {
    if (a.rows() == 0 || a.cols() == 0) {
        return 0.0;
    }
    const Eigen::VectorXd sv = singular_values(a);
    return sv(0);
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& a) {
    require_finite(a, "orthonormalize input");
    if (a.rows() < a.cols()) {
        throw DimensionError("orthonormalize: more columns than rows");
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
    const Eigen::MatrixXd r =
        qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        if (r(j, j) < 0.0) {
            q.col(j) = -q.col(j);
        }
    }
    return q;
}

double orthonormality_defect(const Eigen::MatrixXd& u) {
    if (u.cols() == 0) {
        return 0.0;
    }
    const Eigen::MatrixXd gram = u.transpose() * u;
    return (gram - Eigen::MatrixXd::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
}

}  // namespace ccr
