#include "ccr/estimators.hpp"

#include <Eigen/Dense>

namespace ccr {

std::string estimator_kind_name(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::Naive2Sls: return "naive";
        case EstimatorKind::Pca2Sls: return "pca";
        case EstimatorKind::Whiten2Sls: return "whiten";
        case EstimatorKind::Cca2Sls: return "cca";
        case EstimatorKind::OracleTsls: return "oracle";
        case EstimatorKind::CustomCcr: return "custom";
    }
    throw InvalidInputError("unreachable estimator kind");
}

EstimatorKind estimator_kind_from_name(const std::string& name) {
    if (name == "naive") return EstimatorKind::Naive2Sls;
    if (name == "pca") return EstimatorKind::Pca2Sls;
    if (name == "whiten") return EstimatorKind::Whiten2Sls;
    if (name == "cca") return EstimatorKind::Cca2Sls;
    if (name == "oracle") return EstimatorKind::OracleTsls;
    if (name == "custom") return EstimatorKind::CustomCcr;
    throw ConfigError("unknown estimator '" + name + "'");
}

std::string EstimatorSpec::name() const {
    return label.empty() ? estimator_kind_name(kind) : label;
}

void EstimatorSpec::validate() const {
    if (kind != EstimatorKind::Naive2Sls && kind != EstimatorKind::OracleTsls) {
        if (k < 1) throw ConfigError("estimator k must be >= 1");
        if (ell < 1) throw ConfigError("estimator ell must be >= 1");
    }
    if (!(pinv_tol > 0.0)) throw ConfigError("estimator pinv_tol must be positive");
    if (kind == EstimatorKind::CustomCcr) {
        if (weights.left == WeightSpec::Left::Custom && (weights.left_values.size() == 0 ||
                                                         weights.left_values.minCoeff() <= 0.0)) {
            throw ConfigError("custom left weights must be nonempty and strictly positive");
        }
        if (weights.right == WeightSpec::Right::Custom &&
            (weights.right_values.size() == 0 || weights.right_values.minCoeff() <= 0.0)) {
            throw ConfigError("custom right weights must be nonempty and strictly positive");
        }
    }
}

namespace {

WeightSpec weights_for_kind(const EstimatorSpec& spec) {
    WeightSpec w;
    switch (spec.kind) {
        case EstimatorKind::Pca2Sls:
        case EstimatorKind::Naive2Sls:
        case EstimatorKind::OracleTsls:
            w.left = WeightSpec::Left::Identity;
            w.right = WeightSpec::Right::CovariateSpectrum;
            break;
        case EstimatorKind::Whiten2Sls:
            w.left = WeightSpec::Left::Identity;
            w.right = WeightSpec::Right::Identity;
            break;
        case EstimatorKind::Cca2Sls:
            w.left = WeightSpec::Left::InverseInstrumentSpectrum;
            w.right = WeightSpec::Right::Identity;
            break;
        case EstimatorKind::CustomCcr:
            w = spec.weights;
            break;
    }
    return w;
}

}  // namespace

Weights resolve_weights(const EstimatorSpec& spec, const TruncatedSvd& cov,
                        const TruncatedSvd& inst) {
    const WeightSpec ws = weights_for_kind(spec);
    Weights out;

    switch (ws.left) {
        case WeightSpec::Left::Identity:
            out.left = Eigen::VectorXd::Ones(inst.rank());
            break;
        case WeightSpec::Left::InverseInstrumentSpectrum: {
            if (inst.rank() == 0) {
                throw SingularWeightError("instrument spectrum is empty; cannot invert");
            }
            const double floor = spec.pinv_tol * inst.singular(0);
            if (inst.singular.minCoeff() <= floor) {
                throw SingularWeightError(
                    "instrument spectrum has entries at or below pinv_tol * sigma_max");
            }
            out.left = inst.singular.cwiseInverse();
            break;
        }
        case WeightSpec::Left::Custom:
            if (ws.left_values.size() != inst.rank()) {
                throw DimensionError("custom left weights length must equal instrument rank");
            }
            if (ws.left_values.minCoeff() <= 0.0) {
                throw InvalidInputError("custom left weights must be strictly positive");
            }
            out.left = ws.left_values;
            break;
    }

    switch (ws.right) {
        case WeightSpec::Right::Identity:
            out.right = Eigen::VectorXd::Ones(cov.rank());
            break;
        case WeightSpec::Right::CovariateSpectrum:
            out.right = cov.singular;
            break;
        case WeightSpec::Right::Custom:
            if (ws.right_values.size() != cov.rank()) {
                throw DimensionError("custom right weights length must equal covariate rank");
            }
            if (ws.right_values.minCoeff() <= 0.0) {
                throw InvalidInputError("custom right weights must be strictly positive");
            }
            out.right = ws.right_values;
            break;
    }

    return out;
}

FirstStage build_first_stage(const ThinSvd& x_svd, const ThinSvd& w_svd,
                             const EstimatorSpec& spec) {
    spec.validate();
    const bool full_rank = spec.kind == EstimatorKind::Naive2Sls;
    const Eigen::Index want_k = full_rank ? x_svd.rank() : spec.k;
    const Eigen::Index want_ell = full_rank ? w_svd.rank() : spec.ell;

    FirstStage fs;
    fs.cov = truncate(x_svd, std::max<Eigen::Index>(want_k, 1));
    fs.inst = truncate(w_svd, std::max<Eigen::Index>(want_ell, 1));
    fs.rank_shortfall = fs.cov.shortfall || fs.inst.shortfall;

    fs.overlap = fs.inst.left.transpose() * fs.cov.left;
    const Weights weights = resolve_weights(spec, fs.cov, fs.inst);
    fs.left_weight = weights.left;
    fs.right_weight = weights.right;
    fs.delta = fs.left_weight.asDiagonal() * fs.overlap * fs.right_weight.asDiagonal();

    // The overlap spectrum is bounded by 1, so an absolute cutoff separates
    // genuinely orthogonal designs from roundoff in the cross products.
    constexpr double zero_overlap_tol = 1e-12;
    const bool zero_design = fs.delta.rows() == 0 || fs.delta.cols() == 0 ||
                             operator_norm(fs.overlap) <= zero_overlap_tol;
    if (zero_design) {
        fs.delta_svd.left = Eigen::MatrixXd(fs.delta.rows(), 0);
        fs.delta_svd.singular = Eigen::VectorXd(0);
        fs.delta_svd.right = Eigen::MatrixXd(fs.delta.cols(), 0);
    } else {
        fs.delta_svd = thin_svd(fs.delta);
    }
    return fs;
}

FirstStage build_first_stage(const Eigen::MatrixXd& z_x, const Eigen::MatrixXd& z_w,
                             const EstimatorSpec& spec) {
    if (z_x.rows() != z_w.rows()) {
        throw DimensionError("build_first_stage: row counts of Z_X and Z_W differ");
    }
    return build_first_stage(thin_svd(z_x), thin_svd(z_w), spec);
}

CcrFit ccr_fit(const Eigen::VectorXd& y, const FirstStage& fs, double pinv_tol) {
    if (y.size() != fs.inst.left.rows()) {
        throw DimensionError("ccr_fit: outcome length does not match the design");
    }
    const Eigen::Index p = fs.cov.right.rows();

    CcrFit out;
    if (fs.rank() == 0) {
        out.beta = Eigen::VectorXd::Zero(p);
        out.zero_design = true;
        return out;
    }

    const double sigma_max = fs.delta_svd.singular(0);
    Eigen::Index used = 0;
    while (used < fs.delta_svd.rank() && fs.delta_svd.singular(used) > pinv_tol * sigma_max) {
        ++used;
    }
    if (used == 0) {
        out.beta = Eigen::VectorXd::Zero(p);
        out.zero_design = true;
        return out;
    }

    // beta = V_k V_delta Sigma_delta^{-1} U_delta^T (inst.left^T y)
    const Eigen::VectorXd projected = fs.inst.left.transpose() * y;
    const Eigen::VectorXd coeffs =
        fs.delta_svd.singular.head(used).cwiseInverse().asDiagonal() *
        (fs.delta_svd.left.leftCols(used).transpose() * projected);
    out.beta = fs.cov.right * (fs.delta_svd.right.leftCols(used) * coeffs);
    return out;
}

Eigen::VectorXd oracle_2sls(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                            const Eigen::MatrixXd& w) {
    if (x.rows() != y.size() || w.rows() != y.size()) {
        throw DimensionError("oracle_2sls: row counts must match the outcome length");
    }
    const ThinSvd w_svd = thin_svd(w);
    const Eigen::MatrixXd projected = w_svd.left * (w_svd.left.transpose() * x);
    return min_norm_solve(projected, y);
}

Eigen::VectorXd naive_2sls(const Eigen::VectorXd& y, const Eigen::MatrixXd& z_x,
                           const Eigen::MatrixXd& z_w, double pinv_tol) {
    if (z_x.rows() != y.size() || z_w.rows() != y.size()) {
        throw DimensionError("naive_2sls: row counts must match the outcome length");
    }
    const ThinSvd w_svd = thin_svd(z_w, pinv_tol);
    const Eigen::MatrixXd projected = w_svd.left * (w_svd.left.transpose() * z_x);
    return min_norm_solve(projected, y, pinv_tol);
}

CcaCheck cca_consistency_check(const FirstStage& fs, double pinv_tol) {
    if (fs.inst.rank() == 0 || fs.cov.rank() == 0) {
        throw InvalidInputError("cca_consistency_check requires nonempty factors");
    }
    const double floor = pinv_tol * fs.inst.singular(0);
    if (fs.inst.singular.minCoeff() <= floor) {
        throw SingularWeightError("instrument spectrum not invertible at pinv_tol");
    }

    const Eigen::Index k = fs.cov.rank();

    // Route (a): project the rank-k truncation of the whitened cross-moment
    // onto the truncated instrument design.
    const Eigen::MatrixXd w_hat =
        fs.inst.left * fs.inst.singular.asDiagonal() * fs.inst.right.transpose();
    const Eigen::MatrixXd cross_moment =
        fs.inst.right * fs.overlap * fs.cov.right.transpose();
    const ThinSvd cross_svd = thin_svd(cross_moment);
    const TruncatedSvd cross_k = truncate(cross_svd, k);
    const Eigen::MatrixXd truncated = cross_k.reconstruct();

    const Eigen::MatrixXd gram = w_hat.transpose() * w_hat;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const Eigen::VectorXd evals = eig.eigenvalues();
    const double emax = evals.size() > 0 ? evals.maxCoeff() : 0.0;
    Eigen::VectorXd inv_evals = Eigen::VectorXd::Zero(evals.size());
    for (Eigen::Index i = 0; i < evals.size(); ++i) {
        if (evals(i) > pinv_tol * emax && evals(i) > 0.0) {
            inv_evals(i) = 1.0 / evals(i);
        }
    }
    const Eigen::MatrixXd gram_pinv =
        eig.eigenvectors() * inv_evals.asDiagonal() * eig.eigenvectors().transpose();
    const Eigen::MatrixXd route_a = w_hat * (gram_pinv * truncated);

    // Route (b): factored inverse-spectrum formula.
    const Eigen::MatrixXd route_b = fs.inst.left * fs.inst.singular.cwiseInverse().asDiagonal() *
                                    fs.overlap * fs.cov.right.transpose();

    CcaCheck out;
    out.deviation = (route_a - route_b).cwiseAbs().maxCoeff();
    out.truncation_mismatch = cross_k.shortfall;
    return out;
}

}  // namespace ccr
