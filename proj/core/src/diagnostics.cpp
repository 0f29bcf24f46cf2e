#include "ccr/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace ccr {

namespace {

constexpr double kBoundaryTol = 1e-9;

double encode_or_inf(double v, nlohmann::json& j, const char* key) {
    if (std::isinf(v)) {
        j[key] = "inf";
    } else {
        j[key] = v;
    }
    return v;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        arr.push_back(v(i));
    }
    return arr;
}

}  // namespace

NoiseToSignal noise_to_signal(const GroundTruth& truth) {
    const ThinSvd x_svd = thin_svd(truth.x);
    const ThinSvd w_svd = thin_svd(truth.w);
    if (x_svd.rank() == 0 || w_svd.rank() == 0) {
        throw DegenerateSpectrumError("noise_to_signal: signal matrix has rank zero");
    }
    const double sx = x_svd.singular(x_svd.rank() - 1);
    const double sw = w_svd.singular(w_svd.rank() - 1);
    NoiseToSignal out;
    const double hx = operator_norm(truth.h_x);
    const double hw = operator_norm(truth.h_w);
    out.nsr_x = (hx * hx) / (sx * sx);
    out.nsr_w = (hw * hw) / (sw * sw);
    return out;
}

Eigen::VectorXd min_norm_target(const GroundTruth& truth) {
    const ThinSvd x_svd = thin_svd(truth.x);
    return x_svd.right * (x_svd.right.transpose() * truth.beta);
}

KeyQuantities key_quantities(const GroundTruth& truth, const FirstStage& fs,
                             double sigma_bar_sq) {
    if (truth.x.size() == 0 || truth.w.size() == 0) {
        throw TruthRequiredError("key_quantities requires ground truth");
    }
    const ThinSvd x_svd = thin_svd(truth.x);
    const ThinSvd w_svd = thin_svd(truth.w);
    if (x_svd.rank() == 0 || w_svd.rank() == 0) {
        throw DegenerateSpectrumError("key_quantities: signal matrix has rank zero");
    }

    KeyQuantities kq;
    kq.sigma_max_x = x_svd.singular(0);
    kq.sigma_min_x = x_svd.singular(x_svd.rank() - 1);
    kq.sigma_max_w = w_svd.singular(0);
    kq.sigma_min_w = w_svd.singular(w_svd.rank() - 1);
    kq.kappa_x = condition_number(x_svd.singular);
    kq.kappa_w = condition_number(w_svd.singular);
    kq.kappa_xw = cross_condition(kq.sigma_max_x, kq.sigma_min_w);

    const double hx = operator_norm(truth.h_x);
    const double hw = operator_norm(truth.h_w);
    kq.nsr_x = (hx * hx) / (kq.sigma_min_x * kq.sigma_min_x);
    kq.nsr_w = (hw * hw) / (kq.sigma_min_w * kq.sigma_min_w);

    kq.overlap_cosines_true = principal_angle_cosines(x_svd.left, w_svd.left);
    kq.overlap_cosines_empirical = singular_values(fs.overlap);

    kq.r = fs.rank();
    const Eigen::MatrixXd delta_star =
        (w_svd.left.transpose() * x_svd.left) * x_svd.singular.asDiagonal();
    kq.r_star = thin_svd(delta_star).rank();
    kq.sigma_bar_sq = sigma_bar_sq;

    // Restricted eigenvalue constants of the full noisy overlap: the row
    // truncations of its singular-vector factors at the fitted (ell, k).
    const ThinSvd zx_svd = thin_svd(truth.x + truth.h_x);
    const ThinSvd zw_svd = thin_svd(truth.w + truth.h_w);
    const Eigen::MatrixXd m_full = zw_svd.left.transpose() * zx_svd.left;
    const ThinSvd m_svd = thin_svd(m_full);
    const Eigen::Index s = m_svd.rank();
    const Eigen::Index ell = std::min(fs.inst.rank(), m_svd.left.rows());
    const Eigen::Index k = std::min(fs.cov.rank(), m_svd.right.rows());
    if (s > 0 && s <= ell) {
        const Eigen::MatrixXd q_ell = m_svd.left.topRows(ell);
        const double smin = singular_values(q_ell).minCoeff();
        kq.c_ell = smin * smin;
    } else {
        kq.c_ell = 0.0;  // row truncation cannot be full column rank
    }
    if (s > 0 && s <= k) {
        const Eigen::MatrixXd r_k = m_svd.right.topRows(k);
        const double smin = singular_values(r_k).minCoeff();
        kq.c_k = smin * smin;
    } else {
        kq.c_k = 0.0;
    }
    return kq;
}

DecompositionReport error_decomposition(const Eigen::VectorXd& beta_hat,
                                        const GroundTruth& truth, const FirstStage& fs) {
    if (truth.x.size() == 0) {
        throw TruthRequiredError("error_decomposition requires ground truth");
    }
    return error_decomposition(beta_hat, truth, fs, thin_svd(truth.x), thin_svd(truth.w));
}

DecompositionReport error_decomposition(const Eigen::VectorXd& beta_hat,
                                        const GroundTruth& truth, const FirstStage& fs,
                                        const ThinSvd& x_svd, const ThinSvd& w_svd) {
    if (beta_hat.size() != truth.beta.size()) {
        throw DimensionError("error_decomposition: coefficient lengths differ");
    }

    const Eigen::VectorXd target = x_svd.right * (x_svd.right.transpose() * truth.beta);
    const Eigen::VectorXd diff = beta_hat - target;

    DecompositionReport rep;
    rep.total = diff.squaredNorm();

    // Row term: || proj_delta V_k^T diff ||.
    const Eigen::VectorXd vk_diff = fs.cov.right.transpose() * diff;
    rep.term_row = (fs.delta_svd.right.transpose() * vk_diff).squaredNorm();

    // Null term: difference of the oracle and fitted null projections of the target.
    const Eigen::MatrixXd delta_star =
        (w_svd.left.transpose() * x_svd.left) * x_svd.singular.asDiagonal();
    const ThinSvd ds_svd = thin_svd(delta_star);

    const Eigen::VectorXd t_star = x_svd.right.transpose() * target;
    const Eigen::VectorXd null_star_vec =
        x_svd.right * (t_star - ds_svd.right * (ds_svd.right.transpose() * t_star));
    const Eigen::VectorXd t_fs = fs.cov.right.transpose() * target;
    const Eigen::VectorXd null_fs_vec =
        fs.cov.right *
        (t_fs - fs.delta_svd.right * (fs.delta_svd.right.transpose() * t_fs));
    rep.term_null = (null_star_vec - null_fs_vec).squaredNorm();

    // Perp term: difference of the two span rejections of the target.
    const Eigen::VectorXd perp_star_vec = target - x_svd.right * t_star;
    const Eigen::VectorXd perp_fs_vec = target - fs.cov.right * t_fs;
    rep.term_perp = (perp_star_vec - perp_fs_vec).squaredNorm();

    rep.residual = std::abs(rep.total - (rep.term_row + rep.term_null + rep.term_perp));
    return rep;
}

ProjectorSuite projector_suite(const FirstStage& fs, const GroundTruth* truth) {
    const Eigen::Index p = fs.cov.right.rows();
    ProjectorSuite suite;

    const Eigen::MatrixXd proj_delta = fs.delta_svd.right * fs.delta_svd.right.transpose();
    const Eigen::MatrixXd vk = fs.cov.right;
    suite.row = vk * proj_delta * vk.transpose();
    suite.null_space =
        vk * (Eigen::MatrixXd::Identity(vk.cols(), vk.cols()) - proj_delta) * vk.transpose();
    suite.perp = Eigen::MatrixXd::Identity(p, p) - vk * vk.transpose();

    if (truth != nullptr) {
        const ThinSvd x_svd = thin_svd(truth->x);
        const ThinSvd w_svd = thin_svd(truth->w);
        const Eigen::MatrixXd delta_star =
            (w_svd.left.transpose() * x_svd.left) * x_svd.singular.asDiagonal();
        const ThinSvd ds_svd = thin_svd(delta_star);
        const Eigen::MatrixXd proj_star = ds_svd.right * ds_svd.right.transpose();
        const Eigen::MatrixXd vs = x_svd.right;
        suite.null_star =
            vs * (Eigen::MatrixXd::Identity(vs.cols(), vs.cols()) - proj_star) * vs.transpose();
        suite.perp_star = Eigen::MatrixXd::Identity(p, p) - vs * vs.transpose();
    }
    return suite;
}

WedinReport wedin_check(const GroundTruth& truth, const FirstStage& fs) {
    if (truth.x.size() == 0) {
        throw TruthRequiredError("wedin_check requires ground truth");
    }
    const ThinSvd x_svd = thin_svd(truth.x);
    const ThinSvd w_svd = thin_svd(truth.w);
    if (x_svd.rank() == 0 || w_svd.rank() == 0) {
        throw DegenerateSpectrumError("wedin_check: signal matrix has rank zero");
    }

    WedinReport rep;
    const double hx = operator_norm(truth.h_x);
    const double hw = operator_norm(truth.h_w);
    const double sx = x_svd.singular(x_svd.rank() - 1);
    const double sw = w_svd.singular(w_svd.rank() - 1);
    rep.rhs_v = std::numbers::sqrt2 * hx / sx;
    rep.rhs_u = std::numbers::sqrt2 * hw / sw;
    rep.assumption_noise_x = hx <= sx;
    rep.assumption_noise_w = hw <= sw;

    const Eigen::Index cv = std::min(x_svd.rank(), fs.cov.rank());
    const Eigen::Index cu = std::min(w_svd.rank(), fs.inst.rank());
    rep.shape_truncated = cv != x_svd.rank() || cv != fs.cov.rank() ||
                          cu != w_svd.rank() || cu != fs.inst.rank();

    const Eigen::MatrixXd v_star = x_svd.right.leftCols(cv);
    const Eigen::MatrixXd v_k = fs.cov.right.leftCols(cv);
    const Eigen::MatrixXd q = procrustes_rotation(v_star, v_k);
    rep.lhs_v = operator_norm(v_star - v_k * q);

    const Eigen::MatrixXd u_star = w_svd.left.leftCols(cu);
    const Eigen::MatrixXd u_ell = fs.inst.left.leftCols(cu);
    const Eigen::MatrixXd rot = procrustes_rotation(u_star, u_ell);
    rep.lhs_u = operator_norm(u_star - u_ell * rot);

    // Additive slack absorbs alignment roundoff in the clean-data limit,
    // where both sides are zero in exact arithmetic.
    constexpr double slack = 1e-12;
    rep.holds_v = rep.lhs_v <= rep.rhs_v + slack;
    rep.holds_u = rep.lhs_u <= rep.rhs_u + slack;
    rep.holds = rep.holds_v && rep.holds_u;
    return rep;
}

std::string error_regime_name(ErrorRegime regime) {
    switch (regime) {
        case ErrorRegime::BiasDominated: return "bias_dominated";
        case ErrorRegime::VarianceDominated: return "variance_dominated";
        case ErrorRegime::Indeterminate: return "indeterminate";
    }
    throw InvalidInputError("unreachable regime");
}

ErrorRegime classify_regime(double nsr_total, double kappa_xw, double sigma_bar_sq,
                            Eigen::Index r, double c_hi, double c_lo) {
    if (!(nsr_total >= 0.0) || !(kappa_xw > 0.0) || !(sigma_bar_sq >= 0.0) || r < 0) {
        throw InvalidInputError("classify_regime: inputs must be nonnegative");
    }
    const double kappa_sq = kappa_xw * kappa_xw;
    const double t_hi = c_hi * sigma_bar_sq * static_cast<double>(r) / kappa_sq;
    const double t_lo = t_hi - c_lo / kappa_sq;
    if (nsr_total >= t_hi) return ErrorRegime::BiasDominated;
    if (nsr_total <= t_lo) return ErrorRegime::VarianceDominated;
    return ErrorRegime::Indeterminate;
}

std::string recommendation_name(Recommendation rec) {
    switch (rec) {
        case Recommendation::Cca: return "cca";
        case Recommendation::Whiten: return "whiten";
        case Recommendation::Pca: return "pca";
        case Recommendation::Boundary: return "boundary";
    }
    throw InvalidInputError("unreachable recommendation");
}

Recommendation recommend_estimator(ErrorRegime regime, double sigma_min_x,
                                   double sigma_max_w, double kappa_w) {
    if (regime == ErrorRegime::Indeterminate) {
        return Recommendation::Boundary;
    }
    const double gate =
        regime == ErrorRegime::VarianceDominated ? sigma_max_w : kappa_w;
    if (!(gate > 0.0) || !(sigma_min_x > 0.0)) {
        throw InvalidInputError("recommend_estimator: spectrum inputs must be positive");
    }

    const auto side = [](double v) -> int {
        if (std::abs(v - 1.0) <= kBoundaryTol) return 0;
        return v < 1.0 ? -1 : 1;
    };
    const int sg = side(gate);
    const int ss = side(sigma_min_x);
    const int sp = side(gate * sigma_min_x);

    if (sg < 0 && sp < 0) return Recommendation::Cca;
    if (ss > 0 && sp > 0) return Recommendation::Pca;
    if (sg > 0 && ss < 0) return Recommendation::Whiten;
    return Recommendation::Boundary;
}

LowerBound minimax_lower_bound(double sigma_eps, double sigma_x_noise, Eigen::Index r_star,
                               double sigma_min_w, double sigma_max_overlap) {
    if (!(sigma_eps > 0.0)) throw InvalidInputError("minimax_lower_bound: sigma_eps must be > 0");
    if (r_star < 1) throw InvalidInputError("minimax_lower_bound: r_star must be >= 1");
    if (!(sigma_min_w > 0.0)) {
        throw InvalidInputError("minimax_lower_bound: sigma_min_w must be > 0");
    }
    if (!(sigma_max_overlap > 0.0) || sigma_max_overlap > 1.0) {
        throw InvalidInputError("minimax_lower_bound: sigma_max_overlap must lie in (0, 1]");
    }
    if (sigma_x_noise < 0.0) {
        throw InvalidInputError("minimax_lower_bound: sigma_x_noise must be >= 0");
    }

    const double r = static_cast<double>(r_star);
    const double overlap_sq = sigma_max_overlap * sigma_max_overlap;
    const double w_sq = sigma_min_w * sigma_min_w;
    const double numerator = sigma_eps * sigma_eps * r * w_sq;
    const double denom = overlap_sq - r * sigma_x_noise * sigma_x_noise * w_sq / 8.0;

    LowerBound out;
    out.remark_low_rank = denom > 0.0;
    const double term2 = numerator / overlap_sq;
    if (denom > 0.0) {
        out.value = std::max(numerator / denom, term2);
    } else {
        out.value = std::numeric_limits<double>::infinity();
    }
    return out;
}

nlohmann::json key_quantities_to_json(const KeyQuantities& kq) {
    nlohmann::json j;
    encode_or_inf(kq.nsr_x, j, "nsr_x");
    encode_or_inf(kq.nsr_w, j, "nsr_w");
    encode_or_inf(kq.kappa_x, j, "kappa_x");
    encode_or_inf(kq.kappa_w, j, "kappa_w");
    encode_or_inf(kq.kappa_xw, j, "kappa_xw");
    j["sigma_min_x"] = kq.sigma_min_x;
    j["sigma_max_x"] = kq.sigma_max_x;
    j["sigma_min_w"] = kq.sigma_min_w;
    j["sigma_max_w"] = kq.sigma_max_w;
    j["overlap_cosines_true"] = vector_to_json(kq.overlap_cosines_true);
    j["overlap_cosines_empirical"] = vector_to_json(kq.overlap_cosines_empirical);
    j["r"] = kq.r;
    j["r_star"] = kq.r_star;
    j["sigma_bar_sq"] = kq.sigma_bar_sq;
    j["c_ell"] = kq.c_ell;
    j["c_k"] = kq.c_k;
    return j;
}

nlohmann::json decomposition_to_json(const DecompositionReport& rep) {
    return nlohmann::json{
        {"term_row", rep.term_row}, {"term_null", rep.term_null},
        {"term_perp", rep.term_perp}, {"total", rep.total},
        {"residual", rep.residual},
    };
}

nlohmann::json wedin_to_json(const WedinReport& rep) {
    return nlohmann::json{
        {"lhs_v", rep.lhs_v},
        {"rhs_v", rep.rhs_v},
        {"lhs_u", rep.lhs_u},
        {"rhs_u", rep.rhs_u},
        {"holds_v", rep.holds_v},
        {"holds_u", rep.holds_u},
        {"holds", rep.holds},
        {"assumption_noise_x", rep.assumption_noise_x},
        {"assumption_noise_w", rep.assumption_noise_w},
        {"shape_truncated", rep.shape_truncated},
    };
}

}  // namespace ccr
