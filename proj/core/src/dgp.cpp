#include "ccr/dgp.hpp"

#include <algorithm>
#include <cmath>

#include "ccr/speclin.hpp"

namespace ccr {

std::string dim_regime_name(DimRegime regime) {
    return regime == DimRegime::Moderate ? "moderate" : "high";
}

DimRegime dim_regime_from_name(const std::string& name) {
    if (name == "moderate") return DimRegime::Moderate;
    if (name == "high") return DimRegime::High;
    throw ConfigError("unknown regime '" + name + "' (expected 'moderate' or 'high')");
}

void DgpConfig::validate() const {
    if (n < 1) throw ConfigError("dgp.n must be positive");
    if (k < 1) throw ConfigError("dgp.k must be >= 1");
    if (ell < k) throw ConfigError("dgp.ell must be >= dgp.k");
    if (delta < 0.0 || delta > 1.0) throw ConfigError("dgp.delta must lie in [0, 1]");
    if (rho < -1.0 || rho > 1.0) throw ConfigError("dgp.rho must lie in [-1, 1]");
    if (sigma_eps < 0.0) throw ConfigError("dgp.sigma_eps must be nonnegative");
    if (c1 < 0.0) throw ConfigError("dgp.c1 must be nonnegative");
    if (!(std::isfinite(alpha) && std::isfinite(delta) && std::isfinite(rho) &&
          std::isfinite(sigma_eps) && std::isfinite(c1) && std::isfinite(gamma_scale))) {
        throw ConfigError("dgp parameters must be finite");
    }
}

void Dataset::validate() const {
    if (!y.allFinite() || !z_x.allFinite() || !z_w.allFinite()) {
        throw NonFiniteError("dataset contains NaN or Inf");
    }
    if (z_x.rows() != y.size() || z_w.rows() != y.size()) {
        throw DimensionError("dataset row counts disagree across y, z_x, z_w");
    }
    if (truth) {
        if (truth->x.rows() != y.size() || truth->w.rows() != y.size() ||
            truth->x.cols() != z_x.cols() || truth->w.cols() != z_w.cols() ||
            truth->beta.size() != z_x.cols() || truth->eps.size() != y.size()) {
            throw DimensionError("ground truth dimensions disagree with observed data");
        }
    }
}

Dims dims_for_regime(Eigen::Index n, DimRegime regime) {
    Dims dims;
    if (regime == DimRegime::Moderate) {
        dims.p = n / 2;
        dims.p_w = n / 3;
    } else {
        dims.p = std::min<Eigen::Index>(n - 100, 5000);
        dims.p_w = std::min<Eigen::Index>(n - 200, 5000);
    }
    if (dims.p <= 0 || dims.p_w <= 0) {
        throw InvalidDimsError("dims_for_regime: n = " + std::to_string(n) +
                               " gives empty design in regime " + dim_regime_name(regime));
    }
    return dims;
}

RngKey dataset_key(const DgpConfig& config, std::uint64_t rep_index) {
    return RngKey(config.base_seed)
        .with("rep")
        .with(dim_regime_name(config.regime))
        .with(static_cast<std::uint64_t>(config.n))
        .with(config.delta)
        .with(rep_index);
}

RngKey block_key(const DgpConfig& config) {
    return RngKey(config.base_seed)
        .with("block")
        .with(dim_regime_name(config.regime))
        .with(static_cast<std::uint64_t>(config.n))
        .with(config.delta);
}

namespace {

Eigen::VectorXd power_law_spectrum(Eigen::Index count, double alpha) {
    Eigen::VectorXd sv(count);
    for (Eigen::Index i = 0; i < count; ++i) {
        sv(i) = std::pow(static_cast<double>(i + 2), -alpha);
    }
    return sv;
}

}  // namespace

Signal generate_signal(const DgpConfig& config, const RngKey& key) {
    config.validate();
    const Dims dims = dims_for_regime(config.n, config.regime);
    const Eigen::Index n = config.n;
    const Eigen::Index k = config.k;
    const Eigen::Index ell = config.ell;
    if (k > std::min(n, dims.p) || ell > std::min(n, dims.p_w)) {
        throw DimensionError("signal ranks exceed design dimensions");
    }
    if (k + ell > n) {
        throw DimensionError("orthogonal complement too small: need n >= k + ell");
    }

    Rng rng_ux = key.with("signal.u_x").stream();
    Rng rng_vx = key.with("signal.v_x").stream();
    Rng rng_vw = key.with("signal.v_w").stream();
    Rng rng_perp = key.with("signal.u_perp").stream();

    Signal sig;
    sig.u_x = orthonormalize(rng_ux.gaussian_matrix(n, k));
    const Eigen::MatrixXd v_x = orthonormalize(rng_vx.gaussian_matrix(dims.p, k));
    const Eigen::MatrixXd v_w = orthonormalize(rng_vw.gaussian_matrix(dims.p_w, ell));

    // Basis of (part of) the orthogonal complement of span(u_x).
    Eigen::MatrixXd g = rng_perp.gaussian_matrix(n, ell);
    g -= sig.u_x * (sig.u_x.transpose() * g);
    const Eigen::MatrixXd u_perp = orthonormalize(g);

    const Eigen::Index r = std::min(k, ell);
    const double mix = std::sqrt(std::max(0.0, 1.0 - config.delta * config.delta));
    sig.u_w_raw.resize(n, ell);
    sig.u_w_raw.leftCols(r) =
        config.delta * sig.u_x.leftCols(r) + mix * u_perp.leftCols(r);
    if (ell > r) {
        sig.u_w_raw.rightCols(ell - r) = u_perp.rightCols(ell - r);
    }
    sig.u_w = orthonormalize(sig.u_w_raw);

    sig.x = sig.u_x * power_law_spectrum(k, config.alpha).asDiagonal() * v_x.transpose();
    sig.w = sig.u_w * power_law_spectrum(ell, config.alpha).asDiagonal() * v_w.transpose();
    return sig;
}

NoiseScales noise_scales(const DgpConfig& config, Eigen::Index p, Eigen::Index p_w) {
    if (p < 1 || p_w < 1) {
        throw InvalidDimsError("noise_scales: dimensions must be positive");
    }
    NoiseScales s;
    s.sigma_hx = config.c1 / (std::pow(static_cast<double>(config.k + 1), config.alpha) *
                              std::sqrt(static_cast<double>(p)));
    s.sigma_hw = config.c1 / (std::pow(static_cast<double>(config.ell + 1), config.alpha) *
                              std::sqrt(static_cast<double>(p_w)));
    return s;
}

NoisyPair generate_noise(const DgpConfig& config, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& w, const RngKey& key) {
    const Eigen::Index n = x.rows();
    if (w.rows() != n) {
        throw DimensionError("generate_noise: x and w row counts differ");
    }
    const Eigen::Index p = x.cols();
    const Eigen::Index p_w = w.cols();
    const Eigen::Index p_common = std::min(p, p_w);

    const NoiseScales scales = noise_scales(config, p, p_w);
    const double sigma_hx = scales.sigma_hx;
    const double sigma_hw = scales.sigma_hw;
    const double cross = config.rho;
    const double indep = std::sqrt(std::max(0.0, 1.0 - cross * cross));

    Eigen::MatrixXd h_x(n, p);
    Eigen::MatrixXd h_w(n, p_w);

    Rng rng_common = key.with("noise.common").stream();
    for (Eigen::Index j = 0; j < p_common; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double a = rng_common.next_gaussian();
            const double b = rng_common.next_gaussian();
            h_x(i, j) = sigma_hx * a;
            h_w(i, j) = sigma_hw * (cross * a + indep * b);
        }
    }
    if (p > p_common) {
        Rng rng_x = key.with("noise.x_rest").stream();
        for (Eigen::Index j = p_common; j < p; ++j) {
            for (Eigen::Index i = 0; i < n; ++i) {
                h_x(i, j) = sigma_hx * rng_x.next_gaussian();
            }
        }
    }
    if (p_w > p_common) {
        Rng rng_w = key.with("noise.w_rest").stream();
        for (Eigen::Index j = p_common; j < p_w; ++j) {
            for (Eigen::Index i = 0; i < n; ++i) {
                h_w(i, j) = sigma_hw * rng_w.next_gaussian();
            }
        }
    }

    NoisyPair out;
    out.z_x = x + h_x;
    out.z_w = w + h_w;
    return out;
}

Outcome generate_outcome(const DgpConfig& config, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& w_basis, const Eigen::VectorXd& beta,
                         const Eigen::VectorXd& gamma, const RngKey& key) {
    const Eigen::Index n = x.rows();
    if (beta.size() != x.cols() || gamma.size() != x.cols()) {
        throw DimensionError("generate_outcome: coefficient lengths must equal p");
    }
    if (w_basis.rows() != n) {
        throw DimensionError("generate_outcome: instrument basis row count mismatch");
    }

    Rng rng_eta = key.with("outcome.eta").stream();
    const Eigen::VectorXd eta = config.sigma_eps * rng_eta.gaussian_vector(n);
    const Eigen::VectorXd eps0 = x * gamma + eta;
    Eigen::VectorXd eps = eps0 - w_basis * (w_basis.transpose() * eps0);

    // Rescale to sample variance sigma_eps^2 (denominator n).
    const double mean = eps.mean();
    const double var = (eps.array() - mean).square().sum() / static_cast<double>(n);
    if (var <= 0.0) {
        if (config.sigma_eps == 0.0) {
            eps.setZero();
        } else {
            throw DegenerateDisturbanceError(
                "disturbance vanished after projection; cannot rescale");
        }
    } else {
        eps *= config.sigma_eps / std::sqrt(var);
    }

    Outcome out;
    out.eps = eps;
    out.y = x * beta + eps;
    return out;
}

Coefficients make_coefficients(const DgpConfig& config) {
    config.validate();
    const Dims dims = dims_for_regime(config.n, config.regime);
    const RngKey block = block_key(config);

    Rng rng_beta = block.with("coeff.beta").stream();
    Rng rng_gamma = block.with("coeff.gamma").stream();

    Coefficients out;
    out.beta = rng_beta.gaussian_vector(dims.p);
    out.beta /= out.beta.norm();
    out.gamma = rng_gamma.gaussian_vector(dims.p);
    out.gamma *= config.gamma_scale / out.gamma.norm();
    return out;
}

Dataset generate_dataset(const DgpConfig& config, std::uint64_t rep_index) {
    config.validate();
    const RngKey key = dataset_key(config, rep_index);

    const Signal sig = generate_signal(config, key);
    const NoisyPair noisy = generate_noise(config, sig.x, sig.w, key);
    const Coefficients coeffs = make_coefficients(config);
    const Outcome outcome =
        generate_outcome(config, sig.x, sig.u_w, coeffs.beta, coeffs.gamma, key);

    Dataset ds;
    ds.y = outcome.y;
    ds.z_x = noisy.z_x;
    ds.z_w = noisy.z_w;
    GroundTruth truth;
    truth.x = sig.x;
    truth.w = sig.w;
    truth.beta = coeffs.beta;
    truth.eps = outcome.eps;
    truth.h_x = ds.z_x - sig.x;
    truth.h_w = ds.z_w - sig.w;
    ds.truth = std::move(truth);
    ds.config = config;
    ds.validate();
    return ds;
}

}  // namespace ccr
