#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "ccr/errors.hpp"

namespace ccr {

inline constexpr std::uint64_t kDefaultBaseSeed = 20251201;

/// Dimensional regime of the synthetic designs.
enum class DimRegime { Moderate, High };

std::string dim_regime_name(DimRegime regime);
DimRegime dim_regime_from_name(const std::string& name);

// Parameters of the synthetic data generating process. Defaults follow
// the reference design: (k, ell) = (8, 10), alpha = 1.5, rho = 0.9,
// sigma_eps = 1.25, c1 = 2.0.
struct DgpConfig {
    Eigen::Index n = 300;
    DimRegime regime = DimRegime::Moderate;
    Eigen::Index k = 8;
    Eigen::Index ell = 10;
    double alpha = 1.5;        // spectral decay exponent
    double delta = 0.65;       // alignment strength in [0, 1]
    double rho = 0.9;          // noise cross-correlation in [-1, 1]
    double sigma_eps = 1.25;   // disturbance std
    double c1 = 2.0;           // noise scale constant
    double gamma_scale = 1.0;  // endogeneity coefficient scale
    std::uint64_t base_seed = kDefaultBaseSeed;

    void validate() const;
};

struct Dims {
    Eigen::Index p = 0;
    Eigen::Index p_w = 0;
};

// True signal and disturbance behind a dataset. The perturbations are
// defined as h_x = z_x - x and h_w = z_w - w, so the additive identity
// holds exactly by construction.
struct GroundTruth {
    Eigen::MatrixXd x;     // n x p, rank k
    Eigen::MatrixXd w;     // n x p_w, rank ell
    Eigen::VectorXd beta;  // length p, unit norm as drawn
    Eigen::VectorXd eps;   // length n, orthogonal to col(w)
    Eigen::MatrixXd h_x;   // z_x - x
    Eigen::MatrixXd h_w;   // z_w - w
};

struct Dataset {
    Eigen::VectorXd y;     // outcome, length n
    Eigen::MatrixXd z_x;   // noisy covariates, n x p
    Eigen::MatrixXd z_w;   // noisy instruments, n x p_w
    std::optional<GroundTruth> truth;
    std::optional<DgpConfig> config;  // provenance when generated

    [[nodiscard]] Eigen::Index n() const { return y.size(); }
    [[nodiscard]] Eigen::Index p() const { return z_x.cols(); }
    [[nodiscard]] Eigen::Index p_w() const { return z_w.cols(); }

    void validate() const;
};

}  // namespace ccr
