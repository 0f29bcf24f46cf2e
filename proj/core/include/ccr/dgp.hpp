#pragma once

#include <cstdint>
#include <utility>

#include <Eigen/Core>

#include "ccr/dataset.hpp"
#include "ccr/rng.hpp"

namespace ccr {

/// Ambient dimensions (p, p_w) implied by (n, regime).
/// Moderate: (n/2, n/3). High: (n-100, n-200), both capped at 5000.
Dims dims_for_regime(Eigen::Index n, DimRegime regime);

// Rank-k covariate and rank-ell instrument signal with power-law spectra
// and controlled subspace alignment. The raw aligned columns are kept for
// inspection; `u_w` is the orthonormalized result actually used.
struct Signal {
    Eigen::MatrixXd x;        // n x p
    Eigen::MatrixXd w;        // n x p_w
    Eigen::MatrixXd u_x;      // n x k, orthonormal
    Eigen::MatrixXd u_w;      // n x ell, orthonormal
    Eigen::MatrixXd u_w_raw;  // n x ell, before re-orthonormalization
};

Signal generate_signal(const DgpConfig& config, const RngKey& dataset_key);

struct NoisyPair {
    Eigen::MatrixXd z_x;
    Eigen::MatrixXd z_w;
};

struct NoiseScales {
    double sigma_hx = 0.0;  // c1 / ((k+1)^alpha sqrt(p))
    double sigma_hw = 0.0;  // c1 / ((ell+1)^alpha sqrt(p_w))
};

NoiseScales noise_scales(const DgpConfig& config, Eigen::Index p, Eigen::Index p_w);

/// Additive Gaussian noise with a shared component on the common column
/// block: pairs (h_w[i,j], h_x[i,j]) have correlation rho there.
NoisyPair generate_noise(const DgpConfig& config, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& w, const RngKey& dataset_key);

struct Outcome {
    Eigen::VectorXd y;
    Eigen::VectorXd eps;
};

/// Endogenous disturbance projected off the instrument space and rescaled
/// to sample variance sigma_eps^2. `w_basis` is an orthonormal basis of
/// the instrument column space.
Outcome generate_outcome(const DgpConfig& config, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& w_basis, const Eigen::VectorXd& beta,
                         const Eigen::VectorXd& gamma, const RngKey& dataset_key);

struct Coefficients {
    Eigen::VectorXd beta;   // unit norm
    Eigen::VectorXd gamma;  // norm == gamma_scale
};

/// Drawn once per (n, delta, regime) block; deterministic in
/// (base_seed, block id), independent of the replication index.
Coefficients make_coefficients(const DgpConfig& config);

/// Substream key for one replication's dataset.
RngKey dataset_key(const DgpConfig& config, std::uint64_t rep_index);

/// Substream key for the per-block coefficient draw.
RngKey block_key(const DgpConfig& config);

/// Full pipeline: signal, noise, coefficients, outcome, assembled with truth.
Dataset generate_dataset(const DgpConfig& config, std::uint64_t rep_index = 0);

}  // namespace ccr
