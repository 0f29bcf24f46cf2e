#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Core>

namespace ccr {

// Deterministic counter-style generator built on the splitmix64 mixer.
// Substreams are derived by hashing key components (integers, doubles,
// tags) into independent 64-bit stream keys, so the draw order of one
// purpose never shifts the draws of another. Output is identical across
// platforms and thread counts for equal keys.
class Rng {
public:
    explicit Rng(std::uint64_t stream_key);

    std::uint64_t next_u64();

    /// Uniform on (0, 1]; never returns 0 so log() is safe.
    double next_uniform();

    /// Standard normal via Box-Muller; one cached value per pair.
    double next_gaussian();

    /// Column-major fill with iid standard normals.
    Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols);
    Eigen::VectorXd gaussian_vector(Eigen::Index size);

private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

// 64-bit key derivation for substreams. Combining is order-sensitive:
// key(a).with(b) != key(b).with(a).
class RngKey {
public:
    explicit RngKey(std::uint64_t seed);

    [[nodiscard]] RngKey with(std::uint64_t component) const;
    [[nodiscard]] RngKey with(std::int64_t component) const;
    [[nodiscard]] RngKey with(int component) const;
    [[nodiscard]] RngKey with(double component) const;
    [[nodiscard]] RngKey with(std::string_view tag) const;

    [[nodiscard]] std::uint64_t value() const { return key_; }
    [[nodiscard]] Rng stream() const { return Rng(key_); }

private:
    std::uint64_t key_;
};

}  // namespace ccr
