#include "ccr/rng.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace ccr {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t stream_key) : state_(stream_key) {}

std::uint64_t Rng::next_u64() {
    state_ += kGolden;
    return mix64(state_);
}

double Rng::next_uniform() {
    // 53 random bits, shifted into (0, 1].
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double Rng::next_gaussian() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
}

Eigen::MatrixXd Rng::gaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd out(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            out(i, j) = next_gaussian();
        }
    }
    return out;
}

Eigen::VectorXd Rng::gaussian_vector(Eigen::Index size) {
    Eigen::VectorXd out(size);
    for (Eigen::Index i = 0; i < size; ++i) {
        out(i) = next_gaussian();
    }
    return out;
}

RngKey::RngKey(std::uint64_t seed) : key_(mix64(seed + kGolden)) {}

RngKey RngKey::with(std::uint64_t component) const {
    RngKey next(0);
    next.key_ = mix64(key_ ^ (component + kGolden + (key_ << 6) + (key_ >> 2)));
    return next;
}

RngKey RngKey::with(std::int64_t component) const {
    return with(static_cast<std::uint64_t>(component));
}

RngKey RngKey::with(int component) const {
    return with(static_cast<std::uint64_t>(static_cast<std::int64_t>(component)));
}

RngKey RngKey::with(double component) const {
    return with(std::bit_cast<std::uint64_t>(component));
}

RngKey RngKey::with(std::string_view tag) const {
    // FNV-1a over the tag bytes, then folded in as one component.
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return with(h);
}

}  // namespace ccr
