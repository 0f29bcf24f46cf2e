#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ccr/dataset_io.hpp"
#include "ccr/dgp.hpp"
#include "ccr/speclin.hpp"
#include "test_util.hpp"

using namespace ccr;
using ccr_test::max_abs;

namespace {

DgpConfig small_config() {
    DgpConfig cfg;
    cfg.n = 120;
    cfg.regime = DimRegime::Moderate;
    cfg.k = 4;
    cfg.ell = 5;
    cfg.base_seed = 901;
    return cfg;
}

bool bitwise_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           std::memcmp(a.data(), b.data(),
                       sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

std::string temp_path(const char* name) {
    return std::string("/tmp/ccr_datamodel_") + name;
}

}  // namespace

TEST_CASE("dims_for_regime formulas") {
    const Dims moderate = dims_for_regime(300, DimRegime::Moderate);
    CHECK(moderate.p == 150);
    CHECK(moderate.p_w == 100);

    const Dims high = dims_for_regime(300, DimRegime::High);
    CHECK(high.p == 200);
    CHECK(high.p_w == 100);

    const Dims capped = dims_for_regime(6000, DimRegime::High);
    CHECK(capped.p == 5000);
    CHECK(capped.p_w == 5000);

    CHECK_THROWS_AS(dims_for_regime(150, DimRegime::High), InvalidDimsError);
}

TEST_CASE("generate_signal with perfect alignment") {
    DgpConfig cfg = small_config();
    cfg.k = 4;
    cfg.ell = 4;
    cfg.delta = 1.0;
    const Signal sig = generate_signal(cfg, dataset_key(cfg, 0));
    const Eigen::VectorXd cosines = principal_angle_cosines(sig.u_x, sig.u_w);
    REQUIRE(cosines.size() == 4);
    for (Eigen::Index i = 0; i < cosines.size(); ++i) {
        CHECK(cosines(i) >= 1.0 - 1e-8);
    }
}

TEST_CASE("generate_signal with zero alignment keeps raw columns orthogonal to u_x") {
    DgpConfig cfg = small_config();
    cfg.delta = 0.0;
    const Signal sig = generate_signal(cfg, dataset_key(cfg, 0));
    // Before re-orthonormalization the first r constructed columns live in
    // the complement of span(u_x).
    const Eigen::MatrixXd overlap = sig.u_x.transpose() * sig.u_w_raw.leftCols(cfg.k);
    CHECK(max_abs(overlap) <= 1e-8);
}

TEST_CASE("generate_signal alignment strength concentrates near delta") {
    DgpConfig cfg;
    cfg.n = 300;
    cfg.k = 8;
    cfg.ell = 10;
    cfg.delta = 0.65;
    double total = 0.0;
    int count = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        cfg.base_seed = 7000 + seed;
        const Signal sig = generate_signal(cfg, dataset_key(cfg, seed));
        const Eigen::VectorXd cosines = principal_angle_cosines(sig.u_x, sig.u_w);
        total += cosines.mean();
        count += 1;
    }
    const double mean_cosine = total / count;
    CHECK(mean_cosine == doctest::Approx(0.65).epsilon(0.1 / 0.65));
}

TEST_CASE("generate_signal spectra follow the power law and the stated ranks") {
    DgpConfig cfg = small_config();
    const Signal sig = generate_signal(cfg, dataset_key(cfg, 0));
    const ThinSvd x_svd = thin_svd(sig.x, 1e-10);
    const ThinSvd w_svd = thin_svd(sig.w, 1e-10);
    REQUIRE(x_svd.rank() == cfg.k);
    REQUIRE(w_svd.rank() == cfg.ell);
    for (Eigen::Index i = 0; i < cfg.k; ++i) {
        const double expected = std::pow(static_cast<double>(i + 2), -cfg.alpha);
        CHECK(x_svd.singular(i) == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("generate_noise with c1 = 0 is exact") {
    DgpConfig cfg = small_config();
    cfg.c1 = 0.0;
    const Signal sig = generate_signal(cfg, dataset_key(cfg, 0));
    const NoisyPair noisy = generate_noise(cfg, sig.x, sig.w, dataset_key(cfg, 0));
    CHECK((noisy.z_x.array() == sig.x.array()).all());
    CHECK((noisy.z_w.array() == sig.w.array()).all());
}

TEST_CASE("noise scale arithmetic") {
    DgpConfig cfg;
    cfg.k = 8;
    cfg.ell = 10;
    cfg.alpha = 1.5;
    cfg.c1 = 2.0;
    const NoiseScales s = noise_scales(cfg, 10000, 10000);
    // 2.0 / (9^1.5 * 100) = 2 / 2700
    CHECK(s.sigma_hx == doctest::Approx(2.0 / 2700.0).epsilon(1e-14));
}

TEST_CASE("generate_noise cross-correlation on the common block") {
    DgpConfig cfg;
    cfg.n = 500;
    cfg.k = 4;
    cfg.ell = 5;
    cfg.rho = 0.9;
    cfg.c1 = 1.0;
    cfg.base_seed = 31;
    const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(500, 100);
    const Eigen::MatrixXd w = Eigen::MatrixXd::Zero(500, 120);
    const NoisyPair noisy = generate_noise(cfg, x, w, dataset_key(cfg, 0));

    const Eigen::MatrixXd hx = noisy.z_x.leftCols(100);
    const Eigen::MatrixXd hw = noisy.z_w.leftCols(100);
    const double mean_x = hx.mean();
    const double mean_w = hw.mean();
    const double cov = ((hx.array() - mean_x) * (hw.array() - mean_w)).mean();
    const double sd_x = std::sqrt((hx.array() - mean_x).square().mean());
    const double sd_w = std::sqrt((hw.array() - mean_w).square().mean());
    const double corr = cov / (sd_x * sd_w);
    CHECK(corr == doctest::Approx(0.9).epsilon(0.02 / 0.9));
}

TEST_CASE("generate_outcome honors orthogonality and exact rescaling") {
    DgpConfig cfg = small_config();
    const RngKey key = dataset_key(cfg, 3);
    const Signal sig = generate_signal(cfg, key);
    const Coefficients coeffs = make_coefficients(cfg);
    const Outcome outcome = generate_outcome(cfg, sig.x, sig.u_w, coeffs.beta, coeffs.gamma, key);

    const double eps_norm = outcome.eps.norm();
    REQUIRE(eps_norm > 0.0);
    CHECK((sig.u_w.transpose() * outcome.eps).norm() <= 1e-8 * eps_norm);

    const double mean = outcome.eps.mean();
    const double var = (outcome.eps.array() - mean).square().mean();
    CHECK(var == doctest::Approx(cfg.sigma_eps * cfg.sigma_eps).epsilon(1e-10));
}

TEST_CASE("generate_outcome with zero disturbance and zero endogeneity") {
    DgpConfig cfg = small_config();
    cfg.sigma_eps = 0.0;
    const RngKey key = dataset_key(cfg, 0);
    const Signal sig = generate_signal(cfg, key);
    const Coefficients coeffs = make_coefficients(cfg);
    const Eigen::VectorXd zero_gamma = Eigen::VectorXd::Zero(coeffs.gamma.size());
    const Outcome outcome = generate_outcome(cfg, sig.x, sig.u_w, coeffs.beta, zero_gamma, key);
    CHECK(outcome.eps.norm() == 0.0);
    CHECK(max_abs(outcome.y - sig.x * coeffs.beta) == 0.0);
}

TEST_CASE("make_coefficients is deterministic per block and unit norm") {
    DgpConfig cfg = small_config();
    const Coefficients a = make_coefficients(cfg);
    const Coefficients b = make_coefficients(cfg);
    CHECK(bitwise_equal(a.beta, b.beta));
    CHECK(bitwise_equal(a.gamma, b.gamma));
    CHECK(a.beta.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.gamma.norm() == doctest::Approx(cfg.gamma_scale).epsilon(1e-12));
}

TEST_CASE("make_coefficients separates blocks") {
    DgpConfig cfg = small_config();
    std::set<double> first_components;
    for (int block = 0; block < 20; ++block) {
        cfg.delta = 0.01 * (block + 1);
        const Coefficients coeffs = make_coefficients(cfg);
        first_components.insert(coeffs.beta(0));
    }
    CHECK(first_components.size() == 20);
}

TEST_CASE("generate_dataset satisfies the structural invariants") {
    DgpConfig cfg;
    cfg.n = 300;
    cfg.base_seed = 77;
    const Dataset ds = generate_dataset(cfg, 0);
    REQUIRE(ds.truth.has_value());
    CHECK(ds.p() == 150);
    CHECK(ds.p_w() == 100);

    // Exact additive structure by construction.
    CHECK(bitwise_equal(ds.truth->x + ds.truth->h_x, ds.z_x));
    CHECK(bitwise_equal(ds.truth->w + ds.truth->h_w, ds.z_w));

    // Effective ranks at the 1e-10 relative cutoff.
    CHECK(thin_svd(ds.truth->x, 1e-10).rank() == cfg.k);
    CHECK(thin_svd(ds.truth->w, 1e-10).rank() == cfg.ell);

    // Instrument validity.
    const ThinSvd w_svd = thin_svd(ds.truth->w);
    const double eps_norm = ds.truth->eps.norm();
    CHECK((w_svd.left.transpose() * ds.truth->eps).norm() <= 1e-8 * eps_norm);
}

TEST_CASE("generate_dataset is bit-deterministic") {
    DgpConfig cfg = small_config();
    const Dataset a = generate_dataset(cfg, 5);
    const Dataset b = generate_dataset(cfg, 5);
    CHECK(bitwise_equal(a.z_x, b.z_x));
    CHECK(bitwise_equal(a.z_w, b.z_w));
    CHECK(bitwise_equal(a.y, b.y));
    const Dataset c = generate_dataset(cfg, 6);
    CHECK_FALSE(bitwise_equal(a.z_x, c.z_x));
}

TEST_CASE("dataset file round trip is bit exact") {
    DgpConfig cfg = small_config();
    const Dataset ds = generate_dataset(cfg, 1);
    const std::string path = temp_path("roundtrip.ccrd");
    save_dataset(ds, path);
    const Dataset loaded = load_dataset(path);

    CHECK(bitwise_equal(loaded.y, ds.y));
    CHECK(bitwise_equal(loaded.z_x, ds.z_x));
    CHECK(bitwise_equal(loaded.z_w, ds.z_w));
    REQUIRE(loaded.truth.has_value());
    CHECK(bitwise_equal(loaded.truth->x, ds.truth->x));
    CHECK(bitwise_equal(loaded.truth->w, ds.truth->w));
    CHECK(bitwise_equal(loaded.truth->beta, ds.truth->beta));
    CHECK(bitwise_equal(loaded.truth->eps, ds.truth->eps));
    CHECK(bitwise_equal(loaded.truth->h_x, ds.truth->h_x));
    REQUIRE(loaded.config.has_value());
    CHECK(loaded.config->base_seed == cfg.base_seed);
    std::remove(path.c_str());
}

TEST_CASE("dataset without truth loads with truth absent") {
    DgpConfig cfg = small_config();
    Dataset ds = generate_dataset(cfg, 2);
    ds.truth.reset();
    const std::string path = temp_path("notruth.ccrd");
    save_dataset(ds, path);
    const Dataset loaded = load_dataset(path);
    CHECK_FALSE(loaded.truth.has_value());
    CHECK(bitwise_equal(loaded.z_x, ds.z_x));
    std::remove(path.c_str());
}

TEST_CASE("truncated dataset file raises FormatError naming the section") {
    DgpConfig cfg = small_config();
    const Dataset ds = generate_dataset(cfg, 3);
    const std::string path = temp_path("truncated.ccrd");
    save_dataset(ds, path);

    // Chop the file inside the z_w block.
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    const std::size_t keep =
        bytes.size() - static_cast<std::size_t>(ds.z_w.size() / 2 * 8 +
                                                (ds.truth ? (ds.truth->x.size() +
                                                             ds.truth->w.size() +
                                                             ds.truth->beta.size() +
                                                             ds.truth->eps.size()) *
                                                                8
                                                          : 0));
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(keep));
    out.close();

    try {
        load_dataset(path);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("z_w") != std::string::npos);
    }
    std::remove(path.c_str());
}

TEST_CASE("corrupt magic raises FormatError") {
    const std::string path = temp_path("badmagic.ccrd");
    std::ofstream out(path, std::ios::binary);
    out << "NOPE!\n{\"n\":1}\n";
    out.close();
    CHECK_THROWS_AS(load_dataset(path), FormatError);
    std::remove(path.c_str());
}

TEST_CASE("dgp config json round trip and strictness") {
    DgpConfig cfg = small_config();
    cfg.delta = 0.05;
    const DgpConfig back = dgp_config_from_json(dgp_config_to_json(cfg));
    CHECK(back.n == cfg.n);
    CHECK(back.delta == cfg.delta);
    CHECK(back.base_seed == cfg.base_seed);

    nlohmann::json j = dgp_config_to_json(cfg);
    j["typo_key"] = 1;
    CHECK_THROWS_AS(dgp_config_from_json(j), ConfigError);
}
