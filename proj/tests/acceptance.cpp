// Acceptance suite: one self-contained check per criterion, each printing
// a single [PASS]/[FAIL] line. Run all with no arguments or one by number.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccr/dgp.hpp"
#include "ccr/diagnostics.hpp"
#include "ccr/estimators.hpp"
#include "ccr/harness.hpp"

using namespace ccr;

namespace {

struct Failure {
    std::string detail;
};

using CheckFn = std::function<bool(std::string&)>;

EstimatorSpec make_spec(EstimatorKind kind, Eigen::Index k, Eigen::Index ell) {
    EstimatorSpec spec;
    spec.kind = kind;
    spec.k = k;
    spec.ell = ell;
    return spec;
}

SimulationPlan ordering_plan() {
    SimulationPlan plan;
    plan.dgp = DgpConfig{};  // reference defaults
    plan.n_grid = {300, 500};
    plan.delta_grid = {0.05, 0.65};
    plan.regimes = {DimRegime::Moderate};
    for (const auto kind : {EstimatorKind::Naive2Sls, EstimatorKind::Pca2Sls,
                            EstimatorKind::Whiten2Sls, EstimatorKind::Cca2Sls}) {
        plan.estimators.push_back(make_spec(kind, 8, 10));
    }
    plan.reps = 50;
    plan.base_seed = kDefaultBaseSeed;
    plan.workers = 0;
    return plan;
}

// Criterion 1: exact recovery in the noiseless, perfectly aligned design.
// Identification is exact for every member only when the signal spectrum
// is flat, so the noiseless configuration pins alpha = 0.
bool criterion_exact_recovery(std::string& detail) {
    DgpConfig cfg;
    cfg.n = 300;
    cfg.regime = DimRegime::Moderate;
    cfg.k = 8;
    cfg.ell = 8;
    cfg.alpha = 0.0;
    cfg.delta = 1.0;
    cfg.c1 = 0.0;
    cfg.sigma_eps = 0.0;
    cfg.base_seed = kDefaultBaseSeed;

    const Dataset ds = generate_dataset(cfg, 0);
    const Eigen::VectorXd target = min_norm_target(*ds.truth);
    const double inv_p = 1.0 / static_cast<double>(ds.p());

    double worst = 0.0;
    const Eigen::VectorXd oracle = oracle_2sls(ds.y, ds.truth->x, ds.truth->w);
    worst = std::max(worst, inv_p * (oracle - target).squaredNorm());
    for (const auto kind :
         {EstimatorKind::Pca2Sls, EstimatorKind::Whiten2Sls, EstimatorKind::Cca2Sls}) {
        const FirstStage fs = build_first_stage(ds.z_x, ds.z_w, make_spec(kind, 8, 8));
        const CcrFit fit = ccr_fit(ds.y, fs);
        worst = std::max(worst, inv_p * (fit.beta - target).squaredNorm());
    }
    detail = "max (1/p)||beta_hat - proj beta*||^2 = " + std::to_string(worst);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3e", worst);
    detail = std::string("max per-estimator error = ") + buf;
    return worst <= 1e-16;
}

// Criterion 2: the three decomposition terms account for the whole error.
bool criterion_decomposition_identity(std::string& detail) {
    DgpConfig cfg;
    cfg.n = 300;
    cfg.base_seed = kDefaultBaseSeed + 2;
    double worst_ratio = 0.0;
    int fits = 0;
    for (std::uint64_t rep = 0; rep < 25 && fits < 100; ++rep) {
        const Dataset ds = generate_dataset(cfg, rep);
        const ThinSvd zx = thin_svd(ds.z_x);
        const ThinSvd zw = thin_svd(ds.z_w);
        const ThinSvd tx = thin_svd(ds.truth->x);
        const ThinSvd tw = thin_svd(ds.truth->w);
        for (const auto kind : {EstimatorKind::Naive2Sls, EstimatorKind::Pca2Sls,
                                EstimatorKind::Whiten2Sls, EstimatorKind::Cca2Sls}) {
            const FirstStage fs = build_first_stage(zx, zw, make_spec(kind, 8, 10));
            const CcrFit fit = ccr_fit(ds.y, fs);
            const DecompositionReport rep_out =
                error_decomposition(fit.beta, *ds.truth, fs, tx, tw);
            worst_ratio = std::max(worst_ratio,
                                   rep_out.residual / std::max(rep_out.total, 1e-300));
            ++fits;
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3e over %d fits", worst_ratio, fits);
    detail = std::string("max residual/total = ") + buf;
    return worst_ratio <= 1e-9;
}

// Criterion 3: projector completeness, idempotence, mutual orthogonality.
bool criterion_projector_suite(std::string& detail) {
    DgpConfig cfg;
    cfg.n = 300;
    cfg.base_seed = kDefaultBaseSeed + 3;
    double worst = 0.0;
    int fits = 0;
    for (std::uint64_t rep = 0; rep < 25 && fits < 100; ++rep) {
        const Dataset ds = generate_dataset(cfg, rep);
        const ThinSvd zx = thin_svd(ds.z_x);
        const ThinSvd zw = thin_svd(ds.z_w);
        for (const auto kind : {EstimatorKind::Naive2Sls, EstimatorKind::Pca2Sls,
                                EstimatorKind::Whiten2Sls, EstimatorKind::Cca2Sls}) {
            const FirstStage fs = build_first_stage(zx, zw, make_spec(kind, 8, 10));
            const ProjectorSuite suite = projector_suite(fs);
            const Eigen::Index p = ds.p();
            const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(p, p);
            worst = std::max(
                worst,
                (suite.row + suite.null_space + suite.perp - identity).cwiseAbs().maxCoeff());
            for (const Eigen::MatrixXd* proj :
                 {&suite.row, &suite.null_space, &suite.perp}) {
                worst = std::max(worst, (*proj - proj->transpose()).cwiseAbs().maxCoeff());
                worst = std::max(worst, (*proj * *proj - *proj).cwiseAbs().maxCoeff());
            }
            worst = std::max(worst, (suite.row * suite.null_space).cwiseAbs().maxCoeff());
            worst = std::max(worst, (suite.row * suite.perp).cwiseAbs().maxCoeff());
            worst = std::max(worst, (suite.null_space * suite.perp).cwiseAbs().maxCoeff());
            ++fits;
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3e over %d fits", worst, fits);
    detail = std::string("max projector defect = ") + buf;
    return worst <= 1e-10;
}

// Criterion 4: the two CCA evaluation routes agree.
bool criterion_cca_identity(std::string& detail) {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng = RngKey(kDefaultBaseSeed + 4).with("cca").with(seed).stream();
        const Eigen::Index n = 40 + static_cast<Eigen::Index>(seed % 30);
        const Eigen::Index p = 8 + static_cast<Eigen::Index>(seed % 5);
        const Eigen::Index p_w = 10 + static_cast<Eigen::Index>(seed % 7);
        const Eigen::MatrixXd z_x = rng.gaussian_matrix(n, p);
        const Eigen::MatrixXd z_w = rng.gaussian_matrix(n, p_w);
        const Eigen::Index k = 2 + static_cast<Eigen::Index>(seed % 4);
        const Eigen::Index ell = k + 1 + static_cast<Eigen::Index>(seed % 3);
        const FirstStage fs =
            build_first_stage(z_x, z_w, make_spec(EstimatorKind::Cca2Sls, k, ell));
        const CcaCheck check = cca_consistency_check(fs);
        if (check.truncation_mismatch) continue;
        worst = std::max(worst, check.deviation);
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3e", worst);
    detail = std::string("max route deviation = ") + buf;
    return worst <= 1e-9;
}

// Criterion 5: the factored solve equals the dense pseudo-inverse.
bool criterion_dense_oracle(std::string& detail) {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng = RngKey(kDefaultBaseSeed + 5).with("dense").with(seed).stream();
        const Eigen::Index n = 50 + static_cast<Eigen::Index>(seed % 51);
        const Eigen::Index p = 8 + static_cast<Eigen::Index>(seed % 8);
        const Eigen::Index p_w = 9 + static_cast<Eigen::Index>(seed % 9);
        const Eigen::MatrixXd z_x = rng.gaussian_matrix(n, p);
        const Eigen::MatrixXd z_w = rng.gaussian_matrix(n, p_w);
        const Eigen::VectorXd y = rng.gaussian_vector(n);
        const EstimatorKind kind = seed % 3 == 0   ? EstimatorKind::Pca2Sls
                                   : seed % 3 == 1 ? EstimatorKind::Whiten2Sls
                                                   : EstimatorKind::Cca2Sls;
        const Eigen::Index k = 2 + static_cast<Eigen::Index>(seed % 5);
        const Eigen::Index ell = k + static_cast<Eigen::Index>(seed % 3);
        const FirstStage fs = build_first_stage(z_x, z_w, make_spec(kind, k, ell));
        const CcrFit fit = ccr_fit(y, fs);
        const Eigen::MatrixXd design = fs.inst.left * fs.delta * fs.cov.right.transpose();
        const Eigen::VectorXd oracle = min_norm_solve(design, y);
        worst = std::max(worst, (fit.beta - oracle).norm());
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3e", worst);
    detail = std::string("max |factored - dense| = ") + buf;
    return worst <= 1e-9;
}

// Criterion 6: qualitative estimator ordering on the desk-scale sweep.
bool criterion_estimator_ordering(std::string& detail) {
    const SimulationPlan plan = ordering_plan();
    const auto records = run_plan(plan);
    const auto summaries = summarize(records);

    std::map<std::string, std::map<std::string, double>> cells;
    for (const auto& s : summaries) {
        const std::string cell_key =
            "n=" + std::to_string(s.n) + ",delta=" + std::to_string(s.delta);
        cells[cell_key][s.estimator] = s.mean_mse;
    }

    bool ok = true;
    detail.clear();
    for (const auto& [cell_key, means] : cells) {
        const double naive = means.at("naive");
        const double pca = means.at("pca");
        const double whiten = means.at("whiten");
        const double cca = means.at("cca");
        const bool cell_ok =
            cca <= whiten && whiten <= pca && cca < naive && whiten < naive && pca < naive;
        ok = ok && cell_ok;
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%s[%s cca=%.3g whiten=%.3g pca=%.3g naive=%.3g]",
                      cell_ok ? "" : "VIOLATION ", cell_key.c_str(), cca, whiten, pca, naive);
        if (!detail.empty()) detail += " ";
        detail += buf;
    }
    return ok;
}

// Criterion 7: byte-identical replication CSVs for 1 and 8 workers.
bool criterion_parallel_determinism(std::string& detail) {
    namespace fs = std::filesystem;
    SimulationPlan plan = ordering_plan();

    const fs::path dir1 = fs::temp_directory_path() / "ccr_accept_w1";
    const fs::path dir8 = fs::temp_directory_path() / "ccr_accept_w8";
    fs::remove_all(dir1);
    fs::remove_all(dir8);

    plan.workers = 1;
    const SweepResult r1 = run_sweep(plan, dir1.string(), false);
    plan.workers = 8;
    const SweepResult r8 = run_sweep(plan, dir8.string(), false);

    std::ifstream f1(r1.replication_csv, std::ios::binary);
    std::ifstream f8(r8.replication_csv, std::ios::binary);
    const std::string b1((std::istreambuf_iterator<char>(f1)),
                         std::istreambuf_iterator<char>());
    const std::string b8((std::istreambuf_iterator<char>(f8)),
                         std::istreambuf_iterator<char>());
    detail = "csv bytes: " + std::to_string(b1.size()) + " vs " + std::to_string(b8.size());
    return !b1.empty() && b1 == b8;
}

// Criterion 8: the aligned singular-subspace deviation bound holds under
// the reference design.
bool criterion_wedin(std::string& detail) {
    DgpConfig cfg;
    cfg.n = 500;
    cfg.delta = 0.65;
    cfg.base_seed = kDefaultBaseSeed + 8;
    int holds = 0;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        const Dataset ds = generate_dataset(cfg, rep);
        const FirstStage fs =
            build_first_stage(ds.z_x, ds.z_w, make_spec(EstimatorKind::Whiten2Sls, 8, 10));
        if (wedin_check(*ds.truth, fs).holds) ++holds;
    }
    detail = "holds on " + std::to_string(holds) + "/100 seeds";
    return holds >= 95;
}

// Criterion 9: lower-bound formula behavior.
bool criterion_lower_bound(std::string& detail) {
    const LowerBound collapsed = minimax_lower_bound(1.0, 0.0, 8, 1.0, 1.0);
    if (collapsed.value != 8.0) {
        detail = "sigma_x = 0 case returned " + std::to_string(collapsed.value);
        return false;
    }
    double previous = 0.0;
    for (const double overlap : {0.9, 0.5, 0.1, 0.01}) {
        const LowerBound lb = minimax_lower_bound(1.25, 0.01, 8, 0.5, overlap);
        if (!(lb.value > previous)) {
            detail = "not strictly increasing as overlap shrinks";
            return false;
        }
        previous = lb.value;
    }
    detail = "exact collapse and strict blow-up verified";
    return true;
}

// Criterion 10: structural validity of generated data at the defaults.
bool criterion_dgp_validity(std::string& detail) {
    DgpConfig cfg;
    cfg.n = 300;
    cfg.base_seed = kDefaultBaseSeed + 10;
    const Dims dims = dims_for_regime(cfg.n, cfg.regime);
    const Eigen::Index p_common = std::min(dims.p, dims.p_w);

    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        const Dataset ds = generate_dataset(cfg, rep);
        if (thin_svd(ds.truth->x, 1e-10).rank() != 8) {
            detail = "rank(X) != 8 at rep " + std::to_string(rep);
            return false;
        }
        if (thin_svd(ds.truth->w, 1e-10).rank() != 10) {
            detail = "rank(W) != 10 at rep " + std::to_string(rep);
            return false;
        }
        const ThinSvd w_svd = thin_svd(ds.truth->w);
        const double eps_norm = ds.truth->eps.norm();
        if ((w_svd.left.transpose() * ds.truth->eps).norm() > 1e-8 * eps_norm) {
            detail = "instrument validity violated at rep " + std::to_string(rep);
            return false;
        }
        const Eigen::MatrixXd hx = ds.truth->h_x.leftCols(p_common);
        const Eigen::MatrixXd hw = ds.truth->h_w.leftCols(p_common);
        const double mx = hx.mean();
        const double mw = hw.mean();
        const double cov = ((hx.array() - mx) * (hw.array() - mw)).mean();
        const double corr = cov / (std::sqrt((hx.array() - mx).square().mean()) *
                                   std::sqrt((hw.array() - mw).square().mean()));
        if (std::abs(corr - 0.9) > 0.02) {
            detail = "noise correlation " + std::to_string(corr) + " at rep " +
                     std::to_string(rep);
            return false;
        }
    }
    detail = "ranks, validity, and correlation verified on 100 datasets";
    return true;
}

struct Criterion {
    int id;
    const char* name;
    CheckFn fn;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all = {
        {1, "exact recovery in the noiseless aligned design", criterion_exact_recovery},
        {2, "error decomposition identity", criterion_decomposition_identity},
        {3, "projector suite algebra", criterion_projector_suite},
        {4, "CCA evaluation-route identity", criterion_cca_identity},
        {5, "factored solve vs dense pseudo-inverse", criterion_dense_oracle},
        {6, "estimator ordering on the desk-scale sweep", criterion_estimator_ordering},
        {7, "parallel determinism of sweep CSVs", criterion_parallel_determinism},
        {8, "aligned subspace deviation bound", criterion_wedin},
        {9, "minimax lower-bound behavior", criterion_lower_bound},
        {10, "synthetic data validity", criterion_dgp_validity},
    };
    return all;
}

}  // namespace

int main(int argc, char** argv) {
    int selected = 0;
    if (argc > 1) {
        selected = std::atoi(argv[1]);
        if (selected < 1 || selected > 10) {
            std::fprintf(stderr, "usage: %s [criterion 1..10]\n", argv[0]);
            return 2;
        }
    }

    int failures = 0;
    for (const auto& crit : criteria()) {
        if (selected != 0 && crit.id != selected) continue;
        std::string detail;
        bool ok = false;
        try {
            ok = crit.fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
            ok = false;
        }
        std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", crit.id, crit.name,
                    detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
