// ccr: generate synthetic IV datasets, fit spectrally regularized 2SLS
// estimators, run diagnostics, execute replication sweeps, and render
// summary charts.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include "ccr/csv.hpp"
#include "ccr/dataset_io.hpp"
#include "ccr/dgp.hpp"
#include "ccr/diagnostics.hpp"
#include "ccr/harness.hpp"
#include "ccr/run_config.hpp"
#include "ccr/svg_plot.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
};

ccr::RunConfig resolve_config(const CommonOpts& opts) {
    ccr::RunConfig config =
        opts.config_path.empty() ? ccr::default_run_config() : ccr::load_run_config(opts.config_path);
    if (opts.seed) {
        config.dgp.base_seed = *opts.seed;
        config.plan.dgp.base_seed = *opts.seed;
        config.plan.base_seed = *opts.seed;
    }
    if (opts.workers) {
        config.plan.workers = *opts.workers;
    }
    return config;
}

void print_config_and_exit(const ccr::RunConfig& config) {
    std::cout << ccr::run_config_to_json(config).dump(2) << "\n";
}

ccr::EstimatorSpec spec_from_flags(const std::string& name, Eigen::Index k, Eigen::Index ell,
                                   double pinv_tol) {
    ccr::EstimatorSpec spec;
    spec.kind = ccr::estimator_kind_from_name(name);
    spec.k = k;
    spec.ell = ell;
    spec.pinv_tol = pinv_tol;
    spec.validate();
    return spec;
}

nlohmann::json fit_report_json(const ccr::Dataset& ds, const ccr::EstimatorSpec& spec,
                               const Eigen::VectorXd& beta, const ccr::FirstStage& fs) {
    nlohmann::json report;
    report["estimator"] = spec.name();
    report["k"] = fs.cov.rank();
    report["ell"] = fs.inst.rank();
    report["rank_delta"] = fs.rank();
    report["rank_shortfall"] = fs.rank_shortfall;
    if (ds.truth) {
        const ccr::DecompositionReport decomp = ccr::error_decomposition(beta, *ds.truth, fs);
        const double inv_p = 1.0 / static_cast<double>(ds.p());
        report["mse"] = decomp.total * inv_p;
        report["term_row"] = decomp.term_row * inv_p;
        report["term_null"] = decomp.term_null * inv_p;
        report["term_perp"] = decomp.term_perp * inv_p;
        report["residual"] = decomp.residual * inv_p;
    } else {
        report["mse"] = nullptr;
        report["term_row"] = nullptr;
        report["term_null"] = nullptr;
        report["term_perp"] = nullptr;
        report["residual"] = nullptr;
    }
    return report;
}

void write_beta_file(const Eigen::VectorXd& beta, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ccr::IoError("cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(beta.data()),
              static_cast<std::streamsize>(beta.size() * sizeof(double)));
    if (!out) throw ccr::IoError("failed writing '" + path + "'");
}

int cmd_generate(const CommonOpts& common, const std::string& out_path, bool print_config) {
    ccr::RunConfig config = resolve_config(common);
    if (print_config) {
        print_config_and_exit(config);
        return kExitOk;
    }
    if (!common.config_path.empty()) {
        std::ifstream raw(common.config_path);
        nlohmann::json doc;
        raw >> doc;
        if (!doc.contains("dgp") || !doc.at("dgp").contains("delta")) {
            std::fprintf(stderr, "note: dgp.delta not set; using default %.3g\n",
                         config.dgp.delta);
        }
    }
    const ccr::Dataset ds = ccr::generate_dataset(config.dgp);
    ccr::save_dataset(ds, out_path);

    const ccr::ThinSvd x_svd = ccr::thin_svd(ds.truth->x);
    const ccr::ThinSvd w_svd = ccr::thin_svd(ds.truth->w);
    const Eigen::VectorXd& eps = ds.truth->eps;
    const double eps_norm = eps.norm();
    const double validity =
        eps_norm > 0.0 ? (w_svd.left.transpose() * eps).norm() / eps_norm : 0.0;
    const ccr::NoiseToSignal nsr = ccr::noise_to_signal(*ds.truth);

    std::printf("wrote %s: n=%lld p=%lld p_w=%lld\n", out_path.c_str(),
                static_cast<long long>(ds.n()), static_cast<long long>(ds.p()),
                static_cast<long long>(ds.p_w()));
    std::printf("rank(X)=%lld rank(W)=%lld instrument_validity=%.3e nsr_x=%.4g nsr_w=%.4g\n",
                static_cast<long long>(x_svd.rank()), static_cast<long long>(w_svd.rank()),
                validity, nsr.nsr_x, nsr.nsr_w);
    return kExitOk;
}

int cmd_estimate(const std::string& data_path, const std::string& estimator, Eigen::Index k,
                 Eigen::Index ell, double pinv_tol, const std::string& out_path) {
    const ccr::Dataset ds = ccr::load_dataset(data_path);
    const ccr::EstimatorSpec spec = spec_from_flags(estimator, k, ell, pinv_tol);

    Eigen::VectorXd beta;
    ccr::FirstStage fs;
    if (spec.kind == ccr::EstimatorKind::OracleTsls) {
        if (!ds.truth) {
            throw ccr::TruthRequiredError("oracle estimator requires a dataset with truth");
        }
        const ccr::ThinSvd tx = ccr::thin_svd(ds.truth->x);
        const ccr::ThinSvd tw = ccr::thin_svd(ds.truth->w);
        ccr::EstimatorSpec oracle = spec;
        oracle.k = tx.rank();
        oracle.ell = tw.rank();
        fs = ccr::build_first_stage(tx, tw, oracle);
        beta = ccr::ccr_fit(ds.y, fs, spec.pinv_tol).beta;
    } else {
        fs = ccr::build_first_stage(ds.z_x, ds.z_w, spec);
        beta = ccr::ccr_fit(ds.y, fs, spec.pinv_tol).beta;
    }

    write_beta_file(beta, out_path);
    const nlohmann::json report = fit_report_json(ds, spec, beta, fs);
    const std::string json_path = out_path + ".json";
    std::ofstream json_out(json_path, std::ios::trunc);
    if (!json_out) throw ccr::IoError("cannot open '" + json_path + "' for writing");
    json_out << report.dump(2) << "\n";

    std::printf("wrote %s (p=%lld float64) and %s\n", out_path.c_str(),
                static_cast<long long>(beta.size()), json_path.c_str());
    return kExitOk;
}

int cmd_diagnose(const std::string& data_path, Eigen::Index k, Eigen::Index ell,
                 std::optional<double> sigma_bar_sq, const std::string& out_path) {
    const ccr::Dataset ds = ccr::load_dataset(data_path);

    ccr::EstimatorSpec spec;
    spec.kind = ccr::EstimatorKind::Whiten2Sls;
    spec.k = k;
    spec.ell = ell;
    const ccr::FirstStage fs = ccr::build_first_stage(ds.z_x, ds.z_w, spec);

    nlohmann::json report;
    report["n"] = ds.n();
    report["p"] = ds.p();
    report["p_w"] = ds.p_w();
    report["k"] = fs.cov.rank();
    report["ell"] = fs.inst.rank();
    report["rank_shortfall"] = fs.rank_shortfall;
    {
        const Eigen::VectorXd cosines = ccr::singular_values(fs.overlap);
        report["overlap_cosines_empirical"] =
            std::vector<double>(cosines.data(), cosines.data() + cosines.size());
    }

    if (ds.truth) {
        double sbar2 = 0.0;
        if (sigma_bar_sq) {
            sbar2 = *sigma_bar_sq;
        } else if (ds.config) {
            sbar2 = ds.config->sigma_eps * ds.config->sigma_eps;
        } else {
            throw ccr::ConfigError(
                "dataset has no generating config; pass --sigma-bar-sq explicitly");
        }

        const ccr::KeyQuantities kq = ccr::key_quantities(*ds.truth, fs, sbar2);
        report.update(ccr::key_quantities_to_json(kq));

        const ccr::ErrorRegime regime =
            ccr::classify_regime(kq.nsr_x + kq.nsr_w, kq.kappa_xw, sbar2, kq.r);
        report["regime"] = ccr::error_regime_name(regime);
        report["recommendation"] = ccr::recommendation_name(
            ccr::recommend_estimator(regime, kq.sigma_min_x, kq.sigma_max_w, kq.kappa_w));

        const double sigma_x_noise =
            ds.config ? ds.config->c1 /
                            (std::pow(static_cast<double>(ds.config->k + 1), ds.config->alpha) *
                             std::sqrt(static_cast<double>(ds.p())))
                      : 0.0;
        if (kq.r_star >= 1 && kq.overlap_cosines_true.size() > 0 &&
            kq.overlap_cosines_true(0) > 0.0) {
            const ccr::LowerBound lb =
                ccr::minimax_lower_bound(std::sqrt(sbar2), sigma_x_noise, kq.r_star,
                                         kq.sigma_min_w, kq.overlap_cosines_true(0));
            if (std::isinf(lb.value)) {
                report["lower_bound"] = "inf";
            } else {
                report["lower_bound"] = lb.value;
            }
            report["lower_bound_low_rank_regime"] = lb.remark_low_rank;
        } else {
            report["lower_bound"] = nullptr;
            report["lower_bound_low_rank_regime"] = nullptr;
        }

        report["wedin"] = ccr::wedin_to_json(ccr::wedin_check(*ds.truth, fs));
    } else {
        for (const char* key :
             {"nsr_x", "nsr_w", "kappa_x", "kappa_w", "kappa_xw", "sigma_min_x", "sigma_max_x",
              "sigma_min_w", "sigma_max_w", "overlap_cosines_true", "r_star", "sigma_bar_sq",
              "c_ell", "c_k", "regime", "recommendation", "lower_bound", "wedin"}) {
            report[key] = nullptr;
        }
        report["r"] = fs.rank();
    }

    if (out_path.empty()) {
        std::cout << report.dump(2) << "\n";
    } else {
        std::ofstream out(out_path, std::ios::trunc);
        if (!out) throw ccr::IoError("cannot open '" + out_path + "' for writing");
        out << report.dump(2) << "\n";
    }
    return kExitOk;
}

int cmd_sweep(const CommonOpts& common, const std::string& out_dir_flag, bool resume,
              bool timing, bool print_config) {
    ccr::RunConfig config = resolve_config(common);
    if (!out_dir_flag.empty()) config.out_dir = out_dir_flag;
    if (timing) config.plan.record_timing = true;
    if (print_config) {
        print_config_and_exit(config);
        return kExitOk;
    }

    const std::size_t rows = ccr::plan_row_count(config.plan);
    const Eigen::Index n_max =
        *std::max_element(config.plan.n_grid.begin(), config.plan.n_grid.end());
    if (rows >= 10000 || n_max >= 1000) {
        std::fprintf(stderr,
                     "note: %zu fits requested with n up to %lld; paper-scale grids take "
                     "hours (rough guide: >= 1 ms per fit per 100 rows of n)\n",
                     rows, static_cast<long long>(n_max));
    }

    const ccr::SweepResult result = ccr::run_sweep(config.plan, config.out_dir, resume, true);
    std::printf("wrote %s (%zu rows) and %s\n", result.replication_csv.c_str(), result.rows,
                result.summary_csv.c_str());
    if (result.cells_skipped > 0) {
        std::printf("resume: %zu cells reused from previous run\n", result.cells_skipped);
    }
    return kExitOk;
}

int cmd_summarize(const std::string& in_path, const std::string& out_path) {
    const auto records = ccr::read_replication_csv(in_path);
    const auto summaries = ccr::summarize(records);
    ccr::write_summary_csv(summaries, out_path);
    std::size_t errors = 0;
    for (const auto& rec : records) {
        if (!rec.ok()) ++errors;
    }
    std::printf("wrote %s (%zu cells from %zu rows, %zu error rows excluded)\n",
                out_path.c_str(), summaries.size(), records.size(), errors);
    return kExitOk;
}

int cmd_plot(const std::string& in_path, const std::string& out_path) {
    const auto summaries = ccr::read_summary_csv(in_path);
    ccr::write_mse_plot(summaries, out_path);
    std::printf("wrote %s\n", out_path.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"canonical correlation regression toolkit"};
    app.require_subcommand(1);

    CommonOpts common;

    auto* generate = app.add_subcommand("generate", "generate a synthetic dataset file");
    std::string gen_out = "dataset.ccrd";
    bool gen_print_config = false;
    generate->add_option("--config", common.config_path, "JSON config path");
    generate->add_option("--seed", common.seed, "override base seed");
    generate->add_option("--out", gen_out, "output dataset path");
    generate->add_flag("--print-config", gen_print_config, "print resolved config and exit");

    auto* estimate = app.add_subcommand("estimate", "fit one estimator on a dataset");
    std::string est_data;
    std::string est_name = "cca";
    Eigen::Index est_k = 8;
    Eigen::Index est_ell = 10;
    double est_pinv_tol = ccr::kRankTol;
    std::string est_out = "beta.f64";
    estimate->add_option("--data", est_data, "dataset path")->required();
    estimate->add_option("--estimator", est_name, "naive|pca|whiten|cca|oracle");
    estimate->add_option("--k", est_k, "covariate truncation rank");
    estimate->add_option("--ell", est_ell, "instrument truncation rank");
    estimate->add_option("--pinv-tol", est_pinv_tol, "relative pseudo-inverse tolerance");
    estimate->add_option("--out", est_out, "output coefficient path (raw float64)");

    auto* diagnose = app.add_subcommand("diagnose", "report key quantities and regime");
    std::string diag_data;
    Eigen::Index diag_k = 8;
    Eigen::Index diag_ell = 10;
    std::optional<double> diag_sbar2;
    std::string diag_out;
    diagnose->add_option("--data", diag_data, "dataset path")->required();
    diagnose->add_option("--k", diag_k, "covariate truncation rank");
    diagnose->add_option("--ell", diag_ell, "instrument truncation rank");
    diagnose->add_option("--sigma-bar-sq", diag_sbar2, "disturbance variance bound");
    diagnose->add_option("--out", diag_out, "write JSON here instead of stdout");

    auto* sweep = app.add_subcommand("sweep", "run the replication grid");
    std::string sweep_out;
    bool sweep_resume = false;
    bool sweep_timing = false;
    bool sweep_print_config = false;
    sweep->add_option("--config", common.config_path, "JSON config path");
    sweep->add_option("--seed", common.seed, "override base seed");
    sweep->add_option("--workers", common.workers, "worker threads (0 = auto)");
    sweep->add_option("--out", sweep_out, "output directory");
    sweep->add_flag("--resume", sweep_resume, "reuse completed cells from a previous run");
    sweep->add_flag("--timing", sweep_timing,
                    "record wall-clock runtime_ms (breaks byte determinism)");
    sweep->add_flag("--print-config", sweep_print_config, "print resolved config and exit");

    auto* summarize_cmd = app.add_subcommand("summarize", "aggregate a replication CSV");
    std::string sum_in;
    std::string sum_out = "summary.csv";
    summarize_cmd->add_option("--in", sum_in, "replication CSV path")->required();
    summarize_cmd->add_option("--out", sum_out, "summary CSV path");

    auto* plot = app.add_subcommand("plot", "render summary CSV as an SVG chart");
    std::string plot_in;
    std::string plot_out = "mse.svg";
    plot->add_option("--in", plot_in, "summary CSV path")->required();
    plot->add_option("--out", plot_out, "SVG output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (generate->parsed()) return cmd_generate(common, gen_out, gen_print_config);
        if (estimate->parsed()) {
            return cmd_estimate(est_data, est_name, est_k, est_ell, est_pinv_tol, est_out);
        }
        if (diagnose->parsed()) {
            return cmd_diagnose(diag_data, diag_k, diag_ell, diag_sbar2, diag_out);
        }
        if (sweep->parsed()) {
            return cmd_sweep(common, sweep_out, sweep_resume, sweep_timing, sweep_print_config);
        }
        if (summarize_cmd->parsed()) return cmd_summarize(sum_in, sum_out);
        if (plot->parsed()) return cmd_plot(plot_in, plot_out);
    } catch (const ccr::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const ccr::InvalidInputError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const ccr::InvalidDimsError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const ccr::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    } catch (const ccr::FormatError& e) {
        std::fprintf(stderr, "format error: %s\n", e.what());
        return kExitIo;
    } catch (const ccr::SchemaError& e) {
        std::fprintf(stderr, "schema error: %s\n", e.what());
        return kExitIo;
    } catch (const ccr::Error& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    }
    return kExitOk;
}
