#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccr/dataset.hpp"
#include "ccr/estimators.hpp"

namespace ccr {

// Grid sweep description. One dataset is generated per (cell, rep) and
// every estimator in the plan is fit on it, so the comparison is paired.
struct SimulationPlan {
    DgpConfig dgp;  // template; n / regime / delta / base_seed set per cell
    std::vector<Eigen::Index> n_grid = {300};
    std::vector<double> delta_grid = {0.65};
    std::vector<DimRegime> regimes = {DimRegime::Moderate};
    std::vector<EstimatorSpec> estimators;
    int reps = 250;
    std::uint64_t base_seed = kDefaultBaseSeed;
    int workers = 0;            // 0 = hardware concurrency
    bool record_timing = false; // wall-clock runtime_ms breaks byte determinism

    void validate() const;
};

struct Cell {
    DimRegime regime = DimRegime::Moderate;
    Eigen::Index n = 0;
    double delta = 0.0;
};

// One CSV row: a single estimator's result on one replication. Error
// rows keep the sweep alive through degenerate draws; their numeric
// fields are NaN and `error` carries the reason.
struct ReplicationRecord {
    DimRegime regime = DimRegime::Moderate;
    Eigen::Index n = 0;
    Eigen::Index p = 0;
    Eigen::Index p_w = 0;
    double delta = 0.0;
    std::string estimator;
    int rep_index = 0;
    std::uint64_t seed = 0;
    std::string dataset_hash;
    double mse = 0.0;        // (1/p) squared error to the min-norm target
    double term_row = 0.0;   // decomposition terms, same 1/p normalization
    double term_null = 0.0;
    double term_perp = 0.0;
    double nsr_x = 0.0;
    double nsr_w = 0.0;
    double runtime_ms = 0.0; // 0 unless the plan records timing
    std::string error;

    [[nodiscard]] bool ok() const { return error.empty(); }
};

struct SummaryRecord {
    DimRegime regime = DimRegime::Moderate;
    Eigen::Index n = 0;
    double delta = 0.0;
    std::string estimator;
    int rep_count = 0;  // successful replications included in the stats
    double mean_mse = 0.0;
    double q025 = 0.0;
    double q975 = 0.0;
};

/// Cells in canonical order: regimes, then n, then delta, as listed.
std::vector<Cell> plan_cells(const SimulationPlan& plan);

/// Rows the full sweep will emit (|cells| * reps * |estimators|).
std::size_t plan_row_count(const SimulationPlan& plan);

/// One dataset, all estimators; never throws on per-estimator failure.
std::vector<ReplicationRecord> run_replication(const SimulationPlan& plan, const Cell& cell,
                                               int rep_index);

/// Whole grid, parallel over replications, output in canonical order.
/// Bytes are independent of the worker count.
std::vector<ReplicationRecord> run_plan(const SimulationPlan& plan);

std::vector<SummaryRecord> summarize(const std::vector<ReplicationRecord>& records);

/// Interpolated order statistic: position (count - 1) * q.
double quantile_linear(std::vector<double> values, double q);

inline constexpr char kReplicationHeader[] =
    "regime,n,p,p_w,delta,estimator,rep,seed,dataset_hash,mse,term_row,term_null,"
    "term_perp,nsr_x,nsr_w,runtime_ms,error";
inline constexpr char kSummaryHeader[] =
    "regime,n,delta,estimator,rep_count,mean_mse,q025,q975";

std::string replication_row(const ReplicationRecord& rec);

void write_replication_csv(const std::vector<ReplicationRecord>& records,
                           const std::string& path);
std::vector<ReplicationRecord> read_replication_csv(const std::string& path);

void write_summary_csv(const std::vector<SummaryRecord>& records, const std::string& path);
std::vector<SummaryRecord> read_summary_csv(const std::string& path);

// Resumable sweep driver: per-cell shard files plus a manifest under
// <out_dir>/.ccr_cells. Completed cells are skipped on --resume; the
// final CSV is the shard concatenation, byte-identical to a clean run.
struct SweepResult {
    std::string replication_csv;
    std::string summary_csv;
    std::size_t rows = 0;
    std::size_t cells_skipped = 0;  // already complete when resuming
};

SweepResult run_sweep(const SimulationPlan& plan, const std::string& out_dir, bool resume,
                      bool progress = false);

/// Hex fingerprint of a plan, as recorded in sweep manifests; resuming
/// against a different plan is refused.
std::string plan_fingerprint_hex(const SimulationPlan& plan);

/// FNV-1a over the raw bytes of (y, z_x, z_w), hex-encoded.
std::string dataset_content_hash(const Dataset& dataset);

}  // namespace ccr
