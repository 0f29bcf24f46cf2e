#include "ccr/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include "ccr/csv.hpp"
#include "ccr/dgp.hpp"
#include "ccr/diagnostics.hpp"

namespace ccr {

namespace fs_std = std::filesystem;

void SimulationPlan::validate() const {
    if (reps < 1) throw ConfigError("plan.reps must be >= 1");
    if (n_grid.empty()) throw ConfigError("plan.n_grid must be nonempty");
    if (delta_grid.empty()) throw ConfigError("plan.delta_grid must be nonempty");
    if (regimes.empty()) throw ConfigError("plan.regimes must be nonempty");
    if (estimators.empty()) throw ConfigError("plan.estimators must be nonempty");
    if (workers < 0) throw ConfigError("plan.workers must be >= 0");
    std::vector<std::string> names;
    for (const auto& est : estimators) {
        est.validate();
        names.push_back(est.name());
    }
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
        throw ConfigError("plan.estimators contains duplicate labels; set distinct labels");
    }
}

std::vector<Cell> plan_cells(const SimulationPlan& plan) {
    std::vector<Cell> cells;
    cells.reserve(plan.regimes.size() * plan.n_grid.size() * plan.delta_grid.size());
    for (const DimRegime regime : plan.regimes) {
        for (const Eigen::Index n : plan.n_grid) {
            for (const double delta : plan.delta_grid) {
                cells.push_back(Cell{regime, n, delta});
            }
        }
    }
    return cells;
}

std::size_t plan_row_count(const SimulationPlan& plan) {
    return plan.regimes.size() * plan.n_grid.size() * plan.delta_grid.size() *
           static_cast<std::size_t>(plan.reps) * plan.estimators.size();
}

namespace {

std::uint64_t fnv1a(std::uint64_t h, const unsigned char* data, std::size_t size) {
    for (std::size_t i = 0; i < size; ++i) {
        h ^= data[i];
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t fnv1a_doubles(std::uint64_t h, const double* data, std::size_t count) {
    return fnv1a(h, reinterpret_cast<const unsigned char*>(data), count * sizeof(double));
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

std::string sanitize_message(std::string msg) {
    for (char& c : msg) {
        if (c == ',') c = ';';
        if (c == '\n' || c == '\r') c = ' ';
    }
    return msg;
}

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void mark_error(ReplicationRecord& rec, const std::string& message) {
    rec.mse = kNan;
    rec.term_row = kNan;
    rec.term_null = kNan;
    rec.term_perp = kNan;
    rec.error = sanitize_message(message);
}

}  // namespace

std::string dataset_content_hash(const Dataset& ds) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    h = fnv1a_doubles(h, ds.y.data(), static_cast<std::size_t>(ds.y.size()));
    h = fnv1a_doubles(h, ds.z_x.data(), static_cast<std::size_t>(ds.z_x.size()));
    h = fnv1a_doubles(h, ds.z_w.data(), static_cast<std::size_t>(ds.z_w.size()));
    return hex64(h);
}

std::vector<ReplicationRecord> run_replication(const SimulationPlan& plan, const Cell& cell,
                                               int rep_index) {
    DgpConfig cfg = plan.dgp;
    cfg.n = cell.n;
    cfg.regime = cell.regime;
    cfg.delta = cell.delta;
    cfg.base_seed = plan.base_seed;

    ReplicationRecord proto;
    proto.regime = cell.regime;
    proto.n = cell.n;
    proto.delta = cell.delta;
    proto.rep_index = rep_index;
    proto.seed = dataset_key(cfg, static_cast<std::uint64_t>(rep_index)).value();

    std::vector<ReplicationRecord> rows;
    rows.reserve(plan.estimators.size());

    Dataset ds;
    try {
        ds = generate_dataset(cfg, static_cast<std::uint64_t>(rep_index));
    } catch (const std::exception& e) {
        for (const auto& est : plan.estimators) {
            ReplicationRecord rec = proto;
            rec.estimator = est.name();
            rec.nsr_x = kNan;
            rec.nsr_w = kNan;
            mark_error(rec, std::string("dgp: ") + e.what());
            rows.push_back(std::move(rec));
        }
        return rows;
    }

    proto.p = ds.p();
    proto.p_w = ds.p_w();
    proto.dataset_hash = dataset_content_hash(ds);

    const GroundTruth& truth = *ds.truth;
    const ThinSvd zx_svd = thin_svd(ds.z_x);
    const ThinSvd zw_svd = thin_svd(ds.z_w);
    const ThinSvd tx_svd = thin_svd(truth.x);
    const ThinSvd tw_svd = thin_svd(truth.w);

    {
        const double hx = operator_norm(truth.h_x);
        const double hw = operator_norm(truth.h_w);
        const double sx = tx_svd.singular(tx_svd.rank() - 1);
        const double sw = tw_svd.singular(tw_svd.rank() - 1);
        proto.nsr_x = (hx * hx) / (sx * sx);
        proto.nsr_w = (hw * hw) / (sw * sw);
    }

    const double inv_p = 1.0 / static_cast<double>(ds.p());
    for (const auto& est : plan.estimators) {
        ReplicationRecord rec = proto;
        rec.estimator = est.name();
        try {
            const auto start = std::chrono::steady_clock::now();
            FirstStage stage;
            if (est.kind == EstimatorKind::OracleTsls) {
                EstimatorSpec oracle = est;
                oracle.k = tx_svd.rank();
                oracle.ell = tw_svd.rank();
                stage = build_first_stage(tx_svd, tw_svd, oracle);
            } else {
                stage = build_first_stage(zx_svd, zw_svd, est);
            }
            const CcrFit fit = ccr_fit(ds.y, stage, est.pinv_tol);
            const DecompositionReport decomp =
                error_decomposition(fit.beta, truth, stage, tx_svd, tw_svd);
            const auto stop = std::chrono::steady_clock::now();

            rec.mse = decomp.total * inv_p;
            rec.term_row = decomp.term_row * inv_p;
            rec.term_null = decomp.term_null * inv_p;
            rec.term_perp = decomp.term_perp * inv_p;
            if (plan.record_timing) {
                rec.runtime_ms =
                    std::chrono::duration<double, std::milli>(stop - start).count();
            }
        } catch (const std::exception& e) {
            mark_error(rec, e.what());
        }
        rows.push_back(std::move(rec));
    }
    return rows;
}

namespace {

int resolve_workers(const SimulationPlan& plan, std::size_t items) {
    int workers = plan.workers;
    if (workers <= 0) {
        workers = static_cast<int>(std::thread::hardware_concurrency());
        if (workers <= 0) workers = 1;
    }
    return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers),
                                                  std::max<std::size_t>(items, 1)));
}

// Runs every (cell, rep) item of `cell_indices` on a small pool; invokes
// `on_cell_done` once per completed cell, under a lock, with the cell's
// rows in replication order.
void execute_cells(
    const SimulationPlan& plan, const std::vector<Cell>& cells,
    const std::vector<std::size_t>& cell_indices,
    const std::function<void(std::size_t, std::vector<ReplicationRecord>&&)>& on_cell_done) {
    const std::size_t reps = static_cast<std::size_t>(plan.reps);
    const std::size_t items = cell_indices.size() * reps;
    if (items == 0) return;

    struct CellSlot {
        std::vector<std::vector<ReplicationRecord>> by_rep;
        std::atomic<std::size_t> remaining{0};
    };
    std::vector<CellSlot> slots(cell_indices.size());
    for (auto& slot : slots) {
        slot.by_rep.resize(reps);
        slot.remaining.store(reps);
    }

    std::atomic<std::size_t> next{0};
    std::mutex done_mutex;
    std::exception_ptr first_error;
    std::mutex error_mutex;

    const int workers = resolve_workers(plan, items);
    auto worker = [&]() {
        while (true) {
            const std::size_t item = next.fetch_add(1);
            if (item >= items) break;
            const std::size_t slot_idx = item / reps;
            const std::size_t rep = item % reps;
            try {
                const Cell& cell = cells[cell_indices[slot_idx]];
                slots[slot_idx].by_rep[rep] =
                    run_replication(plan, cell, static_cast<int>(rep));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                continue;
            }
            if (slots[slot_idx].remaining.fetch_sub(1) == 1) {
                std::vector<ReplicationRecord> cell_rows;
                for (auto& rep_rows : slots[slot_idx].by_rep) {
                    for (auto& row : rep_rows) cell_rows.push_back(std::move(row));
                }
                slots[slot_idx].by_rep.clear();
                std::lock_guard<std::mutex> lock(done_mutex);
                on_cell_done(cell_indices[slot_idx], std::move(cell_rows));
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

std::vector<ReplicationRecord> run_plan(const SimulationPlan& plan) {
    plan.validate();
    const std::vector<Cell> cells = plan_cells(plan);
    std::vector<std::size_t> all(cells.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

    std::vector<std::vector<ReplicationRecord>> per_cell(cells.size());
    execute_cells(plan, cells, all, [&](std::size_t cell_idx, std::vector<ReplicationRecord>&& rows) {
        per_cell[cell_idx] = std::move(rows);
    });

    std::vector<ReplicationRecord> out;
    out.reserve(plan_row_count(plan));
    for (auto& rows : per_cell) {
        for (auto& row : rows) out.push_back(std::move(row));
    }
    return out;
}

double quantile_linear(std::vector<double> values, double q) {
    if (values.empty()) {
        throw InvalidInputError("quantile_linear: empty sample");
    }
    if (q < 0.0 || q > 1.0) {
        throw InvalidInputError("quantile_linear: q must lie in [0, 1]");
    }
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= values.size()) {
        return values.back();
    }
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

std::vector<SummaryRecord> summarize(const std::vector<ReplicationRecord>& records) {
    if (records.empty()) {
        throw InvalidInputError("summarize: no records");
    }
    using Key = std::tuple<int, Eigen::Index, double, std::string>;
    std::map<Key, std::size_t> index;
    std::vector<SummaryRecord> summaries;
    std::vector<std::vector<double>> samples;

    for (const auto& rec : records) {
        const Key key{static_cast<int>(rec.regime), rec.n, rec.delta, rec.estimator};
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, summaries.size()).first;
            SummaryRecord s;
            s.regime = rec.regime;
            s.n = rec.n;
            s.delta = rec.delta;
            s.estimator = rec.estimator;
            summaries.push_back(std::move(s));
            samples.emplace_back();
        }
        if (rec.ok()) {
            samples[it->second].push_back(rec.mse);
        }
    }

    std::vector<SummaryRecord> out;
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        if (samples[i].empty()) {
            std::fprintf(stderr, "warning: cell (%s, n=%lld, delta=%s, %s) has no successful replications; skipped\n",
                         dim_regime_name(summaries[i].regime).c_str(),
                         static_cast<long long>(summaries[i].n),
                         format_double(summaries[i].delta).c_str(),
                         summaries[i].estimator.c_str());
            continue;
        }
        SummaryRecord s = summaries[i];
        s.rep_count = static_cast<int>(samples[i].size());
        double total = 0.0;
        for (const double v : samples[i]) total += v;
        s.mean_mse = total / static_cast<double>(samples[i].size());
        s.q025 = quantile_linear(samples[i], 0.025);
        s.q975 = quantile_linear(samples[i], 0.975);
        out.push_back(std::move(s));
    }
    return out;
}

std::string replication_row(const ReplicationRecord& rec) {
    std::string row;
    row.reserve(256);
    row += dim_regime_name(rec.regime);
    row += ',';
    row += format_int(rec.n);
    row += ',';
    row += format_int(rec.p);
    row += ',';
    row += format_int(rec.p_w);
    row += ',';
    row += format_double(rec.delta);
    row += ',';
    row += rec.estimator;
    row += ',';
    row += format_int(rec.rep_index);
    row += ',';
    row += format_uint(rec.seed);
    row += ',';
    row += rec.dataset_hash;
    row += ',';
    row += format_double(rec.mse);
    row += ',';
    row += format_double(rec.term_row);
    row += ',';
    row += format_double(rec.term_null);
    row += ',';
    row += format_double(rec.term_perp);
    row += ',';
    row += format_double(rec.nsr_x);
    row += ',';
    row += format_double(rec.nsr_w);
    row += ',';
    row += format_double(rec.runtime_ms);
    row += ',';
    row += rec.error;
    return row;
}

namespace {

void check_header(const std::string& actual, const std::string& expected,
                  const std::string& path) {
    if (actual == expected) return;
    const auto actual_cols = split_csv_line(actual);
    const auto expected_cols = split_csv_line(expected);
    for (std::size_t i = 0; i < std::max(actual_cols.size(), expected_cols.size()); ++i) {
        const std::string got = i < actual_cols.size() ? actual_cols[i] : "<missing>";
        const std::string want = i < expected_cols.size() ? expected_cols[i] : "<extra>";
        if (got != want) {
            throw SchemaError("'" + path + "': header column " + std::to_string(i + 1) +
                              " is '" + got + "', expected '" + want + "'");
        }
    }
    throw SchemaError("'" + path + "': header does not match the fixed schema");
}

std::ifstream open_for_read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

}  // namespace

void write_replication_csv(const std::vector<ReplicationRecord>& records,
                           const std::string& path) {
    std::ofstream out = open_for_write(path);
    out << kReplicationHeader << '\n';
    for (const auto& rec : records) {
        out << replication_row(rec) << '\n';
    }
    out.flush();
    if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<ReplicationRecord> read_replication_csv(const std::string& path) {
    std::ifstream in = open_for_read(path);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("'" + path + "': empty file");
    check_header(line, kReplicationHeader, path);

    std::vector<ReplicationRecord> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 17) {
            throw SchemaError("'" + path + "' line " + std::to_string(line_no) +
                              ": expected 17 fields, found " + std::to_string(f.size()));
        }
        ReplicationRecord rec;
        try {
            rec.regime = dim_regime_from_name(f[0]);
        } catch (const ConfigError&) {
            throw SchemaError("column 'regime': unknown value '" + f[0] + "'");
        }
        rec.n = parse_int(f[1], "n");
        rec.p = parse_int(f[2], "p");
        rec.p_w = parse_int(f[3], "p_w");
        rec.delta = parse_double(f[4], "delta");
        rec.estimator = f[5];
        rec.rep_index = static_cast<int>(parse_int(f[6], "rep"));
        rec.seed = parse_uint(f[7], "seed");
        rec.dataset_hash = f[8];
        rec.mse = parse_double(f[9], "mse");
        rec.term_row = parse_double(f[10], "term_row");
        rec.term_null = parse_double(f[11], "term_null");
        rec.term_perp = parse_double(f[12], "term_perp");
        rec.nsr_x = parse_double(f[13], "nsr_x");
        rec.nsr_w = parse_double(f[14], "nsr_w");
        rec.runtime_ms = parse_double(f[15], "runtime_ms");
        rec.error = f[16];
        out.push_back(std::move(rec));
    }
    return out;
}

void write_summary_csv(const std::vector<SummaryRecord>& records, const std::string& path) {
    std::ofstream out = open_for_write(path);
    out << kSummaryHeader << '\n';
    for (const auto& rec : records) {
        out << dim_regime_name(rec.regime) << ',' << format_int(rec.n) << ','
            << format_double(rec.delta) << ',' << rec.estimator << ','
            << format_int(rec.rep_count) << ',' << format_double(rec.mean_mse) << ','
            << format_double(rec.q025) << ',' << format_double(rec.q975) << '\n';
    }
    out.flush();
    if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<SummaryRecord> read_summary_csv(const std::string& path) {
    std::ifstream in = open_for_read(path);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("'" + path + "': empty file");
    check_header(line, kSummaryHeader, path);

    std::vector<SummaryRecord> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 8) {
            throw SchemaError("'" + path + "' line " + std::to_string(line_no) +
                              ": expected 8 fields, found " + std::to_string(f.size()));
        }
        SummaryRecord rec;
        try {
            rec.regime = dim_regime_from_name(f[0]);
        } catch (const ConfigError&) {
            throw SchemaError("column 'regime': unknown value '" + f[0] + "'");
        }
        rec.n = parse_int(f[1], "n");
        rec.delta = parse_double(f[2], "delta");
        rec.estimator = f[3];
        rec.rep_count = static_cast<int>(parse_int(f[4], "rep_count"));
        rec.mean_mse = parse_double(f[5], "mean_mse");
        rec.q025 = parse_double(f[6], "q025");
        rec.q975 = parse_double(f[7], "q975");
        out.push_back(std::move(rec));
    }
    return out;
}

namespace {

std::uint64_t plan_fingerprint(const SimulationPlan& plan) {
    std::string desc;
    desc += "seed=" + format_uint(plan.base_seed);
    desc += ";reps=" + format_int(plan.reps);
    desc += ";timing=" + std::string(plan.record_timing ? "1" : "0");
    for (const auto r : plan.regimes) desc += ";r=" + dim_regime_name(r);
    for (const auto n : plan.n_grid) desc += ";n=" + format_int(n);
    for (const auto d : plan.delta_grid) desc += ";d=" + format_double(d);
    for (const auto& e : plan.estimators) {
        desc += ";e=" + e.name() + ":" + estimator_kind_name(e.kind) + ":" +
                format_int(e.k) + ":" + format_int(e.ell) + ":" + format_double(e.pinv_tol);
    }
    const DgpConfig& g = plan.dgp;
    desc += ";dgp=" + format_int(g.k) + ":" + format_int(g.ell) + ":" +
            format_double(g.alpha) + ":" + format_double(g.rho) + ":" +
            format_double(g.sigma_eps) + ":" + format_double(g.c1) + ":" +
            format_double(g.gamma_scale);
    return fnv1a(0xCBF29CE484222325ULL,
                 reinterpret_cast<const unsigned char*>(desc.data()), desc.size());
}

std::string shard_name(std::size_t cell_idx) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "cell_%05zu.csv", cell_idx);
    return std::string(buf);
}

}  // namespace

std::string plan_fingerprint_hex(const SimulationPlan& plan) {
    return hex64(plan_fingerprint(plan));
}

SweepResult run_sweep(const SimulationPlan& plan, const std::string& out_dir, bool resume,
                      bool progress) {
    plan.validate();
    const std::vector<Cell> cells = plan_cells(plan);
    const fs_std::path out_path(out_dir);
    const fs_std::path shard_dir = out_path / ".ccr_cells";
    const fs_std::path manifest_path = shard_dir / "manifest.txt";
    std::error_code ec;
    fs_std::create_directories(shard_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + shard_dir.string() + "'");

    const std::string fingerprint = plan_fingerprint_hex(plan);

    std::vector<bool> done(cells.size(), false);
    if (resume && fs_std::exists(manifest_path)) {
        std::ifstream manifest(manifest_path);
        std::string line;
        bool fingerprint_ok = false;
        while (std::getline(manifest, line)) {
            if (line.rfind("plan ", 0) == 0) {
                if (line.substr(5) != fingerprint) {
                    throw ConfigError("--resume: existing manifest belongs to a different plan");
                }
                fingerprint_ok = true;
            } else if (line.rfind("done ", 0) == 0) {
                const std::size_t idx = parse_uint(line.substr(5), "manifest cell index");
                if (idx < cells.size() && fs_std::exists(shard_dir / shard_name(idx))) {
                    done[idx] = true;
                }
            }
        }
        if (!fingerprint_ok) {
            std::fill(done.begin(), done.end(), false);
        }
    } else {
        // Fresh start: drop any stale shards.
        for (std::size_t i = 0; i < cells.size(); ++i) {
            fs_std::remove(shard_dir / shard_name(i), ec);
        }
        fs_std::remove(manifest_path, ec);
    }

    std::ofstream manifest(manifest_path, std::ios::app);
    if (!manifest) throw IoError("cannot open manifest '" + manifest_path.string() + "'");
    bool need_plan_line = true;
    if (resume) {
        std::ifstream probe(manifest_path);
        std::string line;
        while (std::getline(probe, line)) {
            if (line.rfind("plan ", 0) == 0) need_plan_line = false;
        }
    }
    if (need_plan_line) {
        manifest << "plan " << fingerprint << '\n';
        manifest.flush();
    }

    std::vector<std::size_t> pending;
    std::size_t skipped = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (done[i]) {
            ++skipped;
        } else {
            pending.push_back(i);
        }
    }

    std::size_t completed = skipped;
    execute_cells(plan, cells, pending,
                  [&](std::size_t cell_idx, std::vector<ReplicationRecord>&& rows) {
                      const fs_std::path shard = shard_dir / shard_name(cell_idx);
                      const fs_std::path tmp = shard_dir / (shard_name(cell_idx) + ".tmp");
                      write_replication_csv(rows, tmp.string());
                      fs_std::rename(tmp, shard);
                      manifest << "done " << cell_idx << '\n';
                      manifest.flush();
                      ++completed;
                      if (progress) {
                          const Cell& cell = cells[cell_idx];
                          std::fprintf(stderr, "[%zu/%zu] cell %s n=%lld delta=%s done\n",
                                       completed, cells.size(),
                                       dim_regime_name(cell.regime).c_str(),
                                       static_cast<long long>(cell.n),
                                       format_double(cell.delta).c_str());
                      }
                  });

    // Finalize: concatenate shards in canonical cell order.
    SweepResult result;
    result.cells_skipped = skipped;
    result.replication_csv = (out_path / "replications.csv").string();
    result.summary_csv = (out_path / "summary.csv").string();

    std::vector<ReplicationRecord> all_records;
    all_records.reserve(plan_row_count(plan));
    {
        std::ofstream out = open_for_write(result.replication_csv);
        out << kReplicationHeader << '\n';
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const fs_std::path shard = shard_dir / shard_name(i);
            std::vector<ReplicationRecord> rows = read_replication_csv(shard.string());
            for (const auto& row : rows) {
                out << replication_row(row) << '\n';
            }
            for (auto& row : rows) all_records.push_back(std::move(row));
        }
        out.flush();
        if (!out) throw IoError("failed writing '" + result.replication_csv + "'");
    }
    result.rows = all_records.size();

    write_summary_csv(summarize(all_records), result.summary_csv);

    fs_std::remove_all(shard_dir, ec);
    return result;
}

}  // namespace ccr
