#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "rembo/kernels.hpp"
#include "rembo/optimizer.hpp"

namespace rembo {

/// Replicated kernel comparison. Replication r of every kernel runs with
/// seed base_seed + r, so all kernels see the same embedding and objective.
struct BenchmarkConfig {
    int high_dim = 25;
    int low_dim = 6;
    int budget = 120;
    int n_reps = 20;
    std::vector<DistanceMode> kernels{DistanceMode::YDist, DistanceMode::XDist,
                                      DistanceMode::PsiDist};
    std::uint64_t base_seed = 0;
    std::string out_dir = "bench_out";
    /// Concurrent runs; 0 means one per available core.
    int parallel = 0;
    YBox y_box;
    KernelFamily family = KernelFamily::Matern52;
    int n_init = 0;
    int ei_budget = 0;

    void validate() const;
};

nlohmann::json to_json(const BenchmarkConfig& config);
/// Missing keys keep the values already in `into`.
void merge_from_json(const nlohmann::json& j, BenchmarkConfig& into);

/// Run parameters for one (kernel, replication) cell.
RunConfig make_run_config(const BenchmarkConfig& config, DistanceMode mode, int rep);

struct GapRow {
    std::string kernel;
    int rep = 0;
    std::uint64_t seed = 0;
    /// NaN for a failed run.
    double gap = 0.0;
    int evals = 0;
    double wall_ms = 0.0;
};

struct KernelSummary {
    std::string kernel;
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    double mean = 0.0;
    int count = 0;
    int failed = 0;
};

struct Summary {
    std::vector<KernelSummary> kernels;
    std::vector<GapRow> rows;

    const KernelSummary& at(const std::string& kernel) const;
};

nlohmann::json to_json(const Summary& summary);

/// Type-7 (linear interpolation) sample quantile of sorted data, p in [0, 1].
double quantile_type7(const std::vector<double>& sorted, double p);

/// Per-kernel statistics over the successful rows, kernels in first-seen order.
Summary summarize_rows(std::vector<GapRow> rows);

/// Reads one or more gap CSV files (kernel,rep,seed,gap,evals,wall_ms) and
/// summarizes their concatenation. Throws std::runtime_error when no row parses.
Summary summarize(const std::vector<std::string>& gap_files);

void write_gaps_csv(const std::vector<GapRow>& rows, const std::string& path);

struct BenchmarkResult {
    Summary summary;
    int n_runs = 0;
    int n_failed = 0;
};

/// Runs every (kernel, replication) pair, `parallel` at a time, writing
///   <out>/runs/<kernel>_rep<r>.json and .csv   one record per run
///   <out>/gaps.csv                             one row per run
///   <out>/summary.json
/// Each file is written to a temporary name and renamed into place.
BenchmarkResult run_benchmark(const BenchmarkConfig& config);

}  // namespace rembo
