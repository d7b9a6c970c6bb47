#include "rembo/benchmark.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace rembo {

namespace fs = std::filesystem;

namespace {

void write_atomically(const fs::path& path, const std::string& contents) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << contents;
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

}  // namespace

void BenchmarkConfig::validate() const {
    if (n_reps < 1) throw std::invalid_argument("reps must be >= 1");
    if (kernels.empty()) throw std::invalid_argument("at least one kernel is required");
    if (parallel < 0) throw std::invalid_argument("parallel must be >= 0");
    if (out_dir.empty()) throw std::invalid_argument("output directory must not be empty");
    make_run_config(*this, kernels.front(), 0).validate();
}

nlohmann::json to_json(const BenchmarkConfig& c) {
    std::vector<std::string> kernels;
    for (auto k : c.kernels) kernels.push_back(to_string(k));
    return {{"D", c.high_dim},   {"d", c.low_dim},
            {"budget", c.budget}, {"reps", c.n_reps},
            {"kernels", kernels}, {"seed", c.base_seed},
            {"out", c.out_dir},   {"parallel", c.parallel},
            {"ybox", c.y_box.to_string()}, {"family", to_string(c.family)},
            {"n_init", c.n_init}, {"ei_budget", c.ei_budget}};
}

void merge_from_json(const nlohmann::json& j, BenchmarkConfig& c) {
    if (!j.is_object()) throw std::invalid_argument("config file must hold a JSON object");
    static const std::vector<std::string> known = {"D",        "d",    "budget", "reps",
                                                   "kernels",  "seed", "out",    "parallel",
                                                   "ybox",     "family", "n_init", "ei_budget"};
    for (const auto& [key, _] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw std::invalid_argument("unknown config key '" + key + "'");
        }
    }
    if (j.contains("D")) c.high_dim = j["D"].get<int>();
    if (j.contains("d")) c.low_dim = j["d"].get<int>();
    if (j.contains("budget")) c.budget = j["budget"].get<int>();
    if (j.contains("reps")) c.n_reps = j["reps"].get<int>();
    if (j.contains("kernels")) {
        c.kernels.clear();
        for (const auto& k : j["kernels"]) c.kernels.push_back(parse_distance_mode(k.get<std::string>()));
    }
    if (j.contains("seed")) c.base_seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
    if (j.contains("parallel")) c.parallel = j["parallel"].get<int>();
    if (j.contains("ybox")) {
        c.y_box = j["ybox"].is_number() ? YBox{YBox::Rule::Fixed, j["ybox"].get<double>()}
                                        : YBox::parse(j["ybox"].get<std::string>());
    }
    if (j.contains("family")) c.family = parse_kernel_family(j["family"].get<std::string>());
    if (j.contains("n_init")) c.n_init = j["n_init"].get<int>();
    if (j.contains("ei_budget")) c.ei_budget = j["ei_budget"].get<int>();
}

RunConfig make_run_config(const BenchmarkConfig& config, DistanceMode mode, int rep) {
    RunConfig rc;
    rc.high_dim = config.high_dim;
    rc.low_dim = config.low_dim;
    rc.mode = mode;
    rc.family = config.family;
    rc.budget = config.budget;
    rc.n_init = config.n_init;
    rc.y_box = config.y_box;
    rc.ei_budget = config.ei_budget;
    const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(rep);
    rc.seeds = {seed, seed, seed, seed};
    return rc;
}

const KernelSummary& Summary::at(const std::string& kernel) const {
    for (const auto& k : kernels) {
        if (k.kernel == kernel) return k;
    }
    throw std::out_of_range("Summary: no kernel '" + kernel + "'");
}

nlohmann::json to_json(const Summary& s) {
    nlohmann::json kernels = nlohmann::json::object();
    for (const auto& k : s.kernels) {
        kernels[k.kernel] = {{"min", k.min},   {"q1", k.q1},       {"median", k.median},
                             {"q3", k.q3},     {"max", k.max},     {"mean", k.mean},
                             {"count", k.count}, {"failed", k.failed}};
    }
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : s.rows) {
        nlohmann::json gap = std::isfinite(r.gap) ? nlohmann::json(r.gap) : nlohmann::json(nullptr);
        rows.push_back({{"kernel", r.kernel}, {"rep", r.rep}, {"seed", r.seed}, {"gap", gap},
                        {"evals", r.evals}});
    }
    return {{"kernels", kernels}, {"replications", rows}};
}

double quantile_type7(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty data");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Summary summarize_rows(std::vector<GapRow> rows) {
    Summary s;
    std::vector<std::string> order;
    for (const auto& r : rows) {
        if (std::find(order.begin(), order.end(), r.kernel) == order.end()) order.push_back(r.kernel);
    }
    for (const auto& name : order) {
        KernelSummary k;
        k.kernel = name;
        std::vector<double> gaps;
        for (const auto& r : rows) {
            if (r.kernel != name) continue;
            if (std::isfinite(r.gap)) {
                gaps.push_back(r.gap);
            } else {
                ++k.failed;
            }
        }
        std::sort(gaps.begin(), gaps.end());
        k.count = static_cast<int>(gaps.size());
        if (!gaps.empty()) {
            k.min = gaps.front();
            k.max = gaps.back();
            k.q1 = quantile_type7(gaps, 0.25);
            k.median = quantile_type7(gaps, 0.5);
            k.q3 = quantile_type7(gaps, 0.75);
            k.mean = std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size());
        } else {
            k.min = k.q1 = k.median = k.q3 = k.max = k.mean = std::numeric_limits<double>::quiet_NaN();
        }
        s.kernels.push_back(k);
    }
    s.rows = std::move(rows);
    return s;
}

Summary summarize(const std::vector<std::string>& gap_files) {
    std::vector<GapRow> rows;
    for (const auto& path : gap_files) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open gap file " + path);
        std::string line;
        bool header = true;
        while (std::getline(in, line)) {
            line = trim(line);
            if (line.empty()) continue;
            if (header) {
                header = false;
                if (line.rfind("kernel,", 0) == 0) continue;
            }
            const auto f = split(line, ',');
            if (f.size() != 6) throw std::runtime_error("malformed gap row in " + path + ": " + line);
            GapRow r;
            r.kernel = f[0];
            r.rep = std::stoi(f[1]);
            r.seed = std::stoull(f[2]);
            r.gap = (f[3].empty() || f[3] == "nan") ? std::numeric_limits<double>::quiet_NaN()
                                                    : std::stod(f[3]);
            r.evals = std::stoi(f[4]);
            r.wall_ms = std::stod(f[5]);
            rows.push_back(std::move(r));
        }
    }
    if (rows.empty()) throw std::runtime_error("summarize: no gap rows found");
    return summarize_rows(std::move(rows));
}

void write_gaps_csv(const std::vector<GapRow>& rows, const std::string& path) {
    std::ostringstream out;
    out << "kernel,rep,seed,gap,evals,wall_ms\n" << std::setprecision(17);
    for (const auto& r : rows) {
        out << r.kernel << ',' << r.rep << ',' << r.seed << ',';
        if (std::isfinite(r.gap)) {
            out << r.gap;
        } else {
            out << "nan";
        }
        out << ',' << r.evals << ',' << std::setprecision(6) << std::fixed << r.wall_ms
            << std::defaultfloat << std::setprecision(17) << '\n';
    }
    write_atomically(path, out.str());
}

BenchmarkResult run_benchmark(const BenchmarkConfig& config) {
    config.validate();
    const fs::path out_dir(config.out_dir);
    fs::create_directories(out_dir / "runs");

    struct Job {
        DistanceMode mode;
        int rep;
    };
    std::vector<Job> jobs;
    for (auto mode : config.kernels) {
        for (int rep = 0; rep < config.n_reps; ++rep) jobs.push_back({mode, rep});
    }
    std::vector<GapRow> rows(jobs.size());
    const int threads = config.parallel > 0 ? config.parallel : omp_get_num_procs();

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const Job job = jobs[i];
        const RunConfig rc = make_run_config(config, job.mode, job.rep);
        GapRow row;
        row.kernel = to_string(job.mode);
        row.rep = job.rep;
        row.seed = rc.seeds.embedding;
        try {
            const RunRecord record = run(rc);
            row.evals = static_cast<int>(record.evaluations.size());
            row.wall_ms = record.wall_ms;
            row.gap = record.ok ? record.final_gap : std::numeric_limits<double>::quiet_NaN();
            const std::string stem = row.kernel + "_rep" + std::to_string(job.rep);
            write_atomically(out_dir / "runs" / (stem + ".json"), to_json(record).dump(1));
            std::ostringstream csv;
            write_csv(record, csv);
            write_atomically(out_dir / "runs" / (stem + ".csv"), csv.str());
        } catch (const std::exception&) {
            row.gap = std::numeric_limits<double>::quiet_NaN();
        }
        rows[i] = std::move(row);
    }

    BenchmarkResult result;
    result.n_runs = static_cast<int>(rows.size());
    result.n_failed = static_cast<int>(
        std::count_if(rows.begin(), rows.end(), [](const GapRow& r) { return !std::isfinite(r.gap); }));
    write_gaps_csv(rows, (out_dir / "gaps.csv").string());
    result.summary = summarize_rows(std::move(rows));
    nlohmann::json summary = to_json(result.summary);
    summary["config"] = to_json(config);
    write_atomically(out_dir / "summary.json", summary.dump(2));
    return result;
}

}  // namespace rembo
