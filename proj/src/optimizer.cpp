#include "rembo/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

#include "rembo/acquisition.hpp"
#include "rembo/gp.hpp"
#include "rembo/rng.hpp"

namespace rembo {

namespace {

constexpr int kPsiOversampling = 5;
constexpr int kRedrawsPerPoint = 100;

std::vector<double> to_vector(const Vector& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

bool same_point(const HighPoint& a, const HighPoint& b, double tol) {
    return (a - b).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

YBox YBox::parse(std::string_view text) {
    if (text == "sqrt_d") return {Rule::SqrtD, 0.0};
    if (text == "gamma") return {Rule::Gamma, 0.0};
    const std::string s(text);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || !(value > 0.0) || !std::isfinite(value)) {
        throw std::invalid_argument("ybox must be 'sqrt_d', 'gamma' or a positive number, got '" +
                                    s + "'");
    }
    return {Rule::Fixed, value};
}

std::string YBox::to_string() const {
    switch (rule) {
        case Rule::SqrtD: return "sqrt_d";
        case Rule::Gamma: return "gamma";
        case Rule::Fixed: {
            std::ostringstream os;
            os << std::setprecision(17) << value;
            return os.str();
        }
    }
    return "?";
}

double YBox::resolve(const Embedding& e) const {
    switch (rule) {
        case Rule::SqrtD: return std::sqrt(static_cast<double>(e.low_dim()));
        case Rule::Gamma: return gamma_bound(e);
        case Rule::Fixed: return value;
    }
    return 0.0;
}

void RunConfig::validate() const {
    if (low_dim < 1 || low_dim > high_dim) {
        throw std::invalid_argument("RunConfig: need 1 <= d <= D");
    }
    if (high_dim < 6) throw std::invalid_argument("RunConfig: Hartmann6 needs D >= 6");
    if (resolved_n_init() < 2) throw std::invalid_argument("RunConfig: n_init must be >= 2");
    if (budget < resolved_n_init()) {
        throw std::invalid_argument("RunConfig: budget " + std::to_string(budget) +
                                    " is smaller than the initial design (" +
                                    std::to_string(resolved_n_init()) + ")");
    }
    if (y_box.rule == YBox::Rule::Fixed && !(y_box.value > 0.0)) {
        throw std::invalid_argument("RunConfig: y_box must be > 0");
    }
    if (!(nugget_rel >= 0.0)) throw std::invalid_argument("RunConfig: nugget must be >= 0");
    if (resolved_ei_budget() < 1) throw std::invalid_argument("RunConfig: ei_budget must be >= 1");
}

nlohmann::json to_json(const RunConfig& c) {
    return {{"D", c.high_dim},
            {"d", c.low_dim},
            {"mode", to_string(c.mode)},
            {"family", to_string(c.family)},
            {"budget", c.budget},
            {"n_init", c.resolved_n_init()},
            {"y_box", c.y_box.to_string()},
            {"seeds",
             {{"embedding", c.seeds.embedding},
              {"objective", c.seeds.objective},
              {"design", c.seeds.design},
              {"acquisition", c.seeds.acquisition}}},
            {"nugget_rel", c.nugget_rel},
            {"ei_budget", c.resolved_ei_budget()},
            {"filter_duplicates", c.filter_duplicates},
            {"mle_starts", c.mle_starts},
            {"mle_evals_per_start", c.mle_evals_per_start}};
}

PointSet initial_design(const RunConfig& config, const Embedding& e) {
    const int n = config.resolved_n_init();
    const Box box = Box::symmetric(e.low_dim(), config.y_box.resolve(e));
    Rng rng(config.seeds.design, 0xde5);

    if (config.mode == DistanceMode::PsiDist) {
        const PointSet pool = latin_hypercube(kPsiOversampling * n, box, rng);
        const PointSet warped = kernel_images(DistanceMode::PsiDist, e, pool);
        const std::vector<int> pick = greedy_maximin(warped, n);
        PointSet design(n, e.low_dim());
        for (int i = 0; i < n; ++i) design.row(i) = pool.row(pick[i]);
        return design;
    }

    PointSet design = latin_hypercube(n, box, rng);
    if (!config.filter_duplicates) return design;

    std::vector<HighPoint> images;
    images.reserve(n);
    int redraws = 0;
    for (int i = 0; i < n; ++i) {
        HighPoint image = convex_project(e.embed(design.row(i).transpose()));
        auto clashes = [&](const HighPoint& candidate) {
            for (const auto& other : images) {
                if (same_point(candidate, other, kDuplicateTolerance)) return true;
            }
            return false;
        };
        while (clashes(image)) {
            if (++redraws > kRedrawsPerPoint * n) {
                throw DesignError("initial_design: could not remove duplicate X images after " +
                                  std::to_string(kRedrawsPerPoint * n) +
                                  " redraws (degenerate embedding?)");
            }
            for (int j = 0; j < e.low_dim(); ++j) design(i, j) = rng.uniform(box.lower[j], box.upper[j]);
            image = convex_project(e.embed(design.row(i).transpose()));
        }
        images.push_back(std::move(image));
    }
    return design;
}

std::vector<std::pair<int, int>> RunRecord::duplicate_pairs(double tol) const {
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 0; i < evaluations.size(); ++i) {
        for (std::size_t j = i + 1; j < evaluations.size(); ++j) {
            if (same_point(evaluations[i].x, evaluations[j].x, tol)) {
                out.emplace_back(static_cast<int>(i), static_cast<int>(j));
            }
        }
    }
    return out;
}

RunRecord run(const RunConfig& config) {
    const auto started = std::chrono::steady_clock::now();
    config.validate();

    RunRecord record;
    record.config = config;
    auto embedding =
        std::make_shared<const Embedding>(sample_embedding(config.high_dim, config.low_dim, config.seeds.embedding));
    const ObjectiveInstance objective =
        embed_objective(CoreFunction::Hartmann6, config.high_dim, config.seeds.objective);
    record.embedding = to_json(*embedding);
    record.objective = to_json(objective);
    record.f_min = objective.f_min();
    record.y_box = config.y_box.resolve(*embedding);
    const Box box = Box::symmetric(config.low_dim, record.y_box);

    const int n_init = config.resolved_n_init();
    Dataset data;
    data.ys.resize(0, config.low_dim);
    double best = std::numeric_limits<double>::infinity();

    auto evaluate = [&](int iteration, const LowPoint& y) {
        Evaluation ev;
        ev.iteration = iteration;
        ev.y = y;
        ev.x = convex_project(embedding->embed(y));
        ev.value = objective(ev.x);
        best = std::min(best, ev.value);
        ev.best_so_far = best;
        const Eigen::Index n = data.ys.rows();
        data.ys.conservativeResize(n + 1, Eigen::NoChange);
        data.ys.row(n) = y.transpose();
        data.zs.conservativeResize(n + 1);
        data.zs[n] = ev.value;
        record.evaluations.push_back(std::move(ev));
    };

    auto finish = [&]() {
        if (!record.evaluations.empty()) {
            record.final_gap = optimality_gap(objective, best);
        } else {
            record.final_gap = std::numeric_limits<double>::quiet_NaN();
        }
        record.wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - started)
                             .count();
        return record;
    };

    try {
        const PointSet design = initial_design(config, *embedding);
        for (int i = 0; i < n_init; ++i) evaluate(i, design.row(i).transpose());

        KernelSpec kernel;
        kernel.family = config.family;
        kernel.mode = config.mode;
        FitOptions fit_options;
        fit_options.nugget_rel = config.nugget_rel;
        fit_options.n_starts = config.mle_starts;
        fit_options.evals_per_start = config.mle_evals_per_start;

        for (int it = n_init; it < config.budget; ++it) {
            fit_options.seed = derive_seed(config.seeds.acquisition, "mle", static_cast<std::uint64_t>(it));
            const GpModel model = fit(data, kernel, embedding, fit_options);
            const AcqResult acq =
                maximize_ei(model, box, config.resolved_ei_budget(),
                            derive_seed(config.seeds.acquisition, "ei", static_cast<std::uint64_t>(it)));
            record.fits.push_back({it, model.spec().variance, model.spec().lengthscale,
                                   model.nugget(), model.log_likelihood(), acq.ei_value,
                                   acq.n_evals});
            evaluate(it, acq.y_star);
        }
    } catch (const GpFitError& err) {
        record.ok = false;
        record.error = err.what();
    } catch (const DesignError& err) {
        record.ok = false;
        record.error = err.what();
    }
    return finish();
}

nlohmann::json to_json(const RunRecord& r) {
    nlohmann::json evals = nlohmann::json::array();
    for (const auto& ev : r.evaluations) {
        evals.push_back({{"iteration", ev.iteration},
                         {"y", to_vector(ev.y)},
                         {"x", to_vector(ev.x)},
                         {"value", ev.value},
                         {"best_so_far", ev.best_so_far}});
    }
    nlohmann::json fits = nlohmann::json::array();
    for (const auto& f : r.fits) {
        fits.push_back({{"iteration", f.iteration},
                        {"variance", f.variance},
                        {"lengthscale", f.lengthscale},
                        {"nugget", f.nugget},
                        {"log_likelihood", f.log_likelihood},
                        {"ei", f.ei},
                        {"ei_evals", f.ei_evals}});
    }
    nlohmann::json j = {{"config", to_json(r.config)},
                        {"embedding", r.embedding},
                        {"objective", r.objective},
                        {"y_box", r.y_box},
                        {"f_min", r.f_min},
                        {"evaluations", std::move(evals)},
                        {"fits", std::move(fits)},
                        {"wall_ms", r.wall_ms},
                        {"status", r.ok ? "ok" : "error"}};
    if (std::isfinite(r.final_gap)) {
        j["final_gap"] = r.final_gap;
    } else {
        j["final_gap"] = nullptr;
    }
    if (!r.ok) j["error"] = r.error;
    return j;
}

void write_csv(const RunRecord& r, std::ostream& out) {
    const int d = r.config.low_dim;
    const int D = r.config.high_dim;
    out << "iteration";
    for (int j = 1; j <= d; ++j) out << ",y" << j;
    for (int j = 1; j <= D; ++j) out << ",x" << j;
    out << ",value,best_so_far\n";
    out << std::setprecision(17);
    for (const auto& ev : r.evaluations) {
        out << ev.iteration;
        for (int j = 0; j < d; ++j) out << ',' << ev.y[j];
        for (int j = 0; j < D; ++j) out << ',' << ev.x[j];
        out << ',' << ev.value << ',' << ev.best_so_far << '\n';
    }
}

}  // namespace rembo
