#include "vislab/limitlaw.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "vislab/interlacements.hpp"
#include "vislab/parallel.hpp"

namespace vislab {

ModelKind parse_model(const std::string& name) {
    if (name == "bm") return ModelKind::BM;
    if (name == "pc") return ModelKind::PC;
    if (name == "bi") return ModelKind::BI;
    throw std::invalid_argument("unknown model '" + name + "' (expected bm, pc or bi)");
}

std::string to_string(ModelKind model) {
    switch (model) {
        case ModelKind::BM: return "bm";
        case ModelKind::PC: return "pc";
        case ModelKind::BI: return "bi";
    }
    return "?";
}

double visibility_window(ModelKind model, int d, double r) {
    Dimension dim(d);
    if (!(r > 1.0)) throw std::domain_error("visibility_window: r must exceed 1");
    switch (model) {
        case ModelKind::BM: return 1.0 / r;
        case ModelKind::PC: return cylinder_window(d, r);
        case ModelKind::BI:
            dim.require_transient();
            return bi_window(d, r);
    }
    return 0.0;
}

void ModelSpec::validate() const {
    Dimension dim(d);
    if (model == ModelKind::BI) dim.require_transient();
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be positive and finite");
    if (model == ModelKind::BM)
        (void)RadiusLaw::parse(radius_law);
    else if (!(rho > 0.0) || !std::isfinite(rho))
        throw std::invalid_argument("rho must be positive and finite");
}

BooleanParams ModelSpec::boolean_params() const {
    return BooleanParams(alpha, RadiusLaw::parse(radius_law), Dimension(d));
}

CylinderParams ModelSpec::cylinder_params() const { return CylinderParams(alpha, rho, Dimension(d)); }

double model_lambda(const ModelSpec& spec) {
    spec.validate();
    switch (spec.model) {
        case ModelKind::BM: return lambda_bm(spec.boolean_params());
        case ModelKind::PC: return lambda_pc(spec.cylinder_params());
        case ModelKind::BI: return lambda_bi(spec.alpha, spec.rho, spec.d);
    }
    return 0.0;
}

double limit_survival(const ModelSpec& spec, double s) {
    if (!(s >= 0.0)) throw std::domain_error("limit_survival: s must be >= 0");
    return std::exp(-model_lambda(spec) * s);
}

double exact_survival(const ModelSpec& spec, double r, double s) {
    spec.validate();
    switch (spec.model) {
        case ModelKind::BM: return conditional_survival_exact(spec.boolean_params(), r, s);
        case ModelKind::PC: return conditional_survival_exact(spec.cylinder_params(), r, s);
        case ModelKind::BI: break;
    }
    throw std::domain_error("exact_survival: no finite-r closed form for bi");
}

double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf,
                    std::optional<double> censor_at) {
    if (sorted.empty()) throw std::invalid_argument("ks_statistic: no samples");
    if (!std::is_sorted(sorted.begin(), sorted.end())) throw std::invalid_argument("ks_statistic: samples not sorted");
    const double n = static_cast<double>(sorted.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (censor_at && sorted[i] >= *censor_at) {
            ks = std::max(ks, std::abs(i / n - cdf(*censor_at)));
            return std::min(ks, 1.0);
        }
        const double f = cdf(sorted[i]);
        ks = std::max({ks, std::abs((i + 1) / n - f), std::abs(i / n - f)});
    }
    return std::min(ks, 1.0);
}

double censor_level(const ModelSpec& spec, double r, double q_cap_mult) {
    if (!(q_cap_mult > 0.0)) throw std::invalid_argument("q_cap_mult must be positive");
    return std::min(q_cap_mult, 0.999 * r / visibility_window(spec.model, spec.d, r));
}

std::vector<SampleRow> simulate_q(const ModelSpec& spec, double r, double cap_s, std::uint64_t n,
                                  const RngStream& stream, unsigned threads) {
    spec.validate();
    if (spec.model == ModelKind::BI)
        throw std::domain_error("simulate_q: no conditional scene sampler for bi (use the capacity estimator)");
    const double delta = visibility_window(spec.model, spec.d, r);
    const double q_cap = cap_s * delta;
    if (!(q_cap > 0.0 && q_cap < r)) throw std::domain_error("simulate_q: need 0 < cap * delta_r < r");
    std::vector<SampleRow> rows(n);
    auto record = [&](std::size_t i, QSample q) { rows[i] = {i, q.q, q.q / delta, q.censored}; };
    if (spec.model == ModelKind::BM) {
        const BooleanParams p = spec.boolean_params();
        parallel_for(n, resolve_threads(threads), [&](std::size_t i) {
            RngStream s = stream.substream(i);
            record(i, sample_Q(sample_conditional_scene(p, r, q_cap, s), q_cap));
        });
    } else {
        const CylinderParams p = spec.cylinder_params();
        parallel_for(n, resolve_threads(threads), [&](std::size_t i) {
            RngStream s = stream.substream(i);
            record(i, sample_Q(sample_conditional_scene(p, r, q_cap, s), q_cap));
        });
    }
    return rows;
}

void ExperimentConfig::validate() const {
    model.validate();
    if (r_list.empty()) throw std::invalid_argument("r_list is empty");
    for (std::size_t i = 0; i < r_list.size(); ++i) {
        if (!(r_list[i] > 1.0) || !std::isfinite(r_list[i])) throw std::invalid_argument("every r must exceed 1");
        if (i > 0 && !(r_list[i] > r_list[i - 1])) throw std::invalid_argument("r_list must be increasing");
    }
    if (model.model == ModelKind::BI && r_list.front() <= std::exp(1.0))
        throw std::invalid_argument("bi needs every r > e");
    if (n_scenes < 100) throw std::invalid_argument("n_scenes must be at least 100");
    if (s_grid.empty()) throw std::invalid_argument("s_grid is empty");
    for (double s : s_grid)
        if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("s values must be finite and >= 0");
    if (!(q_cap_mult > 0.0)) throw std::invalid_argument("q_cap_mult must be positive");
}

namespace {

RRecord scene_record(const ExperimentConfig& cfg, double r, const RngStream& stream, unsigned threads) {
    const ModelSpec& spec = cfg.model;
    RRecord rec;
    rec.r = r;
    rec.delta = visibility_window(spec.model, spec.d, r);
    rec.censor_s = censor_level(spec, r, cfg.q_cap_mult);
    const auto rows = simulate_q(spec, r, rec.censor_s, cfg.n_scenes, stream, threads);
    std::vector<double> qs(rows.size());
    std::uint64_t censored = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        qs[i] = rows[i].q_over_delta;
        censored += rows[i].censored;
    }
    std::sort(qs.begin(), qs.end());
    const double n = static_cast<double>(qs.size());
    rec.censored_fraction = censored / n;
    const double lambda = model_lambda(spec);
    const ChebyshevInterpolant log_surv([&](double s) { return std::log(exact_survival(spec, r, s)); }, 0.0,
                                        rec.censor_s, 41);
    rec.ks_exact = ks_statistic(qs, [&](double s) { return 1.0 - std::exp(log_surv(s)); }, rec.censor_s);
    rec.ks_limit = ks_statistic(qs, [&](double s) { return 1.0 - std::exp(-lambda * s); }, rec.censor_s);
    for (double s : cfg.s_grid) {
        rec.limit.push_back(std::exp(-lambda * s));
        if (s >= rec.censor_s) {
            rec.empirical.push_back(std::nullopt);
            rec.empirical_lo.push_back(std::nullopt);
            rec.empirical_hi.push_back(std::nullopt);
            rec.exact.push_back(std::nullopt);
            continue;
        }
        const auto above = static_cast<std::uint64_t>(qs.end() - std::upper_bound(qs.begin(), qs.end(), s));
        const BinomialCI ci = bernoulli_ci(above, qs.size());
        rec.empirical.push_back(ci.p_hat);
        rec.empirical_lo.push_back(ci.lo);
        rec.empirical_hi.push_back(ci.hi);
        rec.exact.push_back(exact_survival(spec, r, s));
    }
    return rec;
}

RRecord functional_record(const ExperimentConfig& cfg, double r, const RngStream& stream, unsigned threads) {
    const ModelSpec& spec = cfg.model;
    RRecord rec;
    rec.r = r;
    rec.delta = visibility_window(spec.model, spec.d, r);
    rec.censor_s = censor_level(spec, r, cfg.q_cap_mult);
    rec.functional_level = true;
    const double lambda = model_lambda(spec);
    const CoupledRun run =
        conditional_survival_mc(spec.alpha, spec.rho, spec.d, r, cfg.s_grid, cfg.n_scenes, stream, threads);
    if (run.coupling_violations > 0) throw std::runtime_error("coupled estimator: nesting violated");
    for (std::size_t i = 0; i < cfg.s_grid.size(); ++i) {
        const auto& e = run.estimates[i];
        rec.empirical.push_back(e.probability);
        rec.empirical_lo.push_back(e.lo);
        rec.empirical_hi.push_back(e.hi);
        rec.exact.push_back(std::nullopt);
        rec.limit.push_back(std::exp(-lambda * cfg.s_grid[i]));
    }
    return rec;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config, unsigned threads) {
    config.validate();
    ExperimentReport report{config, {}, {}};
    const RngStream root(config.seed, 0);
    for (std::size_t k = 0; k < config.r_list.size(); ++k) {
        const double r = config.r_list[k];
        const auto start = std::chrono::steady_clock::now();
        try {
            report.records.push_back(config.model.model == ModelKind::BI
                                         ? functional_record(config, r, root.substream(k), threads)
                                         : scene_record(config, r, root.substream(k), threads));
        } catch (const std::exception& e) {
            RRecord failed;
            failed.r = r;
            failed.failure = e.what();
            report.records.push_back(failed);
        }
        report.wall_seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return report;
}

namespace {

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

nlohmann::json opt_list(const std::vector<std::optional<double>>& v) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& x : v) out.push_back(opt(x));
    return out;
}

std::optional<double> get_opt(const nlohmann::json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

std::vector<std::optional<double>> get_opt_list(const nlohmann::json& j) {
    std::vector<std::optional<double>> out;
    for (const auto& x : j) out.push_back(get_opt(x));
    return out;
}

}  // namespace

nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json j{{"model", to_string(c.model.model)},
                     {"d", c.model.d},
                     {"alpha", c.model.alpha},
                     {"r_list", c.r_list},
                     {"n_scenes", c.n_scenes},
                     {"s_grid", c.s_grid},
                     {"seed", c.seed},
                     {"q_cap_mult", c.q_cap_mult}};
    if (c.model.model == ModelKind::BM)
        j["radius_law"] = c.model.radius_law;
    else
        j["rho"] = c.model.rho;
    return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.model.model = parse_model(j.at("model").get<std::string>());
    c.model.d = j.at("d").get<int>();
    c.model.alpha = j.at("alpha").get<double>();
    if (j.contains("rho")) c.model.rho = j.at("rho").get<double>();
    if (j.contains("radius_law")) c.model.radius_law = j.at("radius_law").get<std::string>();
    c.r_list = j.at("r_list").get<std::vector<double>>();
    c.n_scenes = j.at("n_scenes").get<std::uint64_t>();
    c.s_grid = j.at("s_grid").get<std::vector<double>>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.q_cap_mult = j.at("q_cap_mult").get<double>();
    return c;
}

nlohmann::json to_json(const ExperimentReport& report) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : report.records) {
        nlohmann::json j{{"r", r.r}};
        if (!r.failure.empty()) {
            j["failure"] = r.failure;
            records.push_back(j);
            continue;
        }
        j["delta"] = r.delta;
        j["censor_s"] = r.censor_s;
        j["functional_level"] = r.functional_level;
        j["ks_exact"] = opt(r.ks_exact);
        j["ks_limit"] = opt(r.ks_limit);
        j["censored_fraction"] = opt(r.censored_fraction);
        j["empirical_survival"] = opt_list(r.empirical);
        j["empirical_lo"] = opt_list(r.empirical_lo);
        j["empirical_hi"] = opt_list(r.empirical_hi);
        j["exact_survival"] = opt_list(r.exact);
        j["limit_survival"] = r.limit;
        records.push_back(j);
    }
    return {{"schema_version", kSchemaVersion},
            {"config", to_json(report.config)},
            {"lambda", model_lambda(report.config.model)},
            {"records", records}};
}

ExperimentReport report_from_json(const nlohmann::json& j) {
    if (j.at("schema_version").get<int>() != kSchemaVersion)
        throw std::runtime_error("unsupported report schema_version " + j.at("schema_version").dump());
    ExperimentReport report{config_from_json(j.at("config")), {}, {}};
    for (const auto& x : j.at("records")) {
        RRecord r;
        r.r = x.at("r").get<double>();
        if (x.contains("failure")) {
            r.failure = x.at("failure").get<std::string>();
            report.records.push_back(r);
            continue;
        }
        r.delta = x.at("delta").get<double>();
        r.censor_s = x.at("censor_s").get<double>();
        r.functional_level = x.at("functional_level").get<bool>();
        r.ks_exact = get_opt(x.at("ks_exact"));
        r.ks_limit = get_opt(x.at("ks_limit"));
        r.censored_fraction = get_opt(x.at("censored_fraction"));
        r.empirical = get_opt_list(x.at("empirical_survival"));
        r.empirical_lo = get_opt_list(x.at("empirical_lo"));
        r.empirical_hi = get_opt_list(x.at("empirical_hi"));
        r.exact = get_opt_list(x.at("exact_survival"));
        r.limit = x.at("limit_survival").get<std::vector<double>>();
        report.records.push_back(r);
    }
    return report;
}

}  // namespace vislab
