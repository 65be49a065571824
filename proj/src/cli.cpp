#include "vislab/cli.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "vislab/boolean_model.hpp"
#include "vislab/cylinder_model.hpp"
#include "vislab/interlacements.hpp"
#include "vislab/limitlaw.hpp"
#include "vislab/parallel.hpp"
#include "vislab/simharness.hpp"

namespace vislab {

namespace {

using nlohmann::json;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Options of one subcommand. Values missing on the command line are filled from --config.
class Options {
public:
    explicit Options(CLI::App* app) : app_(app) {
        app_->add_option("--config", config_path_, "JSON file with option values (flags win)");
        app_->add_option("--threads", threads_, "worker threads (default: VISLAB_THREADS, else all cores)");
    }

    template <class T>
    void add(const std::string& name, T& var, const std::string& help) {
        CLI::Option* opt = app_->add_option("--" + name, var, help);
        setters_[name] = {opt, [&var](const json& j) { assign(var, j); }};
    }

    void flag(const std::string& name, bool& var, const std::string& help) {
        CLI::Option* opt = app_->add_flag("--" + name, var, help);
        setters_[name] = {opt, [&var](const json& j) { var = j.get<bool>(); }};
    }

    void merge_config() {
        if (config_path_.empty()) return;
        const json cfg = read_json(config_path_);
        if (!cfg.is_object()) throw UsageError("config '" + config_path_ + "' must hold a JSON object");
        for (const auto& [key, value] : cfg.items()) {
            if (key == "threads") {
                if (app_->count("--threads") == 0) threads_ = value.get<unsigned>();
                continue;
            }
            const auto it = setters_.find(key);
            if (it == setters_.end())
                throw UsageError("config '" + config_path_ + "': unknown option '" + key + "' for " + app_->get_name());
            if (it->second.first->count() > 0) continue;
            try {
                it->second.second(value);
            } catch (const json::exception& e) {
                throw UsageError("config '" + config_path_ + "': bad value for '" + key + "': " + e.what());
            }
        }
    }

    unsigned threads() const { return threads_; }

private:
    template <class T>
    static void assign(T& var, const json& j) {
        var = j.get<T>();
    }
    template <class T>
    static void assign(std::optional<T>& var, const json& j) {
        var = j.get<T>();
    }
    static void assign(std::vector<double>& var, const json& j) {
        if (!j.is_string()) {
            var = j.get<std::vector<double>>();
            return;
        }
        var.clear();
        std::stringstream in(j.get<std::string>());
        std::string item;
        while (std::getline(in, item, ',')) {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument("malformed number '" + item + "'");
            var.push_back(v);
        }
    }

    CLI::App* app_;
    std::string config_path_;
    unsigned threads_ = 0;
    std::map<std::string, std::pair<CLI::Option*, std::function<void(const json&)>>> setters_;
};

template <class T>
const T& need(const std::optional<T>& v, const std::string& name, const std::string& why) {
    if (!v) throw UsageError("missing --" + name + " (" + why + ")");
    return *v;
}

struct ModelArgs {
    std::string model;
    std::optional<int> d;
    std::optional<double> alpha;
    std::optional<double> rho;
    std::optional<std::string> radius_law;

    void add(Options& o) {
        o.add("model", model, "bm | pc | bi");
        o.add("d", d, "dimension");
        o.add("alpha", alpha, "intensity");
        o.add("rho", rho, "cylinder / tube radius (pc, bi)");
        o.add("radius-law", radius_law, "radius law const:V | unif:A:B | disc:v@p,... (bm)");
    }

    ModelSpec spec() const {
        ModelSpec s;
        if (model.empty()) throw UsageError("missing --model (bm, pc or bi)");
        s.model = parse_model(model);
        s.d = need(d, "d", "dimension");
        s.alpha = need(alpha, "alpha", "intensity");
        if (s.model == ModelKind::BI && s.d < 3)
            throw UsageError("model bi needs d >= 3 (interlacement capacity requires a transient dimension)");
        if (s.model == ModelKind::BM) {
            if (rho) throw UsageError("--rho applies to pc and bi; use --radius-law for bm");
            s.radius_law = need(radius_law, "radius-law", "bm needs a radius law");
        } else {
            if (radius_law) throw UsageError("--radius-law applies to bm only");
            s.rho = need(rho, "rho", model + " needs a radius");
        }
        s.validate();
        return s;
    }
};

json model_json(const ModelSpec& s) {
    json j{{"model", to_string(s.model)}, {"d", s.d}, {"alpha", s.alpha}};
    if (s.model == ModelKind::BM)
        j["radius_law"] = s.radius_law;
    else
        j["rho"] = s.rho;
    return j;
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

// exact ----------------------------------------------------------------------------------

struct ExactArgs {
    ModelArgs model;
    std::optional<double> r, s;
};

json cmd_exact(const ExactArgs& a) {
    const ModelSpec spec = a.model.spec();
    const double r = need(a.r, "r", "target distance");
    const double s = need(a.s, "s", "scaled aperture");
    if (!(r > 1.0)) throw UsageError("--r must exceed 1");
    if (!(s >= 0.0)) throw UsageError("--s must be >= 0");
    const double lambda = model_lambda(spec);
    json j{{"schema_version", kSchemaVersion},
           {"command", "exact"},
           {"params", model_json(spec)},
           {"model", to_string(spec.model)},
           {"r", r},
           {"s", s},
           {"lambda", lambda},
           {"delta", visibility_window(spec.model, spec.d, r)},
           {"limit_survival", std::exp(-lambda * s)}};
    switch (spec.model) {
        case ModelKind::BM:
            j["visibility_prob"] = visibility_probability(spec.boolean_params(), r);
            j["conditional_survival"] = conditional_survival_exact(spec.boolean_params(), r, s);
            j["evaluation"] = "exact";
            break;
        case ModelKind::PC:
            j["visibility_prob"] = visibility_probability(spec.cylinder_params(), r);
            j["conditional_survival"] = conditional_survival_exact(spec.cylinder_params(), r, s);
            j["evaluation"] = "exact";
            break;
        case ModelKind::BI:
            if (!(r > std::exp(1.0))) throw UsageError("bi needs --r > e");
            j["visibility_prob"] = std::exp(-spec.alpha * capacity_asymptotic(r, spec.rho, spec.d));
            j["conditional_survival"] = std::exp(-lambda * s);
            j["evaluation"] = "asymptotic";
            break;
    }
    return j;
}

// simulate -------------------------------------------------------------------------------

struct SimulateArgs {
    ModelArgs model;
    std::optional<double> r;
    std::optional<std::uint64_t> n, seed;
    std::string out;
    double q_cap_mult = 50.0;
};

json cmd_simulate(const SimulateArgs& a, unsigned threads) {
    const ModelSpec spec = a.model.spec();
    if (spec.model == ModelKind::BI)
        throw UsageError("simulate supports bm and pc; interlacement scenes have no conditional sampler "
                         "(use limit-check --model bi for the capacity-based estimator)");
    const double r = need(a.r, "r", "target distance");
    if (!(r > 1.0)) throw UsageError("--r must exceed 1");
    const std::uint64_t n = need(a.n, "n", "number of scenes");
    const std::uint64_t seed = need(a.seed, "seed", "random seed");
    if (a.out.empty()) throw UsageError("missing --out (CSV path)");
    if (!(a.q_cap_mult > 0.0)) throw UsageError("--q-cap-mult must be positive");
    const double cap = censor_level(spec, r, a.q_cap_mult);
    const auto rows = simulate_q(spec, r, cap, n, RngStream(seed, 0).substream(0), threads);
    write_samples_csv(a.out, rows);
    json j{{"schema_version", kSchemaVersion},
           {"command", "simulate"},
           {"params", model_json(spec)},
           {"r", r},
           {"n", n},
           {"seed", seed},
           {"q_cap_mult", a.q_cap_mult},
           {"censor_s", cap},
           {"delta", visibility_window(spec.model, spec.d, r)},
           {"lambda", model_lambda(spec)},
           {"out", a.out},
           {"insufficient_data", n == 0}};
    if (n == 0) {
        j["ks_exact"] = nullptr;
        j["ks_limit"] = nullptr;
        return j;
    }
    std::vector<double> qs;
    std::uint64_t censored = 0;
    for (const auto& row : rows) {
        qs.push_back(row.q_over_delta);
        censored += row.censored;
    }
    std::sort(qs.begin(), qs.end());
    const double lambda = model_lambda(spec);
    const ChebyshevInterpolant log_surv([&](double s) { return std::log(exact_survival(spec, r, s)); }, 0.0, cap, 41);
    j["ks_exact"] = ks_statistic(qs, [&](double s) { return 1.0 - std::exp(log_surv(s)); }, cap);
    j["ks_limit"] = ks_statistic(qs, [&](double s) { return 1.0 - std::exp(-lambda * s); }, cap);
    j["ks_band_99"] = 1.63 / std::sqrt(static_cast<double>(n));
    const auto cens = bernoulli_ci(censored, n);
    j["censored_fraction"] = {{"p", cens.p_hat}, {"lo", cens.lo}, {"hi", cens.hi}};
    // Survival at the limit mean 1/lambda, with a Wilson interval.
    const double s1 = 1.0 / lambda;
    if (s1 < cap) {
        const auto above = static_cast<std::uint64_t>(qs.end() - std::upper_bound(qs.begin(), qs.end(), s1));
        const auto ci = bernoulli_ci(above, n);
        j["survival_at_mean"] = {{"s", s1},          {"empirical", ci.p_hat}, {"lo", ci.lo}, {"hi", ci.hi},
                                 {"exact", exact_survival(spec, r, s1)}, {"limit", std::exp(-1.0)}};
    }
    return j;
}

// capacity -------------------------------------------------------------------------------

struct CapacityArgs {
    std::string shape;
    std::optional<int> d;
    std::optional<double> r, rho, aperture;
    std::optional<std::uint64_t> n, seed;
    bool truncate_only = false;
};

json cmd_capacity(const CapacityArgs& a, unsigned threads) {
    if (a.shape.empty()) throw UsageError("missing --shape (ball, cylinder or cone)");
    const int d = need(a.d, "d", "dimension");
    if (d < 3) throw UsageError("capacity needs d >= 3 (Brownian motion is recurrent in d <= 2)");
    Dimension dim(d);
    const double r = need(a.r, "r", a.shape == "ball" ? "ball radius" : "segment length");
    const std::uint64_t n = need(a.n, "n", "number of walkers");
    const std::uint64_t seed = need(a.seed, "seed", "random seed");
    if (n == 0) throw UsageError("--n must be positive");
    std::optional<TargetShape> shape;
    json j{{"schema_version", kSchemaVersion}, {"command", "capacity"}, {"shape", a.shape}, {"d", d}, {"r", r}};
    std::optional<double> reference;
    std::string reference_kind;
    if (a.shape == "ball") {
        if (a.rho || a.aperture) throw UsageError("--rho and --aperture do not apply to a ball (use --r)");
        shape = TargetShape::ball(Vect(d), r);
        reference = std::pow(r, d - 2) / green_constant(d);
        reference_kind = "exact";
    } else if (a.shape == "cylinder" || a.shape == "cone") {
        const double rho = need(a.rho, "rho", a.shape + " radius");
        j["rho"] = rho;
        if (a.shape == "cylinder") {
            if (a.aperture) throw UsageError("--aperture applies to cone only");
            shape = TargetShape::segment_cylinder(r, rho, d);
        } else {
            const double q = need(a.aperture, "aperture", "cone aperture");
            j["aperture"] = q;
            shape = TargetShape::cone(r, q, rho, d);
        }
        if (r > std::exp(1.0)) {
            reference = capacity_asymptotic(r, rho, d);
            reference_kind = "cylinder asymptotic";
        }
    } else {
        throw UsageError("unknown --shape '" + a.shape + "' (expected ball, cylinder or cone)");
    }
    WosConfig cfg = WosConfig::for_shape(*shape);
    cfg.truncate_only = a.truncate_only;
    const auto est = estimate_capacity(*shape, cfg, n, RngStream(seed, 0), threads);
    j["n"] = n;
    j["seed"] = seed;
    j["truncate_only"] = a.truncate_only;
    j["estimate"] = est.value;
    j["stderr"] = est.stderr_;
    j["bias_bound"] = est.bias_bound;
    j["hits"] = est.hits;
    j["aborted"] = est.aborted;
    j["launch_mass"] = est.launch_mass;
    j["hit_tolerance"] = cfg.hit_tolerance;
    j["asymptotic"] = reference ? json(*reference) : json(nullptr);
    j["asymptotic_kind"] = reference ? json(reference_kind) : json(nullptr);
    j["ratio"] = reference ? json(est.value / *reference) : json(nullptr);
    return j;
}

// limit-check ----------------------------------------------------------------------------

struct LimitArgs {
    ModelArgs model;
    std::vector<double> r_list, s_grid;
    std::optional<std::uint64_t> n, seed;
    std::string out;
    double q_cap_mult = 50.0;
};

json cmd_limit_check(const LimitArgs& a, unsigned threads, std::ostream& err, bool& failed) {
    ExperimentConfig cfg;
    cfg.model = a.model.spec();
    if (a.r_list.empty()) throw UsageError("missing --r-list (comma-separated increasing r values)");
    cfg.r_list = a.r_list;
    cfg.n_scenes = need(a.n, "n", "scenes per r (walkers per r for bi)");
    cfg.seed = need(a.seed, "seed", "random seed");
    if (!a.s_grid.empty()) cfg.s_grid = a.s_grid;
    cfg.q_cap_mult = a.q_cap_mult;
    if (a.out.empty()) throw UsageError("missing --out (report JSON path)");
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const ExperimentReport report = run_experiment(cfg, threads);
    write_json(a.out, to_json(report));
    json summary = json::array();
    for (std::size_t k = 0; k < report.records.size(); ++k) {
        const auto& rec = report.records[k];
        err << "r = " << rec.r << ": " << report.wall_seconds[k] << " s\n";
        json row{{"r", rec.r}};
        if (!rec.failure.empty()) {
            failed = true;
            err << "r = " << rec.r << " failed: " << rec.failure << '\n';
            row["failure"] = rec.failure;
        } else {
            row["ks_exact"] = rec.ks_exact ? json(*rec.ks_exact) : json(nullptr);
            row["ks_limit"] = rec.ks_limit ? json(*rec.ks_limit) : json(nullptr);
            row["functional_level"] = rec.functional_level;
        }
        summary.push_back(row);
    }
    return {{"schema_version", kSchemaVersion}, {"command", "limit-check"}, {"out", a.out}, {"records", summary}};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Visibility in continuum percolation models"};
    app.name("vislab");
    app.require_subcommand(1);

    ExactArgs exact;
    CLI::App* c_exact = app.add_subcommand("exact", "closed-form visibility and conditional survival");
    Options o_exact(c_exact);
    exact.model.add(o_exact);
    o_exact.add("r", exact.r, "target distance");
    o_exact.add("s", exact.s, "scaled aperture s (Q > s delta_r)");

    SimulateArgs sim;
    CLI::App* c_sim = app.add_subcommand("simulate", "sample conditional scenes and Q");
    Options o_sim(c_sim);
    sim.model.add(o_sim);
    o_sim.add("r", sim.r, "target distance");
    o_sim.add("n", sim.n, "number of scenes");
    o_sim.add("seed", sim.seed, "random seed");
    o_sim.add("out", sim.out, "CSV output path");
    o_sim.add("q-cap-mult", sim.q_cap_mult, "cap on Q / delta_r (default 50)");

    CapacityArgs cap;
    CLI::App* c_cap = app.add_subcommand("capacity", "walk-on-spheres capacity estimate");
    Options o_cap(c_cap);
    o_cap.add("shape", cap.shape, "ball | cylinder | cone");
    o_cap.add("d", cap.d, "dimension (>= 3)");
    o_cap.add("r", cap.r, "ball radius or segment length");
    o_cap.add("rho", cap.rho, "tube radius (cylinder, cone)");
    o_cap.add("aperture", cap.aperture, "cone aperture");
    o_cap.add("n", cap.n, "number of walkers");
    o_cap.add("seed", cap.seed, "random seed");
    o_cap.flag("truncate-only", cap.truncate_only, "stop walkers at the outer sphere instead of re-entering");

    LimitArgs lim;
    CLI::App* c_lim = app.add_subcommand("limit-check", "convergence of Q / delta_r to the exponential limit");
    Options o_lim(c_lim);
    lim.model.add(o_lim);
    o_lim.add("r-list", lim.r_list, "increasing r values, comma-separated");
    c_lim->get_option("--r-list")->delimiter(',');
    o_lim.add("s-grid", lim.s_grid, "s values for survival estimates, comma-separated");
    c_lim->get_option("--s-grid")->delimiter(',');
    o_lim.add("n", lim.n, "scenes per r (walkers per r for bi)");
    o_lim.add("seed", lim.seed, "random seed");
    o_lim.add("out", lim.out, "report JSON path");
    o_lim.add("q-cap-mult", lim.q_cap_mult, "cap on Q / delta_r (default 50)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "vislab: " << e.what() << '\n';
        if (app.get_subcommands().size() == 1) err << "run 'vislab " << app.get_subcommands()[0]->get_name() << " --help'\n";
        return kExitUsage;
    }

    try {
        bool failed = false;
        json result;
        if (c_exact->parsed()) {
            o_exact.merge_config();
            result = cmd_exact(exact);
        } else if (c_sim->parsed()) {
            o_sim.merge_config();
            result = cmd_simulate(sim, o_sim.threads());
        } else if (c_cap->parsed()) {
            o_cap.merge_config();
            result = cmd_capacity(cap, o_cap.threads());
        } else {
            o_lim.merge_config();
            result = cmd_limit_check(lim, o_lim.threads(), err, failed);
        }
        if (failed) return kExitRuntime;
        emit(out, result);
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        err << "vislab: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::domain_error& e) {
        err << "vislab: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "vislab: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace vislab
