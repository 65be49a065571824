#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "vislab/boolean_model.hpp"
#include "vislab/cylinder_model.hpp"
#include "vislab/simharness.hpp"

namespace vislab {

enum class ModelKind { BM, PC, BI };

/// "bm", "pc" or "bi" (case-sensitive). Throws std::invalid_argument.
ModelKind parse_model(const std::string& name);
std::string to_string(ModelKind model);

/// BM: 1/r. PC: 1 in d = 2, 1/r otherwise. BI: log^2 r / r in d = 3, 1/r for d >= 4.
double visibility_window(ModelKind model, int d, double r);

/// Model and parameters. rho is used by PC and BI, radius_law by BM.
struct ModelSpec {
    ModelKind model = ModelKind::BM;
    int d = 2;
    double alpha = 1.0;
    double rho = 1.0;
    std::string radius_law = "const:1";

    /// Throws std::domain_error (dimension rules) or std::invalid_argument.
    void validate() const;
    BooleanParams boolean_params() const;
    CylinderParams cylinder_params() const;
    bool operator==(const ModelSpec&) const = default;
};

double model_lambda(const ModelSpec& spec);

/// exp(-lambda s).
double limit_survival(const ModelSpec& spec, double s);

/// P[Q > s delta_r | visible] at finite r (BM and PC only).
double exact_survival(const ModelSpec& spec, double r, double s);

/// Sup distance between the empirical CDF of `sorted` and cdf. With censor_at, samples
/// >= censor_at are censored and the comparison runs over [0, censor_at].
/// Throws std::invalid_argument if the samples are not sorted or empty.
double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf,
                    std::optional<double> censor_at = std::nullopt);

/// n conditional scenes at distance r (BM or PC); Q capped at cap_s * delta_r.
/// Scene i draws from stream.substream(i).
std::vector<SampleRow> simulate_q(const ModelSpec& spec, double r, double cap_s, std::uint64_t n,
                                  const RngStream& stream, unsigned threads = 0);

/// Cap on Q / delta_r: q_cap_mult, lowered so that the aperture stays below 0.999 r.
double censor_level(const ModelSpec& spec, double r, double q_cap_mult);

struct ExperimentConfig {
    ModelSpec model;
    std::vector<double> r_list;
    /// Scenes per r (BM, PC) or coupled walkers per r (BI).
    std::uint64_t n_scenes = 10000;
    std::vector<double> s_grid{0.5, 1.0, 2.0};
    std::uint64_t seed = 1;
    double q_cap_mult = 50.0;

    void validate() const;
    bool operator==(const ExperimentConfig&) const = default;
};

struct RRecord {
    double r = 0;
    double delta = 0;
    double censor_s = 0;
    /// BI entries are capacity-functional estimates, not per-scene samples.
    bool functional_level = false;
    std::optional<double> ks_exact, ks_limit;
    std::optional<double> censored_fraction;
    std::vector<std::optional<double>> empirical, empirical_lo, empirical_hi, exact;
    std::vector<double> limit;
    std::string failure;
    bool operator==(const RRecord&) const = default;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<RRecord> records;
    /// Seconds per r; reported on the side, never serialised.
    std::vector<double> wall_seconds;

    bool operator==(const ExperimentReport& o) const { return config == o.config && records == o.records; }
};

/// Runs every r of the config; r_list[k] uses RngStream(seed, 0).substream(k). A failure at
/// one r is recorded in that record and the run continues.
ExperimentReport run_experiment(const ExperimentConfig& config, unsigned threads = 0);

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& j);

}  // namespace vislab
