#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "vislab/geometry.hpp"

namespace vislab {

inline constexpr int kSchemaVersion = 1;

struct BinomialCI {
    double p_hat, lo, hi;
    std::uint64_t n;
    double level;
};

/// Wilson score interval. Throws std::domain_error unless 0 <= successes <= n, n >= 1, level in (0, 1).
BinomialCI bernoulli_ci(std::uint64_t successes, std::uint64_t n, double level = 0.95);

/// Right-continuous empirical distribution function.
class Ecdf {
public:
    explicit Ecdf(std::vector<double> samples);
    double operator()(double x) const;
    std::size_t size() const noexcept { return sorted_.size(); }
    const std::vector<double>& sorted() const noexcept { return sorted_; }

private:
    std::vector<double> sorted_;
};

struct SampleRow {
    std::uint64_t scene_index;
    double q;
    double q_over_delta;
    bool censored;
    bool operator==(const SampleRow&) const = default;
};

/// CSV text with header `scene_index,q,q_over_delta,censored`, LF line ends, shortest
/// round-trip decimals and censored as 0/1.
std::string samples_csv(const std::vector<SampleRow>& rows);
void write_samples_csv(const std::string& path, const std::vector<SampleRow>& rows);
std::vector<SampleRow> read_samples_csv(const std::string& path);

/// Writes value.dump(2) plus a trailing newline. Errors carry the path.
void write_json(const std::string& path, const nlohmann::json& value);
nlohmann::json read_json(const std::string& path);

}  // namespace vislab
