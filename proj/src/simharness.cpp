#include "vislab/simharness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "vislab/mathcore.hpp"

namespace vislab {

BinomialCI bernoulli_ci(std::uint64_t successes, std::uint64_t n, double level) {
    if (n == 0 || successes > n) throw std::domain_error("bernoulli_ci: need 0 <= successes <= n and n >= 1");
    if (!(level > 0.0 && level < 1.0)) throw std::domain_error("bernoulli_ci: level must lie in (0, 1)");
    const double nn = static_cast<double>(n);
    const double p = successes / nn;
    const double z = normal_quantile(0.5 + 0.5 * level);
    const double z2 = z * z;
    const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
    const double half = z / (1 + z2 / nn) * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn));
    BinomialCI ci{p, std::max(0.0, centre - half), std::min(1.0, centre + half), n, level};
    if (successes == 0) ci.lo = 0.0;
    if (successes == n) ci.hi = 1.0;
    ci.lo = std::min(ci.lo, p);
    ci.hi = std::max(ci.hi, p);
    return ci;
}

Ecdf::Ecdf(std::vector<double> samples) : sorted_(std::move(samples)) {
    if (sorted_.empty()) throw std::invalid_argument("Ecdf: no samples");
    for (double v : sorted_)
        if (std::isnan(v)) throw std::invalid_argument("Ecdf: NaN sample");
    std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

std::string samples_csv(const std::vector<SampleRow>& rows) {
    std::string out = "scene_index,q,q_over_delta,censored\n";
    for (const auto& r : rows) {
        out += std::to_string(r.scene_index);
        out += ',';
        out += format_shortest(r.q);
        out += ',';
        out += format_shortest(r.q_over_delta);
        out += r.censored ? ",1\n" : ",0\n";
    }
    return out;
}

void write_samples_csv(const std::string& path, const std::vector<SampleRow>& rows) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    const std::string text = samples_csv(rows);
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

std::vector<SampleRow> read_samples_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(f, line) || line != "scene_index,q,q_over_delta,censored")
        throw std::runtime_error("'" + path + "': unexpected CSV header");
    std::vector<SampleRow> rows;
    while (std::getline(f, line)) {
        std::istringstream in(line);
        std::string a, b, c, d;
        if (!std::getline(in, a, ',') || !std::getline(in, b, ',') || !std::getline(in, c, ',') || !std::getline(in, d))
            throw std::runtime_error("'" + path + "': malformed row " + std::to_string(rows.size() + 1));
        rows.push_back({std::stoull(a), std::stod(b), std::stod(c), d == "1"});
    }
    return rows;
}

void write_json(const std::string& path, const nlohmann::json& value) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << value.dump(2) << '\n';
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for reading");
    try {
        return nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("'" + path + "': " + e.what());
    }
}

}  // namespace vislab
