#include "vislab/boolean_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace vislab {

namespace {

double parse_number(std::string_view text, const std::string& spec) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty())
        throw std::invalid_argument("radius law '" + spec + "': bad number '" + std::string(text) + "'");
    return v;
}

void require_positive_radius(double v) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("radius law: radii must be positive and finite");
}

}  // namespace

RadiusLaw RadiusLaw::constant(double value) {
    require_positive_radius(value);
    return RadiusLaw(Kind::Constant, value, value, {{value, 1.0}});
}

RadiusLaw RadiusLaw::uniform(double a, double b) {
    require_positive_radius(a);
    require_positive_radius(b);
    if (!(a < b)) throw std::invalid_argument("radius law: uniform needs a < b");
    return RadiusLaw(Kind::Uniform, a, b, {});
}

RadiusLaw RadiusLaw::discrete(std::vector<std::pair<double, double>> atoms) {
    if (atoms.empty()) throw std::invalid_argument("radius law: discrete law needs at least one atom");
    double total = 0.0, lo = atoms.front().first, hi = lo;
    for (const auto& [v, p] : atoms) {
        require_positive_radius(v);
        if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("radius law: probabilities must be >= 0");
        total += p;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("radius law: probabilities must sum to 1");
    return RadiusLaw(Kind::Discrete, lo, hi, std::move(atoms));
}

RadiusLaw RadiusLaw::parse(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("radius law '" + spec + "': expected KIND:ARGS");
    const std::string kind = spec.substr(0, colon);
    const std::string_view rest = std::string_view(spec).substr(colon + 1);
    if (kind == "const") return constant(parse_number(rest, spec));
    if (kind == "unif") {
        const auto c2 = rest.find(':');
        if (c2 == std::string_view::npos) throw std::invalid_argument("radius law '" + spec + "': expected unif:A:B");
        return uniform(parse_number(rest.substr(0, c2), spec), parse_number(rest.substr(c2 + 1), spec));
    }
    if (kind == "disc") {
        std::vector<std::pair<double, double>> atoms;
        std::size_t pos = 0;
        double total = 0.0;
        while (pos <= rest.size()) {
            const auto comma = std::min(rest.find(',', pos), rest.size());
            const auto item = rest.substr(pos, comma - pos);
            const auto at = item.find('@');
            if (at == std::string_view::npos) throw std::invalid_argument("radius law '" + spec + "': expected v@p");
            const double v = parse_number(item.substr(0, at), spec);
            const double p = parse_number(item.substr(at + 1), spec);
            atoms.emplace_back(v, p);
            total += p;
            pos = comma + 1;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw std::invalid_argument("radius law '" + spec + "': probabilities must sum to 1");
        for (auto& a : atoms) a.second /= total;
        return discrete(std::move(atoms));
    }
    throw std::invalid_argument("radius law '" + spec + "': unknown kind '" + kind + "'");
}

std::string RadiusLaw::to_spec() const {
    switch (kind_) {
        case Kind::Constant:
            return "const:" + format_shortest(lo_);
        case Kind::Uniform:
            return "unif:" + format_shortest(lo_) + ":" + format_shortest(hi_);
        case Kind::Discrete: {
            std::string s = "disc:";
            for (std::size_t i = 0; i < atoms_.size(); ++i) {
                if (i) s += ',';
                s += format_shortest(atoms_[i].first) + "@" + format_shortest(atoms_[i].second);
            }
            return s;
        }
    }
    return {};
}

double RadiusLaw::expect(const std::function<double(double)>& f, int gl_nodes) const {
    if (kind_ == Kind::Uniform) return integrate_gauss_legendre(f, lo_, hi_, gl_nodes) / (hi_ - lo_);
    double acc = 0.0;
    for (const auto& [v, p] : atoms_)
        if (p > 0.0) acc += p * f(v);
    return acc;
}

double RadiusLaw::moment(double p) const {
    if (kind_ == Kind::Uniform) {
        if (std::abs(p + 1.0) < 1e-15) return std::log(hi_ / lo_) / (hi_ - lo_);
        return (std::pow(hi_, p + 1.0) - std::pow(lo_, p + 1.0)) / ((p + 1.0) * (hi_ - lo_));
    }
    double acc = 0.0;
    for (const auto& [v, w] : atoms_) acc += w * std::pow(v, p);
    return acc;
}

double RadiusLaw::sample(RngStream& stream) const {
    switch (kind_) {
        case Kind::Constant:
            return lo_;
        case Kind::Uniform:
            return lo_ + (hi_ - lo_) * stream.uniform();
        case Kind::Discrete: {
            const double u = stream.uniform();
            double acc = 0.0;
            for (const auto& [v, p] : atoms_) {
                acc += p;
                if (u < acc) return v;
            }
            return atoms_.back().first;
        }
    }
    return lo_;
}

BooleanParams::BooleanParams(double a, RadiusLaw l, Dimension dim) : alpha(a), law(std::move(l)), d(dim) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("BooleanParams: alpha must be positive");
}

BallScene::BallScene(std::vector<ObstacleBall> obs, Vect t, double w, bool cond)
    : obstacles(std::move(obs)), target(t), window_radius(w), conditioned(cond) {
    if (!(window_radius > 0.0)) throw std::invalid_argument("BallScene: window radius must be positive");
    if (conditioned) {
        const SegmentToTarget seg(target);
        for (const auto& b : obstacles)
            if (dist_point_segment(b.center, seg) <= b.radius)
                throw std::logic_error("BallScene: conditioned scene contains a blocking ball");
    }
}

double expected_nbhd_volume(double r, double q, const BooleanParams& params, int gl_nodes) {
    const int d = params.d;
    return params.law.expect([&](double t) { return RevolutionBody(r, q, t).volume(d); }, gl_nodes);
}

double expected_excess_volume(double r, double q, const BooleanParams& params, int gl_nodes) {
    const int d = params.d;
    return params.law.expect([&](double t) { return RevolutionBody(r, q, t).excess_volume(d); }, gl_nodes);
}

double visibility_probability(const BooleanParams& params, double r) {
    if (!(r > 0.0)) throw std::domain_error("visibility_probability: r must be positive");
    return std::exp(-params.alpha * expected_nbhd_volume(r, 0.0, params));
}

double conditional_survival_exact(const BooleanParams& params, double r, double s) {
    if (!(r > 0.0) || !(s >= 0.0)) throw std::domain_error("conditional_survival_exact: need r > 0 and s >= 0");
    const double q = s / r;
    if (!(q < r)) throw std::domain_error("conditional_survival_exact: aperture must stay below r");
    if (s == 0.0) return 1.0;
    return std::exp(-params.alpha * expected_excess_volume(r, q, params));
}

double lambda_bm(const BooleanParams& params) {
    const int d = params.d;
    return 0.5 * params.alpha * (d - 1) * unit_ball_volume(d - 1) * params.law.moment(d - 2);
}

double capsule_volume(int d, double length, double radius) {
    return unit_ball_volume(d) * std::pow(radius, d) + unit_ball_volume(d - 1) * std::pow(radius, d - 1) * length;
}

Vect sample_capsule_point(int d, double length, double radius, RngStream& stream) {
    const double ball = unit_ball_volume(d) * std::pow(radius, d);
    const double total = capsule_volume(d, length, radius);
    Vect p(d);
    if (stream.uniform() * total < ball) {
        const Vect dir = stream.unit_sphere(d);
        p = dir * (radius * std::pow(stream.uniform_pos(), 1.0 / d));
        if (p[0] >= 0.0) p[0] += length;
        return p;
    }
    p[0] = length * stream.uniform();
    if (d == 2) {
        p[1] = radius * (2.0 * stream.uniform() - 1.0);
    } else {
        const Vect dir = stream.unit_sphere(d - 1);
        const double rad = radius * std::pow(stream.uniform_pos(), 1.0 / (d - 1));
        for (int i = 1; i < d; ++i) p[i] = rad * dir[i - 1];
    }
    return p;
}

BallScene sample_ball_scene(const BooleanParams& params, double r, double q_cap, bool conditioned, RngStream& stream) {
    if (!(r > 0.0) || !(q_cap >= 0.0)) throw std::invalid_argument("sample_ball_scene: need r > 0, q_cap >= 0");
    const int d = params.d;
    const double window = q_cap + params.law.r_max() + 1.0;
    const Vect target = Vect::axis(d, r);
    const SegmentToTarget seg(target);
    const auto n = stream.poisson(params.alpha * capsule_volume(d, r, window));
    std::vector<ObstacleBall> kept;
    kept.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const Vect c = sample_capsule_point(d, r, window, stream);
        const double rad = params.law.sample(stream);
        if (conditioned && dist_point_segment(c, seg) <= rad) continue;
        kept.emplace_back(c, rad);
    }
    return BallScene(std::move(kept), target, window, conditioned);
}

bool blocks_segment(const BallScene& scene) {
    const SegmentToTarget seg(scene.target);
    return std::any_of(scene.obstacles.begin(), scene.obstacles.end(),
                       [&](const ObstacleBall& b) { return dist_point_segment(b.center, seg) <= b.radius; });
}

QSample sample_Q(const BallScene& scene, double q_cap) {
    if (!scene.conditioned) throw std::invalid_argument("sample_Q: scene is not conditioned on visibility");
    if (!(q_cap > 0.0) || !(q_cap < scene.target.norm()))
        throw std::invalid_argument("sample_Q: q_cap must satisfy 0 < q_cap < |target|");
    double best = q_cap;
    bool bound = false;
    for (const auto& b : scene.obstacles) {
        // A ball clear of the cone at the current best aperture cannot lower it.
        if (dist_point_cone(b.center, ConeSpec(scene.target, best)) > b.radius) continue;
        best = std::min(best, max_aperture(b, scene.target, best));
        bound = true;
        if (best == 0.0) break;
    }
    return {best, !bound};
}

}  // namespace vislab
