#include "vislab/cylinder_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vislab {

namespace {

// Uniform point in the k-ball of the given radius inside the orthogonal complement of
// the orthonormal vectors `avoid` (k = d - avoid.size()).
Vect ball_point_orthogonal(int d, std::initializer_list<const Vect*> avoid, double radius, RngStream& stream) {
    const int k = d - static_cast<int>(avoid.size());
    Vect g(d);
    if (k <= 0) return g;
    for (;;) {
        for (int i = 0; i < d; ++i) g[i] = stream.gaussian();
        for (const Vect* a : avoid) g -= dot(g, *a) * *a;
        const double n = g.norm();
        if (n > 1e-12) return g * (radius * std::pow(stream.uniform_pos(), 1.0 / k) / n);
    }
}

void require_aperture(double r, double q) {
    if (!(r > 0.0) || !(q >= 0.0) || !(q < r)) throw std::domain_error("cone aperture must satisfy 0 <= q < r");
}

}  // namespace

CylinderParams::CylinderParams(double a, double r, Dimension dim) : alpha(a), rho(r), d(dim) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("CylinderParams: alpha must be positive");
    if (!(rho > 0.0) || !std::isfinite(rho)) throw std::invalid_argument("CylinderParams: rho must be positive");
}

LineScene::LineScene(std::vector<ObstacleLine> ls, Vect t, double rh, double w, bool cond)
    : lines(std::move(ls)), target(t), rho(rh), window_radius(w), conditioned(cond) {
    if (!(rho > 0.0) || !(window_radius > 0.0)) throw std::invalid_argument("LineScene: radii must be positive");
    if (conditioned) {
        const SegmentToTarget seg(target);
        for (const auto& l : lines)
            if (dist_line_segment(l, seg) <= rho)
                throw std::logic_error("LineScene: conditioned scene contains a blocking line");
    }
}

double e_norm_xi(int d) {
    if (d < 2) throw std::domain_error("e_norm_xi: d must be >= 2");
    return beta_fn(0.5, 0.5 * d) / beta_fn(0.5, 0.5 * (d - 1));
}

double cylinder_window(int d, double r) { return d == 2 ? 1.0 : 1.0 / r; }

double mu_segment(double r, const CylinderParams& params) {
    const int d = params.d;
    return unit_ball_volume(d - 1) * std::pow(params.rho, d - 1) +
           unit_ball_volume(d - 2) * std::pow(params.rho, d - 2) * r * e_norm_xi(d);
}

namespace {

// E over the angle theta between line direction and axis (density prop. to sin^{d-2}) of g(r sin theta).
// The projected body turns into a ball below theta* = asin(q/r); past it the integrand has a
// square-root onset, removed by theta = theta* + (pi/2 - theta*) v^2.
template <class G>
double angular_expectation(int d, double r, double q, int gl_nodes, G&& g) {
    const double theta_star = std::asin(q / r);
    auto weighted = [&](double theta) { return std::pow(std::sin(theta), d - 2) * g(r * std::sin(theta)); };
    double total = 0.0;
    if (theta_star > 0.0) total += integrate_gauss_legendre(weighted, 0.0, theta_star, gl_nodes);
    const double span = 0.5 * kPi - theta_star;
    total += integrate_gauss_legendre(
        [&](double v) { return weighted(theta_star + span * v * v) * 2.0 * span * v; }, 0.0, 1.0, gl_nodes);
    return total / (0.5 * beta_fn(0.5, 0.5 * (d - 1)));
}

}  // namespace

double mu_cone_aperture(double r, double q, const CylinderParams& params, int gl_nodes) {
    require_aperture(r, q);
    if (q == 0.0) return mu_segment(r, params);
    const int n = params.d - 1;
    return angular_expectation(params.d, r, q, gl_nodes,
                               [&](double len) { return RevolutionBody(len, q, params.rho).volume(n); });
}

double mu_excess(double r, double q, const CylinderParams& params, int gl_nodes) {
    require_aperture(r, q);
    if (q == 0.0) return 0.0;
    const int n = params.d - 1;
    return angular_expectation(params.d, r, q, gl_nodes,
                               [&](double len) { return RevolutionBody(len, q, params.rho).excess_volume(n); });
}

double mu_cone(double r, double s, const CylinderParams& params, int gl_nodes) {
    return mu_cone_aperture(r, s * cylinder_window(params.d, r), params, gl_nodes);
}

double lambda_pc(const CylinderParams& params) {
    const int d = params.d;
    if (d == 2) return params.alpha;
    return 0.5 * params.alpha * (d - 2) * unit_ball_volume(d - 2) * std::pow(params.rho, d - 3) * e_norm_xi(d);
}

double visibility_probability(const CylinderParams& params, double r) {
    if (!(r > 0.0)) throw std::domain_error("visibility_probability: r must be positive");
    return std::exp(-params.alpha * mu_segment(r, params));
}

double conditional_survival_exact(const CylinderParams& params, double r, double s) {
    if (!(s >= 0.0)) throw std::domain_error("conditional_survival_exact: s must be >= 0");
    if (s == 0.0) return 1.0;
    return std::exp(-params.alpha * mu_excess(r, s * cylinder_window(params.d, r), params));
}

std::vector<ObstacleLine> sample_lines(const CylinderParams& params, double radius, RngStream& stream) {
    if (!(radius > 0.0)) throw std::invalid_argument("sample_lines: radius must be positive");
    const int d = params.d;
    const auto n = stream.poisson(params.alpha * unit_ball_volume(d - 1) * std::pow(radius, d - 1));
    std::vector<ObstacleLine> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const Vect u = stream.unit_sphere(d);
        out.emplace_back(ball_point_orthogonal(d, {&u}, radius, stream), u);
    }
    return out;
}

std::vector<ObstacleLine> sample_lines_capsule(const CylinderParams& params, double length, double radius,
                                               RngStream& stream) {
    if (!(radius > 0.0) || !(length >= 0.0)) throw std::invalid_argument("sample_lines_capsule: bad capsule");
    const int d = params.d;
    const double ball_part = unit_ball_volume(d - 1) * std::pow(radius, d - 1);
    const double side = unit_ball_volume(d - 2) * std::pow(radius, d - 2) * length;
    const double mass = ball_part + side * e_norm_xi(d);
    const auto n = stream.poisson(params.alpha * mass);
    std::vector<ObstacleLine> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        Vect u(d);
        double proj_len = 0.0;
        // Direction with density proportional to the projected capsule volume.
        for (;;) {
            u = stream.unit_sphere(d);
            proj_len = std::sqrt(std::max(0.0, 1.0 - u[0] * u[0]));
            if (stream.uniform() * (ball_part + side) < ball_part + side * proj_len) break;
        }
        Vect axis = Vect::axis(d, 1.0) - u[0] * u;
        const double axis_len = axis.norm();
        const double cyl = side * proj_len;
        Vect base(d);
        if (axis_len < 1e-300 || stream.uniform() * (ball_part + cyl) < ball_part) {
            base = ball_point_orthogonal(d, {&u}, radius, stream);
            if (axis_len >= 1e-300 && dot(base, axis) > 0.0) base += length * axis;
        } else {
            axis *= 1.0 / axis_len;
            base = ball_point_orthogonal(d, {&u, &axis}, radius, stream);
            base += (length * axis_len * stream.uniform()) * axis;
        }
        out.emplace_back(base, u);
    }
    return out;
}

LineScene sample_line_scene(const CylinderParams& params, double r, double q_cap, bool conditioned,
                            RngStream& stream) {
    if (!(r > 0.0) || !(q_cap >= 0.0)) throw std::invalid_argument("sample_line_scene: need r > 0, q_cap >= 0");
    const int d = params.d;
    const double window = q_cap + params.rho + 1.0;
    const Vect target = Vect::axis(d, r);
    auto lines = sample_lines_capsule(params, r, window, stream);
    if (conditioned) {
        const SegmentToTarget seg(target);
        std::erase_if(lines, [&](const ObstacleLine& l) { return dist_line_segment(l, seg) <= params.rho; });
    }
    return LineScene(std::move(lines), target, params.rho, window, conditioned);
}

bool blocks_segment(const LineScene& scene) {
    const SegmentToTarget seg(scene.target);
    return std::any_of(scene.lines.begin(), scene.lines.end(),
                       [&](const ObstacleLine& l) { return dist_line_segment(l, seg) <= scene.rho; });
}

QSample sample_Q(const LineScene& scene, double q_cap) {
    if (!scene.conditioned) throw std::invalid_argument("sample_Q: scene is not conditioned on visibility");
    if (!(q_cap > 0.0) || !(q_cap < scene.target.norm()))
        throw std::invalid_argument("sample_Q: q_cap must satisfy 0 < q_cap < |target|");
    const SegmentToTarget seg(scene.target);
    double best = q_cap;
    bool bound = false;
    for (const auto& l : scene.lines) {
        // The cone of aperture `best` lies within `best` of the segment.
        if (dist_line_segment(l, seg) > scene.rho + best) continue;
        if (dist_line_cone(l, ConeSpec(scene.target, best)) > scene.rho) continue;
        best = std::min(best, max_aperture(l, scene.rho, scene.target, best));
        bound = true;
        if (best == 0.0) break;
    }
    return {best, !bound};
}

}  // namespace vislab
