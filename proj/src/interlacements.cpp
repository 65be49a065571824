#include "vislab/interlacements.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "vislab/parallel.hpp"

namespace vislab {

TargetShape::TargetShape(Kind k, Vect p, double aperture, double radius)
    : kind_(k), point_(p), axis_(p.dim()), aperture_(aperture), radius_(radius) {
    if (p.dim() < 3) throw std::domain_error("TargetShape: interlacement shapes need d >= 3");
    if (!p.is_finite()) throw std::invalid_argument("TargetShape: non-finite coordinates");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("TargetShape: radius must be positive");
    if (k != Kind::Ball) {
        length_ = p.norm();
        if (!(length_ > 0.0)) throw std::invalid_argument("TargetShape: segment end point must be non-zero");
        if (!(aperture >= 0.0) || !(aperture < length_))
            throw std::invalid_argument("TargetShape: aperture must satisfy 0 <= q < |x|");
        axis_ = p * (1.0 / length_);
    }
}

TargetShape TargetShape::ball(Vect center, double radius) { return TargetShape(Kind::Ball, center, 0.0, radius); }

TargetShape TargetShape::segment_cylinder(Vect x, double rho) {
    return TargetShape(Kind::SegmentCylinder, x, 0.0, rho);
}

TargetShape TargetShape::cone(Vect x, double aperture, double rho) { return TargetShape(Kind::Cone, x, aperture, rho); }

double TargetShape::distance(const Vect& p) const noexcept {
    if (kind_ == Kind::Ball) return std::max(0.0, vislab::distance(p, point_) - radius_);
    const double u = dot(p, axis_);
    const double h = (p - u * axis_).norm();
    return std::max(0.0, meridian_distance(u, h, length_, aperture_) - radius_);
}

Vect TargetShape::enclosing_center() const { return kind_ == Kind::Ball ? point_ : 0.5 * point_; }

double TargetShape::enclosing_radius() const noexcept {
    return kind_ == Kind::Ball ? radius_ : 0.5 * length_ + aperture_ + radius_;
}

WosConfig WosConfig::for_shape(const TargetShape& shape) {
    const double rk = shape.enclosing_radius();
    return WosConfig{1e-6 * shape.feature_size(), 4.0 * rk, rk, shape.enclosing_center()};
}

Vect sample_exterior_harmonic(const Vect& x, const Vect& center, double radius, RngStream& stream) {
    const int d = x.dim();
    const double gap = distance(x, center) - radius;
    if (!(gap > 0.0)) throw std::invalid_argument("sample_exterior_harmonic: start must lie outside the sphere");
    for (;;) {
        const Vect y = center + radius * stream.unit_sphere(d);
        if (stream.uniform() < std::pow(gap / distance(x, y), d)) return y;
    }
}

namespace {

// Walks from p (updated in place) until hit, escape or the step budget runs out.
WosOutcome walk(const TargetShape& shape, Vect& p, const WosConfig& cfg, RngStream& stream, std::uint64_t& steps) {
    const int d = p.dim();
    while (steps < cfg.max_steps) {
        ++steps;
        const double dist = shape.distance(p);
        if (dist < cfg.hit_tolerance) return WosOutcome::Hit;
        const double rn = distance(p, cfg.enclosing_center);
        if (rn >= cfg.outer_radius) {
            if (cfg.truncate_only) return WosOutcome::Escape;
            if (stream.uniform() >= std::pow(cfg.enclosing_radius / rn, d - 2)) return WosOutcome::Escape;
            p = sample_exterior_harmonic(p, cfg.enclosing_center, cfg.enclosing_radius, stream);
            continue;
        }
        p += dist * stream.unit_sphere(d);
    }
    return WosOutcome::Aborted;
}

void validate(const TargetShape& shape, const WosConfig& cfg) {
    if (!(cfg.hit_tolerance > 0.0)) throw std::invalid_argument("WosConfig: hit tolerance must be positive");
    if (!(cfg.enclosing_radius > 0.0) || !(cfg.outer_radius >= 4.0 * cfg.enclosing_radius * (1 - 1e-12)))
        throw std::invalid_argument("WosConfig: need outer radius >= 4 * enclosing radius");
    if (cfg.enclosing_center.dim() != shape.dim()) throw std::invalid_argument("WosConfig: dimension mismatch");
    const double need = distance(cfg.enclosing_center, shape.enclosing_center()) + shape.enclosing_radius();
    if (need > cfg.enclosing_radius * (1 + 1e-12))
        throw std::invalid_argument("WosConfig: enclosing ball does not contain the shape");
}

}  // namespace

WosOutcome wos_run(const TargetShape& shape, const Vect& start, const WosConfig& cfg, RngStream& stream) {
    Dimension(start.dim()).require_transient();
    validate(shape, cfg);
    Vect p = start;
    std::uint64_t steps = 0;
    return walk(shape, p, cfg, stream, steps);
}

bool wos_hits(const TargetShape& shape, const Vect& start, const WosConfig& cfg, RngStream& stream) {
    const auto out = wos_run(shape, start, cfg, stream);
    if (out == WosOutcome::Aborted) throw std::runtime_error("wos_hits: step budget exhausted");
    return out == WosOutcome::Hit;
}

double spheroid_capacity(int d, double a, double b) {
    Dimension(d).require_transient();
    if (!(b > 0.0) || !(a >= b)) throw std::invalid_argument("spheroid_capacity: need a >= b > 0");
    const double e2 = (a / b) * (a / b);
    const double integral = integrate_adaptive(
        [&](double y) { return 2.0 * std::pow(y, d - 3) / std::sqrt(1.0 + (e2 - 1.0) * y * y); }, 0.0, 1.0, 1e-13);
    const double c = 1.0 / (0.5 * (d - 2) * std::pow(b, 2 - d) * integral);
    return c / green_constant(d);
}

LaunchSurface::LaunchSurface(Vect center, Vect axis, double a, double b)
    : center_(center), axis_(axis), a_(a), b_(b), mass_(spheroid_capacity(center.dim(), a, b)) {}

LaunchSurface LaunchSurface::sphere(Vect center, double radius) {
    Dimension(center.dim()).require_transient();
    if (!(radius > 0.0)) throw std::invalid_argument("LaunchSurface: radius must be positive");
    return LaunchSurface(center, Vect::axis(center.dim(), 1.0), radius, radius);
}

LaunchSurface LaunchSurface::spheroid(Vect center, Vect axis, double a, double b) {
    Dimension(center.dim()).require_transient();
    if (axis.dim() != center.dim() || std::abs(axis.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("LaunchSurface: axis must be a unit vector");
    if (!(b > 0.0) || !(a >= b)) throw std::invalid_argument("LaunchSurface: need a >= b > 0");
    return LaunchSurface(center, axis, a, b);
}

LaunchSurface LaunchSurface::enclosing(const TargetShape& shape) {
    const int d = shape.dim();
    if (shape.kind() == TargetShape::Kind::Ball) return sphere(shape.enclosing_center(), 2.0 * shape.enclosing_radius());
    const double rb = shape.capsule_radius();
    const double half = 0.5 * shape.point().norm();
    const double k = d == 3 ? 2.0 : std::clamp(std::sqrt((d - 2.0) / (d - 3.0)), 1.2, 3.0);
    const double b = k * rb;
    const double a = (half + rb) / std::sqrt(1.0 - 1.0 / (k * k));
    if (a <= b) return sphere(shape.enclosing_center(), 2.0 * shape.enclosing_radius());
    return spheroid(shape.enclosing_center(), shape.point() * (1.0 / (2.0 * half)), a, b);
}

namespace {

// Householder reflection taking e1 to the unit vector w (an involution).
Vect reflect(const Vect& v, const Vect& w) {
    Vect h = Vect::axis(w.dim(), 1.0) - w;
    const double n2 = h.norm2();
    if (n2 < 1e-30) return v;
    return v - (2.0 * dot(h, v) / n2) * h;
}

}  // namespace

Vect LaunchSurface::sample(RngStream& stream) const {
    Vect u = stream.unit_sphere(center_.dim());
    u[0] *= a_;
    for (int i = 1; i < u.dim(); ++i) u[i] *= b_;
    return center_ + reflect(u, axis_);
}

bool LaunchSurface::contains(const Vect& p) const {
    const Vect local = reflect(p - center_, axis_);
    double acc = local[0] * local[0] / (a_ * a_);
    for (int i = 1; i < local.dim(); ++i) acc += local[i] * local[i] / (b_ * b_);
    return acc <= 1.0;
}

CapacityEstimate estimate_capacity(const TargetShape& shape, const WosConfig& cfg, std::uint64_t n_walkers,
                                   const RngStream& stream, unsigned threads) {
    return estimate_capacity(shape, cfg, LaunchSurface::enclosing(shape), n_walkers, stream, threads);
}

CapacityEstimate estimate_capacity(const TargetShape& shape, const WosConfig& cfg, const LaunchSurface& launch,
                                   std::uint64_t n_walkers, const RngStream& stream, unsigned threads) {
    validate(shape, cfg);
    if (n_walkers == 0) throw std::invalid_argument("estimate_capacity: need at least one walker");
    std::vector<std::uint8_t> outcome(n_walkers);
    parallel_for(n_walkers, resolve_threads(threads), [&](std::size_t i) {
        RngStream s = stream.substream(i);
        Vect p = launch.sample(s);
        std::uint64_t steps = 0;
        outcome[i] = static_cast<std::uint8_t>(walk(shape, p, cfg, s, steps));
    });
    std::uint64_t hits = 0, aborted = 0;
    for (auto o : outcome) {
        hits += o == static_cast<std::uint8_t>(WosOutcome::Hit);
        aborted += o == static_cast<std::uint8_t>(WosOutcome::Aborted);
    }
    const std::uint64_t n = n_walkers - aborted;
    if (n == 0) throw std::runtime_error("estimate_capacity: every walker exceeded the step budget");
    const double frac = static_cast<double>(hits) / static_cast<double>(n);
    CapacityEstimate est{};
    est.value = launch.mass() * frac;
    est.stderr_ = launch.mass() * std::sqrt(frac * (1.0 - frac) / static_cast<double>(n));
    est.n_walkers = n;
    est.hits = hits;
    est.aborted = aborted;
    est.launch_mass = launch.mass();
    const int d = shape.dim();
    est.bias_bound = (std::pow(1.0 + cfg.hit_tolerance / shape.feature_size(), d - 2) - 1.0) * est.value;
    // A truncated walker would still have hit with probability at most (R_K / R_out)^{d-2}.
    if (cfg.truncate_only)
        est.bias_bound += std::pow(cfg.enclosing_radius / cfg.outer_radius, d - 2) * launch.mass() * (1.0 - frac);
    return est;
}

double capacity_asymptotic(double r, double rho, int d) {
    Dimension(d).require_transient();
    if (!(rho > 0.0)) throw std::domain_error("capacity_asymptotic: rho must be positive");
    if (d == 3) {
        if (!(r > std::exp(1.0))) throw std::domain_error("capacity_asymptotic: d = 3 needs r > e");
        return kPi * r / std::log(r);
    }
    if (!(r > 0.0)) throw std::domain_error("capacity_asymptotic: r must be positive");
    return cylinder_capacity_constant(d) * std::pow(rho, d - 3) * r;
}

double nonhit_asymptotic(double x_axis, double offset, double r, double rho, int d) {
    Dimension(d).require_transient();
    if (!(r > std::exp(1.0)) || !(rho > 0.0)) throw std::domain_error("nonhit_asymptotic: need r > e, rho > 0");
    const double margin = r / (std::log(r) * std::log(r));
    if (!(x_axis >= margin && x_axis <= r - margin))
        throw std::domain_error("nonhit_asymptotic: axial coordinate outside [r/log^2 r, r - r/log^2 r]");
    if (!(offset >= rho && offset < 2.0 * rho))
        throw std::domain_error("nonhit_asymptotic: offset must lie in [rho, 2 rho)");
    const double excess = (offset - rho) / rho;
    return d == 3 ? excess / std::log(r) : excess * (d - 3);
}

ProbabilityEstimate estimate_nonhit(const Vect& x, double r, double rho, const WosConfig& cfg, std::uint64_t n,
                                    const RngStream& stream, unsigned threads) {
    const TargetShape shape = TargetShape::segment_cylinder(r, rho, x.dim());
    validate(shape, cfg);
    if (n == 0) throw std::invalid_argument("estimate_nonhit: need at least one walker");
    std::vector<std::uint8_t> outcome(n);
    parallel_for(n, resolve_threads(threads), [&](std::size_t i) {
        RngStream s = stream.substream(i);
        Vect p = x;
        std::uint64_t steps = 0;
        outcome[i] = static_cast<std::uint8_t>(walk(shape, p, cfg, s, steps));
    });
    std::uint64_t escapes = 0, aborted = 0;
    for (auto o : outcome) {
        escapes += o == static_cast<std::uint8_t>(WosOutcome::Escape);
        aborted += o == static_cast<std::uint8_t>(WosOutcome::Aborted);
    }
    const double m = static_cast<double>(n - aborted);
    if (m == 0) throw std::runtime_error("estimate_nonhit: every walker exceeded the step budget");
    const double p = escapes / m;
    return {p, std::sqrt(p * (1.0 - p) / m)};
}

double lambda_bi(double alpha, double rho, int d) {
    Dimension(d).require_transient();
    return 0.5 * alpha * cylinder_capacity_constant(d) * std::pow(rho, d - 4) * (d == 3 ? 1.0 : d - 3.0);
}

double bi_window(int d, double r) {
    Dimension(d).require_transient();
    if (!(r > 1.0)) throw std::domain_error("bi_window: r must exceed 1");
    if (d == 3) return std::log(r) * std::log(r) / r;
    return 1.0 / r;
}

CoupledRun conditional_survival_mc(double alpha, double rho, int d, double r, const std::vector<double>& s_grid,
                                   std::uint64_t n_walkers, const RngStream& stream, unsigned threads, double level) {
    Dimension(d).require_transient();
    if (!(alpha > 0.0) || !(rho > 0.0)) throw std::invalid_argument("conditional_survival_mc: need alpha, rho > 0");
    if (s_grid.empty() || n_walkers == 0) throw std::invalid_argument("conditional_survival_mc: empty s grid or n");
    if (s_grid.size() > 250) throw std::invalid_argument("conditional_survival_mc: at most 250 s values");
    const double delta = bi_window(d, r);
    std::vector<std::size_t> order(s_grid.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return s_grid[i] < s_grid[j]; });
    // shapes[0] is the cylinder, shapes[k] the cone of the k-th smallest s.
    std::vector<TargetShape> shapes{TargetShape::segment_cylinder(r, rho, d)};
    for (auto i : order) {
        const double s = s_grid[i];
        if (!(s >= 0.0)) throw std::domain_error("conditional_survival_mc: s must be >= 0");
        if (!(s * delta < r)) throw std::domain_error("conditional_survival_mc: aperture must stay below r");
        shapes.push_back(TargetShape::cone(r, s * delta, rho, d));
    }
    const TargetShape& outer = shapes.back();
    const LaunchSurface launch = LaunchSurface::enclosing(outer);
    WosConfig cfg = WosConfig::for_shape(outer);
    cfg.hit_tolerance = 1e-6 * rho;
    const std::uint8_t kNone = static_cast<std::uint8_t>(shapes.size());
    const std::uint8_t kAborted = 255;
    std::vector<std::uint8_t> lowest(n_walkers);
    std::vector<std::uint8_t> violation(n_walkers, 0);
    parallel_for(n_walkers, resolve_threads(threads), [&](std::size_t i) {
        RngStream s = stream.substream(i);
        Vect p = launch.sample(s);
        std::uint64_t steps = 0;
        std::uint8_t level_hit = kNone;
        for (int k = static_cast<int>(shapes.size()) - 1; k >= 0; --k) {
            const WosOutcome out = walk(shapes[k], p, cfg, s, steps);
            if (out == WosOutcome::Aborted) {
                level_hit = kAborted;
                break;
            }
            if (out == WosOutcome::Escape) break;
            level_hit = static_cast<std::uint8_t>(k);
            // Nesting: a hit point of shape k is within tolerance of every larger shape.
            if (k + 1 < static_cast<int>(shapes.size()) && shapes[k + 1].distance(p) >= cfg.hit_tolerance)
                violation[i] = 1;
        }
        lowest[i] = level_hit;
    });
    CoupledRun run{};
    run.launch_mass = launch.mass();
    std::vector<std::uint64_t> count(shapes.size() + 1, 0);
    for (auto v : lowest) {
        if (v == kAborted)
            ++run.aborted;
        else
            ++count[v];
    }
    run.coupling_violations = std::accumulate(violation.begin(), violation.end(), std::uint64_t{0});
    run.n_walkers = n_walkers - run.aborted;
    if (run.n_walkers == 0) throw std::runtime_error("conditional_survival_mc: every walker exceeded the step budget");
    const double n = static_cast<double>(run.n_walkers);
    const double z = normal_quantile(0.5 + 0.5 * level);
    run.estimates.resize(s_grid.size());
    std::uint64_t cone_only = 0;
    for (std::size_t k = 1; k < shapes.size(); ++k) {
        cone_only += count[k];
        const double p = cone_only / n;
        SurvivalEstimate e{};
        e.s = s_grid[order[k - 1]];
        e.cone_only_hits = cone_only;
        e.delta_cap = launch.mass() * p;
        e.delta_cap_stderr = launch.mass() * std::sqrt(p * (1.0 - p) / n);
        e.probability = std::exp(-alpha * e.delta_cap);
        e.lo = std::exp(-alpha * (e.delta_cap + z * e.delta_cap_stderr));
        e.hi = std::exp(-alpha * std::max(0.0, e.delta_cap - z * e.delta_cap_stderr));
        run.estimates[order[k - 1]] = e;
    }
    return run;
}

}  // namespace vislab
