#include "vislab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vislab/mathcore.hpp"

namespace vislab {

namespace {

void require_finite(const Vect& v, const char* what) {
    if (v.dim() < 1 || !v.is_finite()) throw std::invalid_argument(std::string(what) + ": non-finite coordinates");
}

void require_same_dim(const Vect& a, const Vect& b, const char* what) {
    if (a.dim() != b.dim()) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

// Axial coordinate and radial distance of c relative to the axis through 0 along unit e.
struct Meridian {
    double u, h;
};

Meridian to_meridian(const Vect& c, const Vect& e) {
    const double u = dot(c, e);
    return {u, (c - u * e).norm()};
}

}  // namespace

SegmentToTarget::SegmentToTarget(Vect t) : target(t) {
    require_finite(target, "SegmentToTarget");
    if (target.norm() <= 0.0) throw std::invalid_argument("SegmentToTarget: target must be non-zero");
}

ObstacleBall::ObstacleBall(Vect c, double r) : center(c), radius(r) {
    require_finite(center, "ObstacleBall");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("ObstacleBall: radius must be positive");
}

ObstacleLine::ObstacleLine(Vect b, Vect dir) : base(b), direction(dir) {
    require_finite(base, "ObstacleLine");
    require_finite(direction, "ObstacleLine");
    require_same_dim(base, direction, "ObstacleLine");
    if (std::abs(direction.norm() - 1.0) > 1e-9) throw std::invalid_argument("ObstacleLine: direction must be unit");
}

ConeSpec::ConeSpec(Vect t, double q) : target(t), aperture(q) {
    require_finite(target, "ConeSpec");
    if (!(q >= 0.0) || !(q < target.norm()))
        throw std::invalid_argument("ConeSpec: aperture must satisfy 0 <= q < |target|");
}

ThickenedCone::ThickenedCone(ConeSpec c, double t) : cone(c), thickness(t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("ThickenedCone: thickness must be >= 0");
}

double meridian_distance(double u, double h, double length, double q) noexcept {
    if (q <= 0.0) {
        if (u < 0.0) return std::hypot(u, h);
        if (u > length) return std::hypot(u - length, h);
        return h;
    }
    const double d_disk = std::hypot(u - length, h) - q;
    if (d_disk <= 0.0) return 0.0;
    if (q >= length) return d_disk;
    const double sb = q / length;
    const double cb = std::sqrt((1.0 - sb) * (1.0 + sb));
    const double tangent_len = length * cb;
    const double along = u * cb + h * sb;
    // Inside the triangle (0, T, T'): between the axis-symmetric tangent lines and before the tangent chord.
    if (u >= 0.0 && h * cb <= u * sb && along <= tangent_len) return 0.0;
    const double s = std::clamp(along, 0.0, tangent_len);
    const double d_edge = std::hypot(u - s * cb, h - s * sb);
    return std::min(d_disk, d_edge);
}

double dist_point_segment(const Vect& c, const SegmentToTarget& seg) {
    require_same_dim(c, seg.target, "dist_point_segment");
    const double len = seg.target.norm();
    const auto m = to_meridian(c, seg.target * (1.0 / len));
    return meridian_distance(m.u, m.h, len, 0.0);
}

double dist_point_cone(const Vect& c, const ConeSpec& cone) {
    require_same_dim(c, cone.target, "dist_point_cone");
    const double len = cone.target.norm();
    const auto m = to_meridian(c, cone.target * (1.0 / len));
    return meridian_distance(m.u, m.h, len, cone.aperture);
}

double dist_line_segment(const ObstacleLine& line, const SegmentToTarget& seg) {
    require_same_dim(line.base, seg.target, "dist_line_segment");
    const Vect& e = line.direction;
    // Work in the hyperplane orthogonal to the line: distance from sigma*x to the
    // line is |sigma*x_perp - b_perp|, a convex quadratic in sigma.
    const Vect x_perp = seg.target - dot(seg.target, e) * e;
    const Vect b_perp = line.base - dot(line.base, e) * e;
    const double a = x_perp.norm2();
    double sigma = 0.0;
    if (a > 1e-28 * seg.target.norm2()) sigma = std::clamp(dot(x_perp, b_perp) / a, 0.0, 1.0);
    return (sigma * x_perp - b_perp).norm();
}

double dist_line_cone(const ObstacleLine& line, const ConeSpec& cone) {
    require_same_dim(line.base, cone.target, "dist_line_cone");
    if (cone.aperture == 0.0) return dist_line_segment(line, SegmentToTarget(cone.target));
    const double len = cone.target.norm();
    const Vect e = cone.target * (1.0 / len);
    auto f = [&](double tau) {
        const auto m = to_meridian(line.base + tau * line.direction, e);
        return meridian_distance(m.u, m.h, len, cone.aperture);
    };
    const double centre = -dot(line.base, line.direction);
    const double reach = len + cone.aperture;
    double a = centre - reach, b = centre + reach;
    const double tol = 1e-10 * (len + 1.0);
    constexpr double kInvPhi = 0.6180339887498948482;
    double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
        }
        if (fc == 0.0 || fd == 0.0) return 0.0;
    }
    return std::min({fc, fd, f(0.5 * (a + b)), f(centre)});
}

namespace {

template <class Dist>
double bisect_aperture(Dist&& dist_at, double blocking_radius, const Vect& target, double q_cap) {
    const double len = target.norm();
    if (!(q_cap > 0.0) || !(q_cap < len))
        throw std::invalid_argument("max_aperture: q_cap must satisfy 0 < q_cap < |target|");
    const double d0 = dist_at(0.0);
    if (d0 < blocking_radius) throw std::invalid_argument("max_aperture: obstacle already blocks the segment");
    if (d0 == blocking_radius) return 0.0;
    if (dist_at(q_cap) > blocking_radius) return q_cap;
    double lo = 0.0, hi = q_cap;
    const double tol = 1e-9 * len;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (dist_at(mid) <= blocking_radius)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double max_aperture(const ObstacleBall& ball, const Vect& target, double q_cap) {
    require_same_dim(ball.center, target, "max_aperture");
    return bisect_aperture(
        [&](double q) { return q == 0.0 ? dist_point_segment(ball.center, SegmentToTarget(target))
                                        : dist_point_cone(ball.center, ConeSpec(target, q)); },
        ball.radius, target, q_cap);
}

double max_aperture(const ObstacleLine& line, double blocking_radius, const Vect& target, double q_cap) {
    require_same_dim(line.base, target, "max_aperture");
    if (!(blocking_radius > 0.0)) throw std::invalid_argument("max_aperture: blocking radius must be positive");
    return bisect_aperture([&](double q) { return dist_line_cone(line, ConeSpec(target, q)); }, blocking_radius,
                           target, q_cap);
}

RevolutionBody::RevolutionBody(double length, double aperture, double thickness)
    : length_(length), q_(aperture), t_(thickness) {
    if (!(length >= 0.0) || !(aperture >= 0.0) || !(thickness >= 0.0) || !std::isfinite(length) ||
        !std::isfinite(aperture) || !std::isfinite(thickness))
        throw std::invalid_argument("RevolutionBody: parameters must be finite and >= 0");
}

double RevolutionBody::axial_min() const noexcept {
    return q_ >= length_ ? length_ - q_ - t_ : -t_;
}

double RevolutionBody::axial_max() const noexcept { return length_ + q_ + t_; }

double RevolutionBody::profile(double u) const noexcept {
    const double end_r = q_ + t_;
    const double du = u - length_;
    double h = end_r * end_r - du * du;
    h = h > 0.0 ? std::sqrt(h) : 0.0;
    if (q_ >= length_) return h;
    const double sb = q_ / length_;
    const double cb = std::sqrt((1.0 - sb) * (1.0 + sb));
    if (u * u < t_ * t_) h = std::max(h, std::sqrt(t_ * t_ - u * u));
    const double tangent_u = length_ * cb * cb;
    if (u >= -t_ * sb && u <= tangent_u - t_ * sb) h = std::max(h, t_ / cb + u * sb / cb);
    return h;
}

std::vector<double> RevolutionBody::breakpoints() const {
    if (q_ >= length_) return {axial_min(), axial_max()};
    const double sb = q_ / length_;
    const double cb2 = (1.0 - sb) * (1.0 + sb);
    std::vector<double> b = {-t_, -t_ * sb, length_ * cb2 - t_ * sb, length_ - q_ - t_, t_, axial_max()};
    const double lo = axial_min(), hi = axial_max();
    for (double& v : b) v = std::clamp(v, lo, hi);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

double RevolutionBody::volume(int n) const {
    if (n < 1) throw std::invalid_argument("RevolutionBody::volume: n must be >= 1");
    if (n == 1) return axial_max() - axial_min();
    const auto breaks = breakpoints();
    const double integral = integrate_piecewise(
        [&](double u) { return std::pow(profile(u), n - 1); }, breaks, 1e-11);
    return unit_ball_volume(n - 1) * integral;
}

double RevolutionBody::excess_volume(int n) const {
    if (n < 1) throw std::invalid_argument("RevolutionBody::excess_volume: n must be >= 1");
    const RevolutionBody seg(length_, 0.0, t_);
    if (n == 1) return (axial_max() - axial_min()) - (seg.axial_max() - seg.axial_min());
    auto breaks = breakpoints();
    const auto sb = seg.breakpoints();
    breaks.insert(breaks.end(), sb.begin(), sb.end());
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    const double integral = integrate_piecewise(
        [&](double u) { return std::pow(profile(u), n - 1) - std::pow(seg.profile(u), n - 1); }, breaks, 1e-11);
    return unit_ball_volume(n - 1) * integral;
}

double revolve_volume(const ThickenedCone& body, int n) {
    return RevolutionBody(body.cone.target.norm(), body.cone.aperture, body.thickness).volume(n);
}

double profile_by_bisection(const ThickenedCone& body, double u) {
    const double len = body.cone.target.norm();
    const double q = body.cone.aperture, t = body.thickness;
    auto inside = [&](double h) { return meridian_distance(u, h, len, q) <= t; };
    if (!inside(0.0)) return 0.0;
    double lo = 0.0, hi = q + t + 1.0;
    const double tol = 1e-13 * (len + q + t + 1.0);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (inside(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double Box::volume() const {
    require_same_dim(lo, hi, "Box");
    double v = 1.0;
    for (int i = 0; i < lo.dim(); ++i) v *= std::max(0.0, hi[i] - lo[i]);
    return v;
}

VolumeEstimate mc_volume_oracle(const std::function<bool(const Vect&)>& membership, const Box& box,
                                std::uint64_t n_points, RngStream& stream) {
    if (n_points == 0) throw std::invalid_argument("mc_volume_oracle: need at least one point");
    const double vol = box.volume();
    std::uint64_t hits = 0;
    Vect p(box.lo.dim());
    for (std::uint64_t k = 0; k < n_points; ++k) {
        for (int i = 0; i < p.dim(); ++i) p[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * stream.uniform();
        if (membership(p)) ++hits;
    }
    const double frac = static_cast<double>(hits) / static_cast<double>(n_points);
    return {vol * frac, vol * std::sqrt(frac * (1.0 - frac) / static_cast<double>(n_points))};
}

}  // namespace vislab
