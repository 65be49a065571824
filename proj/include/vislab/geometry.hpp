#pragma once

#include <functional>
#include <vector>

#include "vislab/rng.hpp"
#include "vislab/vect.hpp"

namespace vislab {

/// The segment [0, target].
struct SegmentToTarget {
    explicit SegmentToTarget(Vect target);
    Vect target;
};

struct ObstacleBall {
    ObstacleBall(Vect center, double radius);
    Vect center;
    double radius;
};

/// Line {base + tau * direction}; direction is unit length.
struct ObstacleLine {
    ObstacleLine(Vect base, Vect direction);
    Vect base;
    Vect direction;
};

/// Convex hull of {0} and B(target, aperture), i.e. the union of all segments
/// [0, y] with y in B(target, aperture). Requires 0 <= aperture < |target|.
struct ConeSpec {
    ConeSpec(Vect target, double aperture);
    Vect target;
    double aperture;
};

/// The closed thickness-neighbourhood of a ConeSpec.
struct ThickenedCone {
    ThickenedCone(ConeSpec cone, double thickness);
    ConeSpec cone;
    double thickness;
};

/// Distance in the meridian half-plane (u along the axis, h >= 0 radial) to
/// hull({0} and the disk of radius q centred at (length, 0)). Any length >= 0
/// and q >= 0 are accepted; when q >= length the hull is the disk itself.
double meridian_distance(double u, double h, double length, double q) noexcept;

double dist_point_segment(const Vect& c, const SegmentToTarget& seg);
double dist_point_cone(const Vect& c, const ConeSpec& cone);
double dist_line_segment(const ObstacleLine& line, const SegmentToTarget& seg);

/// inf over the line of dist_point_cone. The distance is convex along the line;
/// the minimiser lies within |target| + aperture of the foot of the origin, and
/// golden-section search runs to 1e-10 * (|target| + 1) in the line parameter.
double dist_line_cone(const ObstacleLine& line, const ConeSpec& cone);

/// Largest q in [0, q_cap] for which the ball does not meet the cone (target, q).
/// Returns q_cap when the ball stays clear of the capped cone. Throws
/// std::invalid_argument if the ball already cuts the segment [0, target].
double max_aperture(const ObstacleBall& ball, const Vect& target, double q_cap);

/// Same for a line thickened to blocking_radius (a cylinder of that radius).
double max_aperture(const ObstacleLine& line, double blocking_radius, const Vect& target, double q_cap);

/// Axisymmetric body B(hull({0} and B(length*e1, q)), t) described through its
/// meridian profile. Unlike ConeSpec this admits q >= length, which arises for
/// projections of cones onto hyperplanes.
class RevolutionBody {
public:
    RevolutionBody(double length, double aperture, double thickness);

    double length() const noexcept { return length_; }
    double aperture() const noexcept { return q_; }
    double thickness() const noexcept { return t_; }

    /// Radius of the body's cross-section at axial coordinate u (0 outside).
    double profile(double u) const noexcept;
    double axial_min() const noexcept;
    double axial_max() const noexcept;
    /// Points where the profile changes analytic form.
    std::vector<double> breakpoints() const;

    /// n-dimensional volume kappa_{n-1} * int profile^{n-1}; for n = 1 the extent length.
    double volume(int n) const;
    /// volume(n) minus the volume of the same body with aperture 0, integrated
    /// as a single difference of profiles.
    double excess_volume(int n) const;

private:
    double length_, q_, t_;
};

/// lambda_n of the thickened cone (axis length |target|).
double revolve_volume(const ThickenedCone& body, int n);

/// Cross-section radius at axial coordinate u found by bisection on
/// dist_point_cone. Independent of RevolutionBody::profile; kept as its oracle.
double profile_by_bisection(const ThickenedCone& body, double u);

/// One draw of the visibility radius, capped at q_cap (censored when no obstacle binds).
struct QSample {
    double q;
    bool censored;
};

struct Box {
    Vect lo, hi;
    double volume() const;
};

struct VolumeEstimate {
    double estimate;
    double stderr_;
};

/// Hit-or-miss volume of {membership} inside the box.
VolumeEstimate mc_volume_oracle(const std::function<bool(const Vect&)>& membership, const Box& box,
                                std::uint64_t n_points, RngStream& stream);

}  // namespace vislab
