#pragma once

#include <cstdint>
#include <vector>

#include "vislab/geometry.hpp"
#include "vislab/mathcore.hpp"
#include "vislab/rng.hpp"

namespace vislab {

/// Compact target set with an exact Euclidean distance function.
class TargetShape {
public:
    enum class Kind { Ball, SegmentCylinder, Cone };

    static TargetShape ball(Vect center, double radius);
    /// B([0, x], rho).
    static TargetShape segment_cylinder(Vect x, double rho);
    /// B(hull({0} and B(x, aperture)), rho).
    static TargetShape cone(Vect x, double aperture, double rho);

    static TargetShape segment_cylinder(double r, double rho, int d) { return segment_cylinder(Vect::axis(d, r), rho); }
    static TargetShape cone(double r, double aperture, double rho, int d) {
        return cone(Vect::axis(d, r), aperture, rho);
    }

    Kind kind() const noexcept { return kind_; }
    int dim() const noexcept { return point_.dim(); }
    /// Distance from p to the shape (0 inside).
    double distance(const Vect& p) const noexcept;

    /// Ball B(enclosing_center, enclosing_radius) containing the shape.
    Vect enclosing_center() const;
    double enclosing_radius() const noexcept;
    /// Smallest geometric scale (ball radius or thickening radius).
    double feature_size() const noexcept { return radius_; }
    /// Ball centre, or the segment end point x.
    const Vect& point() const noexcept { return point_; }
    double aperture() const noexcept { return aperture_; }
    /// Radius of the smallest capsule around [0, x] containing the shape (aperture + rho).
    double capsule_radius() const noexcept { return aperture_ + radius_; }

private:
    TargetShape(Kind k, Vect p, double aperture, double radius);

    Kind kind_;
    Vect point_;
    Vect axis_;
    double length_ = 0.0;
    double aperture_ = 0.0;
    double radius_;
};

struct WosConfig {
    double hit_tolerance;
    double outer_radius;
    double enclosing_radius;
    Vect enclosing_center;
    std::uint64_t max_steps = 1000000;
    /// Declare escape at the outer radius instead of playing Russian roulette.
    bool truncate_only = false;

    /// Defaults: tolerance 1e-6 * feature size, outer radius 4 * enclosing radius.
    static WosConfig for_shape(const TargetShape& shape);
};

enum class WosOutcome { Hit, Escape, Aborted };

/// One walk-on-spheres trajectory from start until it comes within hit_tolerance of the
/// shape (Hit), escapes to infinity (Escape, decided by Russian roulette with exact
/// re-entry), or exceeds max_steps (Aborted).
WosOutcome wos_run(const TargetShape& shape, const Vect& start, const WosConfig& cfg, RngStream& stream);

/// wos_run == Hit; throws std::runtime_error on Aborted.
bool wos_hits(const TargetShape& shape, const Vect& start, const WosConfig& cfg, RngStream& stream);

/// Point of the sphere B(center, radius) hit by Brownian motion started at the exterior
/// point x, conditioned on hitting (density proportional to |x - y|^{-d}).
Vect sample_exterior_harmonic(const Vect& x, const Vect& center, double radius, RngStream& stream);

/// Closed surface enclosing a target, with its capacity and normalised equilibrium measure.
class LaunchSurface {
public:
    static LaunchSurface sphere(Vect center, double radius);
    /// Prolate spheroid with semi-axis a along the unit axis and b (< = a) across.
    static LaunchSurface spheroid(Vect center, Vect axis, double a, double b);
    /// Sphere of radius 2 R_K for balls; for elongated shapes a spheroid around the capsule.
    static LaunchSurface enclosing(const TargetShape& shape);

    /// Newtonian capacity of the enclosed body (normalisation cap(B(R)) = R^{d-2} / gamma_d).
    double mass() const noexcept { return mass_; }
    /// Draw from the equilibrium measure normalised to a probability.
    Vect sample(RngStream& stream) const;
    bool contains(const Vect& p) const;

    double semi_major() const noexcept { return a_; }
    double semi_minor() const noexcept { return b_; }

private:
    LaunchSurface(Vect center, Vect axis, double a, double b);

    Vect center_, axis_;
    double a_, b_;
    double mass_;
};

/// Capacity of a prolate spheroid with semi-axes a >= b in R^d.
double spheroid_capacity(int d, double a, double b);

struct CapacityEstimate {
    double value;
    double stderr_;
    std::uint64_t n_walkers;
    double bias_bound;
    std::uint64_t hits = 0;
    std::uint64_t aborted = 0;
    double launch_mass = 0.0;
};

/// cap(K) = mass(S) * P[walker from the equilibrium measure of S hits K], for K inside S.
CapacityEstimate estimate_capacity(const TargetShape& shape, const WosConfig& cfg, std::uint64_t n_walkers,
                                   const RngStream& stream, unsigned threads = 0);
CapacityEstimate estimate_capacity(const TargetShape& shape, const WosConfig& cfg, const LaunchSurface& launch,
                                   std::uint64_t n_walkers, const RngStream& stream, unsigned threads = 0);

/// Leading-order capacity of B([0, r e1], rho): kappa_d rho^{d-3} r / log r (d = 3) or kappa_d rho^{d-3} r.
double capacity_asymptotic(double r, double rho, int d);

/// Central value of the non-hit probability of B([0, r e1], rho) from a point at axial
/// coordinate x_axis and distance `offset` from the axis.
double nonhit_asymptotic(double x_axis, double offset, double r, double rho, int d);

struct ProbabilityEstimate {
    double p;
    double stderr_;
};

ProbabilityEstimate estimate_nonhit(const Vect& x, double r, double rho, const WosConfig& cfg, std::uint64_t n,
                                    const RngStream& stream, unsigned threads = 0);

/// 1/2 alpha kappa_d rho^{d-4} (1 for d = 3, d - 3 for d >= 4).
double lambda_bi(double alpha, double rho, int d);

/// log^2 r / r for d = 3, 1/r for d >= 4.
double bi_window(int d, double r);

struct SurvivalEstimate {
    double s;
    double probability;
    double lo, hi;
    double delta_cap;
    double delta_cap_stderr;
    std::uint64_t cone_only_hits;
};

struct CoupledRun {
    std::vector<SurvivalEstimate> estimates;
    std::uint64_t n_walkers;
    std::uint64_t aborted;
    double launch_mass;
    /// Walkers that hit the cylinder without hitting every enclosing cone (must be 0).
    std::uint64_t coupling_violations;
};

/// Coupled estimate of exp(-alpha [cap(cone_s) - cap(cylinder)]) for every s in s_grid
/// (aperture s * bi_window(d, r)). All shapes share one launch surface and one set of
/// trajectories: each walk is driven by the largest cone, then continues against the next
/// smaller shape after each hit. Confidence intervals at `level` via the delta method.
CoupledRun conditional_survival_mc(double alpha, double rho, int d, double r, const std::vector<double>& s_grid,
                                   std::uint64_t n_walkers, const RngStream& stream, unsigned threads = 0,
                                   double level = 0.95);

}  // namespace vislab
