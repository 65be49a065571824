#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "vislab/geometry.hpp"
#include "vislab/mathcore.hpp"
#include "vislab/rng.hpp"

namespace vislab {

/// Distribution of obstacle radii: constant, uniform on [a, b], or finitely many atoms.
class RadiusLaw {
public:
    enum class Kind { Constant, Uniform, Discrete };

    static RadiusLaw constant(double value);
    static RadiusLaw uniform(double a, double b);
    /// Atoms (value, probability); probabilities must sum to 1 within 1e-12.
    static RadiusLaw discrete(std::vector<std::pair<double, double>> atoms);

    /// Parses `const:V`, `unif:A:B` or `disc:v1@p1,v2@p2,...`. Discrete probabilities
    /// summing to 1 within 1e-9 are accepted and renormalised. Throws std::invalid_argument.
    static RadiusLaw parse(const std::string& spec);
    /// Inverse of parse (shortest round-trip numbers).
    std::string to_spec() const;

    Kind kind() const noexcept { return kind_; }
    const std::vector<std::pair<double, double>>& atoms() const noexcept { return atoms_; }
    double lower() const noexcept { return lo_; }
    double r_max() const noexcept { return hi_; }

    /// E[f(radius)]; the uniform law uses a Gauss-Legendre rule with gl_nodes points.
    double expect(const std::function<double(double)>& f, int gl_nodes = 64) const;
    /// E[radius^p], closed form.
    double moment(double p) const;
    double sample(RngStream& stream) const;

private:
    RadiusLaw(Kind kind, double lo, double hi, std::vector<std::pair<double, double>> atoms)
        : kind_(kind), lo_(lo), hi_(hi), atoms_(std::move(atoms)) {}

    Kind kind_;
    double lo_, hi_;
    std::vector<std::pair<double, double>> atoms_;
};

struct BooleanParams {
    BooleanParams(double alpha, RadiusLaw law, Dimension d);
    double alpha;
    RadiusLaw law;
    Dimension d;
};

/// Balls with a target point; when conditioned, no ball meets [0, target].
struct BallScene {
    BallScene(std::vector<ObstacleBall> obstacles, Vect target, double window_radius, bool conditioned);
    std::vector<ObstacleBall> obstacles;
    Vect target;
    double window_radius;
    bool conditioned;
};

/// E[lambda_d(B(K, radius))] for K = hull({0} and B(r e1, q)); q = 0 gives the segment.
double expected_nbhd_volume(double r, double q, const BooleanParams& params, int gl_nodes = 64);

/// E[lambda_d(B(K_q, radius)) - lambda_d(B(K_0, radius))], integrated as one difference.
double expected_excess_volume(double r, double q, const BooleanParams& params, int gl_nodes = 64);

double visibility_probability(const BooleanParams& params, double r);

/// P[Q > s/r | segment [0, r e1] visible]. Throws std::domain_error when s/r >= r.
double conditional_survival_exact(const BooleanParams& params, double r, double s);

/// 1/2 alpha (d-1) kappa_{d-1} E[radius^{d-2}].
double lambda_bm(const BooleanParams& params);

/// Poisson balls whose centres fall in the capsule B([0, r e1], q_cap + r_max + 1), which
/// contains every centre able to reach the q_cap-cone. When conditioned, balls meeting the
/// segment are deleted (restriction property of the Poisson process).
BallScene sample_ball_scene(const BooleanParams& params, double r, double q_cap, bool conditioned,
                            RngStream& stream);

inline BallScene sample_conditional_scene(const BooleanParams& params, double r, double q_cap, RngStream& stream) {
    return sample_ball_scene(params, r, q_cap, true, stream);
}

/// True when some ball of the scene meets [0, target].
bool blocks_segment(const BallScene& scene);

/// min over obstacles of max_aperture; (q_cap, censored) when none binds.
/// Throws std::invalid_argument on an unconditioned scene.
QSample sample_Q(const BallScene& scene, double q_cap);

/// Uniform point in the capsule B([0, length e1], radius) in R^d.
Vect sample_capsule_point(int d, double length, double radius, RngStream& stream);
double capsule_volume(int d, double length, double radius);

}  // namespace vislab
