#pragma once

#include <vector>

#include "vislab/geometry.hpp"
#include "vislab/mathcore.hpp"
#include "vislab/rng.hpp"

namespace vislab {

struct CylinderParams {
    CylinderParams(double alpha, double rho, Dimension d);
    double alpha;
    double rho;
    Dimension d;
};

/// Lines with a target point; when conditioned, no line comes within rho of [0, target].
struct LineScene {
    LineScene(std::vector<ObstacleLine> lines, Vect target, double rho, double window_radius, bool conditioned);
    std::vector<ObstacleLine> lines;
    Vect target;
    double rho;
    double window_radius;
    bool conditioned;
};

/// E|xi| for xi the projection of a uniform unit vector onto a hyperplane: Beta(1/2, d/2) / Beta(1/2, (d-1)/2).
double e_norm_xi(int d);

/// Visibility window of the cylinder model: 1 in d = 2, 1/r otherwise.
double cylinder_window(int d, double r);

/// mu(B([0, r e1], rho)) = kappa_{d-1} rho^{d-1} + kappa_{d-2} rho^{d-2} r E|xi|.
double mu_segment(double r, const CylinderParams& params);

/// mu of the rho-thickened cone with aperture q: the expectation over the projection
/// direction of the (d-1)-volume of the projected body (axis length r|sin theta|).
double mu_cone_aperture(double r, double q, const CylinderParams& params, int gl_nodes = 64);

/// mu_cone_aperture minus mu_segment, integrated as a single difference.
double mu_excess(double r, double q, const CylinderParams& params, int gl_nodes = 64);

/// mu_cone_aperture at q = s * window(r). Throws std::domain_error when that aperture reaches r.
double mu_cone(double r, double s, const CylinderParams& params, int gl_nodes = 64);

/// alpha for d = 2; 1/2 alpha (d-2) kappa_{d-2} rho^{d-3} E|xi| for d >= 3.
double lambda_pc(const CylinderParams& params);

double visibility_probability(const CylinderParams& params, double r);

/// P[Q > s window(r) | segment visible].
double conditional_survival_exact(const CylinderParams& params, double r, double s);

/// Poisson lines hitting the ball B(0, radius): Poisson(alpha kappa_{d-1} radius^{d-1}) lines with
/// uniform directions and offsets uniform in the orthogonal (d-1)-ball.
std::vector<ObstacleLine> sample_lines(const CylinderParams& params, double radius, RngStream& stream);

/// Poisson lines hitting the capsule B([0, length e1], radius). Directions are drawn with
/// density proportional to the projected capsule volume, offsets uniformly in the projection.
std::vector<ObstacleLine> sample_lines_capsule(const CylinderParams& params, double length, double radius,
                                               RngStream& stream);

/// Lines hitting B([0, r e1], q_cap + rho + 1); when conditioned, lines within rho of the
/// segment are deleted (restriction property).
LineScene sample_line_scene(const CylinderParams& params, double r, double q_cap, bool conditioned,
                            RngStream& stream);

inline LineScene sample_conditional_scene(const CylinderParams& params, double r, double q_cap, RngStream& stream) {
    return sample_line_scene(params, r, q_cap, true, stream);
}

bool blocks_segment(const LineScene& scene);

QSample sample_Q(const LineScene& scene, double q_cap);

}  // namespace vislab
