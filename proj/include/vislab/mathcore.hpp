#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace vislab {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Ambient dimension. Always >= 2; interlacement code additionally needs >= 3.
class Dimension {
public:
    explicit Dimension(int d);
    int value() const noexcept { return d_; }
    operator int() const noexcept { return d_; }

    /// Throws std::domain_error unless d >= 3.
    void require_transient() const;

private:
    int d_;
};

// Special functions. All throw std::domain_error on arguments outside their domain.

/// ln Gamma(x) for x > 0 (Lanczos, g = 7, 9 terms; reflection below 0.5).
double gamma_ln(double x);
double gamma_fn(double x);
double beta_fn(double a, double b);

/// kappa_n, the volume of the unit ball in R^n.
double unit_ball_volume(int n);

/// Green function constant gamma_d with G(y, z) = gamma_d |y - z|^{2-d}.
double green_constant(int d);

/// Long-cylinder capacity constant: pi for d = 3, 2 pi^{(d-1)/2} / Gamma((d-3)/2) for d >= 4.
double cylinder_capacity_constant(int d);

/// beta_d = sqrt(pi) Gamma((d-3)/2) / (2 Gamma((d-2)/2)), d >= 4; beta_3 = 1.
double line_integral_constant(int d);

/// Standard normal quantile (Acklam's rational approximation plus one Halley step).
double normal_quantile(double p);

/// Shortest decimal text that parses back to exactly x.
std::string format_shortest(double x);

// Quadrature.

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Cached rule for n points (Newton iteration on P_n).
const GaussLegendreRule& gauss_legendre(int n);

/// Integral of f over [a, b] with an n-point Gauss-Legendre rule.
double integrate_gauss_legendre(const std::function<double(double)>& f, double a, double b, int n);

/// Adaptive Gauss-Kronrod (7/15) integral of f over [a, b].
/// Bisects the worst panel until the summed Kronrod/Gauss differences fall below
/// max(abs_tol, rel_tol * |I|), or 4000 panels are in use.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-10, double abs_tol = 0.0);

/// Adaptive integral over consecutive intervals [breaks[i], breaks[i+1]].
/// Breaks must be non-decreasing; empty panels are skipped.
double integrate_piecewise(const std::function<double(double)>& f, std::span<const double> breaks,
                           double rel_tol = 1e-10, double abs_tol = 0.0);

/// Barycentric Chebyshev interpolant of f on [a, b] (second-kind points).
class ChebyshevInterpolant {
public:
    ChebyshevInterpolant(const std::function<double(double)>& f, double a, double b, int n_points);
    double operator()(double x) const;
    double lower() const noexcept { return a_; }
    double upper() const noexcept { return b_; }

private:
    double a_, b_;
    std::vector<double> x_, fx_, w_;
};

}  // namespace vislab
