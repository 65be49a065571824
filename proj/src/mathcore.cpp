#include "vislab/mathcore.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>
#include <stdexcept>
#include <string>

namespace vislab {

Dimension::Dimension(int d) : d_(d) {
    if (d < 2) throw std::domain_error("dimension must be >= 2, got " + std::to_string(d));
}

void Dimension::require_transient() const {
    if (d_ < 3) throw std::domain_error("this operation requires d >= 3, got d = " + std::to_string(d_));
}

namespace {

constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
constexpr double kLanczosG = 7.0;

double lanczos_ln(double x) {
    x -= 1.0;
    double a = kLanczos[0];
    for (int i = 1; i < 9; ++i) a += kLanczos[i] / (x + i);
    const double t = x + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * kPi) + (x + 0.5) * std::log(t) - t + std::log(a);
}

}  // namespace

double gamma_ln(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error("gamma_ln: argument must be positive and finite");
    if (x < 0.5) return std::log(kPi / std::sin(kPi * x)) - lanczos_ln(1.0 - x);
    return lanczos_ln(x);
}

double gamma_fn(double x) { return std::exp(gamma_ln(x)); }

double beta_fn(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("beta_fn: arguments must be positive");
    return std::exp(gamma_ln(a) + gamma_ln(b) - gamma_ln(a + b));
}

double unit_ball_volume(int n) {
    if (n < 0) throw std::domain_error("unit_ball_volume: n must be >= 0");
    if (n == 0) return 1.0;
    return std::exp(0.5 * n * std::log(kPi) - gamma_ln(0.5 * n + 1.0));
}

double green_constant(int d) {
    if (d < 3) throw std::domain_error("green_constant: requires d >= 3");
    return gamma_fn(0.5 * (d - 2)) / (2.0 * std::pow(kPi, 0.5 * d));
}

double cylinder_capacity_constant(int d) {
    if (d < 3) throw std::domain_error("cylinder_capacity_constant: requires d >= 3");
    if (d == 3) return kPi;
    return 2.0 * std::pow(kPi, 0.5 * (d - 1)) / gamma_fn(0.5 * (d - 3));
}

double line_integral_constant(int d) {
    if (d < 3) throw std::domain_error("line_integral_constant: requires d >= 3");
    if (d == 3) return 1.0;
    return 0.5 * beta_fn(0.5, 0.5 * (d - 3));
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must lie in (0, 1)");
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2.0 * kPi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

std::string format_shortest(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

const GaussLegendreRule& gauss_legendre(int n) {
    if (n < 1) throw std::domain_error("gauss_legendre: n must be >= 1");
    static std::mutex mutex;
    static std::map<int, GaussLegendreRule> cache;
    std::lock_guard lock(mutex);
    if (auto it = cache.find(n); it != cache.end()) return it->second;

    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0, p1 = 0.0;
        for (int j = 1; j <= n; ++j) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

double integrate_gauss_legendre(const std::function<double(double)>& f, double a, double b, int n) {
    const auto& rule = gauss_legendre(n);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return sum * half;
}

namespace {

constexpr std::array<double, 8> kXgk = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                        0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double kronrod;
    double error;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    const double fc = f(mid);
    double k = fc * kWgk[7];
    double g = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double fsum = f(mid - dx) + f(mid + dx);
        k += kWgk[j] * fsum;
        if (j % 2 == 1) g += kWg[j / 2] * fsum;
    }
    return {k * half, std::abs((k - g) * half)};
}

}  // namespace

namespace {

// Global adaptive refinement: always bisect the panel with the largest error estimate
// until the summed estimate meets the tolerance or the panel budget runs out.
double integrate_global(const std::function<double(double)>& f, std::span<const double> breaks, double rel_tol,
                        double abs_tol) {
    struct Item {
        double lo, hi;
        Panel p;
        bool operator<(const Item& o) const { return p.error < o.p.error; }
    };
    std::priority_queue<Item> heap;
    double total = 0.0, error = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) continue;
        const Panel p = gk15(f, breaks[i], breaks[i + 1]);
        heap.push({breaks[i], breaks[i + 1], p});
        total += p.kronrod;
        error += p.error;
    }
    constexpr int kMaxPanels = 4000;
    while (!heap.empty() && static_cast<int>(heap.size()) < kMaxPanels &&
           error > std::max(abs_tol, rel_tol * std::abs(total))) {
        const Item worst = heap.top();
        // Panels cannot shrink below floating-point resolution.
        if (worst.hi - worst.lo <= 1e-14 * (std::abs(worst.lo) + std::abs(worst.hi))) break;
        heap.pop();
        const double m = 0.5 * (worst.lo + worst.hi);
        const Panel left = gk15(f, worst.lo, m), right = gk15(f, m, worst.hi);
        total += left.kronrod + right.kronrod - worst.p.kronrod;
        error += left.error + right.error - worst.p.error;
        heap.push({worst.lo, m, left});
        heap.push({m, worst.hi, right});
    }
    // Re-sum to shed the rounding drift of the incremental updates.
    total = 0.0;
    while (!heap.empty()) {
        total += heap.top().p.kronrod;
        heap.pop();
    }
    return total;
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol, double abs_tol) {
    if (a == b) return 0.0;
    if (b < a) return -integrate_adaptive(f, b, a, rel_tol, abs_tol);
    const double breaks[] = {a, b};
    return integrate_global(f, breaks, rel_tol, abs_tol);
}

double integrate_piecewise(const std::function<double(double)>& f, std::span<const double> breaks, double rel_tol,
                           double abs_tol) {
    return integrate_global(f, breaks, rel_tol, abs_tol);
}

ChebyshevInterpolant::ChebyshevInterpolant(const std::function<double(double)>& f, double a, double b, int n_points)
    : a_(a), b_(b) {
    if (n_points < 2) throw std::domain_error("ChebyshevInterpolant: need at least 2 points");
    if (!(b > a)) throw std::domain_error("ChebyshevInterpolant: empty interval");
    x_.resize(n_points);
    fx_.resize(n_points);
    w_.resize(n_points);
    for (int j = 0; j < n_points; ++j) {
        const double t = std::cos(kPi * j / (n_points - 1));
        x_[j] = 0.5 * (a + b) + 0.5 * (b - a) * t;
        fx_[j] = f(x_[j]);
        w_[j] = (j % 2 == 0 ? 1.0 : -1.0) * ((j == 0 || j == n_points - 1) ? 0.5 : 1.0);
    }
}

double ChebyshevInterpolant::operator()(double x) const {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < x_.size(); ++j) {
        const double diff = x - x_[j];
        if (diff == 0.0) return fx_[j];
        const double t = w_[j] / diff;
        num += t * fx_[j];
        den += t;
    }
    return num / den;
}

}  // namespace vislab
