#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vislab/geometry.hpp"
#include "vislab/mathcore.hpp"

using namespace vislab;

namespace {

// The cone hull({0} and B(x,q)) is the union of the balls B(l x, l q), l in [0,1]. These oracles
// minimise over l by a dense scan followed by golden refinement of the best cell.
template <class F>
double min_over_unit_interval(F&& f) {
    const int n = 4000;
    int best = 0;
    double fbest = f(0.0);
    for (int i = 1; i <= n; ++i) {
        const double v = f(static_cast<double>(i) / n);
        if (v < fbest) fbest = v, best = i;
    }
    double a = std::max(0.0, (best - 1.0) / n), b = std::min(1.0, (best + 1.0) / n);
    for (int it = 0; it < 200; ++it) {
        const double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
        (f(m1) <= f(m2) ? b : a) = (f(m1) <= f(m2) ? m2 : m1);
    }
    return std::min(fbest, f(0.5 * (a + b)));
}

double oracle_point_cone(const Vect& c, const Vect& x, double q) {
    return std::max(0.0, min_over_unit_interval([&](double l) { return distance(c, l * x) - l * q; }));
}

Vect perp(const Vect& v, const Vect& u) { return v - dot(v, u) * u; }

double oracle_line_cone(const ObstacleLine& line, const Vect& x, double q) {
    return std::max(0.0, min_over_unit_interval(
                             [&](double l) { return perp(l * x - line.base, line.direction).norm() - l * q; }));
}

// Largest unblocked aperture: q*(l) = (dist(l x, obstacle) - R) / l minimised over l.
double oracle_ball_aperture(const ObstacleBall& b, const Vect& x, double cap) {
    double v = min_over_unit_interval(
        [&](double l) { return l < 1e-12 ? 1e300 : (distance(b.center, l * x) - b.radius) / l; });
    return std::min(cap, std::max(0.0, v));
}

double oracle_line_aperture(const ObstacleLine& line, double rho, const Vect& x, double cap) {
    double v = min_over_unit_interval([&](double l) {
        return l < 1e-12 ? 1e300 : (perp(l * x - line.base, line.direction).norm() - rho) / l;
    });
    return std::min(cap, std::max(0.0, v));
}

Vect random_vect(RngStream& s, int d, double scale) {
    Vect v(d);
    for (int i = 0; i < d; ++i) v[i] = scale * (2.0 * s.uniform() - 1.0);
    return v;
}

}  // namespace

TEST_CASE("dist_point_segment examples") {
    const SegmentToTarget seg(Vect{10, 0});
    CHECK(dist_point_segment(Vect{10, 0}, seg) == 0.0);
    CHECK(dist_point_segment(Vect{5, 3}, seg) == doctest::Approx(3.0));
    CHECK(dist_point_segment(Vect{13, 4}, seg) == doctest::Approx(5.0));
    CHECK(dist_point_segment(Vect{-3, -4}, seg) == doctest::Approx(5.0));
}

TEST_CASE("dist_point_cone examples") {
    const Vect x{10, 0};
    CHECK(dist_point_cone(Vect{0, 0}, ConeSpec(x, 1.0)) == 0.0);
    CHECK(dist_point_cone(Vect{10, 3}, ConeSpec(x, 1.0)) == doctest::Approx(2.0).epsilon(1e-14));
    const Vect x3{3, -4, 12};
    for (double u : {0.05, 0.5, 2.0}) {
        const double expect = std::max(0.0, u * x3.norm() - 0.7);
        CHECK(dist_point_cone((1 + u) * x3, ConeSpec(x3, 0.7)) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("invalid geometry is rejected") {
    CHECK_THROWS(SegmentToTarget(Vect{0, 0}));
    CHECK_THROWS(ConeSpec(Vect{1, 0}, 1.0));
    CHECK_THROWS(ConeSpec(Vect{1, 0}, -0.1));
    CHECK_THROWS(ObstacleBall(Vect{1, 0}, 0.0));
    CHECK_THROWS(ObstacleLine(Vect{1, 0}, Vect{1, 1}));
    CHECK_THROWS(ThickenedCone(ConeSpec(Vect{1, 0}, 0.1), -1.0));
    CHECK_THROWS(ObstacleBall(Vect{std::numeric_limits<double>::quiet_NaN(), 0}, 1.0));
}

TEST_CASE("property: dist_point_cone agrees with the union-of-balls oracle") {
    RngStream s(11, 0);
    for (int trial = 0; trial < 400; ++trial) {
        const int d = 2 + trial % 4;
        const Vect x = random_vect(s, d, 10.0);
        if (x.norm() < 0.5) continue;
        const double q = s.uniform() * 0.999 * x.norm();
        const Vect c = random_vect(s, d, 15.0);
        CAPTURE(trial);
        CHECK(std::abs(dist_point_cone(c, ConeSpec(x, q)) - oracle_point_cone(c, x, q)) < 1e-9 * (1 + x.norm()));
    }
}

TEST_CASE("property: cone distance is monotone in the aperture") {
    RngStream s(12, 0);
    for (int trial = 0; trial < 2000; ++trial) {
        const int d = 2 + trial % 5;
        const Vect x = random_vect(s, d, 20.0);
        const double r = x.norm();
        double q1 = s.uniform() * r, q2 = s.uniform() * r;
        if (q1 > q2) std::swap(q1, q2);
        if (q2 >= r) continue;
        const Vect c = random_vect(s, d, 30.0);
        CHECK(dist_point_cone(c, ConeSpec(x, q2)) <= dist_point_cone(c, ConeSpec(x, q1)) + 1e-12);
    }
}

TEST_CASE("dist_line_segment and dist_line_cone") {
    const Vect x{10, 0, 0};
    const ObstacleLine parallel(Vect{0, 5, 0}, Vect{1, 0, 0});
    CHECK(dist_line_segment(parallel, SegmentToTarget(x)) == doctest::Approx(5.0));
    CHECK(dist_line_cone(parallel, ConeSpec(x, 0.0)) == doctest::Approx(5.0));
    const ObstacleLine through_origin(Vect{0, 0, 0}, Vect{0, 0.6, 0.8});
    CHECK(dist_line_cone(through_origin, ConeSpec(x, 1.0)) == 0.0);
    // Parallel line at offset 5 against cone q=1: nearest approach is the end ball side, 5 - 1 = 4.
    CHECK(dist_line_cone(parallel, ConeSpec(x, 1.0)) == doctest::Approx(oracle_line_cone(parallel, x, 1.0)).epsilon(1e-9));
    CHECK(dist_line_cone(parallel, ConeSpec(x, 1.0)) == doctest::Approx(4.0).epsilon(1e-9));
    const ObstacleLine skew(Vect{4, 0, 3}, Vect{0, 1, 0});
    CHECK(dist_line_segment(skew, SegmentToTarget(x)) == doctest::Approx(3.0));
}

TEST_CASE("property: dist_line_cone agrees with the projected-ball oracle") {
    RngStream s(13, 0);
    for (int trial = 0; trial < 300; ++trial) {
        const int d = 2 + trial % 4;
        const Vect x = random_vect(s, d, 10.0);
        if (x.norm() < 0.5) continue;
        const double q = s.uniform() * 0.9 * x.norm();
        const ObstacleLine line(random_vect(s, d, 12.0), s.unit_sphere(d));
        CAPTURE(trial);
        CHECK(std::abs(dist_line_cone(line, ConeSpec(x, q)) - oracle_line_cone(line, x, q)) < 1e-8 * (1 + x.norm()));
        CHECK(std::abs(dist_line_segment(line, SegmentToTarget(x)) - oracle_line_cone(line, x, 0.0)) <
              1e-8 * (1 + x.norm()));
    }
}

TEST_CASE("max_aperture examples") {
    const Vect x{10, 0};
    CHECK(max_aperture(ObstacleBall(Vect{10, 3}, 1.0), x, 5.0) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(max_aperture(ObstacleBall(Vect{5, 2}, 2.0), x, 5.0) == 0.0);
    CHECK(max_aperture(ObstacleBall(Vect{40, 40}, 1.0), x, 5.0) == 5.0);
    CHECK_THROWS_AS(max_aperture(ObstacleBall(Vect{5, 1}, 2.0), x, 5.0), std::invalid_argument);
    CHECK_THROWS_AS(max_aperture(ObstacleBall(Vect{5, 3}, 2.0), x, 10.0), std::invalid_argument);
    const ObstacleLine line(Vect{0, 5, 0}, Vect{1, 0, 0});
    CHECK(max_aperture(line, 1.0, Vect{10, 0, 0}, 6.0) == doctest::Approx(4.0).epsilon(1e-8));
    CHECK_THROWS_AS(max_aperture(line, 6.0, Vect{10, 0, 0}, 6.0), std::invalid_argument);
}

TEST_CASE("property: max_aperture agrees with the direct minimisation oracle") {
    RngStream s(14, 0);
    int checked = 0;
    for (int trial = 0; trial < 600; ++trial) {
        const int d = 2 + trial % 4;
        const Vect x = random_vect(s, d, 10.0);
        const double r = x.norm();
        if (r < 1.0) continue;
        const double cap = (0.05 + 0.9 * s.uniform()) * r;
        const double tol = 1e-8 * r;
        if (trial % 2 == 0) {
            const ObstacleBall b(random_vect(s, d, 14.0), 0.1 + 2.0 * s.uniform());
            if (dist_point_segment(b.center, SegmentToTarget(x)) <= b.radius) continue;
            const double got = max_aperture(b, x, cap);
            CHECK(std::abs(got - oracle_ball_aperture(b, x, cap)) < tol);
            // The returned aperture is (up to tolerance) unblocked, slightly larger is blocked.
            if (got < cap) {
                CHECK(dist_point_cone(b.center, ConeSpec(x, std::min(cap, got + 1e-6 * r))) <= b.radius);
                if (got > 1e-6 * r) CHECK(dist_point_cone(b.center, ConeSpec(x, got - 1e-6 * r)) > b.radius);
            }
        } else {
            const ObstacleLine line(random_vect(s, d, 10.0), s.unit_sphere(d));
            const double rho = 0.1 + s.uniform();
            if (dist_line_segment(line, SegmentToTarget(x)) <= rho) continue;
            CHECK(std::abs(max_aperture(line, rho, x, cap) - oracle_line_aperture(line, rho, x, cap)) < tol);
        }
        ++checked;
    }
    CHECK(checked > 150);
}

TEST_CASE("revolve_volume matches the segment-neighbourhood closed form") {
    for (int d = 2; d <= 5; ++d) {
        for (double r : {1.0, 10.0, 123.0}) {
            Vect x(d);
            x[0] = r;
            const double t = 1.0;
            const double expect = unit_ball_volume(d) * std::pow(t, d) + unit_ball_volume(d - 1) * std::pow(t, d - 1) * r;
            CHECK(revolve_volume(ThickenedCone(ConeSpec(x, 0.0), t), d) == doctest::Approx(expect).epsilon(1e-10));
        }
    }
    CHECK(revolve_volume(ThickenedCone(ConeSpec(Vect{10, 0}, 0.0), 1.0), 2) == doctest::Approx(kPi + 20.0).epsilon(1e-12));
    // Lengths.
    CHECK(revolve_volume(ThickenedCone(ConeSpec(Vect{10, 0}, 0.5), 1.0), 1) == doctest::Approx(12.5));
}

TEST_CASE("closed-form profile agrees with bisection on dist_point_cone") {
    RngStream s(15, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const double r = 0.5 + 20.0 * s.uniform();
        const double q = 0.99 * r * s.uniform();
        const double t = 3.0 * s.uniform();
        const ThickenedCone body(ConeSpec(Vect{r, 0, 0}, q), t);
        const RevolutionBody rb(r, q, t);
        for (int k = 0; k < 20; ++k) {
            const double u = rb.axial_min() + (rb.axial_max() - rb.axial_min()) * s.uniform();
            CHECK(std::abs(rb.profile(u) - profile_by_bisection(body, u)) < 1e-10 * (r + 1));
        }
    }
}

TEST_CASE("revolution body with the aperture beyond the axis length is a ball") {
    const RevolutionBody rb(0.3, 0.5, 0.2);
    CHECK(rb.volume(3) == doctest::Approx(4.0 / 3.0 * kPi * std::pow(0.7, 3)).epsilon(1e-10));
    CHECK(rb.volume(1) == doctest::Approx(1.4));
    const RevolutionBody degenerate(0.0, 0.0, 1.0);
    CHECK(degenerate.volume(4) == doctest::Approx(unit_ball_volume(4)).epsilon(1e-10));
    CHECK(degenerate.excess_volume(4) == 0.0);
}

TEST_CASE("excess volume equals the difference of volumes") {
    for (int n = 1; n <= 5; ++n) {
        const RevolutionBody cone(30.0, 0.8, 1.3), seg(30.0, 0.0, 1.3);
        CHECK(cone.excess_volume(n) == doctest::Approx(cone.volume(n) - seg.volume(n)).epsilon(1e-8));
    }
}

TEST_CASE("property: revolve_volume increases in q, t and |x|") {
    RngStream s(16, 0);
    for (int trial = 0; trial < 300; ++trial) {
        const int d = 2 + trial % 4;
        const double r = 1.0 + 30.0 * s.uniform();
        const double q = 0.9 * r * s.uniform();
        const double t = 0.05 + 2.0 * s.uniform();
        const double eps = 0.01 + 0.05 * s.uniform();
        auto vol = [d](double rr, double qq, double tt) {
            return revolve_volume(ThickenedCone(ConeSpec(Vect::axis(d, rr), qq), tt), d);
        };
        const double base = vol(r, q, t);
        CHECK(vol(r, q + eps, t) > base);
        CHECK(vol(r, q, t + eps) > base);
        CHECK(vol(r + eps, q, t) > base);
    }
}

TEST_CASE("revolve_volume agrees with hit-or-miss volume") {
    SUBCASE("d=3, r=10, q=0.05, t=1") {
        const ThickenedCone body(ConeSpec(Vect{10, 0, 0}, 0.05), 1.0);
        RngStream s(17, 0);
        const Box box{Vect{-1.0, -1.1, -1.1}, Vect{11.1, 1.1, 1.1}};
        const auto est = mc_volume_oracle(
            [&](const Vect& p) { return dist_point_cone(p, body.cone) <= body.thickness; }, box, 10000000, s);
        CHECK(std::abs(est.estimate - revolve_volume(body, 3)) < 3.0 * est.stderr_);
    }
    SUBCASE("d=2, r=10, q=0.1, t=1") {
        const ThickenedCone body(ConeSpec(Vect{10, 0}, 0.1), 1.0);
        RngStream s(18, 0);
        const Box box{Vect{-1.0, -1.2}, Vect{11.2, 1.2}};
        const auto est = mc_volume_oracle(
            [&](const Vect& p) { return dist_point_cone(p, body.cone) <= body.thickness; }, box, 10000000, s);
        CHECK(std::abs(est.estimate - revolve_volume(body, 2)) < 3.0 * est.stderr_);
    }
}

TEST_CASE("mc_volume_oracle basics") {
    RngStream s(19, 0);
    const Box unit{Vect{0, 0}, Vect{1, 1}};
    const auto all = mc_volume_oracle([](const Vect&) { return true; }, unit, 1000, s);
    CHECK(all.estimate == 1.0);
    CHECK(all.stderr_ == 0.0);
    const Box sq{Vect{-1, -1}, Vect{1, 1}};
    const auto disk = mc_volume_oracle([](const Vect& p) { return p.norm2() <= 1.0; }, sq, 1000000, s);
    CHECK(std::abs(disk.estimate - kPi) < 3.0 * disk.stderr_);
}

TEST_CASE("thin-cone volume expansion has an O(1/r) remainder") {
    const double s_ap = 1.5, t = 1.0;
    for (int d = 2; d <= 5; ++d) {
        double scaled[4];
        int i = 0;
        for (double r : {50.0, 100.0, 200.0, 400.0}) {
            const double vol = revolve_volume(ThickenedCone(ConeSpec(Vect::axis(d, r), s_ap / r), t), d);
            const double lead = unit_ball_volume(d) + unit_ball_volume(d - 1) * r +
                                0.5 * unit_ball_volume(d - 1) * (d - 1) * s_ap;
            scaled[i++] = r * std::abs(vol - lead);
        }
        CAPTURE(d);
        const double c_fit = *std::max_element(scaled, scaled + 3);
        CHECK(scaled[3] <= 1.2 * c_fit + 1e-6);
    }
}
