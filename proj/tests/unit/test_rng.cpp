#include "doctest.h"

#include <cmath>
#include <vector>

#include "vislab/mathcore.hpp"
#include "vislab/rng.hpp"

using namespace vislab;

TEST_CASE("Philox4x32-10 known-answer vectors") {
    using A4 = std::array<std::uint32_t, 4>;
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("same seed and stream reproduce, different streams differ") {
    RngStream a(42, 7), b(42, 7), c(42, 8), e(43, 7);
    int same_c = 0, same_e = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto va = a.next_u64();
        CHECK(va == b.next_u64());
        same_c += va == c.next_u64();
        same_e += va == e.next_u64();
    }
    CHECK(same_c == 0);
    CHECK(same_e == 0);
    const RngStream s1 = RngStream(1, 0).substream(3), s2 = RngStream(1, 0).substream(3);
    CHECK(s1.stream_index() == s2.stream_index());
    CHECK(RngStream(1, 0).substream(3).stream_index() != RngStream(1, 0).substream(4).stream_index());
    CHECK(RngStream(1, 0).substream(3).stream_index() != RngStream(1, 1).substream(3).stream_index());
}

TEST_CASE("uniform mean and range") {
    RngStream s(2024, 0);
    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / n - 0.5) < 0.002);
}

TEST_CASE("gaussian moments") {
    RngStream s(5, 1);
    const int n = 400000;
    double m1 = 0, m2 = 0, m4 = 0;
    for (int i = 0; i < n; ++i) {
        const double g = s.gaussian();
        m1 += g;
        m2 += g * g;
        m4 += g * g * g * g;
    }
    m1 /= n, m2 /= n, m4 /= n;
    CHECK(std::abs(m1) < 4.0 / std::sqrt(n));
    CHECK(std::abs(m2 - 1.0) < 4.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(m4 - 3.0) < 4.0 * std::sqrt(96.0 / n));
}

namespace {

// Pearson chi-square of Poisson draws against the exact pmf, pooling tails below expected count 5.
double poisson_chi2(double mean, int n, std::uint64_t seed, int& dof) {
    RngStream s(seed, 0);
    const int kmax = static_cast<int>(mean + 12.0 * std::sqrt(mean) + 20.0);
    std::vector<double> counts(kmax + 1, 0.0);
    for (int i = 0; i < n; ++i) counts[std::min<std::uint64_t>(s.poisson(mean), kmax)] += 1.0;
    std::vector<double> expect(kmax + 1);
    double acc = 0.0;
    for (int k = 0; k < kmax; ++k) {
        expect[k] = n * std::exp(-mean + k * std::log(mean) - gamma_ln(k + 1.0));
        acc += expect[k];
    }
    expect[kmax] = n - acc;
    double chi2 = 0.0, eo = 0.0, oo = 0.0;
    dof = -1;
    for (int k = 0; k <= kmax; ++k) {
        eo += expect[k];
        oo += counts[k];
        if (eo >= 5.0 || k == kmax) {
            chi2 += (oo - eo) * (oo - eo) / std::max(eo, 1e-300);
            ++dof;
            eo = oo = 0.0;
        }
    }
    return chi2;
}

}  // namespace

TEST_CASE("poisson matches the exact pmf on both sampling branches") {
    for (double mean : {0.3, 4.0, 11.5, 12.0, 37.0, 400.0}) {
        int dof = 0;
        const double chi2 = poisson_chi2(mean, 200000, 99, dof);
        // Upper 1e-4 quantile of chi2(dof) via the Wilson-Hilferty approximation.
        const double z = normal_quantile(1.0 - 1e-4);
        const double k = dof;
        const double crit = k * std::pow(1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k)), 3);
        CAPTURE(mean);
        CHECK(chi2 < crit);
    }
}

TEST_CASE("poisson edge cases") {
    RngStream s(1, 1);
    CHECK(s.poisson(0.0) == 0u);
    CHECK_THROWS(s.poisson(-1.0));
    double sum = 0.0;
    for (int i = 0; i < 2000; ++i) sum += static_cast<double>(s.poisson(1e6));
    CHECK(std::abs(sum / 2000 - 1e6) < 4.0 * std::sqrt(1e6 / 2000));
}

TEST_CASE("unit sphere draws have unit norm and zero mean") {
    RngStream s(3, 3);
    for (int n : {2, 3, 5, 9}) {
        Vect mean(n);
        for (int i = 0; i < 20000; ++i) {
            const Vect v = s.unit_sphere(n);
            REQUIRE(std::abs(v.norm() - 1.0) < 1e-12);
            mean += v;
        }
        for (int i = 0; i < n; ++i) CHECK(std::abs(mean[i] / 20000) < 4.0 / std::sqrt(20000.0 * n));
    }
}
