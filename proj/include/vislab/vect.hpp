#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>

namespace vislab {

/// Largest ambient dimension supported by the fixed-size vector type.
inline constexpr int kMaxDim = 10;

/// Point or vector in R^d with inline storage (no heap traffic in hot loops).
class Vect {
public:
    Vect() = default;
    explicit Vect(int dim) : dim_(dim) {
        if (dim < 1 || dim > kMaxDim) throw std::domain_error("Vect: dimension out of range");
    }
    Vect(std::initializer_list<double> coords) : dim_(static_cast<int>(coords.size())) {
        if (dim_ < 1 || dim_ > kMaxDim) throw std::domain_error("Vect: dimension out of range");
        int i = 0;
        for (double c : coords) x_[i++] = c;
    }

    /// u * e_1 in R^dim.
    static Vect axis(int dim, double u) {
        Vect v(dim);
        v[0] = u;
        return v;
    }

    int dim() const noexcept { return dim_; }
    double& operator[](int i) noexcept { return x_[i]; }
    double operator[](int i) const noexcept { return x_[i]; }

    Vect& operator+=(const Vect& o) noexcept {
        for (int i = 0; i < dim_; ++i) x_[i] += o.x_[i];
        return *this;
    }
    Vect& operator-=(const Vect& o) noexcept {
        for (int i = 0; i < dim_; ++i) x_[i] -= o.x_[i];
        return *this;
    }
    Vect& operator*=(double s) noexcept {
        for (int i = 0; i < dim_; ++i) x_[i] *= s;
        return *this;
    }
    friend Vect operator+(Vect a, const Vect& b) noexcept { return a += b; }
    friend Vect operator-(Vect a, const Vect& b) noexcept { return a -= b; }
    friend Vect operator*(Vect a, double s) noexcept { return a *= s; }
    friend Vect operator*(double s, Vect a) noexcept { return a *= s; }

    friend double dot(const Vect& a, const Vect& b) noexcept {
        double s = 0.0;
        for (int i = 0; i < a.dim_; ++i) s += a.x_[i] * b.x_[i];
        return s;
    }
    double norm2() const noexcept { return dot(*this, *this); }
    double norm() const noexcept { return std::sqrt(norm2()); }

    bool is_finite() const noexcept {
        for (int i = 0; i < dim_; ++i)
            if (!std::isfinite(x_[i])) return false;
        return true;
    }

    friend bool operator==(const Vect& a, const Vect& b) noexcept {
        if (a.dim_ != b.dim_) return false;
        for (int i = 0; i < a.dim_; ++i)
            if (a.x_[i] != b.x_[i]) return false;
        return true;
    }

private:
    std::array<double, kMaxDim> x_{};
    int dim_ = 0;
};

inline double distance(const Vect& a, const Vect& b) noexcept { return (a - b).norm(); }

}  // namespace vislab
