#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace degenwarp {

/// Second-order jet of a scalar function at a point: value, gradient and
/// Hessian. The Hessian is stored as its packed upper triangle so it is
/// symmetric by construction.
///
/// Arithmetic on jets is forward-mode differentiation truncated after the
/// second order: every operation applies the first and second order chain
/// and product rules exactly, so the result is the jet of the composite.
class Jet2 {
public:
    Jet2() = default;

    /// Constant jet in `dim` variables.
    Jet2(double value, std::size_t dim)
        : value_(value), grad_(dim, 0.0), hess_(dim * (dim + 1) / 2, 0.0) {}

    /// The coordinate function x_index, seeded at `value`.
    static Jet2 variable(double value, std::size_t index, std::size_t dim) {
        Jet2 j(value, dim);
        j.grad_[index] = 1.0;
        return j;
    }

    std::size_t dim() const noexcept { return grad_.size(); }
    double value() const noexcept { return value_; }
    double grad(std::size_t i) const { return grad_[i]; }
    double hess(std::size_t i, std::size_t j) const { return hess_[packed(i, j)]; }
    const std::vector<double>& gradient() const noexcept { return grad_; }

    /// Composition with a scalar function given its value and first two
    /// derivatives at value().
    Jet2 apply(double f0, double f1, double f2) const {
        Jet2 r(f0, dim());
        const std::size_t n = dim();
        for (std::size_t i = 0; i < n; ++i) r.grad_[i] = f1 * grad_[i];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j)
                r.hess_[packed(i, j)] = f1 * hess_[packed(i, j)] + f2 * grad_[i] * grad_[j];
        return r;
    }

    Jet2 operator-() const {
        Jet2 r = *this;
        r.value_ = -r.value_;
        for (auto& g : r.grad_) g = -g;
        for (auto& h : r.hess_) h = -h;
        return r;
    }

    Jet2& operator+=(const Jet2& o) {
        value_ += o.value_;
        for (std::size_t i = 0; i < grad_.size(); ++i) grad_[i] += o.grad_[i];
        for (std::size_t i = 0; i < hess_.size(); ++i) hess_[i] += o.hess_[i];
        return *this;
    }

    Jet2& operator-=(const Jet2& o) {
        value_ -= o.value_;
        for (std::size_t i = 0; i < grad_.size(); ++i) grad_[i] -= o.grad_[i];
        for (std::size_t i = 0; i < hess_.size(); ++i) hess_[i] -= o.hess_[i];
        return *this;
    }

    Jet2& operator*=(double s) {
        value_ *= s;
        for (auto& g : grad_) g *= s;
        for (auto& h : hess_) h *= s;
        return *this;
    }

    friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
    friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
    friend Jet2 operator*(Jet2 a, double s) { return a *= s; }
    friend Jet2 operator*(double s, Jet2 a) { return a *= s; }

    friend Jet2 operator*(const Jet2& a, const Jet2& b) {
        const std::size_t n = a.dim();
        Jet2 r(a.value_ * b.value_, n);
        for (std::size_t i = 0; i < n; ++i) r.grad_[i] = a.grad_[i] * b.value_ + a.value_ * b.grad_[i];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                const std::size_t k = r.packed(i, j);
                r.hess_[k] = a.hess_[k] * b.value_ + a.value_ * b.hess_[k] + a.grad_[i] * b.grad_[j] +
                             a.grad_[j] * b.grad_[i];
            }
        return r;
    }

    /// Reciprocal; caller guarantees value() != 0.
    Jet2 reciprocal() const {
        const double v = value_;
        return apply(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v));
    }

    /// Integer power k >= 0.
    Jet2 pow(unsigned k) const {
        const double v = value_;
        if (k == 0) return Jet2(1.0, dim());
        const double f0 = ipow(v, k);
        const double f1 = k * ipow(v, k - 1);
        const double f2 = k >= 2 ? double(k) * double(k - 1) * ipow(v, k - 2) : 0.0;
        return apply(f0, f1, f2);
    }

    static double ipow(double v, unsigned k) {
        double r = 1.0;
        double b = v;
        while (k) {
            if (k & 1u) r *= b;
            b *= b;
            k >>= 1u;
        }
        return r;
    }

private:
    std::size_t packed(std::size_t i, std::size_t j) const {
        if (i > j) std::swap(i, j);
        const std::size_t n = dim();
        return i * n - i * (i + 1) / 2 + j;
    }

    double value_ = 0.0;
    std::vector<double> grad_;
    std::vector<double> hess_;
};

inline Jet2 sin(const Jet2& x) {
    const double v = x.value();
    return x.apply(std::sin(v), std::cos(v), -std::sin(v));
}
inline Jet2 cos(const Jet2& x) {
    const double v = x.value();
    return x.apply(std::cos(v), -std::sin(v), -std::cos(v));
}
inline Jet2 sinh(const Jet2& x) {
    const double v = x.value();
    return x.apply(std::sinh(v), std::cosh(v), std::sinh(v));
}
inline Jet2 cosh(const Jet2& x) {
    const double v = x.value();
    return x.apply(std::cosh(v), std::sinh(v), std::cosh(v));
}
inline Jet2 exp(const Jet2& x) {
    const double e = std::exp(x.value());
    return x.apply(e, e, e);
}

} // namespace degenwarp
