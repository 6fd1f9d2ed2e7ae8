#pragma once

// Randomized property checks shared by the unit tests and the acceptance
// runner. Every right-hand side is computed from test-side polynomials.

#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "degenwarp/curvature.hpp"
#include "degenwarp/koszul.hpp"
#include "helpers.hpp"

namespace testutil {

using oracle::Poly;
using PolyField = std::vector<Poly>;

inline degenwarp::VectorFieldExpr to_field(const PolyField& X, const degenwarp::Chart& c) {
    degenwarp::VectorFieldExpr v;
    for (const auto& p : X) v.components.push_back(c.parse(p.str(c.coord_names())));
    return v;
}

inline Poly inner(const oracle::PolyMetric& g, const PolyField& Y, const PolyField& Z) {
    Poly s(g.n);
    for (std::size_t a = 0; a < g.n; ++a)
        for (std::size_t b = 0; b < g.n; ++b) s = s + Y[a] * g(a, b) * Z[b];
    return s;
}

inline Poly along(const PolyField& X, const Poly& h) {
    Poly s(h.nvars());
    for (std::size_t c = 0; c < X.size(); ++c) s = s + X[c] * h.d(c);
    return s;
}

inline PolyField bracket(const PolyField& X, const PolyField& Y) {
    PolyField r;
    for (std::size_t a = 0; a < X.size(); ++a) r.push_back(along(X, Y[a]) - along(Y, X[a]));
    return r;
}

inline PolyField scale(const Poly& f, const PolyField& X) {
    PolyField r;
    for (const auto& c : X) r.push_back(f * c);
    return r;
}

inline PolyField lin(double a, const PolyField& X, double b, const PolyField& Y) {
    PolyField r;
    for (std::size_t i = 0; i < X.size(); ++i) r.push_back(a * X[i] + b * Y[i]);
    return r;
}

// Six-term definition evaluated entirely on the oracle side.
inline Poly koszul_oracle(const oracle::PolyMetric& g, const PolyField& X, const PolyField& Y, const PolyField& Z) {
    return 0.5 * (along(X, inner(g, Y, Z)) + along(Y, inner(g, Z, X)) - along(Z, inner(g, X, Y)) -
                  inner(g, X, bracket(Y, Z)) + inner(g, Y, bracket(Z, X)) + inner(g, Z, bracket(X, Y)));
}

struct KoszulResiduals {
    // index 0 is the definition itself, 1..8 the listed properties
    std::array<double, 9> max{};
    int trials = 0;
};

inline KoszulResiduals koszul_properties(unsigned seed, int trials) {
    std::mt19937 rng(seed);
    const std::vector<std::string> names = {"x", "y", "z"};
    const degenwarp::Chart chart(names);
    KoszulResiduals out;
    for (int t = 0; t < trials; ++t) {
        const auto gp = oracle::random_metric(rng, 3, 3, 0.5, {1.0, 1.0, 1.0});
        const auto g = to_field(gp, names);
        auto rf = [&] {
            PolyField v;
            for (int i = 0; i < 3; ++i) v.push_back(oracle::random_poly(rng, 3, 3, 0.5));
            return v;
        };
        const PolyField X = rf(), X2 = rf(), Y = rf(), Z = rf();
        const Poly f = oracle::random_poly(rng, 3, 2, 1.0);
        const Eigen::VectorXd p = random_point(rng, 3, -1.0, 1.0);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        const double a = u(rng), b = u(rng);

        auto K = [&](const PolyField& A, const PolyField& B, const PolyField& C) {
            return degenwarp::koszul_general(g, to_field(A, chart), to_field(B, chart), to_field(C, chart), p);
        };
        const double k = K(X, Y, Z);
        auto upd = [&](std::size_t i, double r) { out.max[i] = std::max(out.max[i], std::fabs(r)); };

        upd(0, k - koszul_oracle(gp, X, Y, Z)(p));
        upd(1, K(lin(a, X, b, X2), Y, Z) - a * k - b * K(X2, Y, Z));
        upd(1, K(X, lin(a, Y, b, X2), Z) - a * k - b * K(X, X2, Z));
        upd(1, K(X, Y, lin(a, Z, b, X2)) - a * k - b * K(X, Y, X2));
        upd(2, K(scale(f, X), Y, Z) - f(p) * k);
        upd(3, K(X, scale(f, Y), Z) - f(p) * k - along(X, f)(p) * inner(gp, Y, Z)(p));
        upd(4, K(X, Y, scale(f, Z)) - f(p) * k);
        upd(5, k + K(X, Z, Y) - along(X, inner(gp, Y, Z))(p));
        upd(6, k - K(Y, X, Z) - inner(gp, bracket(X, Y), Z)(p));
        const Poly lie = along(Y, inner(gp, Z, X)) - inner(gp, bracket(Y, Z), X) - inner(gp, Z, bracket(Y, X));
        upd(7, k + K(Z, Y, X) - lie(p));
        upd(8, k + K(Y, Z, X) - along(Y, inner(gp, Z, X))(p) - inner(gp, bracket(X, Y), Z)(p));
        ++out.trials;
    }
    return out;
}

struct CurvatureOracleResult {
    double max_relative = 0.0;
    double max_symmetry = 0.0;  // relative to max |R|
    int trials = 0;
};

// riemann() against the textbook Levi-Civita computation. The library's
// R(a,b,c,d) is the oracle's lowered R_{abdc}.
inline CurvatureOracleResult curvature_oracle(unsigned seed, int trials) {
    std::mt19937 rng(seed);
    const std::vector<std::string> names = {"x", "y", "z"};
    CurvatureOracleResult out;
    while (out.trials < trials) {
        const std::vector<double> sig = out.trials % 3 == 0 ? std::vector<double>{-1.0, 1.0, 1.0}
                                                              : std::vector<double>{1.0, 1.0, 1.0};
        const auto gp = oracle::random_metric(rng, 3, 2, 0.3, sig);
        const Eigen::VectorXd p = random_point(rng, 3, -0.5, 0.5);
        if (std::fabs(gp.value(p).determinant()) < 0.1) continue;
        const auto g = to_field(gp, names);
        const auto R = degenwarp::riemann(g, p);
        const auto ref = oracle::levi_civita_riemann(derivs(gp, p));
        double scale_ = 0.0;
        for (double v : ref) scale_ = std::max(scale_, std::fabs(v));
        const std::size_t n = 3;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t c = 0; c < n; ++c)
                    for (std::size_t d = 0; d < n; ++d) {
                        const double o = ref[((a * n + b) * n + d) * n + c];
                        out.max_relative =
                            std::max(out.max_relative, std::fabs(R(a, b, c, d) - o) / std::max(1e-300, scale_));
                    }
        out.max_symmetry = std::max(out.max_symmetry, R.residuals.worst() / std::max(1e-300, R.residuals.norm));
        ++out.trials;
    }
    return out;
}

} // namespace testutil
