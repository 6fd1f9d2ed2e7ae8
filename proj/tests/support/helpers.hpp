#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "degenwarp/geometry.hpp"
#include "levi_civita.hpp"
#include "poly.hpp"

namespace testutil {

inline degenwarp::MetricField to_field(const oracle::PolyMetric& g, const std::vector<std::string>& names) {
    degenwarp::Chart chart(names);
    std::map<std::pair<std::size_t, std::size_t>, degenwarp::Expression> e;
    for (std::size_t a = 0; a < g.n; ++a)
        for (std::size_t b = a; b < g.n; ++b) e[{a, b}] = chart.parse(g(a, b).str(names));
    return degenwarp::MetricField::from_components(chart, e);
}

inline oracle::MetricDerivs derivs(const oracle::PolyMetric& g, const Eigen::VectorXd& x) {
    oracle::MetricDerivs m;
    m.g = g.value(x);
    for (std::size_t c = 0; c < g.n; ++c) {
        m.dg.push_back(g.d(c, x));
        m.ddg.emplace_back();
        for (std::size_t e = 0; e < g.n; ++e) m.ddg.back().push_back(g.dd(c, e, x));
    }
    return m;
}

inline Eigen::VectorXd random_point(std::mt19937& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::VectorXd p(static_cast<Eigen::Index>(n));
    for (auto& v : p) v = u(rng);
    return p;
}

inline degenwarp::MetricField metric(const std::vector<std::string>& names,
                                     const std::map<std::pair<std::size_t, std::size_t>, std::string>& src) {
    degenwarp::Chart chart(names);
    std::map<std::pair<std::size_t, std::size_t>, degenwarp::Expression> e;
    for (const auto& [k, s] : src) e[k] = chart.parse(s);
    return degenwarp::MetricField::from_components(chart, e);
}

inline degenwarp::MetricField roots(const std::vector<std::string>& names,
                                    const std::vector<std::pair<int, std::string>>& src) {
    degenwarp::Chart chart(names);
    std::vector<degenwarp::DiagonalRoot> r;
    for (const auto& [s, a] : src) r.push_back({s, chart.parse(a)});
    return degenwarp::MetricField::from_roots(chart, r);
}

inline degenwarp::Point pt(std::initializer_list<double> v) {
    degenwarp::Point p(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) p(i++) = x;
    return p;
}

} // namespace testutil
