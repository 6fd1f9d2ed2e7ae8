#include "degenwarp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "degenwarp/errors.hpp"

namespace degenwarp {

Chart::Chart(std::vector<std::string> coord_names, std::vector<ParityConstraint> parity)
    : names_(std::move(coord_names)), parity_(std::move(parity)) {
    std::set<std::string> seen;
    for (const auto& n : names_)
        if (!seen.insert(n).second) throw NameClash(n);
    for (const auto& c : parity_) index_of(c.coord);
}

std::size_t Chart::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return i;
    throw UnknownIdentifier(name, 0);
}

std::size_t MetricField::packed(std::size_t a, std::size_t b) const {
    if (a > b) std::swap(a, b);
    const std::size_t n = dim();
    return a * n - a * (a + 1) / 2 + b;
}

MetricField MetricField::from_components(Chart chart,
                                         const std::map<std::pair<std::size_t, std::size_t>, Expression>& entries) {
    MetricField g;
    g.chart_ = std::move(chart);
    const std::size_t n = g.dim();
    g.upper_.assign(n * (n + 1) / 2, Expression::constant(0.0));
    for (const auto& [ab, e] : entries) {
        if (ab.first >= n || ab.second >= n) throw Error("metric component index out of range");
        g.upper_[g.packed(ab.first, ab.second)] = e;
    }
    return g;
}

MetricField MetricField::from_roots(Chart chart, std::vector<DiagonalRoot> roots) {
    if (roots.size() != chart.dim()) throw Error("diagonal root count does not match chart dimension");
    std::map<std::pair<std::size_t, std::size_t>, Expression> entries;
    for (std::size_t a = 0; a < roots.size(); ++a) {
        if (roots[a].sign != 1 && roots[a].sign != -1) throw Error("diagonal root sign must be +1 or -1");
        Expression sq = pow(roots[a].alpha, 2);
        entries[{a, a}] = roots[a].sign > 0 ? sq : -sq;
    }
    MetricField g = from_components(std::move(chart), entries);
    g.roots_ = std::move(roots);
    return g;
}

const Expression& MetricField::component(std::size_t a, std::size_t b) const { return upper_[packed(a, b)]; }

MetricField MetricField::without_roots() const {
    MetricField g = *this;
    g.roots_.reset();
    return g;
}

Matrix metric_at(const MetricField& g, const Point& p) {
    const std::size_t n = g.dim();
    Matrix G(n, n);
    std::span<const double> sp(p.data(), static_cast<std::size_t>(p.size()));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) {
            const double v = g.component(a, b).eval(sp);
            G(a, b) = v;
            G(b, a) = v;
        }
    return G;
}

MetricJets metric_jets(const MetricField& g, const Point& p) {
    const std::size_t n = g.dim();
    MetricJets j;
    j.value = Matrix::Zero(n, n);
    j.d1.assign(n, Matrix::Zero(n, n));
    j.d2.assign(n, std::vector<Matrix>(n, Matrix::Zero(n, n)));
    std::span<const double> sp(p.data(), static_cast<std::size_t>(p.size()));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) {
            const Jet2 jet = g.component(a, b).eval_jet2(sp);
            j.value(a, b) = j.value(b, a) = jet.value();
            for (std::size_t c = 0; c < n; ++c) {
                j.d1[c](a, b) = j.d1[c](b, a) = jet.grad(c);
                for (std::size_t d = 0; d < n; ++d) j.d2[c][d](a, b) = j.d2[c][d](b, a) = jet.hess(c, d);
            }
        }
    return j;
}

RadicalDecomposition radical_decompose(const Matrix& G, double tol) {
    const Eigen::Index n = G.rows();
    Eigen::SelfAdjointEigenSolver<Matrix> es(G);
    RadicalDecomposition rd;
    rd.tolerance = tol;
    rd.eigenvalues = es.eigenvalues();
    rd.eigenvectors = es.eigenvectors();
    const double norm = n > 0 ? rd.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
    rd.threshold = tol * std::max(1.0, norm);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(rd.eigenvalues(i)) <= rd.threshold)
            rd.radical_basis.push_back(rd.eigenvectors.col(i));
        else
            rd.range_basis.push_back(rd.eigenvectors.col(i));
    }
    rd.rank = rd.range_basis.size();
    return rd;
}

Matrix RadicalDecomposition::pseudo_inverse() const {
    const Eigen::Index n = eigenvalues.size();
    Matrix P = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        if (std::abs(eigenvalues(i)) > threshold)
            P += eigenvectors.col(i) * eigenvectors.col(i).transpose() / eigenvalues(i);
    return P;
}

double RadicalDecomposition::radical_residual(const Covector& w) const {
    double s = 0.0;
    for (const auto& v : radical_basis) {
        const double c = w.dot(v);
        s += c * c;
    }
    return std::sqrt(s);
}

double cocontract(const RadicalDecomposition& rd, const Covector& omega, const Covector& tau) {
    const double r1 = rd.radical_residual(omega);
    if (r1 > rd.tolerance) throw NotInAnnihilator(r1);
    const double r2 = rd.radical_residual(tau);
    if (r2 > rd.tolerance) throw NotInAnnihilator(r2);
    return omega.dot(rd.pseudo_inverse() * tau);
}

double cocontract(const Matrix& G, const Covector& omega, const Covector& tau, double tol) {
    return cocontract(radical_decompose(G, tol), omega, tau);
}

bool ParityReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const ParityCheck& c) { return c.pass; });
}

ParityReport validate_parity(const MetricField& g, std::size_t samples, unsigned seed, double tol) {
    ParityReport report;
    const std::size_t n = g.dim();
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (const auto& pc : g.chart().parity_constraints()) {
        const std::size_t k = g.chart().index_of(pc.coord);
        ParityCheck check;
        check.coord = pc.coord;
        check.parity = pc.parity;
        check.worst_point = Point::Zero(n);
        for (std::size_t s = 0; s < samples; ++s) {
            Point p(n);
            for (std::size_t i = 0; i < n; ++i) p(i) = U(rng);
            Point q = p;
            q(k) = -q(k);
            const Matrix Gp = metric_at(g, p);
            const Matrix Gq = metric_at(g, q);
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = a; b < n; ++b) {
                    double sign = ((a == k) != (b == k)) ? -1.0 : 1.0;
                    if (pc.parity == Parity::Odd) sign = -sign;
                    const double asym = std::abs(Gq(a, b) - sign * Gp(a, b));
                    if (asym > check.max_asymmetry) {
                        check.max_asymmetry = asym;
                        check.worst_point = p;
                        check.worst_component = "g_" + g.chart().coord_names()[a] + g.chart().coord_names()[b];
                    }
                }
        }
        check.pass = check.max_asymmetry <= tol;
        report.checks.push_back(check);
    }
    return report;
}

} // namespace degenwarp
