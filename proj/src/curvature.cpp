#include "degenwarp/curvature.hpp"

#include <algorithm>
#include <cmath>

#include "degenwarp/errors.hpp"

namespace degenwarp {

const char* to_string(CurvatureMethod m) {
    switch (m) {
    case CurvatureMethod::pointwise: return "pointwise";
    case CurvatureMethod::diagonal_closed_form: return "diagonal_closed_form";
    case CurvatureMethod::limit_extrapolated: return "limit_extrapolated";
    }
    return "?";
}

double CurvatureResiduals::worst() const {
    return std::max({antisym_first, antisym_last, pair_symmetry, bianchi});
}

CurvatureTensor::CurvatureTensor(Point p, std::size_t dim)
    : point_(std::move(p)), dim_(dim), r_(dim * dim * dim * dim, 0.0) {}

void CurvatureTensor::compute_residuals() {
    CurvatureResiduals r;
    const std::size_t n = dim_;
    const auto& R = *this;
    for (double v : r_) r.norm = std::max(r.norm, std::abs(v));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c)
                for (std::size_t d = 0; d < n; ++d) {
                    const double v = R(a, b, c, d);
                    r.antisym_first = std::max(r.antisym_first, std::abs(v + R(b, a, c, d)));
                    r.antisym_last = std::max(r.antisym_last, std::abs(v + R(a, b, d, c)));
                    r.pair_symmetry = std::max(r.pair_symmetry, std::abs(v - R(c, d, a, b)));
                    r.bianchi = std::max(r.bianchi, std::abs(v + R(b, c, a, d) + R(c, a, b, d)));
                }
    residuals = r;
}

namespace {

// P[((a*n+c)*n+b)*n+d] = <<K_ac., K_bd.>>
using Products = Eigen::VectorXd;

Products products_with(const KoszulTable& K, const Matrix& cometric) {
    const std::size_t n = K.dim();
    Products P(n * n * n * n);
    std::vector<Covector> up(n * n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) up[a * n + b] = cometric * K.lower(a, b);
    for (std::size_t i = 0; i < n * n; ++i)
        for (std::size_t j = 0; j < n * n; ++j) {
            const std::size_t a = i / n, c = i % n;
            Covector k(n);
            for (std::size_t e = 0; e < n; ++e) k(e) = K.gamma(a, c, e);
            P(i * n * n + j) = k.dot(up[j]);
        }
    return P;
}

Products products_diagonal(const MetricField& g, const Point& p, const ContractionOptions& copt, bool& diverged) {
    const std::size_t n = g.dim();
    const auto& roots = *g.diagonal_roots();
    const GammaQuotients Q = gamma_quotients(g, p, copt);
    diverged = diverged || Q.diverged;
    Products P(n * n * n * n);
    for (std::size_t i = 0; i < n * n; ++i)
        for (std::size_t j = 0; j < n * n; ++j) {
            double s = 0.0;
            for (std::size_t e = 0; e < n; ++e)
                s += roots[e].sign * Q(i / n, i % n, e) * Q(j / n, j % n, e);
            P(i * n * n + j) = s;
        }
    return P;
}

CurvatureTensor assemble(const KoszulTable& K, const Products& P) {
    const std::size_t n = K.dim();
    CurvatureTensor R(K.point(), n);
    auto prod = [&](std::size_t a, std::size_t c, std::size_t b, std::size_t d) {
        return P(((a * n + c) * n + b) * n + d);
    };
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c)
                for (std::size_t d = 0; d < n; ++d)
                    R.at(a, b, c, d) = K.dgamma(a, b, c, d) - K.dgamma(b, a, c, d) + prod(a, c, b, d) -
                                       prod(b, c, a, d);
    return R;
}

} // namespace

CurvatureTensor riemann(const MetricField& g, const Point& p, const CurvatureOptions& opt) {
    const std::size_t n = g.dim();
    const KoszulTable K = koszul_coordinate(g, p);
    Products P;
    CurvatureMethod method;
    bool diverged = false;
    const RadicalDecomposition rd = radical_decompose(metric_at(g, p), opt.tol);
    if (opt.force_extrapolation || (rd.rank < n && !g.diagonal_roots())) {
        if (!opt.probe) throw DegenerateNoExtension();
        if (opt.probe->norm() == 0.0) throw Error("probe direction must be non-zero");
        const Extrapolation ex = limit_toward(
            g, p, *opt.probe,
            [&](const Point& q) { return products_with(koszul_coordinate(g, q), cometric_near(metric_at(g, q))); },
            opt.richardson);
        P = ex.value;
        diverged = ex.diverged;
        method = CurvatureMethod::limit_extrapolated;
    } else if (g.diagonal_roots()) {
        ContractionOptions copt{opt.tol, opt.probe, opt.richardson};
        P = products_diagonal(g, p, copt, diverged);
        method = CurvatureMethod::diagonal_closed_form;
    } else {
        P = products_with(K, rd.pseudo_inverse());
        method = CurvatureMethod::pointwise;
    }
    CurvatureTensor R = assemble(K, P);
    R.method = method;
    R.diverged = diverged;
    R.compute_residuals();
    return R;
}

double sectional(const CurvatureTensor& R, const Matrix& G, std::size_t a, std::size_t b, double tol) {
    const double denom = G(a, a) * G(b, b) - G(a, b) * G(a, b);
    const double scale = std::max(1.0, G.cwiseAbs().maxCoeff());
    if (a == b || std::abs(denom) <= tol * scale * scale) throw DegeneratePlane();
    return R(a, b, b, a) / denom;
}

Extrapolation sectional_limit(const MetricField& g, const Point& p, std::size_t a, std::size_t b, const Point& probe,
                              const RichardsonOptions& ropt) {
    const Point v = probe.normalized();
    return richardson_scalar(
        [&](double h) {
            const Point q = p + h * v;
            return sectional(riemann(g, q), metric_at(g, q), a, b, 0.0);
        },
        ropt);
}

RicciScalar ricci_scalar(const CurvatureTensor& R, const Matrix& G, double tol) {
    const std::size_t n = R.dim();
    const RadicalDecomposition rd = radical_decompose(G, tol);
    if (rd.rank < n) throw DegenerateMetric();
    const Matrix gi = G.inverse();
    RicciScalar out;
    out.ricci = Matrix::Zero(n, n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            double s = 0.0;
            for (std::size_t c = 0; c < n; ++c)
                for (std::size_t d = 0; d < n; ++d) s += gi(c, d) * R(c, a, b, d);
            out.ricci(a, b) = s;
        }
    out.ricci = 0.5 * (out.ricci + out.ricci.transpose()).eval();
    out.scalar = (gi.cwiseProduct(out.ricci)).sum();
    return out;
}

RicciScalar ricci_scalar(const MetricField& g, const Point& p, double tol) {
    const Matrix G = metric_at(g, p);
    if (radical_decompose(G, tol).rank < g.dim()) throw DegenerateMetric();
    CurvatureOptions o;
    o.tol = tol;
    return ricci_scalar(riemann(g, p, o), G, tol);
}

namespace {

Matrix einstein_at(const MetricField& g, const Point& p, double lambda, double tol) {
    const Matrix G = metric_at(g, p);
    CurvatureOptions o;
    o.tol = tol;
    const RicciScalar rs = ricci_scalar(riemann(g, p, o), G, 0.0);
    return G.determinant() * (rs.ricci - 0.5 * rs.scalar * G + lambda * G);
}

} // namespace

EinsteinDensitized einstein_densitized(const MetricField& g, const Point& p, double lambda, const CurvatureOptions& opt,
                                       double kappa) {
    const std::size_t n = g.dim();
    EinsteinDensitized E;
    E.point = p;
    E.lambda = lambda;
    E.kappa = kappa;
    const Matrix G = metric_at(g, p);
    E.det_g = G.determinant();
    const RadicalDecomposition rd = radical_decompose(G, opt.tol);
    if (rd.rank == n && !opt.force_extrapolation) {
        E.value = einstein_at(g, p, lambda, opt.tol);
        E.method = CurvatureMethod::pointwise;
        return E;
    }
    if (!opt.probe) throw DegenerateNoExtension();
    if (opt.probe->norm() == 0.0) throw Error("probe direction must be non-zero");
    const Extrapolation ex = limit_toward(
        g, p, *opt.probe,
        [&](const Point& q) {
            const Matrix m = einstein_at(g, q, lambda, 0.0);
            return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(m.data(), m.size()));
        },
        opt.richardson);
    E.value = Eigen::Map<const Matrix>(ex.value.data(), n, n);
    E.value = 0.5 * (E.value + E.value.transpose()).eval();
    E.diverged = ex.diverged;
    E.method = CurvatureMethod::limit_extrapolated;
    return E;
}

} // namespace degenwarp
