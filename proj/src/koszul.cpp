#include "degenwarp/koszul.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "degenwarp/errors.hpp"

namespace degenwarp {

namespace {

std::span<const double> span_of(const Point& p) { return {p.data(), static_cast<std::size_t>(p.size())}; }

std::string format_point(const Point& p) {
    std::ostringstream os;
    os << "(";
    for (Eigen::Index i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p(i);
    os << ")";
    return os.str();
}

std::vector<Jet2> field_jets(const VectorFieldExpr& X, const Point& p) {
    std::vector<Jet2> out;
    out.reserve(X.components.size());
    for (const auto& c : X.components) out.push_back(c.eval_jet2(span_of(p)));
    return out;
}

// Directional derivative of a jet along the vector v.
double along(const Jet2& j, const Eigen::VectorXd& v) {
    double s = 0.0;
    for (std::size_t c = 0; c < j.dim(); ++c) s += v(c) * j.grad(c);
    return s;
}

Eigen::VectorXd values(const std::vector<Jet2>& js) {
    Eigen::VectorXd v(js.size());
    for (std::size_t i = 0; i < js.size(); ++i) v(i) = js[i].value();
    return v;
}

// Direction in which root e becomes non-zero, for the Richardson fallback.
// nullopt when the root vanishes on a whole neighbourhood of p.
std::optional<Point> growth_direction(const MetricField& g, std::size_t e, const Point& p,
                                      const ContractionOptions& opt) {
    const Expression& alpha = (*g.diagonal_roots())[e].alpha;
    const double h = opt.richardson.start;
    if (opt.probe) {
        Point v = *opt.probe;
        if (v.norm() == 0.0) throw Error("probe direction must be non-zero");
        v.normalize();
        Point q = p + h * v;
        if (std::abs(alpha.eval(span_of(q))) > opt.tol) return v;
    }
    const Eigen::Index n = p.size();
    double best = 0.0;
    Point dir;
    for (Eigen::Index i = 0; i < n; ++i)
        for (double s : {1.0, -1.0}) {
            Point q = p;
            q(i) += s * h;
            const double v = std::abs(alpha.eval(span_of(q)));
            if (v > best) {
                best = v;
                dir = Point::Zero(n);
                dir(i) = s;
            }
        }
    if (best <= opt.tol) return std::nullopt;
    return dir;
}

// num / alpha continued through alpha = 0. `num_grad` is the gradient of the
// numerator at p; `ratio_at` evaluates the raw quotient at other points.
double smooth_quotient(const MetricField& g, std::size_t e, double num, const Eigen::VectorXd& num_grad,
                       const Jet2& alpha, const std::function<double(const Point&)>& ratio_at, const Point& p,
                       const ContractionOptions& opt, bool& diverged) {
    const double a = alpha.value();
    if (std::abs(a) > opt.tol) return num / a;
    if (std::abs(num) > opt.tol) throw NotInAnnihilator(std::abs(num));
    Eigen::VectorXd ga(alpha.dim());
    for (std::size_t c = 0; c < alpha.dim(); ++c) ga(c) = alpha.grad(c);
    const double gn2 = ga.squaredNorm();
    if (std::sqrt(gn2) > opt.tol) return num_grad.dot(ga) / gn2;
    const auto dir = growth_direction(g, e, p, opt);
    if (!dir) return 0.0;
    const Extrapolation ex =
        richardson_scalar([&](double h) { return ratio_at(Point(p + h * *dir)); }, opt.richardson);
    diverged = diverged || ex.diverged;
    return ex.value(0);
}

} // namespace

VectorFieldExpr VectorFieldExpr::coordinate(const Chart& chart, std::size_t a) {
    VectorFieldExpr X;
    X.components.assign(chart.dim(), Expression::constant(0.0));
    X.components[a] = Expression::constant(1.0);
    return X;
}

KoszulTable::KoszulTable(Point p, std::size_t dim)
    : point_(std::move(p)), dim_(dim), gamma_(dim * dim * dim, 0.0), dgamma_(dim * dim * dim * dim, 0.0) {}

Covector KoszulTable::lower(std::size_t a, std::size_t b) const {
    Covector w(dim_);
    for (std::size_t c = 0; c < dim_; ++c) w(c) = gamma(a, b, c);
    return w;
}

KoszulTable koszul_coordinate(const MetricField& g, const Point& p) {
    const std::size_t n = g.dim();
    const MetricJets J = metric_jets(g, p);
    KoszulTable t(p, n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c) {
                t.gamma_ref(a, b, c) = 0.5 * (J.d1[a](b, c) + J.d1[b](a, c) - J.d1[c](a, b));
                for (std::size_t d = 0; d < n; ++d)
                    t.dgamma_ref(d, a, b, c) = 0.5 * (J.d2[d][a](b, c) + J.d2[d][b](a, c) - J.d2[d][c](a, b));
            }
    return t;
}

Eigen::VectorXd lie_bracket(const VectorFieldExpr& X, const VectorFieldExpr& Y, const Point& p) {
    const auto xj = field_jets(X, p);
    const auto yj = field_jets(Y, p);
    const Eigen::VectorXd x = values(xj), y = values(yj);
    Eigen::VectorXd br(x.size());
    for (Eigen::Index a = 0; a < x.size(); ++a) br(a) = along(yj[a], x) - along(xj[a], y);
    return br;
}

double koszul_general(const MetricField& g, const VectorFieldExpr& X, const VectorFieldExpr& Y,
                      const VectorFieldExpr& Z, const Point& p) {
    const std::size_t n = g.dim();
    if (X.dim() != n || Y.dim() != n || Z.dim() != n) throw Error("vector field dimension mismatch");
    std::vector<Jet2> gj;
    gj.reserve(n * n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) gj.push_back(g.component(a, b).eval_jet2(span_of(p)));
    const auto xj = field_jets(X, p), yj = field_jets(Y, p), zj = field_jets(Z, p);
    const Eigen::VectorXd x = values(xj), y = values(yj), z = values(zj);

    auto inner_jet = [&](const std::vector<Jet2>& u, const std::vector<Jet2>& v) {
        Jet2 s(0.0, n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) s += gj[a * n + b] * u[a] * v[b];
        return s;
    };
    Matrix G(n, n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) G(a, b) = gj[a * n + b].value();

    const Eigen::VectorXd yz = lie_bracket(Y, Z, p);
    const Eigen::VectorXd zx = lie_bracket(Z, X, p);
    const Eigen::VectorXd xy = lie_bracket(X, Y, p);

    const double s = along(inner_jet(yj, zj), x) + along(inner_jet(zj, xj), y) - along(inner_jet(xj, yj), z) -
                     x.dot(G * yz) + y.dot(G * zx) + z.dot(G * xy);
    return 0.5 * s;
}

Covector lower_cov_derivative(const MetricField& g, const VectorFieldExpr& X, const VectorFieldExpr& Y,
                              const Point& p) {
    const std::size_t n = g.dim();
    Covector w(n);
    for (std::size_t c = 0; c < n; ++c) w(c) = koszul_general(g, X, Y, VectorFieldExpr::coordinate(g.chart(), c), p);
    return w;
}

CovectorField covector_field(const CovectorFieldExpr& omega) {
    return [omega](const Point& p) {
        const std::size_t n = omega.size();
        CovectorJet j{Eigen::VectorXd(n), Matrix(n, p.size())};
        for (std::size_t e = 0; e < n; ++e) {
            const Jet2 jet = omega[e].eval_jet2(span_of(p));
            j.value(e) = jet.value();
            for (Eigen::Index v = 0; v < p.size(); ++v) j.grad(e, v) = jet.grad(v);
        }
        return j;
    };
}

CovectorField differential(const Expression& f) {
    return [f](const Point& p) {
        const Jet2 jet = f.eval_jet2(span_of(p));
        const Eigen::Index n = p.size();
        CovectorJet j{Eigen::VectorXd(n), Matrix(n, n)};
        for (Eigen::Index e = 0; e < n; ++e) {
            j.value(e) = jet.grad(e);
            for (Eigen::Index v = 0; v < n; ++v) j.grad(e, v) = jet.hess(e, v);
        }
        return j;
    };
}

std::vector<Jet2> root_jets(const MetricField& g, const Point& p) {
    if (!g.diagonal_roots()) throw Error("metric has no diagonal roots");
    std::vector<Jet2> out;
    for (const auto& r : *g.diagonal_roots()) out.push_back(r.alpha.eval_jet2(span_of(p)));
    return out;
}

RootQuotients covector_quotients(const MetricField& g, const CovectorField& omega, const Point& p,
                                 const ContractionOptions& opt) {
    const std::size_t n = g.dim();
    const auto alpha = root_jets(g, p);
    const CovectorJet w = omega(p);
    RootQuotients out;
    out.w = Eigen::VectorXd::Zero(n);
    for (std::size_t e = 0; e < n; ++e) {
        const Expression& ae = (*g.diagonal_roots())[e].alpha;
        auto ratio_at = [&](const Point& x) { return omega(x).value(e) / ae.eval(span_of(x)); };
        out.w(e) = smooth_quotient(g, e, w.value(e), w.grad.row(e).transpose(), alpha[e], ratio_at, p, opt,
                                   out.diverged);
    }
    return out;
}

GammaQuotients gamma_quotients(const MetricField& g, const Point& p, const ContractionOptions& opt) {
    const std::size_t n = g.dim();
    const auto& roots = *g.diagonal_roots();
    const auto alpha = root_jets(g, p);
    GammaQuotients Q;
    Q.dim = n;
    Q.q.assign(n * n * n, 0.0);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t e = 0; e < n; ++e) {
                double& out = Q.q[(a * n + b) * n + e];
                const double eps_e = roots[e].sign;
                if (e == a && e == b)
                    out = eps_e * alpha[e].grad(e);
                else if (e == a)
                    out = eps_e * alpha[e].grad(b);
                else if (e == b)
                    out = eps_e * alpha[e].grad(a);
                else if (a == b) {
                    // K(d_a, d_a, d_e) = -eps_a alpha_a d_e alpha_a
                    const double eps_a = roots[a].sign;
                    const Jet2& aa = alpha[a];
                    const double num = -eps_a * aa.value() * aa.grad(e);
                    Eigen::VectorXd num_grad(n);
                    for (std::size_t v = 0; v < n; ++v)
                        num_grad(v) = -eps_a * (aa.grad(v) * aa.grad(e) + aa.value() * aa.hess(v, e));
                    auto ratio_at = [&](const Point& x) {
                        const Jet2 ax = roots[a].alpha.eval_jet2(span_of(x));
                        return -eps_a * ax.value() * ax.grad(e) / roots[e].alpha.eval(span_of(x));
                    };
                    out = smooth_quotient(g, e, num, num_grad, alpha[e], ratio_at, p, opt, Q.diverged);
                }
            }
    return Q;
}

Matrix cometric_near(const Matrix& G) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(G);
    const Eigen::VectorXd& l = es.eigenvalues();
    const double cut = 1e-14 * (l.size() ? l.cwiseAbs().maxCoeff() : 0.0);
    Matrix P = Matrix::Zero(G.rows(), G.cols());
    for (Eigen::Index i = 0; i < l.size(); ++i)
        if (std::abs(l(i)) > cut) P += es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose() / l(i);
    return P;
}

Extrapolation limit_toward(const MetricField& g, const Point& p, const Point& dir,
                           const std::function<Eigen::VectorXd(const Point&)>& fn, const RichardsonOptions& opt) {
    const Point v = dir.normalized();
    auto regular = [&](double h) {
        const Eigen::VectorXd l = Eigen::SelfAdjointEigenSolver<Matrix>(metric_at(g, p + h * v)).eigenvalues();
        const double top = l.cwiseAbs().maxCoeff();
        return top > 0.0 && l.cwiseAbs().minCoeff() > 1e-12 * top;
    };
    RichardsonOptions o = opt;
    for (int attempt = 0; attempt < 8 && o.start < 0.25; ++attempt) {
        bool ok = true;
        double h = o.start;
        for (int k = 0; k < std::max(1, o.levels) && ok; ++k, h *= o.ratio) ok = regular(h);
        if (ok) break;
        o.start *= 4.0;
    }
    if (o.start >= 0.25) o = opt;
    return richardson([&](double h) { return fn(p + h * v); }, o);
}

Covector cov_derivative_form(const MetricField& g, const VectorFieldExpr& X, const CovectorFieldExpr& omega,
                             const Point& p, const ContractionOptions& opt) {
    const std::size_t n = g.dim();
    if (omega.size() != n || X.dim() != n) throw Error("field dimension mismatch");
    const auto xj = field_jets(X, p);
    const Eigen::VectorXd x = values(xj);
    const CovectorField wf = covector_field(omega);
    const CovectorJet w = wf(p);
    Covector out(n);
    for (std::size_t c = 0; c < n; ++c) out(c) = w.grad.row(c).dot(x);

    if (g.diagonal_roots()) {
        const GammaQuotients Q = gamma_quotients(g, p, opt);
        const RootQuotients W = covector_quotients(g, wf, p, opt);
        const auto& roots = *g.diagonal_roots();
        for (std::size_t c = 0; c < n; ++c) {
            double s = 0.0;
            for (std::size_t e = 0; e < n; ++e) {
                double k = 0.0;
                for (std::size_t a = 0; a < n; ++a) k += x(a) * Q(a, c, e);
                s += roots[e].sign * k * W.w(e);
            }
            out(c) -= s;
        }
        return out;
    }
    const KoszulTable K = koszul_coordinate(g, p);
    const RadicalDecomposition rd = radical_decompose(metric_at(g, p), opt.tol);
    for (std::size_t c = 0; c < n; ++c) {
        Covector k = Covector::Zero(n);
        for (std::size_t a = 0; a < n; ++a) k += x(a) * K.lower(a, c);
        out(c) -= cocontract(rd, k, w.value);
    }
    return out;
}

namespace {

// Contraction part <<K(d_a, d_b, .), df>> pointwise with a given cometric.
Matrix hessian_pointwise(const MetricField& g, const Expression& f, const Point& p, const Matrix& cometric) {
    const std::size_t n = g.dim();
    const KoszulTable K = koszul_coordinate(g, p);
    const Jet2 fj = f.eval_jet2(span_of(p));
    Eigen::VectorXd df(n);
    for (std::size_t e = 0; e < n; ++e) df(e) = fj.grad(e);
    const Eigen::VectorXd up = cometric * df;
    Matrix H(n, n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) H(a, b) = fj.hess(a, b) - K.lower(a, b).dot(up);
    return H;
}

Eigen::VectorXd flatten(const Matrix& m) { return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size()); }

} // namespace

Matrix hessian(const MetricField& g, const Expression& f, const Point& p, const ContractionOptions& opt) {
    const std::size_t n = g.dim();
    Matrix H(n, n);
    if (g.diagonal_roots()) {
        const GammaQuotients Q = gamma_quotients(g, p, opt);
        const RootQuotients W = covector_quotients(g, differential(f), p, opt);
        const auto& roots = *g.diagonal_roots();
        const Jet2 fj = f.eval_jet2(span_of(p));
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                double s = 0.0;
                for (std::size_t e = 0; e < n; ++e) s += roots[e].sign * Q(a, b, e) * W.w(e);
                H(a, b) = fj.hess(a, b) - s;
            }
    } else {
        const RadicalDecomposition rd = radical_decompose(metric_at(g, p), opt.tol);
        if (rd.rank == n) {
            H = hessian_pointwise(g, f, p, rd.pseudo_inverse());
        } else if (opt.probe) {
            const Extrapolation ex = limit_toward(
                g, p, *opt.probe,
                [&](const Point& q) { return flatten(hessian_pointwise(g, f, q, cometric_near(metric_at(g, q)))); },
                opt.richardson);
            H = Eigen::Map<const Matrix>(ex.value.data(), n, n);
        } else {
            const KoszulTable K = koszul_coordinate(g, p);
            const Jet2 fj = f.eval_jet2(span_of(p));
            Covector df(n);
            for (std::size_t e = 0; e < n; ++e) df(e) = fj.grad(e);
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b) H(a, b) = fj.hess(a, b) - cocontract(rd, K.lower(a, b), df);
        }
    }
    return 0.5 * (H + H.transpose());
}

double differential_norm(const MetricField& g, const Expression& f, const Point& p, const ContractionOptions& opt) {
    const std::size_t n = g.dim();
    if (g.diagonal_roots()) {
        const RootQuotients W = covector_quotients(g, differential(f), p, opt);
        double s = 0.0;
        for (std::size_t e = 0; e < n; ++e) s += (*g.diagonal_roots())[e].sign * W.w(e) * W.w(e);
        return s;
    }
    auto df_at = [&](const Point& q) {
        const Jet2 fj = f.eval_jet2(span_of(q));
        Covector df(n);
        for (std::size_t e = 0; e < n; ++e) df(e) = fj.grad(e);
        return df;
    };
    const RadicalDecomposition rd = radical_decompose(metric_at(g, p), opt.tol);
    if (rd.rank == n || !opt.probe) {
        const Covector df = df_at(p);
        return cocontract(rd, df, df);
    }
    const Extrapolation ex = limit_toward(
        g, p, *opt.probe,
        [&](const Point& q) {
            const Covector df = df_at(q);
            return Eigen::VectorXd::Constant(1, df.dot(cometric_near(metric_at(g, q)) * df));
        },
        opt.richardson);
    return ex.value(0);
}

// ---------------------------------------------------------------------------

std::vector<Point> sample_box(const Box& box, std::size_t samples) {
    const std::size_t n = box.lo.size();
    if (box.hi.size() != n) throw Error("box bounds dimension mismatch");
    if (n == 0) return {};
    std::size_t k = 1;
    if (samples > 1) {
        k = 3;
        auto total = [&](std::size_t m) {
            double t = 1.0;
            for (std::size_t i = 0; i < n; ++i) t *= double(m);
            return t;
        };
        while (total(k) < double(samples)) k += 2;
    }
    std::vector<Point> pts;
    std::vector<std::size_t> idx(n, 0);
    while (true) {
        Point p(n);
        for (std::size_t i = 0; i < n; ++i)
            p(i) = k == 1 ? 0.5 * (box.lo[i] + box.hi[i])
                          : box.lo[i] + (box.hi[i] - box.lo[i]) * double(idx[i]) / double(k - 1);
        pts.push_back(p);
        std::size_t i = 0;
        while (i < n && ++idx[i] == k) idx[i++] = 0;
        if (i == n) break;
    }
    return pts;
}

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::fails: return "fails";
    case Verdict::radical_stationary: return "radical_stationary";
    case Verdict::semi_regular: return "semi_regular";
    case Verdict::nondegenerate: return "nondegenerate";
    }
    return "?";
}

namespace {

// True when the root vanishes at p and at every probe offset around it.
bool root_locally_zero(const Expression& alpha, const Point& p, double tol) {
    if (std::abs(alpha.eval(span_of(p))) > tol) return false;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        for (double h : {1e-3, -1e-3, 1e-5, -1e-5}) {
            Point q = p;
            q(i) += h;
            if (std::abs(alpha.eval(span_of(q))) > tol) return false;
        }
    return true;
}

void scan_diagonal(const MetricField& g, SampleDiagnostics& s, const ScanOptions& opt) {
    const std::size_t n = g.dim();
    const auto& roots = *g.diagonal_roots();
    const Point& p = s.point;
    const auto alpha = root_jets(g, p);
    const KoszulTable K = koszul_coordinate(g, p);
    ContractionOptions copt{opt.tol, opt.probe, opt.richardson};

    double gamma_scale = 1.0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t e = 0; e < n; ++e) gamma_scale = std::max(gamma_scale, std::abs(K.gamma(a, b, e)));

    // Radical-stationarity: K(d_a, d_b, d_e) = 0 wherever alpha_e = 0.
    for (std::size_t e = 0; e < n; ++e) {
        if (std::abs(alpha[e].value()) > opt.tol) continue;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                s.annihilator_residual = std::max(s.annihilator_residual, std::abs(K.gamma(a, b, e)));
    }
    if (s.annihilator_residual > opt.tol_supp * gamma_scale) {
        s.radical_stationary = false;
        s.products_bounded = false;
        s.diagonal_criterion = false;
        s.note = "K(d_a,d_b,.) leaves the radical-annihilator";
        return;
    }

    GammaQuotients Q;
    try {
        Q = gamma_quotients(g, p, copt);
    } catch (const NotInAnnihilator& e) {
        s.radical_stationary = false;
        s.products_bounded = false;
        s.diagonal_criterion = false;
        s.note = e.what();
        return;
    }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c)
                for (std::size_t d = 0; d < n; ++d) {
                    double v = 0.0;
                    for (std::size_t e = 0; e < n; ++e) v += roots[e].sign * Q(a, b, e) * Q(c, d, e);
                    if (!std::isfinite(v)) s.products_bounded = false;
                    s.max_product = std::max(s.max_product, std::abs(v));
                }
    if (Q.diverged) s.products_bounded = false;

    // Diagonal criterion: d_a alpha_b^2 = f_abc alpha_c, c in {a, b}, with
    // supp f_abc inside supp alpha_c. f_abb = 2 d_a alpha_b; f_aba is the
    // smooth quotient d_a(alpha_b^2) / alpha_a = -2 eps_b Q(b, b, a).
    for (std::size_t c = 0; c < n; ++c) {
        if (!root_locally_zero(roots[c].alpha, p, opt.tol)) continue;
        for (std::size_t a = 0; a < n; ++a) {
            if (std::abs(2.0 * alpha[c].grad(a)) > opt.tol_supp) s.diagonal_criterion = false;
            if (a != c && std::abs(2.0 * Q(a, a, c)) > opt.tol_supp) s.diagonal_criterion = false;
        }
    }
    // Continuity of the extended quotients near rank drops.
    for (std::size_t e = 0; e < n && s.products_bounded; ++e) {
        if (std::abs(alpha[e].value()) > opt.tol) continue;
        Eigen::VectorXd ga(n);
        for (std::size_t v = 0; v < n; ++v) ga(v) = alpha[e].grad(v);
        if (ga.norm() <= opt.tol) continue;
        const Point q = p + 1e-6 * ga.normalized();
        const double ae = roots[e].alpha.eval(span_of(q));
        const KoszulTable Kq = koszul_coordinate(g, q);
        for (std::size_t a = 0; a < n; ++a) {
            const double near = Kq.gamma(a, a, e) / ae;
            if (std::abs(near - Q(a, a, e)) > 1e-3 * (1.0 + std::abs(Q(a, a, e)))) s.products_bounded = false;
        }
    }
    if (!s.products_bounded) s.note = "contraction products do not extend continuously";
    else if (!s.diagonal_criterion) s.note = "diagonal support condition violated";
}

void scan_generic(const MetricField& g, SampleDiagnostics& s, const ScanOptions& opt) {
    const std::size_t n = g.dim();
    const Point& p = s.point;
    const KoszulTable K = koszul_coordinate(g, p);
    const RadicalDecomposition rd = radical_decompose(metric_at(g, p), opt.tol);

    auto products_at = [&](const KoszulTable& T, const Matrix& co) {
        Eigen::VectorXd v(n * n * n * n);
        std::size_t i = 0;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                const Covector up = co * T.lower(a, b);
                for (std::size_t c = 0; c < n; ++c)
                    for (std::size_t d = 0; d < n; ++d) v(i++) = T.lower(c, d).dot(up);
            }
        return v;
    };

    if (rd.rank == n) {
        s.max_product = products_at(K, rd.pseudo_inverse()).cwiseAbs().maxCoeff();
        return;
    }
    double gamma_scale = 1.0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            gamma_scale = std::max(gamma_scale, K.lower(a, b).cwiseAbs().maxCoeff());
            s.annihilator_residual = std::max(s.annihilator_residual, rd.radical_residual(K.lower(a, b)));
        }
    if (s.annihilator_residual > opt.tol_supp * gamma_scale) {
        s.radical_stationary = false;
        s.products_bounded = false;
        s.note = "K(d_a,d_b,.) leaves the radical-annihilator";
        return;
    }
    const Point dir = opt.probe ? *opt.probe : Point(Point::Ones(n));
    const Extrapolation ex = limit_toward(
        g, p, dir,
        [&](const Point& q) { return products_at(koszul_coordinate(g, q), cometric_near(metric_at(g, q))); },
        opt.richardson);
    s.max_product = ex.value.cwiseAbs().maxCoeff();
    if (ex.diverged || !ex.value.allFinite()) {
        s.products_bounded = false;
        s.note = "contraction products diverge toward the rank drop";
    }
}

} // namespace

RegularityReport regularity_scan(const MetricField& g, const std::vector<Point>& points, const ScanOptions& opt) {
    RegularityReport rep;
    const bool diagonal = opt.use_diagonal_roots && g.diagonal_roots().has_value();
    rep.method = diagonal ? "diagonal_closed_form" : "generic";
    bool any_degenerate = false, rs = true, sr = true;
    for (const Point& p : points) {
        SampleDiagnostics s;
        s.point = p;
        s.rank = radical_decompose(metric_at(g, p), opt.tol).rank;
        if (diagonal)
            scan_diagonal(g, s, opt);
        else
            scan_generic(g, s, opt);
        if (s.rank < g.dim()) any_degenerate = true;
        if (!s.radical_stationary && rs) {
            rs = false;
            if (rep.first_violation.empty())
                rep.first_violation = "radical_stationary violated at " + format_point(p) + ": " + s.note;
        }
        if ((!s.products_bounded || !s.diagonal_criterion) && sr) {
            sr = false;
            if (rep.first_violation.empty())
                rep.first_violation = "semi_regular violated at " + format_point(p) + ": " + s.note;
        }
        rep.samples.push_back(std::move(s));
    }
    if (!rs)
        rep.verdict = Verdict::fails;
    else if (!sr)
        rep.verdict = Verdict::radical_stationary;
    else if (any_degenerate)
        rep.verdict = Verdict::semi_regular;
    else
        rep.verdict = Verdict::nondegenerate;
    return rep;
}

RegularityReport regularity_scan(const MetricField& g, const Box& region, const ScanOptions& opt) {
    return regularity_scan(g, sample_box(region, opt.samples), opt);
}

} // namespace degenwarp
