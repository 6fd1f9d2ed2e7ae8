#include "degenwarp/warp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "degenwarp/errors.hpp"

namespace degenwarp {

namespace {

std::span<const double> span_of(const Point& p) { return {p.data(), static_cast<std::size_t>(p.size())}; }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

std::string format_point(const Point& p) {
    std::ostringstream os;
    os << "(";
    for (Eigen::Index i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p(i);
    os << ")";
    return os.str();
}

} // namespace

Point WarpedProduct::join(const Point& pb, const Point& pf) const {
    Point p(pb.size() + pf.size());
    p << pb, pf;
    return p;
}

WarpedProduct build(const MetricField& base, const MetricField& fiber, const Expression& f) {
    std::vector<std::string> names = base.chart().coord_names();
    for (const auto& n : fiber.chart().coord_names()) names.push_back(n);
    std::vector<ParityConstraint> parity = base.chart().parity_constraints();
    for (const auto& c : fiber.chart().parity_constraints()) parity.push_back(c);
    Chart chart(names, parity);

    const Expression fb = f.rebind(base.chart().coord_names());
    const Expression fp = fb.rebind(names);
    const std::size_t nb = base.dim(), nf = fiber.dim();

    std::map<std::pair<std::size_t, std::size_t>, Expression> entries;
    const Expression f2 = pow(fp, 2);
    for (std::size_t a = 0; a < nb; ++a)
        for (std::size_t b = a; b < nb; ++b) entries[{a, b}] = base.component(a, b).rebind(names);
    for (std::size_t i = 0; i < nf; ++i)
        for (std::size_t j = i; j < nf; ++j) {
            const Expression& c = fiber.component(i, j);
            if (c.is_constant() && c.constant_value() == 0.0) continue;
            entries[{nb + i, nb + j}] = f2 * c.rebind(names);
        }

    WarpedProduct wp;
    wp.base = base;
    wp.fiber = fiber;
    wp.f = fb;
    if (base.diagonal_roots() && fiber.diagonal_roots()) {
        std::vector<DiagonalRoot> roots;
        for (const auto& r : *base.diagonal_roots()) roots.push_back({r.sign, r.alpha.rebind(names)});
        for (const auto& r : *fiber.diagonal_roots()) roots.push_back({r.sign, fp * r.alpha.rebind(names)});
        wp.product = MetricField::from_roots(chart, std::move(roots));
    } else {
        wp.product = MetricField::from_components(chart, entries);
    }
    return wp;
}

bool VerificationReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.pass; });
}

void VerificationReport::add(std::string name, double residual, double tolerance, std::string detail) {
    IdentityCheck c;
    c.name = std::move(name);
    c.residual = residual;
    c.tolerance = tolerance;
    c.pass = std::isfinite(residual) && residual <= tolerance;
    c.detail = std::move(detail);
    checks.push_back(std::move(c));
}

// ---------------------------------------------------------------------------

VerificationReport verify_fundamentals(const WarpedProduct& wp, const Point& p, double tol) {
    const std::size_t nb = wp.base_dim(), nf = wp.fiber_dim(), n = nb + nf;
    const Chart& chart = wp.product.chart();
    VerificationReport rep;
    rep.title = "fundamentals";
    const MetricJets J = metric_jets(wp.product, p);
    const Matrix GF = metric_at(wp.fiber, wp.fiber_point(p));
    const Jet2 fj = wp.f.eval_jet2(span_of(wp.base_point(p)));

    double mixed = 0.0;
    for (std::size_t a = 0; a < nb; ++a)
        for (std::size_t i = nb; i < n; ++i) mixed = std::max(mixed, std::abs(J.value(a, i)));
    rep.add("<X,V> = 0", mixed, tol);

    // Non-coordinate lifts: X = sum (1 + x_a/2) d_a, V = sum (1 + y_i/2) d_i.
    VectorFieldExpr X, V;
    for (std::size_t k = 0; k < n; ++k) {
        const Expression c = Expression::constant(1.0) + 0.5 * chart.coord(k);
        X.components.push_back(k < nb ? c : Expression::constant(0.0));
        V.components.push_back(k < nb ? Expression::constant(0.0) : c);
    }
    rep.add("[X,V] = 0", lie_bracket(X, V, p).cwiseAbs().maxCoeff(), tol);

    double vxy = 0.0;
    for (std::size_t i = nb; i < n; ++i)
        for (std::size_t a = 0; a < nb; ++a)
            for (std::size_t b = 0; b < nb; ++b) vxy = std::max(vxy, std::abs(J.d1[i](a, b)));
    rep.add("V<X,Y> = 0", vxy, tol);

    double xvw = 0.0;
    for (std::size_t a = 0; a < nb; ++a)
        for (std::size_t i = 0; i < nf; ++i)
            for (std::size_t j = 0; j < nf; ++j) {
                const double rhs = 2.0 * fj.value() * GF(i, j) * fj.grad(a);
                xvw = std::max(xvw, std::abs(J.d1[a](nb + i, nb + j) - rhs));
            }
    rep.add("X<V,W> = 2 f <V,W>_F X(f)", xvw, tol);
    return rep;
}

VerificationReport verify_koszul_identities(const WarpedProduct& wp, const Point& p, double tol) {
    const std::size_t nb = wp.base_dim(), nf = wp.fiber_dim(), n = nb + nf;
    VerificationReport rep;
    rep.title = "warped Koszul form";
    const Point pb = wp.base_point(p), pf = wp.fiber_point(p);
    const KoszulTable K = koszul_coordinate(wp.product, p);
    const KoszulTable KB = koszul_coordinate(wp.base, pb);
    const KoszulTable KF = koszul_coordinate(wp.fiber, pf);
    const Matrix GF = metric_at(wp.fiber, pf);
    const Jet2 fj = wp.f.eval_jet2(span_of(pb));
    const double f = fj.value();

    double r1 = 0.0, r2 = 0.0, r3 = 0.0, r4 = 0.0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c) {
                const int fibers = (a >= nb) + (b >= nb) + (c >= nb);
                const double k = K.gamma(a, b, c);
                if (fibers == 0) {
                    r1 = std::max(r1, std::abs(k - KB.gamma(a, b, c)));
                } else if (fibers == 1) {
                    r2 = std::max(r2, std::abs(k));
                } else if (fibers == 3) {
                    r4 = std::max(r4, std::abs(k - f * f * KF.gamma(a - nb, b - nb, c - nb)));
                } else {
                    // one base index x, fibers v, w in the remaining order
                    double expect;
                    if (a < nb)
                        expect = f * GF(b - nb, c - nb) * fj.grad(a);
                    else if (b < nb)
                        expect = f * GF(a - nb, c - nb) * fj.grad(b);
                    else
                        expect = -f * GF(a - nb, b - nb) * fj.grad(c);
                    r3 = std::max(r3, std::abs(k - expect));
                }
            }
    rep.add("K(X,Y,Z) = K_B(X,Y,Z)", r1, tol);
    rep.add("K(X,Y,V) = K(X,V,Y) = K(V,X,Y) = 0", r2, tol);
    rep.add("K(X,V,W) = K(V,X,W) = -K(V,W,X) = f <V,W>_F X(f)", r3, tol);
    rep.add("K(U,V,W) = f^2 K_F(U,V,W)", r4, tol);
    return rep;
}

// ---------------------------------------------------------------------------

PreconditionReport verify_preconditions(const WarpedProduct& wp, const std::vector<Point>& points,
                                        const ScanOptions& opt) {
    const std::size_t nb = wp.base_dim(), nf = wp.fiber_dim();
    PreconditionReport out;
    auto key = [](const Point& q) { return std::vector<double>(q.data(), q.data() + q.size()); };
    std::set<std::vector<double>> seen_b, seen_f;
    std::vector<Point> bpts, fpts;
    for (const Point& p : points) {
        const Point pb = wp.base_point(p), pf = wp.fiber_point(p);
        if (seen_b.insert(key(pb)).second) bpts.push_back(pb);
        if (seen_f.insert(key(pf)).second) fpts.push_back(pf);
    }

    ScanOptions bopt = opt, fopt = opt;
    if (opt.probe) {
        bopt.probe = Point(opt.probe->head(nb));
        fopt.probe = Point(opt.probe->tail(nf));
        if (bopt.probe->norm() == 0.0) bopt.probe.reset();
        if (fopt.probe->norm() == 0.0) fopt.probe.reset();
    }
    const RegularityReport bscan = regularity_scan(wp.base, bpts, bopt);
    const RegularityReport fscan = regularity_scan(wp.fiber, fpts, fopt);
    out.base_verdict = bscan.verdict;
    out.fiber_verdict = fscan.verdict;

    ContractionOptions copt{opt.tol, bopt.probe, opt.richardson};
    for (const Point& pb : bpts) {
        const RadicalDecomposition rd = radical_decompose(metric_at(wp.base, pb), opt.tol);
        const CovectorJet dj = differential(wp.f)(pb);
        const double res = rd.radical_residual(dj.value);
        out.max_df_residual = std::max(out.max_df_residual, res);
        if (res > opt.tol) {
            if (out.df_in_annihilator && out.first_failure.empty())
                out.first_failure = "df not in the radical-annihilator of the base at " + format_point(pb) +
                                    " (residual " + fmt(res) + ")";
            out.df_in_annihilator = false;
            out.df_semi_regular = false;
            continue;
        }
        if (rd.rank == nb) continue;
        // nabla_X df for coordinate X must stay in the annihilator
        try {
            const Matrix H = hessian(wp.base, wp.f, pb, copt);
            for (std::size_t a = 0; a < nb; ++a) {
                const double r = rd.radical_residual(H.col(a));
                if (r > opt.tol_supp * std::max(1.0, H.cwiseAbs().maxCoeff())) throw NotInAnnihilator(r);
            }
        } catch (const Error& e) {
            if (out.df_semi_regular && out.first_failure.empty())
                out.first_failure = "nabla df leaves the radical-annihilator at " + format_point(pb) + ": " + e.what();
            out.df_semi_regular = false;
        }
    }

    out.product_scan = regularity_scan(wp.product, points, opt);
    out.product_verdict = out.product_scan.verdict;

    out.radical_stationary_precondition = out.df_in_annihilator && out.base_verdict >= Verdict::radical_stationary &&
                                          out.fiber_verdict >= Verdict::radical_stationary;
    out.semi_regular_precondition = out.radical_stationary_precondition && out.df_semi_regular &&
                                    out.base_verdict >= Verdict::semi_regular &&
                                    out.fiber_verdict >= Verdict::semi_regular;
    out.implication_holds =
        (!out.radical_stationary_precondition || out.product_verdict >= Verdict::radical_stationary) &&
        (!out.semi_regular_precondition || out.product_verdict >= Verdict::semi_regular);
    if (out.first_failure.empty()) {
        if (out.base_verdict < Verdict::semi_regular) out.first_failure = "base: " + bscan.first_violation;
        else if (out.fiber_verdict < Verdict::semi_regular) out.first_failure = "fiber: " + fscan.first_violation;
    }

    VerificationReport& s = out.summary;
    s.title = "preconditions";
    s.add("df in radical-annihilator of B", out.max_df_residual, opt.tol);
    auto flag = [&](const std::string& name, bool ok, const std::string& detail) {
        IdentityCheck c;
        c.name = name;
        c.pass = ok;
        c.residual = ok ? 0.0 : 1.0;
        c.detail = detail;
        s.checks.push_back(c);
    };
    flag("nabla df in radical-annihilator of B", out.df_semi_regular, "");
    flag("base radical-stationary", out.base_verdict >= Verdict::radical_stationary, to_string(out.base_verdict));
    flag("fiber radical-stationary", out.fiber_verdict >= Verdict::radical_stationary, to_string(out.fiber_verdict));
    flag("implication (preconditions => product verdict)", out.implication_holds,
         std::string("product ") + to_string(out.product_verdict));
    s.notes.push_back(std::string("base verdict: ") + to_string(out.base_verdict));
    s.notes.push_back(std::string("fiber verdict: ") + to_string(out.fiber_verdict));
    s.notes.push_back(std::string("product verdict: ") + to_string(out.product_verdict));
    if (!out.first_failure.empty()) s.notes.push_back("first failure: " + out.first_failure);
    return out;
}

PreconditionReport verify_preconditions(const WarpedProduct& wp, const Box& region, const ScanOptions& opt) {
    return verify_preconditions(wp, sample_box(region, opt.samples), opt);
}

// ---------------------------------------------------------------------------

const char* to_string(FiberVariant v) {
    switch (v) {
    case FiberVariant::printed: return "printed (R_F)";
    case FiberVariant::f_squared: return "f^2-corrected (f^2 R_F)";
    case FiberVariant::both: return "both (not discriminating here)";
    case FiberVariant::neither: return "neither";
    }
    return "?";
}

DecompositionReport verify_curvature_decomposition(const WarpedProduct& wp, const Point& p,
                                                   const CurvatureOptions& opt, double tol) {
    const std::size_t nb = wp.base_dim(), nf = wp.fiber_dim(), n = nb + nf;
    const Point pb = wp.base_point(p), pf = wp.fiber_point(p);
    DecompositionReport out;
    out.report.title = "curvature decomposition";

    const CurvatureTensor R = riemann(wp.product, p, opt);
    out.method = R.method;
    CurvatureOptions bopt = opt, fopt = opt;
    bopt.force_extrapolation = fopt.force_extrapolation = false;
    if (opt.probe) {
        bopt.probe = Point(opt.probe->head(nb));
        fopt.probe = Point(opt.probe->tail(nf));
        if (bopt.probe->norm() == 0.0) bopt.probe.reset();
        if (fopt.probe->norm() == 0.0) fopt.probe.reset();
    }
    const CurvatureTensor RB = riemann(wp.base, pb, bopt);
    const CurvatureTensor RF = riemann(wp.fiber, pf, fopt);
    ContractionOptions copt{opt.tol, bopt.probe, opt.richardson};
    const Matrix H = hessian(wp.base, wp.f, pb, copt);
    const double nf2 = differential_norm(wp.base, wp.f, pb, copt);
    const Matrix GF = metric_at(wp.fiber, pf);
    const double f = wp.f.eval(span_of(pb));

    const double scale = std::max(1.0, R.residuals.norm);
    double r1 = 0, r2 = 0, r3 = 0, r4 = 0, r5 = 0, r6p = 0, r6c = 0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c)
                for (std::size_t d = 0; d < n; ++d) {
                    const bool fa = a >= nb, fb = b >= nb, fc = c >= nb, fd = d >= nb;
                    const int k = fa + fb + fc + fd;
                    const double v = R(a, b, c, d);
                    if (k == 0) {
                        r1 = std::max(r1, std::abs(v - RB(a, b, c, d)));
                    } else if (k == 1) {
                        r2 = std::max(r2, std::abs(v));
                    } else if (k == 3) {
                        r4 = std::max(r4, std::abs(v));
                    } else if (k == 2 && fa == fb) {
                        r3 = std::max(r3, std::abs(v));
                    } else if (k == 2) {
                        // bring to R(X,V,W,T) with X,T base and V,W fiber
                        double sign = 1.0;
                        std::size_t x = a, vv = b, w = c, t = d;
                        if (fa) { std::swap(x, vv); sign = -sign; }
                        if (!fc) { std::swap(w, t); sign = -sign; }
                        const double expect = -sign * f * H(x, t) * GF(vv - nb, w - nb);
                        r5 = std::max(r5, std::abs(v - expect));
                    } else {
                        const std::size_t u = a - nb, vv = b - nb, w = c - nb, q = d - nb;
                        const double tail = f * f * nf2 * (GF(u, w) * GF(vv, q) - GF(vv, w) * GF(u, q));
                        r6p = std::max(r6p, std::abs(v - (RF(u, vv, w, q) + tail)));
                        r6c = std::max(r6c, std::abs(v - (f * f * RF(u, vv, w, q) + tail)));
                    }
                }
    auto& rep = out.report;
    const double t = tol * scale;
    rep.add("R(X,Y,Z,T) = R_B(X,Y,Z,T)", r1, t);
    rep.add("R(X,Y,Z,V) = 0", r2, t);
    rep.add("R(X,Y,V,W) = 0", r3, t);
    rep.add("R(X,V,W,U) = 0", r4, t);
    rep.add("R(X,V,W,T) = -f H^f(X,T) <V,W>_F", r5, t);
    out.printed_residual = r6p;
    out.corrected_residual = r6c;
    const bool pp = r6p <= t, pc = r6c <= t;
    out.fiber_variant = pp && pc ? FiberVariant::both
                      : pp       ? FiberVariant::printed
                      : pc       ? FiberVariant::f_squared
                                 : FiberVariant::neither;
    rep.add("R(U,V,W,Q) = f^2 R_F + f^2 <<df,df>>_B (<U,W>_F<V,Q>_F - <V,W>_F<U,Q>_F)", r6c, t,
            "fiber term with R_F unscaled: residual " + fmt(r6p));
    rep.notes.push_back(std::string("fiber-fiber identity variant: ") + to_string(out.fiber_variant));
    rep.notes.push_back(std::string("product curvature method: ") + to_string(R.method) +
                        (R.diverged ? " (extrapolation diverged)" : ""));
    rep.notes.push_back("warped metric uses g_B + f^2 g_F");
    if (R.diverged) rep.add("extrapolation converged", 1.0, 0.0);
    return out;
}

ClassicalReport verify_classical(const WarpedProduct& wp, const Point& p, double tol) {
    const std::size_t nb = wp.base_dim(), nf = wp.fiber_dim(), n = nb + nf;
    if (nf < 2) throw Error("classical corollaries need a fiber of dimension > 1");
    const Point pb = wp.base_point(p), pf = wp.fiber_point(p);
    const double f = wp.f.eval(span_of(pb));
    if (!(f > 0.0)) throw Error("classical corollaries need f > 0");
    const Matrix G = metric_at(wp.product, p);
    const Matrix GB = metric_at(wp.base, pb);
    const RicciScalar rs = ricci_scalar(wp.product, p);
    const RicciScalar rb = ricci_scalar(wp.base, pb);
    const RicciScalar rf = ricci_scalar(wp.fiber, pf);
    const Matrix H = hessian(wp.base, wp.f, pb);
    const Matrix gbi = GB.inverse();
    const double lap = (gbi.cwiseProduct(H)).sum();
    const double grad2 = differential_norm(wp.base, wp.f, pb);
    const double d = double(nf);

    ClassicalReport out;
    auto& rep = out.report;
    rep.title = "classical corollaries";
    out.scalar_direct = rs.scalar;
    out.scalar_printed = rb.scalar + rf.scalar / (f * f) + 2 * d * lap / f + d * (d - 1) * grad2 / (f * f);
    out.scalar_corrected = rb.scalar + rf.scalar / (f * f) - 2 * d * lap / f - d * (d - 1) * grad2 / (f * f);

    const double scale = std::max(1.0, std::abs(rs.scalar));
    double rbp = 0, rbc = 0, rmix = 0, rfp = 0, rfc = 0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            const double v = rs.ricci(a, b);
            if (a < nb && b < nb) {
                rbp = std::max(rbp, std::abs(v - (rb.ricci(a, b) + d / f * H(a, b))));
                rbc = std::max(rbc, std::abs(v - (rb.ricci(a, b) - d / f * H(a, b))));
            } else if (a >= nb && b >= nb) {
                const double coef = lap / f + (d - 1) * grad2 / (f * f);
                const double vw = G(a, b);
                rfp = std::max(rfp, std::abs(v - (rf.ricci(a - nb, b - nb) + coef * vw)));
                rfc = std::max(rfc, std::abs(v - (rf.ricci(a - nb, b - nb) - coef * vw)));
            } else {
                rmix = std::max(rmix, std::abs(v));
            }
        }
    const double sp = std::abs(out.scalar_direct - out.scalar_printed);
    const double sc = std::abs(out.scalar_direct - out.scalar_corrected);
    out.printed_matches = sp <= tol * scale && rbp <= tol * scale && rfp <= tol * scale;
    out.corrected_matches = sc <= tol * scale && rbc <= tol * scale && rfc <= tol * scale;
    rep.add("s = s_B + s_F/f^2 - 2 d Lf/f - d(d-1)|df|^2/f^2", sc, tol * scale,
            "printed signs (+,+): residual " + fmt(sp));
    rep.add("Ric(X,Y) = Ric_B(X,Y) - (d/f) H^f(X,Y)", rbc, tol * scale, "printed sign (+): residual " + fmt(rbp));
    rep.add("Ric(X,V) = 0", rmix, tol * scale);
    rep.add("Ric(V,W) = Ric_F(V,W) - (Lf/f + (d-1)|df|^2/f^2) <V,W>", rfc, tol * scale,
            "printed sign (+): residual " + fmt(rfp));
    rep.notes.push_back(std::string("printed-sign variant ") + (out.printed_matches ? "matches" : "does not match") +
                        "; corrected-sign variant " + (out.corrected_matches ? "matches" : "does not match"));
    return out;
}

} // namespace degenwarp
