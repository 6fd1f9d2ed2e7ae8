#include "degenwarp/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "degenwarp/errors.hpp"

namespace degenwarp {

namespace {

std::span<const double> span_of(const Point& p) { return {p.data(), static_cast<std::size_t>(p.size())}; }

double eval1(const Expression& e, double r) { return e.eval(std::span<const double>(&r, 1)); }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string format_point(const Point& p) {
    std::ostringstream os;
    os << "(";
    for (Eigen::Index i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p(i);
    os << ")";
    return os.str();
}

MetricField diagonal(const std::vector<std::string>& names, const std::vector<std::pair<int, std::string>>& roots) {
    Chart c(names);
    std::vector<DiagonalRoot> rs;
    for (const auto& [s, src] : roots) rs.push_back({s, c.parse(src)});
    return MetricField::from_roots(c, std::move(rs));
}

MetricField diagonal(const std::vector<std::string>& names, const std::vector<DiagonalRoot>& roots) {
    return MetricField::from_roots(Chart(names), roots);
}

MetricField sigma_metric(const std::string& kind) {
    if (kind == "S2") return diagonal({"ph", "th"}, {{1, "1"}, {1, "sin(ph)"}});
    if (kind == "S3") return diagonal({"ga", "ph", "th"}, {{1, "1"}, {1, "sin(ga)"}, {1, "sin(ga)*sin(ph)"}});
    if (kind == "H3") return diagonal({"ga", "ph", "th"}, {{1, "1"}, {1, "sinh(ga)"}, {1, "sinh(ga)*sin(ph)"}});
    if (kind == "flat3") return diagonal({"x", "y", "z"}, {{1, "1"}, {1, "1"}, {1, "1"}});
    throw ModelError("unknown sigma '" + kind + "' (expected S3, flat3 or H3)");
}

// Box over Sigma / S2 coordinates away from the coordinate poles.
void append_sigma_box(Box& b, const std::string& kind, bool include_origin) {
    if (kind == "flat3") {
        for (int i = 0; i < 3; ++i) {
            b.lo.push_back(-1.0);
            b.hi.push_back(1.0);
        }
        return;
    }
    if (kind == "S3" || kind == "H3") {
        b.lo.push_back(include_origin ? -1.0 : 0.2);
        b.hi.push_back(include_origin ? 1.0 : 1.4);
    }
    b.lo.push_back(0.2);
    b.hi.push_back(1.4);
    b.lo.push_back(0.0);
    b.hi.push_back(1.0);
}

class Params {
public:
    explicit Params(const std::map<std::string, std::string>& given) : given_(given) {}
    std::string get(const std::string& key, const std::string& dflt) {
        used_.insert(key);
        auto it = given_.find(key);
        return it == given_.end() ? dflt : it->second;
    }
    std::optional<std::string> optional(const std::string& key) {
        used_.insert(key);
        auto it = given_.find(key);
        if (it == given_.end()) return std::nullopt;
        return it->second;
    }
    bool is_default() const { return given_.empty(); }
    void finish(const std::string& model) const {
        for (const auto& [k, v] : given_)
            if (!used_.count(k)) throw ModelError("model " + model + " has no parameter '" + k + "'");
    }

private:
    const std::map<std::string, std::string>& given_;
    std::set<std::string> used_;
};

Expression parse_param(const std::string& key, const std::string& src, const std::vector<std::string>& coords) {
    try {
        return parse(src, coords);
    } catch (const Error& e) {
        throw ModelError("parameter '" + key + "': " + e.what());
    }
}

double parse_number(const std::string& key, const std::string& src) {
    const Expression e = parse_param(key, src, {});
    return e.eval({});
}

int parse_sign(const std::string& src) {
    const double v = parse_number("sign", src);
    if (v != 1.0 && v != -1.0) throw ModelError("parameter 'sign' must be 1 or -1");
    return int(v);
}

std::vector<Point> base_points(const ModelSpec& m, std::size_t samples) {
    const std::size_t nb = m.warped->base_dim();
    Box b{{m.region.lo.begin(), m.region.lo.begin() + nb}, {m.region.hi.begin(), m.region.hi.begin() + nb}};
    return sample_box(b, samples);
}

} // namespace

// ---------------------------------------------------------------------------

MetricField polar_cartesian(const Expression& mu, const Expression& u, int sign) {
    if (sign != 1 && sign != -1) throw Error("sign must be +1 or -1");
    Chart c({"x", "y"});
    const Expression x = c.coord(0), y = c.coord(1);
    const Expression m2 = sign > 0 ? pow(mu, 2) : -pow(mu, 2);
    std::map<std::pair<std::size_t, std::size_t>, Expression> e;
    e[{0, 0}] = m2 + u * pow(y, 2);
    e[{0, 1}] = -(u * x * y);
    e[{1, 1}] = m2 + u * pow(x, 2);
    return MetricField::from_components(c, e);
}

MetricField polar_cartesian_from_radial(const Expression& mu, const Expression& u, int sign) {
    Chart c({"x", "y"});
    const Expression r2 = pow(c.coord(0), 2) + pow(c.coord(1), 2);
    auto convert = [&](const Expression& e, const char* what) {
        if (e.arity() > 1) throw ParityError(std::string(what) + " may depend on the radius only");
        auto out = e.replace_even_powers(0, r2);
        if (!out) throw ParityError(std::string(what) + " is not a function of r^2 (odd power of r)");
        return *out;
    };
    return polar_cartesian(convert(mu, "mu"), convert(u, "u"), sign);
}

SmoothnessProbe polar_smoothness_probe(const Expression& mu, const Expression& rho, int sign) {
    SmoothnessProbe out;
    double worst = 0.0;
    for (int k = 1; k <= 40; ++k) {
        const double r = 0.05 * k;
        for (const auto* e : {&mu, &rho}) {
            const double a = eval1(*e, r), b = eval1(*e, -r);
            const double d = std::abs(a * a - b * b) / std::max(1.0, a * a);
            if (d > worst) {
                worst = d;
                out.parity_detail = std::string(e == &mu ? "mu^2" : "rho^2") + " not even at r = " + fmt(r);
            }
        }
    }
    out.parity_ok = worst <= 1e-10;
    if (out.parity_ok) out.parity_detail.clear();

    RichardsonOptions ro;
    ro.start = 1e-2;
    ro.levels = 6;
    ro.exponent_step = 2;
    out.extrapolation = richardson_scalar(
        [&](double r) {
            const double m = eval1(mu, r), p = eval1(rho, r);
            return (sign * m * m * r * r - p * p) / (r * r * r * r);
        },
        ro);
    out.limit = out.extrapolation.value(0);
    out.diverged = out.extrapolation.diverged;
    return out;
}

SemiRegularityProbe polar_semiregularity(const Expression& mu, const Expression& rho, double tol_supp) {
    SemiRegularityProbe out;
    const MetricField base = MetricField::from_roots(Chart({"r"}), {{1, mu}});
    const Expression rho2 = pow(rho, 2);
    ContractionOptions copt;
    for (int k = -40; k <= 40; ++k) {
        Point p(1);
        p(0) = 0.05 * k;
        const Jet2 m = mu.eval_jet2(span_of(p));
        // supp(d_r mu) inside supp(mu)
        bool locally_zero = std::abs(m.value()) <= copt.tol;
        for (double h : {1e-3, -1e-3, 1e-5, -1e-5})
            if (std::abs(eval1(mu, p(0) + h)) > copt.tol) locally_zero = false;
        if (locally_zero && std::abs(m.grad(0)) > tol_supp) {
            out.pass = false;
            out.detail = "d_r mu non-zero where mu vanishes, r = " + fmt(p(0));
        }
        try {
            const RootQuotients q = covector_quotients(base, differential(rho2), p, copt);
            out.r.push_back(p(0));
            out.witness.push_back(q.w(0));
            out.max_witness = std::max(out.max_witness, std::abs(q.w(0)));
            if (q.diverged || !std::isfinite(q.w(0))) {
                out.pass = false;
                if (out.detail.empty()) out.detail = "witness quotient unbounded near r = " + fmt(p(0));
            }
        } catch (const NotInAnnihilator& e) {
            out.pass = false;
            if (out.detail.empty()) out.detail = "d rho^2/dr does not vanish with mu at r = " + fmt(p(0));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& model_names() {
    static const std::vector<std::string> names = {"euclid_polar", "S2",          "S3",       "H3",
                                                   "R3_spherical", "cylinder_degenerate", "FLRW", "BigBang",
                                                   "spherical_bh", "zero_warp"};
    return names;
}

ModelSpec catalog(const std::string& name, const std::map<std::string, std::string>& params) {
    Params P(params);
    ModelSpec m;
    m.name = name;
    auto record = [&](const std::string& k, const std::string& v) {
        m.parameters[k] = v;
        return v;
    };
    auto set_warp = [&](WarpedProduct wp) {
        m.metric = wp.product;
        m.warped = std::move(wp);
    };
    const MetricField line = diagonal({"r"}, {{1, "1"}});
    const MetricField circle = diagonal({"th"}, {{1, "1"}});

    if (name == "euclid_polar") {
        const bool dflt = P.is_default();
        const std::string mu = record("mu", P.get("mu", "1"));
        const std::string rho = record("rho", P.get("rho", "r"));
        const int sign = parse_sign(record("sign", P.get("sign", "1")));
        const MetricField base =
            MetricField::from_roots(Chart({"r"}), {{sign, parse_param("mu", mu, {"r"})}});
        set_warp(build(base, circle, parse_param("rho", rho, {"r"})));
        if (dflt) m.cartesian = polar_cartesian(Expression::constant(1.0), Expression::constant(0.0), 1);
        m.region = {{-1.0, 0.0}, {1.0, 1.0}};
        m.probe = Point(Eigen::Vector2d(1.0, 0.0));
        m.declared_conditions = {"mu^2 and rho^2 even in r", "smoothness limit at r = 0 exists",
                                 "d rho^2/dr = f mu with supp f in supp mu"};
        if (dflt) m.declared_conditions.push_back("flat (Riemann = 0, including the r -> 0 limit)");
        m.declared_conditions.push_back("product semi-regular");
    } else if (name == "S2") {
        set_warp(build(diagonal({"ph"}, {{1, "1"}}), circle, parse("sin(ph)", {"ph"})));
        m.region = {{-1.0, 0.0}, {1.0, 1.0}};
        m.probe = Point(Eigen::Vector2d(1.0, 0.0));
        m.declared_conditions = {"sectional curvature +1", "sectional curvature limit +1 at the pole",
                                 "product semi-regular"};
    } else if (name == "S3" || name == "H3") {
        const std::string f = name == "S3" ? "sin(ga)" : "sinh(ga)";
        set_warp(build(diagonal({"ga"}, {{1, "1"}}), sigma_metric("S2"), parse(f, {"ga"})));
        m.region = {{}, {}};
        append_sigma_box(m.region, name, true);
        m.probe = Point(Eigen::Vector3d(1.0, 0.0, 0.0));
        m.declared_conditions = {name == "S3" ? "sectional curvature +1" : "sectional curvature -1",
                                 "product semi-regular"};
    } else if (name == "R3_spherical") {
        set_warp(build(line, sigma_metric("S2"), parse("r", {"r"})));
        m.region = {{-1.0, 0.2, 0.0}, {1.0, 1.4, 1.0}};
        m.probe = Point(Eigen::Vector3d(1.0, 0.0, 0.0));
        m.declared_conditions = {"flat (Riemann = 0, including the r -> 0 limit)", "product semi-regular"};
    } else if (name == "cylinder_degenerate") {
        const std::string f = record("f", P.get("f", "z^2"));
        set_warp(build(diagonal({"z"}, {{1, "1"}}), circle, parse_param("f", f, {"z"})));
        m.region = {{-1.0, 0.0}, {1.0, 1.0}};
        m.probe = Point(Eigen::Vector2d(1.0, 0.0));
        m.declared_conditions = {"df in radical-annihilator of B", "product semi-regular"};
    } else if (name == "FLRW") {
        const std::string mu = record("mu", P.get("mu", "1"));
        const std::string a = record("a", P.get("a", "t^2"));
        const std::string sigma = record("sigma", P.get("sigma", "flat3"));
        const MetricField base = MetricField::from_roots(Chart({"t"}), {{-1, parse_param("mu", mu, {"t"})}});
        set_warp(build(base, sigma_metric(sigma), parse_param("a", a, {"t"})));
        m.region = {{0.1}, {2.0}};
        append_sigma_box(m.region, sigma, false);
        m.probe = Point(Point::Unit(m.metric.dim(), 0));
        m.declared_conditions = {"d a^2/dt = f mu with supp f in supp mu", "product semi-regular"};
    } else if (name == "BigBang") {
        const std::string sigma = record("sigma", P.get("sigma", "S3"));
        const std::string mt = record("mutilde", P.get("mutilde", "1"));
        const Expression mte = parse_param("mutilde", mt, {"t"});
        std::string at;
        if (auto u = P.optional("u")) {
            record("u", *u);
            const double uv = parse_number("u", *u);
            if (!mte.is_constant()) throw ModelError("parameter 'u' needs a constant 'mutilde'");
            const double m2 = mte.constant_value() * mte.constant_value();
            if (uv < m2) throw ModelError("u < mutilde^2: a^2 = (u - mutilde^2) t^4 would be negative");
            if (uv == m2) m.warnings.push_back("degenerate-warp: u = mutilde^2 makes a vanish identically");
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", std::sqrt(uv - m2));
            at = buf;
            if (auto given = P.optional("atilde")) {
                const double av = parse_number("atilde", *given);
                if (std::abs(av - std::sqrt(uv - m2)) > 1e-12 * std::max(1.0, av))
                    throw ModelError("atilde^2 must equal u - mutilde^2");
            }
        } else {
            at = P.get("atilde", "1");
        }
        record("atilde", at);
        const Expression ate = parse_param("atilde", at, {"t"});
        Chart tc({"t"});
        const Expression t = tc.coord(0);
        const MetricField base = MetricField::from_roots(tc, {{-1, mte * t}});
        set_warp(build(base, sigma_metric(sigma), ate * pow(t, 2)));
        m.region = {{-1.0}, {1.0}};
        append_sigma_box(m.region, sigma, false);
        m.probe = Point(Point::Unit(m.metric.dim(), 0));
        m.declared_conditions = {"a >= 0", "d a^2/dt = f mu with supp f in supp mu", "df in radical-annihilator of B",
                                 "product semi-regular"};
    } else if (name == "spherical_bh") {
        const std::vector<std::string> bc = {"t", "r"};
        const std::string at = record("alpha_t", P.get("alpha_t", "r"));
        const std::string ar = record("alpha_r", P.get("alpha_r", "1"));
        const std::string rho = record("rho", P.get("rho", "r^2"));
        const MetricField base =
            diagonal(bc, std::vector<DiagonalRoot>{{-1, parse_param("alpha_t", at, bc)},
                                                   {1, parse_param("alpha_r", ar, bc)}});
        set_warp(build(base, sigma_metric("S2"), parse_param("rho", rho, bc)));
        m.region = {{-1.0, -1.0, 0.2, 0.0}, {1.0, 1.0, 1.4, 1.0}};
        m.probe = Point(Point::Unit(4, 1));
        m.declared_conditions = {"d_a alpha_b^2 = f_abc alpha_c (base semi-regular)", "d_c rho = F_c alpha_c",
                                 "K_abc d_c rho = h_abc alpha_c^2", "product semi-regular"};
    } else if (name == "zero_warp") {
        const MetricField base = diagonal({"t", "x"}, {{-1, "1"}, {1, "1"}});
        set_warp(build(base, sigma_metric("S2"), Expression::constant(0.0)));
        m.region = {{-1.0, -1.0, 0.2, 0.0}, {1.0, 1.0, 1.4, 1.0}};
        m.declared_conditions = {"rank = dim B everywhere", "product semi-regular"};
    } else {
        throw ModelError("unknown model '" + name + "'");
    }
    P.finish(name);
    return m;
}

// ---------------------------------------------------------------------------

namespace {

ModelCondition regularity_condition(const ModelSpec& m, const ScanOptions& opt, Verdict need) {
    ScanOptions o = opt;
    if (!o.probe && m.probe) o.probe = m.probe;
    const RegularityReport r = regularity_scan(m.metric, m.region, o);
    ModelCondition c;
    c.name = need == Verdict::semi_regular ? "product semi-regular" : "product radical-stationary";
    c.pass = r.verdict >= need;
    c.detail = std::string("verdict ") + to_string(r.verdict);
    if (!r.first_violation.empty()) c.detail += "; " + r.first_violation;
    return c;
}

ModelCondition quotient_condition(const std::string& name, const MetricField& base, const Expression& numer,
                                  const std::vector<Point>& pts, std::size_t slot) {
    ModelCondition c;
    c.name = name;
    double worst = 0.0;
    for (const Point& p : pts) {
        try {
            const RootQuotients q = covector_quotients(base, differential(numer), p);
            if (q.diverged || !std::isfinite(q.w(slot))) {
                c.pass = false;
                c.detail = "quotient does not settle at " + format_point(p);
                return c;
            }
            worst = std::max(worst, std::abs(q.w(slot)));
        } catch (const NotInAnnihilator& e) {
            c.pass = false;
            c.detail = "numerator does not vanish with the root at " + format_point(p);
            return c;
        }
    }
    c.detail = "max |f| on samples " + fmt(worst);
    return c;
}

ModelCondition sectional_condition(const ModelSpec& m, const Box& box, double expect, std::size_t samples) {
    ModelCondition c;
    c.name = expect > 0 ? "sectional curvature +1" : "sectional curvature -1";
    double worst = 0.0;
    std::size_t used = 0;
    for (const Point& p : sample_box(box, samples)) {
        const Matrix G = metric_at(m.metric, p);
        const CurvatureTensor R = riemann(m.metric, p);
        for (std::size_t a = 0; a < m.metric.dim(); ++a)
            for (std::size_t b = a + 1; b < m.metric.dim(); ++b) {
                try {
                    worst = std::max(worst, std::abs(sectional(R, G, a, b) - expect));
                    ++used;
                } catch (const DegeneratePlane&) {
                }
            }
    }
    c.pass = used > 0 && worst <= 1e-8;
    c.detail = "max deviation " + fmt(worst) + " over " + std::to_string(used) + " planes";
    return c;
}

ModelCondition flat_condition(const ModelSpec& m, std::size_t samples) {
    ModelCondition c;
    c.name = "flat (Riemann = 0, including the r -> 0 limit)";
    double worst = 0.0, worst_limit = 0.0;
    bool diverged = false;
    for (const Point& p : sample_box(m.region, samples)) {
        worst = std::max(worst, riemann(m.metric, p).residuals.norm);
        if (std::abs(p(0)) < 1e-12) {
            CurvatureOptions o;
            o.probe = m.probe;
            o.force_extrapolation = true;
            const CurvatureTensor R = riemann(m.metric, p, o);
            worst_limit = std::max(worst_limit, R.residuals.norm);
            diverged = diverged || R.diverged;
        }
    }
    c.pass = worst <= 1e-8 && worst_limit <= 1e-6 && !diverged;
    c.detail = "max |R| " + fmt(worst) + ", extrapolated at r = 0 " + fmt(worst_limit);
    return c;
}

} // namespace

std::vector<ModelCondition> check_conditions(const ModelSpec& m, const ScanOptions& opt) {
    std::vector<ModelCondition> out;
    const std::size_t samples = opt.samples;
    const WarpedProduct& wp = *m.warped;

    if (m.name == "euclid_polar") {
        const Expression mu = wp.base.diagonal_roots()->front().alpha;
        const Expression rho = wp.f;
        const int sign = wp.base.diagonal_roots()->front().sign;
        const SmoothnessProbe sp = polar_smoothness_probe(mu, rho, sign);
        out.push_back({"mu^2 and rho^2 even in r", sp.parity_ok, sp.parity_detail});
        out.push_back({"smoothness limit at r = 0 exists", !sp.diverged && sp.parity_ok, "limit " + fmt(sp.limit)});
        const SemiRegularityProbe sr = polar_semiregularity(mu, rho, opt.tol_supp);
        out.push_back({"d rho^2/dr = f mu with supp f in supp mu", sr.pass,
                       sr.pass ? "max |f| " + fmt(sr.max_witness) : sr.detail});
        if (m.parameters.at("mu") == "1" && m.parameters.at("rho") == "r" && m.parameters.at("sign") == "1")
            out.push_back(flat_condition(m, samples));
        out.push_back(regularity_condition(m, opt, Verdict::semi_regular));
    } else if (m.name == "S2") {
        out.push_back(sectional_condition(m, {{0.1, 0.0}, {3.0, 1.0}}, 1.0, samples));
        const Extrapolation lim = sectional_limit(m.metric, Point(Eigen::Vector2d(0.0, 0.5)), 0, 1, *m.probe);
        out.push_back({"sectional curvature limit +1 at the pole",
                       !lim.diverged && std::abs(lim.value(0) - 1.0) <= 1e-5, "limit " + fmt(lim.value(0))});
        out.push_back(regularity_condition(m, opt, Verdict::semi_regular));
    } else if (m.name == "S3" || m.name == "H3") {
        out.push_back(sectional_condition(m, {{0.2, 0.2, 0.0}, {1.4, 1.4, 1.0}}, m.name == "S3" ? 1.0 : -1.0, samples));
        out.push_back(regularity_condition(m, opt, Verdict::semi_regular));
    } else if (m.name == "R3_spherical") {
        out.push_back(flat_condition(m, samples));
        out.push_back(regularity_condition(m, opt, Verdict::semi_regular));
    } else if (m.name == "cylinder_degenerate") {
        PreconditionReport pr = verify_preconditions(wp, m.region, opt);
        out.push_back({"df in radical-annihilator of B", pr.df_in_annihilator, pr.first_failure});
        out.push_back(regularity_condition(m, opt, Verdict::semi_regular));
    } else if (m.name == "FLRW" || m.name == "BigBang") {
        const auto pts = base_points(m, samples);
        if (m.name == "BigBang") {
            double lowest = 0.0;
            for (const Point& p : pts) lowest = std::min(lowest, wp.f.eval(span_of(p)));
            out.push_back({"a >= 0", lowest >= 0.0, "min a on samples " + fmt(lowest)});
        }
        out.push_back(quotient_condition("d a^2/dt = f mu with supp f in supp mu", wp.base, pow(wp.f, 2), pts, 0));
        if (m.name == "BigBang") {
            double worst = 0.0;
            for (const Point& p : pts) {
                const RadicalDecomposition rd = radical_decompose(metric_at(wp.base, p), opt.tol);
                worst = std::max(worst, rd.radical_residual(differential(wp.f)(p).value));
            }
            out.push_back({"df in radical-annihilator of B", worst <= opt.tol, "max residual " + fmt(worst)});
        }
        out.push_back(regularity_condition(m, opt, Verdict::semi_regular));
    } else if (m.name == "spherical_bh") {
        const auto pts = base_points(m, samples);
        ScanOptions bo = opt;
        bo.probe = Point(Eigen::Vector2d(0.0, 1.0));
        const RegularityReport br = regularity_scan(wp.base, pts, bo);
        out.push_back({"d_a alpha_b^2 = f_abc alpha_c (base semi-regular)", br.verdict >= Verdict::semi_regular,
                       std::string("base verdict ") + to_string(br.verdict)});
        ModelCondition F = quotient_condition("d_c rho = F_c alpha_c", wp.base, wp.f, pts, 0);
        if (F.pass) F = quotient_condition("d_c rho = F_c alpha_c", wp.base, wp.f, pts, 1);
        out.push_back(F);
        ModelCondition h{"K_abc d_c rho = h_abc alpha_c^2", true, ""};
        double worst = 0.0;
        for (const Point& p : pts) {
            try {
                const Matrix H = hessian(wp.base, wp.f, p);
                if (!H.allFinite()) throw Error("non-finite contraction");
                worst = std::max(worst, H.cwiseAbs().maxCoeff());
            } catch (const Error& e) {
                h.pass = false;
                h.detail = std::string(e.what()) + " at " + format_point(p);
                break;
            }
        }
        if (h.pass) h.detail = "max |H^rho| " + fmt(worst);
        out.push_back(h);
        out.push_back(regularity_condition(m, opt, Verdict::semi_regular));
    } else if (m.name == "zero_warp") {
        std::size_t bad = 0, total = 0;
        for (const Point& p : sample_box(m.region, samples)) {
            ++total;
            if (radical_decompose(metric_at(m.metric, p), 1e-9).rank != wp.base_dim()) ++bad;
        }
        out.push_back({"rank = dim B everywhere", bad == 0,
                       std::to_string(total - bad) + "/" + std::to_string(total) + " samples with rank " +
                           std::to_string(wp.base_dim())});
        out.push_back(regularity_condition(m, opt, Verdict::semi_regular));
    }
    return out;
}

} // namespace degenwarp
