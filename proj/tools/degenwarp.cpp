// degenwarp: command-line front end.
//
// Exit codes: 0 success, 1 verifier failure or evaluation error, 2 bad input.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "degenwarp/curvature.hpp"
#include "degenwarp/errors.hpp"
#include "degenwarp/koszul.hpp"
#include "degenwarp/models.hpp"
#include "degenwarp/spec_file.hpp"
#include "degenwarp/warp.hpp"

using namespace degenwarp;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Point being evaluated, echoed with evaluation errors.
std::string g_context;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
    return buf;
}

std::string short_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

std::string point_text(const Point& p) {
    std::string s = "(";
    for (Eigen::Index i = 0; i < p.size(); ++i) s += (i ? ", " : "") + num(p(i));
    return s + ")";
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (item.empty() || end == item.c_str() || *end != '\0' || !std::isfinite(v))
            throw UsageError(what + ": '" + text + "' is not a comma-separated list of numbers");
        out.push_back(v);
    }
    if (out.empty()) throw UsageError(what + " is empty");
    return out;
}

Point parse_point(const std::string& text, std::size_t dim, const std::string& what) {
    const auto v = parse_list(text, what);
    if (v.size() != dim)
        throw UsageError(what + " has " + std::to_string(v.size()) + " components, chart has " + std::to_string(dim));
    return Eigen::Map<const Eigen::VectorXd>(v.data(), Eigen::Index(v.size()));
}

struct Globals {
    std::optional<double> tol_flag;
    std::string probe;
    std::size_t samples = 64;
    std::string output;
    double tol = default_tolerance;
};

double resolve_tolerance(const Globals& g) {
    if (g.tol_flag) {
        if (!(*g.tol_flag > 0.0)) throw UsageError("--tol must be positive");
        return *g.tol_flag;
    }
    if (const char* env = std::getenv("DEGENWARP_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end == env || *end != '\0' || !(v > 0.0)) throw UsageError("DEGENWARP_TOL is not a positive number");
        return v;
    }
    return default_tolerance;
}

std::optional<Point> probe_of(const Globals& g, std::size_t dim) {
    if (g.probe.empty()) return std::nullopt;
    Point p = parse_point(g.probe, dim, "--probe");
    if (p.norm() == 0.0) throw UsageError("--probe must be non-zero");
    return p;
}

Box region_of(const MetricSpec& s, const std::vector<std::string>& boxes) {
    const auto& names = s.metric.chart().coord_names();
    Box b;
    if (s.model) {
        b = s.model->region;
    } else {
        b.lo.assign(names.size(), -1.0);
        b.hi.assign(names.size(), 1.0);
    }
    for (const auto& spec : boxes) {
        const auto eq = spec.find('=');
        const auto colon = spec.find(':', eq == std::string::npos ? 0 : eq);
        if (eq == std::string::npos || colon == std::string::npos)
            throw UsageError("--box expects name=lo:hi, got '" + spec + "'");
        const std::string name = spec.substr(0, eq);
        std::size_t i = 0;
        while (i < names.size() && names[i] != name) ++i;
        if (i == names.size()) throw UsageError("--box: unknown coordinate '" + name + "'");
        const auto lo = parse_list(spec.substr(eq + 1, colon - eq - 1), "--box");
        const auto hi = parse_list(spec.substr(colon + 1), "--box");
        if (lo.size() != 1 || hi.size() != 1 || lo[0] > hi[0]) throw UsageError("--box: bad interval in '" + spec + "'");
        b.lo[i] = lo[0];
        b.hi[i] = hi[0];
    }
    return b;
}

std::string pair_name(const std::vector<std::string>& n, std::size_t a, std::size_t b) { return n[a] + n[b]; }

// ---------------------------------------------------------------------------

int cmd_koszul(const MetricSpec& s, const Point& p, std::ostream& out) {
    const auto& names = s.metric.chart().coord_names();
    g_context = point_text(p);
    const KoszulTable K = koszul_coordinate(s.metric, p);
    out << "# K(d_a,d_b,d_c) at " << point_text(p) << "\n";
    const std::size_t n = s.metric.dim();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c)
                out << "K(" << names[a] << "," << names[b] << "," << names[c] << ") = " << num(K.gamma(a, b, c))
                    << "\n";
    return 0;
}

int cmd_riemann(const MetricSpec& s, const Point& p, const CurvatureOptions& o, std::ostream& out) {
    const auto& names = s.metric.chart().coord_names();
    g_context = point_text(p);
    const CurvatureTensor R = riemann(s.metric, p, o);
    const std::size_t n = s.metric.dim();
    out << "# R(d_a,d_b,d_c,d_d) at " << point_text(p) << "\n";
    out << "method: " << to_string(R.method) << "\n";
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c)
                for (std::size_t d = c + 1; d < n; ++d) {
                    if (c * n + d < a * n + b) continue;
                    out << "R(" << names[a] << "," << names[b] << "," << names[c] << "," << names[d]
                        << ") = " << num(R(a, b, c, d)) << "\n";
                }
    const auto& r = R.residuals;
    out << "residual antisymmetry(ab): " << short_num(r.antisym_first) << "\n";
    out << "residual antisymmetry(cd): " << short_num(r.antisym_last) << "\n";
    out << "residual pair symmetry: " << short_num(r.pair_symmetry) << "\n";
    out << "residual first Bianchi: " << short_num(r.bianchi) << "\n";
    if (R.diverged) {
        out << "extrapolation diverged\n";
        return 1;
    }
    return 0;
}

struct Aggregate {
    double residual = 0.0;
    bool pass = true;
    std::size_t count = 0;
    std::string detail;
};

void fold(std::map<std::string, Aggregate>& agg, std::vector<std::string>& order, const VerificationReport& r,
          const std::string& prefix) {
    for (const auto& c : r.checks) {
        const std::string key = prefix + c.name;
        if (!agg.count(key)) order.push_back(key);
        Aggregate& a = agg[key];
        a.residual = std::max(a.residual, c.residual);
        if (!c.pass && a.pass) a.detail = "first failure at " + g_context + (c.detail.empty() ? "" : "; " + c.detail);
        a.pass = a.pass && c.pass;
        ++a.count;
    }
}

int cmd_verify(const MetricSpec& s, const Box& region, const Globals& g, std::ostream& out) {
    if (!s.warped) throw UsageError("verify needs a spec with \"warp\" or a warped \"model\"");
    const WarpedProduct& wp = *s.warped;
    ScanOptions so;
    so.tol = g.tol;
    so.samples = g.samples;
    so.probe = probe_of(g, wp.product.dim());
    if (!so.probe && s.model) so.probe = s.model->probe;
    CurvatureOptions co;
    co.tol = g.tol;
    co.probe = so.probe;

    std::map<std::string, Aggregate> agg;
    std::vector<std::string> order;
    std::map<FiberVariant, std::size_t> variants;
    std::size_t classical_skipped = 0;
    const auto points = sample_box(region, g.samples);
    auto guarded = [&](const std::string& prefix, const auto& fn) {
        try {
            fn();
        } catch (const SpecError&) {
            throw;
        } catch (const UsageError&) {
            throw;
        } catch (const Error& e) {
            VerificationReport r;
            r.checks.push_back({"evaluable", 0.0, 0.0, false, e.what()});
            fold(agg, order, r, prefix);
        }
    };
    for (const Point& p : points) {
        g_context = point_text(p);
        guarded("fundamentals: ", [&] { fold(agg, order, verify_fundamentals(wp, p), "fundamentals: "); });
        guarded("koszul: ", [&] { fold(agg, order, verify_koszul_identities(wp, p), "koszul: "); });
        guarded("curvature: ", [&] {
            const DecompositionReport d = verify_curvature_decomposition(wp, p, co);
            fold(agg, order, d.report, "curvature: ");
            ++variants[d.fiber_variant];
        });
        const bool classical_ok = wp.fiber_dim() > 1 && wp.f.eval({p.data(), wp.base_dim()}) > 0.0 &&
                                  radical_decompose(metric_at(wp.product, p), g.tol).rank == wp.product.dim();
        if (classical_ok)
            guarded("classical: ", [&] { fold(agg, order, verify_classical(wp, p).report, "classical: "); });
        else
            ++classical_skipped;
    }
    g_context = "region";
    const PreconditionReport pr = verify_preconditions(wp, points, so);
    fold(agg, order, pr.summary, "preconditions: ");

    bool all = true;
    out << "# verify over " << points.size() << " samples\n";
    out << "warped metric: g_B + f^2 g_F\n";
    for (const auto& key : order) {
        const Aggregate& a = agg[key];
        all = all && a.pass;
        out << (a.pass ? "PASS " : "FAIL ") << key << " (max residual " << short_num(a.residual) << ")";
        if (!a.pass && !a.detail.empty()) out << " [" << a.detail << "]";
        out << "\n";
    }
    // Fiber-fiber curvature identity: one variant must be consistent over all discriminating samples.
    const std::size_t printed = variants[FiberVariant::printed], fsq = variants[FiberVariant::f_squared],
                      neither = variants[FiberVariant::neither];
    std::string v6 = "not discriminated on these samples";
    if (neither == 0 && printed > 0 && fsq == 0) v6 = to_string(FiberVariant::printed);
    if (neither == 0 && fsq > 0 && printed == 0) v6 = to_string(FiberVariant::f_squared);
    const bool v6_ok = neither == 0 && (printed == 0 || fsq == 0);
    all = all && v6_ok;
    out << (v6_ok ? "PASS " : "FAIL ") << "curvature: fiber-fiber identity variant: " << v6 << "\n";
    if (classical_skipped)
        out << "note: classical corollaries skipped at " << classical_skipped
            << " samples (degenerate, f <= 0 or one-dimensional fiber)\n";
    out << "note: product verdict " << to_string(pr.product_verdict) << "\n";

    if (s.model) {
        for (const auto& c : check_conditions(*s.model, so)) {
            all = all && c.pass;
            out << (c.pass ? "PASS " : "FAIL ") << "model: " << c.name;
            if (!c.detail.empty()) out << " (" << c.detail << ")";
            out << "\n";
        }
        for (const auto& w : s.model->warnings) out << "warning: " << w << "\n";
    }
    out << "verify: " << (all ? "PASS" : "FAIL") << "\n";
    return all ? 0 : 1;
}

int cmd_regularity(const MetricSpec& s, const Box& region, const Globals& g, const std::string& require,
                   bool per_sample, std::ostream& out) {
    ScanOptions so;
    so.tol = g.tol;
    so.samples = g.samples;
    so.probe = probe_of(g, s.metric.dim());
    if (!so.probe && s.model) so.probe = s.model->probe;
    g_context = "region";
    const RegularityReport r = regularity_scan(s.metric, region, so);
    std::size_t degenerate = 0;
    double res = 0.0, prod = 0.0;
    for (const auto& smp : r.samples) {
        degenerate += smp.rank < s.metric.dim();
        res = std::max(res, smp.annihilator_residual);
        prod = std::max(prod, smp.max_product);
    }
    out << "method: " << r.method << "\n";
    out << "samples: " << r.samples.size() << " (" << degenerate << " degenerate)\n";
    out << "max annihilator residual: " << short_num(res) << "\n";
    out << "max contraction product: " << short_num(prod) << "\n";
    out << "verdict: " << to_string(r.verdict) << "\n";
    if (!r.first_violation.empty()) out << "first violation: " << r.first_violation << "\n";
    if (per_sample)
        for (const auto& smp : r.samples)
            out << point_text(smp.point) << " rank " << smp.rank << " residual " << short_num(smp.annihilator_residual)
                << " product " << short_num(smp.max_product) << (smp.note.empty() ? "" : " " + smp.note) << "\n";
    if (require.empty()) return 0;
    static const std::map<std::string, Verdict> levels = {{"fails", Verdict::fails},
                                                          {"radical_stationary", Verdict::radical_stationary},
                                                          {"semi_regular", Verdict::semi_regular},
                                                          {"nondegenerate", Verdict::nondegenerate}};
    auto it = levels.find(require);
    if (it == levels.end()) throw UsageError("--require: unknown verdict '" + require + "'");
    return r.verdict >= it->second ? 0 : 1;
}

int cmd_scan(const MetricSpec& s, const Point& from, const Point& to, const std::string& quantity, double lambda,
             const Globals& g, std::ostream& out) {
    const auto& names = s.metric.chart().coord_names();
    const std::size_t n = s.metric.dim();
    if (quantity != "riemann" && quantity != "einstein_densitized" && quantity != "koszul_products")
        throw UsageError("--quantity must be riemann, einstein_densitized or koszul_products");
    if (g.samples < 2) throw UsageError("scan needs --samples >= 2");
    std::optional<Point> probe = probe_of(g, n);
    if (!probe) {
        if ((from - to).norm() == 0.0) throw UsageError("scan path has zero length");
        probe = Point(from - to);
    }

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) pairs.push_back({a, b});

    out << "param";
    for (const auto& c : names) out << "," << c;
    out << ",rank,method";
    if (quantity == "riemann") {
        for (const auto& [a, b] : pairs)
            for (const auto& [c, d] : pairs)
                if (a < b && c < d && c * n + d >= a * n + b)
                    out << ",R_" << pair_name(names, a, b) << "_" << pair_name(names, c, d);
    } else if (quantity == "einstein_densitized") {
        for (const auto& [a, b] : pairs) out << ",E_" << pair_name(names, a, b);
    } else {
        for (std::size_t i = 0; i < pairs.size(); ++i)
            for (std::size_t j = i; j < pairs.size(); ++j)
                out << ",C_" << pair_name(names, pairs[i].first, pairs[i].second) << "_"
                    << pair_name(names, pairs[j].first, pairs[j].second);
    }
    out << ",diverged\n";

    for (std::size_t k = 0; k < g.samples; ++k) {
        const double t = double(k) / double(g.samples - 1);
        const Point p = from + t * (to - from);
        g_context = point_text(p);
        const std::size_t rank = radical_decompose(metric_at(s.metric, p), g.tol).rank;
        CurvatureOptions co;
        co.tol = g.tol;
        co.probe = probe;
        std::vector<double> vals;
        std::string method;
        bool diverged = false;
        if (quantity == "riemann") {
            const CurvatureTensor R = riemann(s.metric, p, co);
            method = to_string(R.method);
            diverged = R.diverged;
            for (const auto& [a, b] : pairs)
                for (const auto& [c, d] : pairs)
                    if (a < b && c < d && c * n + d >= a * n + b) vals.push_back(R(a, b, c, d));
        } else if (quantity == "einstein_densitized") {
            const EinsteinDensitized E = einstein_densitized(s.metric, p, lambda, co);
            method = to_string(E.method);
            diverged = E.diverged;
            for (const auto& [a, b] : pairs) vals.push_back(E.value(a, b));
        } else {
            // <<K_ab., K_cd.>> via the curvature contraction machinery
            Eigen::VectorXd P;
            if (s.metric.diagonal_roots()) {
                ContractionOptions copt{g.tol, probe, {}};
                const GammaQuotients Q = gamma_quotients(s.metric, p, copt);
                diverged = Q.diverged;
                method = "diagonal_closed_form";
                P.resize(Eigen::Index(pairs.size() * pairs.size()));
                for (std::size_t i = 0; i < pairs.size(); ++i)
                    for (std::size_t j = 0; j < pairs.size(); ++j) {
                        double v = 0.0;
                        for (std::size_t e = 0; e < n; ++e)
                            v += (*s.metric.diagonal_roots())[e].sign * Q(pairs[i].first, pairs[i].second, e) *
                                 Q(pairs[j].first, pairs[j].second, e);
                        P(Eigen::Index(i * pairs.size() + j)) = v;
                    }
            } else {
                auto products = [&](const Point& q, const Matrix& co_) {
                    const KoszulTable Kq = koszul_coordinate(s.metric, q);
                    Eigen::VectorXd v(Eigen::Index(pairs.size() * pairs.size()));
                    for (std::size_t i = 0; i < pairs.size(); ++i)
                        for (std::size_t j = 0; j < pairs.size(); ++j)
                            v(Eigen::Index(i * pairs.size() + j)) =
                                Kq.lower(pairs[i].first, pairs[i].second)
                                    .dot(co_ * Kq.lower(pairs[j].first, pairs[j].second));
                    return v;
                };
                const RadicalDecomposition rd = radical_decompose(metric_at(s.metric, p), g.tol);
                if (rd.rank == n) {
                    method = "pointwise";
                    P = products(p, rd.pseudo_inverse());
                } else {
                    method = "limit_extrapolated";
                    const Extrapolation ex = limit_toward(s.metric, p, *probe, [&](const Point& q) {
                        return products(q, cometric_near(metric_at(s.metric, q)));
                    });
                    P = ex.value;
                    diverged = ex.diverged;
                }
            }
            for (std::size_t i = 0; i < pairs.size(); ++i)
                for (std::size_t j = i; j < pairs.size(); ++j) vals.push_back(P(Eigen::Index(i * pairs.size() + j)));
        }
        out << num(t);
        for (Eigen::Index i = 0; i < p.size(); ++i) out << "," << num(p(i));
        out << "," << rank << "," << method;
        for (double v : vals) out << "," << num(v);
        out << "," << (diverged ? 1 : 0) << "\n";
    }
    return 0;
}

int cmd_models(const std::string& name, const std::vector<std::string>& params, const Globals& g, std::ostream& out) {
    if (name.empty()) {
        for (const auto& n : model_names()) {
            const ModelSpec m = catalog(n);
            out << n << " (";
            const auto& c = m.metric.chart().coord_names();
            for (std::size_t i = 0; i < c.size(); ++i) out << (i ? "," : "") << c[i];
            out << ")";
            for (const auto& [k, v] : m.parameters) out << " " << k << "=" << v;
            out << "\n";
            for (const auto& d : m.declared_conditions) out << "  - " << d << "\n";
        }
        return 0;
    }
    std::map<std::string, std::string> pm;
    for (const auto& kv : params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("--param expects key=value, got '" + kv + "'");
        pm[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    ModelSpec m;
    try {
        m = catalog(name, pm);
    } catch (const ModelError& e) {
        throw SpecError("/model", e.what());
    }
    ScanOptions so;
    so.tol = g.tol;
    so.samples = g.samples;
    so.probe = probe_of(g, m.metric.dim());
    bool all = true;
    out << "model: " << m.name << "\n";
    for (const auto& [k, v] : m.parameters) out << "param " << k << " = " << v << "\n";
    for (const auto& w : m.warnings) out << "warning: " << w << "\n";
    g_context = "model region";
    for (const auto& c : check_conditions(m, so)) {
        all = all && c.pass;
        out << (c.pass ? "PASS " : "FAIL ") << c.name;
        if (!c.detail.empty()) out << " (" << c.detail << ")";
        out << "\n";
    }
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerics for degenerate metrics: Koszul form, curvature, warped products."};
    app.fallthrough();
    app.require_subcommand(1);
    Globals g;
    app.add_option("--tol", g.tol_flag, "rank/membership tolerance (default 1e-9, env DEGENWARP_TOL)");
    app.add_option("--probe", g.probe, "comma-separated probe direction for limits");
    app.add_option("--samples", g.samples, "sample count (default 64)");
    app.add_option("--output", g.output, "output path (default stdout)");

    std::string spec_path, point, from, to, quantity = "riemann", require, model_name;
    std::vector<std::string> boxes, params;
    double lambda = 0.0;
    bool force = false, per_sample = false;

    auto* koszul = app.add_subcommand("koszul", "print K(d_a,d_b,d_c) at a point");
    koszul->add_option("spec", spec_path, "metric spec (JSON)")->required();
    koszul->add_option("--point", point, "comma-separated coordinates")->required();

    auto* riem = app.add_subcommand("riemann", "print R(d_a,d_b,d_c,d_d) and symmetry residuals");
    riem->add_option("spec", spec_path, "metric spec (JSON)")->required();
    riem->add_option("--point", point, "comma-separated coordinates")->required();
    riem->add_flag("--extrapolate", force, "use the probe limit even where not needed");

    auto* verify = app.add_subcommand("verify", "check the warped-product identities over a region");
    verify->add_option("spec", spec_path, "spec with a warped product")->required();
    verify->add_option("--box", boxes, "coordinate interval name=lo:hi (repeatable)");

    auto* regularity = app.add_subcommand("regularity", "radical-stationary / semi-regular diagnostics");
    regularity->add_option("spec", spec_path, "metric spec (JSON)")->required();
    regularity->add_option("--box", boxes, "coordinate interval name=lo:hi (repeatable)");
    regularity->add_option("--require", require, "exit 1 unless the verdict reaches this level");
    regularity->add_flag("--per-sample", per_sample, "print every sample");

    auto* scan = app.add_subcommand("scan", "CSV of a tensor along a straight path");
    scan->add_option("spec", spec_path, "metric spec (JSON)")->required();
    scan->add_option("--from", from, "path start")->required();
    scan->add_option("--to", to, "path end")->required();
    scan->add_option("--quantity", quantity, "riemann | einstein_densitized | koszul_products");
    scan->add_option("--lambda", lambda, "cosmological constant for einstein_densitized");

    auto* models = app.add_subcommand("models", "list the catalog or check one model's conditions");
    models->add_option("name", model_name, "model name");
    models->add_option("--param", params, "model parameter key=value (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    std::ostringstream out;
    int code = 0;
    try {
        g.tol = resolve_tolerance(g);
        if (*models) {
            code = cmd_models(model_name, params, g, out);
        } else {
            const MetricSpec s = load_spec_file(spec_path);
            const std::size_t n = s.metric.dim();
            if (*koszul) {
                code = cmd_koszul(s, parse_point(point, n, "--point"), out);
            } else if (*riem) {
                CurvatureOptions o;
                o.tol = g.tol;
                o.probe = probe_of(g, n);
                if (!o.probe && s.model) o.probe = s.model->probe;
                o.force_extrapolation = force;
                if (force && !o.probe) throw UsageError("--extrapolate needs --probe");
                code = cmd_riemann(s, parse_point(point, n, "--point"), o, out);
            } else if (*verify) {
                code = cmd_verify(s, region_of(s, boxes), g, out);
            } else if (*regularity) {
                code = cmd_regularity(s, region_of(s, boxes), g, require, per_sample, out);
            } else if (*scan) {
                code = cmd_scan(s, parse_point(from, n, "--from"), parse_point(to, n, "--to"), quantity, lambda, g, out);
            }
        }
    } catch (const SpecError& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "evaluation error at " << (g_context.empty() ? "?" : g_context) << ": " << e.what() << "\n";
        return 1;
    }

    if (g.output.empty()) {
        std::cout << out.str();
        std::cout.flush();
    } else {
        std::ofstream f(g.output, std::ios::binary);
        if (!f) {
            std::cerr << "error: cannot write '" << g.output << "'\n";
            return 2;
        }
        f << out.str();
    }
    return code;
}
