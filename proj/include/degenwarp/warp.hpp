#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "degenwarp/curvature.hpp"
#include "degenwarp/koszul.hpp"

namespace degenwarp {

/// B x_f F with product metric g_B + f^2 g_F on the chart (base coords, fiber coords).
struct WarpedProduct {
    MetricField base;
    MetricField fiber;
    Expression f;  // on base coordinates
    MetricField product;

    std::size_t base_dim() const { return base.dim(); }
    std::size_t fiber_dim() const { return fiber.dim(); }
    Point base_point(const Point& p) const { return p.head(base_dim()); }
    Point fiber_point(const Point& p) const { return p.tail(fiber_dim()); }
    Point join(const Point& pb, const Point& pf) const;
};

/// `f` may be written over the base chart or the product chart, as long as it
/// only involves base coordinates.
WarpedProduct build(const MetricField& base, const MetricField& fiber, const Expression& f);

struct IdentityCheck {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = true;
    std::string detail;
};

struct VerificationReport {
    std::string title;
    std::vector<IdentityCheck> checks;
    std::vector<std::string> notes;
    bool pass() const;
    void add(std::string name, double residual, double tolerance, std::string detail = {});
};

VerificationReport verify_fundamentals(const WarpedProduct& wp, const Point& p, double tol = 1e-10);
VerificationReport verify_koszul_identities(const WarpedProduct& wp, const Point& p, double tol = 1e-9);

struct PreconditionReport {
    Verdict base_verdict = Verdict::nondegenerate;
    Verdict fiber_verdict = Verdict::nondegenerate;
    Verdict product_verdict = Verdict::nondegenerate;
    bool df_in_annihilator = true;     // df in A*(B) at every sampled base point
    bool df_semi_regular = true;       // nabla_X df stays in A*(B)
    bool radical_stationary_precondition = true;
    bool semi_regular_precondition = true;
    bool implication_holds = true;
    double max_df_residual = 0.0;
    std::string first_failure;
    RegularityReport product_scan;
    VerificationReport summary;
};

PreconditionReport verify_preconditions(const WarpedProduct& wp, const Box& region, const ScanOptions& opt = {});
PreconditionReport verify_preconditions(const WarpedProduct& wp, const std::vector<Point>& points,
                                        const ScanOptions& opt = {});

enum class FiberVariant { printed, f_squared, both, neither };
const char* to_string(FiberVariant v);

struct DecompositionReport {
    VerificationReport report;
    FiberVariant fiber_variant = FiberVariant::neither;
    double printed_residual = 0.0;
    double corrected_residual = 0.0;
    CurvatureMethod method = CurvatureMethod::pointwise;
};

/// Checks the six block identities of the warped-product curvature. Tolerance
/// is relative to max(1, |R|).
DecompositionReport verify_curvature_decomposition(const WarpedProduct& wp, const Point& p,
                                                   const CurvatureOptions& opt = {}, double tol = 1e-8);

struct ClassicalReport {
    VerificationReport report;
    double scalar_direct = 0.0;
    double scalar_printed = 0.0;
    double scalar_corrected = 0.0;
    bool printed_matches = false;
    bool corrected_matches = false;
};

/// Ricci and scalar curvature of a non-degenerate warped product against the
/// factor data. Both sign variants are evaluated.
ClassicalReport verify_classical(const WarpedProduct& wp, const Point& p, double tol = 1e-8);

} // namespace degenwarp
