#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "degenwarp/geometry.hpp"
#include "degenwarp/richardson.hpp"

namespace degenwarp {

/// Vector field with expression coefficients in the chart frame.
struct VectorFieldExpr {
    std::vector<Expression> components;

    static VectorFieldExpr coordinate(const Chart& chart, std::size_t a);
    std::size_t dim() const { return components.size(); }
};

/// Covector field with expression coefficients in the coordinate coframe.
using CovectorFieldExpr = std::vector<Expression>;

/// Koszul form on coordinate fields (Christoffel symbols of the first kind)
/// and their first derivatives at a point.
class KoszulTable {
public:
    KoszulTable() = default;
    KoszulTable(Point p, std::size_t dim);

    const Point& point() const noexcept { return point_; }
    std::size_t dim() const noexcept { return dim_; }

    /// K(d_a, d_b, d_c)
    double gamma(std::size_t a, std::size_t b, std::size_t c) const { return gamma_[(a * dim_ + b) * dim_ + c]; }
    /// d_d K(d_a, d_b, d_c)
    double dgamma(std::size_t d, std::size_t a, std::size_t b, std::size_t c) const {
        return dgamma_[((d * dim_ + a) * dim_ + b) * dim_ + c];
    }
    /// The covector K(d_a, d_b, .)
    Covector lower(std::size_t a, std::size_t b) const;

    double& gamma_ref(std::size_t a, std::size_t b, std::size_t c) { return gamma_[(a * dim_ + b) * dim_ + c]; }
    double& dgamma_ref(std::size_t d, std::size_t a, std::size_t b, std::size_t c) {
        return dgamma_[((d * dim_ + a) * dim_ + b) * dim_ + c];
    }

private:
    Point point_;
    std::size_t dim_ = 0;
    std::vector<double> gamma_;
    std::vector<double> dgamma_;
};

KoszulTable koszul_coordinate(const MetricField& g, const Point& p);

/// Full six-term Koszul form K(X, Y, Z) at p, brackets included.
double koszul_general(const MetricField& g, const VectorFieldExpr& X, const VectorFieldExpr& Y,
                      const VectorFieldExpr& Z, const Point& p);

/// Lie bracket [X, Y] evaluated at p.
Eigen::VectorXd lie_bracket(const VectorFieldExpr& X, const VectorFieldExpr& Y, const Point& p);

/// The covector Z -> K(X, Y, Z).
Covector lower_cov_derivative(const MetricField& g, const VectorFieldExpr& X, const VectorFieldExpr& Y,
                              const Point& p);

/// Controls how covariant contractions are extended across rank drops.
struct ContractionOptions {
    double tol = default_tolerance;
    std::optional<Point> probe;
    RichardsonOptions richardson{};
};

/// Value and coordinate gradient of a covector field at a point;
/// grad(e, v) = d_v omega_e.
struct CovectorJet {
    Eigen::VectorXd value;
    Matrix grad;
};

using CovectorField = std::function<CovectorJet(const Point&)>;

CovectorField covector_field(const CovectorFieldExpr& omega);
CovectorField differential(const Expression& f);

std::vector<Jet2> root_jets(const MetricField& g, const Point& p);

/// Result of dividing a covector by the diagonal roots, slot by slot,
/// continued smoothly through zeros of the roots.
struct RootQuotients {
    Eigen::VectorXd w;      // w_e = omega_e / alpha_e
    bool diverged = false;  // a limit did not settle
};

/// omega_e / alpha_e, extended through alpha_e = 0 by l'Hopital along
/// grad alpha_e, or by Richardson extrapolation when that gradient vanishes
/// too. Throws NotInAnnihilator when omega_e != 0 where alpha_e = 0.
RootQuotients covector_quotients(const MetricField& g, const CovectorField& omega, const Point& p,
                                 const ContractionOptions& opt = {});

/// Q[(a*n+b)*n+e] = K(d_a, d_b, d_e) / alpha_e, smoothly extended. Exact for
/// the index patterns where K carries a factor alpha_e.
struct GammaQuotients {
    std::size_t dim = 0;
    std::vector<double> q;
    bool diverged = false;
    double operator()(std::size_t a, std::size_t b, std::size_t e) const { return q[(a * dim + b) * dim + e]; }
};

GammaQuotients gamma_quotients(const MetricField& g, const Point& p, const ContractionOptions& opt = {});

/// Pseudoinverse with a purely relative cut; used at points known to be
/// regular (extrapolation offsets).
Matrix cometric_near(const Matrix& G);

/// Richardson limit of fn(q) as q -> p along `dir`. The first offset is
/// enlarged until the metric is comfortably invertible at every sample, so
/// that high-order rank drops are not truncated by cometric_near.
Extrapolation limit_toward(const MetricField& g, const Point& p, const Point& dir,
                           const std::function<Eigen::VectorXd(const Point&)>& fn, const RichardsonOptions& opt = {});

/// (nabla_X omega)(Y) = X(omega(Y)) - <<nabla-flat_X Y, omega>>, as a covector in Y.
Covector cov_derivative_form(const MetricField& g, const VectorFieldExpr& X, const CovectorFieldExpr& omega,
                             const Point& p, const ContractionOptions& opt = {});

/// H_ab = d_a d_b f - <<K(d_a, d_b, .), df>>.
Matrix hessian(const MetricField& g, const Expression& f, const Point& p, const ContractionOptions& opt = {});

/// <<df, df>> with the same extension rules as hessian().
double differential_norm(const MetricField& g, const Expression& f, const Point& p,
                         const ContractionOptions& opt = {});

// ---------------------------------------------------------------------------
// Regularity diagnostics
// ---------------------------------------------------------------------------

struct Box {
    std::vector<double> lo;
    std::vector<double> hi;
};

/// Deterministic tensor grid with an odd number of nodes per axis, so that
/// the centre of a symmetric box is always sampled.
std::vector<Point> sample_box(const Box& box, std::size_t samples);

enum class Verdict { fails = 0, radical_stationary = 1, semi_regular = 2, nondegenerate = 3 };

const char* to_string(Verdict v);

struct ScanOptions {
    double tol = default_tolerance;
    double tol_supp = 1e-8;
    std::size_t samples = 64;
    std::optional<Point> probe;
    bool use_diagonal_roots = true;
    RichardsonOptions richardson{};
};

struct SampleDiagnostics {
    Point point;
    std::size_t rank = 0;
    double annihilator_residual = 0.0;
    double max_product = 0.0;
    bool radical_stationary = true;
    bool products_bounded = true;
    bool diagonal_criterion = true;
    std::string note;
};

struct RegularityReport {
    std::vector<SampleDiagnostics> samples;
    Verdict verdict = Verdict::nondegenerate;
    std::string first_violation;
    std::string method;
};

RegularityReport regularity_scan(const MetricField& g, const Box& region, const ScanOptions& opt = {});
RegularityReport regularity_scan(const MetricField& g, const std::vector<Point>& points, const ScanOptions& opt = {});

} // namespace degenwarp
