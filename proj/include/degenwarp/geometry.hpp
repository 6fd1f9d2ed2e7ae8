#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "degenwarp/expr.hpp"

namespace degenwarp {

using Point = Eigen::VectorXd;
using Covector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Parity { Even, Odd };

struct ParityConstraint {
    std::string coord;
    Parity parity = Parity::Even;
};

/// A single coordinate chart. Quotient models carry parity constraints on
/// the coordinates whose reflection x -> -x is part of the identification.
class Chart {
public:
    Chart() = default;
    explicit Chart(std::vector<std::string> coord_names, std::vector<ParityConstraint> parity = {});

    std::size_t dim() const noexcept { return names_.size(); }
    const std::vector<std::string>& coord_names() const noexcept { return names_; }
    const std::vector<ParityConstraint>& parity_constraints() const noexcept { return parity_; }
    std::size_t index_of(const std::string& name) const;

    Expression parse(std::string_view source) const { return degenwarp::parse(source, names_); }
    Expression coord(std::size_t i) const { return Expression::variable(i, names_[i]); }

private:
    std::vector<std::string> names_;
    std::vector<ParityConstraint> parity_;
};

/// g = sum_a sign_a * alpha_a^2 dx^a dx^a
struct DiagonalRoot {
    int sign = 1;
    Expression alpha;
};

/// Symmetric (possibly degenerate, possibly signature-changing) metric on a
/// chart. Components are stored as the upper triangle.
class MetricField {
public:
    MetricField() = default;

    /// From explicit components; `entries` maps (a, b) with a <= b. Missing
    /// entries are zero.
    static MetricField from_components(Chart chart, const std::map<std::pair<std::size_t, std::size_t>, Expression>& entries);

    /// Diagonal metric built from its roots.
    static MetricField from_roots(Chart chart, std::vector<DiagonalRoot> roots);

    const Chart& chart() const noexcept { return chart_; }
    std::size_t dim() const noexcept { return chart_.dim(); }
    const Expression& component(std::size_t a, std::size_t b) const;
    const std::optional<std::vector<DiagonalRoot>>& diagonal_roots() const noexcept { return roots_; }

    /// Same components, no diagonal roots (forces the generic code paths).
    MetricField without_roots() const;

private:
    std::size_t packed(std::size_t a, std::size_t b) const;

    Chart chart_;
    std::vector<Expression> upper_;
    std::optional<std::vector<DiagonalRoot>> roots_;
};

/// Evaluated component matrix at p (exactly symmetric).
Matrix metric_at(const MetricField& g, const Point& p);

/// Metric components with first and second coordinate derivatives at a point.
struct MetricJets {
    Matrix value;
    std::vector<Matrix> d1;               // d1[c](a,b) = d_c g_ab
    std::vector<std::vector<Matrix>> d2;  // d2[c][d](a,b) = d_c d_d g_ab
};

MetricJets metric_jets(const MetricField& g, const Point& p);

/// Pointwise decomposition of a symmetric matrix into radical and range.
struct RadicalDecomposition {
    Point point;
    std::size_t rank = 0;
    std::vector<Eigen::VectorXd> radical_basis;  // kernel vectors
    std::vector<Eigen::VectorXd> range_basis;    // covectors spanning the annihilator
    Eigen::VectorXd eigenvalues;
    Matrix eigenvectors;
    double tolerance = 0.0;
    double threshold = 0.0;  // absolute eigenvalue cut actually used

    /// Moore-Penrose pseudoinverse truncated at `threshold`.
    Matrix pseudo_inverse() const;
    /// Norm of the component of `w` along the radical (w evaluated on an
    /// orthonormal radical basis).
    double radical_residual(const Covector& w) const;
};

constexpr double default_tolerance = 1e-9;

/// Eigenvalues with |lambda| <= tol * max(1, ||G||) are assigned to the radical.
RadicalDecomposition radical_decompose(const Matrix& G, double tol = default_tolerance);

/// Co-metric contraction <<omega, tau>> = omega^T G^+ tau. Throws
/// NotInAnnihilator when either covector leaves the range of G by more than tol.
double cocontract(const Matrix& G, const Covector& omega, const Covector& tau, double tol = default_tolerance);
double cocontract(const RadicalDecomposition& rd, const Covector& omega, const Covector& tau);

struct ParityCheck {
    std::string coord;
    Parity parity = Parity::Even;
    bool pass = true;
    double max_asymmetry = 0.0;
    Point worst_point;
    std::string worst_component;
};

struct ParityReport {
    std::vector<ParityCheck> checks;
    bool pass() const;
};

/// Samples point pairs related by the reflection of each constrained
/// coordinate and reports the asymmetry of the metric under it. An even
/// constraint requires g to be invariant under x -> -x as a tensor (so
/// diagonal components are even functions of x); an odd one requires it to
/// change sign.
ParityReport validate_parity(const MetricField& g, std::size_t samples = 100, unsigned seed = 7,
                             double tol = 1e-10);

} // namespace degenwarp
