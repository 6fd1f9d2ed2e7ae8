#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "degenwarp/curvature.hpp"
#include "degenwarp/koszul.hpp"
#include "degenwarp/warp.hpp"

namespace degenwarp {

/// Cartesian form of +-mu^2 dr^2 + rho^2 dtheta^2 with rho^2 = +-mu^2 r^2 + u r^4,
/// on the chart (x, y). `mu` and `u` are over (x, y).
MetricField polar_cartesian(const Expression& mu, const Expression& u, int sign = 1);

/// Same, with `mu` and `u` given over a chart whose first coordinate is the
/// radius. r may only occur in even powers; throws ParityError otherwise.
MetricField polar_cartesian_from_radial(const Expression& mu, const Expression& u, int sign = 1);

struct SmoothnessProbe {
    bool parity_ok = true;
    std::string parity_detail;
    double limit = 0.0;  // lim (+-mu^2 r^2 - rho^2) / r^4, so u = -limit
    bool diverged = false;
    Extrapolation extrapolation;
};

/// `mu`, `rho` are over the single coordinate r.
SmoothnessProbe polar_smoothness_probe(const Expression& mu, const Expression& rho, int sign = 1);

struct SemiRegularityProbe {
    bool pass = true;
    std::string detail;
    std::vector<double> r;        // sample radii
    std::vector<double> witness;  // (d rho^2 / dr) / mu, smoothly extended
    double max_witness = 0.0;
};

SemiRegularityProbe polar_semiregularity(const Expression& mu, const Expression& rho, double tol_supp = 1e-8);

struct ModelCondition {
    std::string name;
    bool pass = true;
    std::string detail;
};

struct ModelSpec {
    std::string name;
    std::map<std::string, std::string> parameters;
    MetricField metric;
    std::optional<WarpedProduct> warped;
    std::optional<MetricField> cartesian;
    Box region;
    std::optional<Point> probe;  // direction toward the degenerate locus, if any
    std::vector<std::string> declared_conditions;
    std::vector<std::string> warnings;
};

const std::vector<std::string>& model_names();

/// Throws ModelError for an unknown model, an unknown parameter or an
/// unusable parameter value.
ModelSpec catalog(const std::string& name, const std::map<std::string, std::string>& params = {});

std::vector<ModelCondition> check_conditions(const ModelSpec& m, const ScanOptions& opt = {});

} // namespace degenwarp
