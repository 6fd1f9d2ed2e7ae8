#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "degenwarp/koszul.hpp"

namespace degenwarp {

enum class CurvatureMethod { pointwise, diagonal_closed_form, limit_extrapolated };

const char* to_string(CurvatureMethod m);

struct CurvatureResiduals {
    double norm = 0.0;            // max |R_abcd|
    double antisym_first = 0.0;   // R_abcd + R_bacd
    double antisym_last = 0.0;    // R_abcd + R_abdc
    double pair_symmetry = 0.0;   // R_abcd - R_cdab
    double bianchi = 0.0;         // R_abcd + R_bcad + R_cabd
    double worst() const;
};

/// R(d_a, d_b, d_c, d_d) at a point.
class CurvatureTensor {
public:
    CurvatureTensor() = default;
    CurvatureTensor(Point p, std::size_t dim);

    const Point& point() const noexcept { return point_; }
    std::size_t dim() const noexcept { return dim_; }
    double operator()(std::size_t a, std::size_t b, std::size_t c, std::size_t d) const { return r_[index(a, b, c, d)]; }
    double& at(std::size_t a, std::size_t b, std::size_t c, std::size_t d) { return r_[index(a, b, c, d)]; }
    const std::vector<double>& data() const noexcept { return r_; }

    CurvatureMethod method = CurvatureMethod::pointwise;
    bool diverged = false;
    CurvatureResiduals residuals;

    void compute_residuals();

private:
    std::size_t index(std::size_t a, std::size_t b, std::size_t c, std::size_t d) const {
        return ((a * dim_ + b) * dim_ + c) * dim_ + d;
    }
    Point point_;
    std::size_t dim_ = 0;
    std::vector<double> r_;
};

struct CurvatureOptions {
    double tol = default_tolerance;
    std::optional<Point> probe;
    RichardsonOptions richardson{};
    // Use the probe even where a closed form or the pointwise cometric applies.
    bool force_extrapolation = false;
};

/// R_abcd = d_a K_bcd - d_b K_acd + <<K_ac., K_bd.>> - <<K_bc., K_ad.>>.
CurvatureTensor riemann(const MetricField& g, const Point& p, const CurvatureOptions& opt = {});

/// R(a,b,b,a) / (G_aa G_bb - G_ab^2); +1 on the unit sphere.
double sectional(const CurvatureTensor& R, const Matrix& G, std::size_t a, std::size_t b,
                 double tol = default_tolerance);

/// Limit of the sectional curvature of the (a,b) plane approaching p along `probe`.
Extrapolation sectional_limit(const MetricField& g, const Point& p, std::size_t a, std::size_t b, const Point& probe,
                              const RichardsonOptions& ropt = {});

struct RicciScalar {
    Matrix ricci;
    double scalar = 0.0;
};

/// Ric_ab = g^cd R_cabd, s = g^ab Ric_ab.
RicciScalar ricci_scalar(const MetricField& g, const Point& p, double tol = default_tolerance);
RicciScalar ricci_scalar(const CurvatureTensor& R, const Matrix& G, double tol = default_tolerance);

struct EinsteinDensitized {
    Point point;
    Matrix value;  // det g (Ric - s g / 2 + lambda g)
    double lambda = 0.0;
    double kappa = 1.0;
    double det_g = 0.0;
    CurvatureMethod method = CurvatureMethod::pointwise;
    bool diverged = false;
};

EinsteinDensitized einstein_densitized(const MetricField& g, const Point& p, double lambda,
                                       const CurvatureOptions& opt = {}, double kappa = 1.0);

} // namespace degenwarp
