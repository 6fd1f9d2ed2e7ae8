#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace degenwarp {

struct RichardsonOptions {
    double start = 1e-3;  // first offset h0
    double ratio = 0.5;   // h_{k+1} = ratio * h_k
    int levels = 4;
    // Divergence when successive extrapolant differences shrink by less than
    // this factor (and are above the noise floor).
    double divergence_ratio = 4.0;
    // Error model c1 h^q + c2 h^{2q} + ...; q = 2 for even functions of h.
    int exponent_step = 1;
    double noise_floor = 1e-7;
};

struct Extrapolation {
    Eigen::VectorXd value;
    bool diverged = false;
    std::vector<double> steps;
    std::vector<Eigen::VectorXd> samples;
    std::vector<Eigen::VectorXd> extrapolants;  // best estimate after each level
};

/// Estimates lim_{h -> 0+} f(h) componentwise from samples at
/// h_k = start * ratio^k by repeated Richardson elimination.
Extrapolation richardson(const std::function<Eigen::VectorXd(double)>& f, const RichardsonOptions& opt = {});

/// Scalar convenience wrapper.
Extrapolation richardson_scalar(const std::function<double(double)>& f, const RichardsonOptions& opt = {});

} // namespace degenwarp
