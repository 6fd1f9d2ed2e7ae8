#include "degenwarp/richardson.hpp"

#include <algorithm>
#include <cmath>

namespace degenwarp {

Extrapolation richardson(const std::function<Eigen::VectorXd(double)>& f, const RichardsonOptions& opt) {
    Extrapolation out;
    const int L = std::max(1, opt.levels);
    std::vector<std::vector<Eigen::VectorXd>> T(L);
    double h = opt.start;
    bool finite = true;
    for (int k = 0; k < L; ++k, h *= opt.ratio) {
        Eigen::VectorXd s = f(h);
        finite = finite && s.allFinite();
        out.steps.push_back(h);
        out.samples.push_back(s);
        T[k].push_back(s);
        for (int j = 1; j <= k; ++j) {
            const double w = std::pow(opt.ratio, -double(opt.exponent_step * j));
            T[k].push_back((w * T[k][j - 1] - T[k - 1][j - 1]) / (w - 1.0));
        }
        out.extrapolants.push_back(T[k][k]);
    }
    out.value = out.extrapolants.back();
    if (!finite || !out.value.allFinite()) {
        out.diverged = true;
        return out;
    }
    if (L >= 3) {
        const auto& E = out.extrapolants;
        const double d_last = (E[L - 1] - E[L - 2]).norm();
        const double d_prev = (E[L - 2] - E[L - 3]).norm();
        const double floor = opt.noise_floor * std::max(1.0, E[L - 1].norm());
        if (d_last > floor && d_last * opt.divergence_ratio > d_prev) out.diverged = true;
    }
    return out;
}

Extrapolation richardson_scalar(const std::function<double(double)>& f, const RichardsonOptions& opt) {
    return richardson(
        [&](double h) {
            Eigen::VectorXd v(1);
            v(0) = f(h);
            return v;
        },
        opt);
}

} // namespace degenwarp
