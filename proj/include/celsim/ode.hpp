#pragma once

// Adaptive Dormand-Prince 5(4) integrator for small dense ODE systems
// (moment equations, phase drift). State is any Eigen vector type.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "celsim/errors.hpp"

namespace cel {

struct OdeOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double first_step = 0;       // 0: auto
    double min_step_frac = 1e-14; // of the total span; below this, diagnose stiffness
};

// Integrates dy/dt = f(t, y) and returns y at each requested grid point.
// t_grid must be increasing; t_grid[0] is the initial time for y0.
template <typename Vec>
std::vector<Vec> integrate_ode(const std::function<Vec(double, const Vec &)> &f, Vec y0,
                               const std::vector<double> &t_grid, const OdeOptions &opt = {}) {
    static constexpr double c2 = 1. / 5, c3 = 3. / 10, c4 = 4. / 5, c5 = 8. / 9;
    static constexpr double a21 = 1. / 5;
    static constexpr double a31 = 3. / 40, a32 = 9. / 40;
    static constexpr double a41 = 44. / 45, a42 = -56. / 15, a43 = 32. / 9;
    static constexpr double a51 = 19372. / 6561, a52 = -25360. / 2187, a53 = 64448. / 6561,
                            a54 = -212. / 729;
    static constexpr double a61 = 9017. / 3168, a62 = -355. / 33, a63 = 46732. / 5247,
                            a64 = 49. / 176, a65 = -5103. / 18656;
    static constexpr double b1 = 35. / 384, b3 = 500. / 1113, b4 = 125. / 192,
                            b5 = -2187. / 6784, b6 = 11. / 84;
    static constexpr double e1 = 71. / 57600, e3 = -71. / 16695, e4 = 71. / 1920,
                            e5 = -17253. / 339200, e6 = 22. / 525, e7 = -1. / 40;

    if (t_grid.empty()) return {};
    for (size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw config_error("integrate_ode: time grid must be strictly increasing");

    const double span = t_grid.back() - t_grid.front();
    std::vector<Vec> out;
    out.reserve(t_grid.size());
    out.push_back(y0);
    if (t_grid.size() == 1) return out;

    double t = t_grid.front();
    Vec y = y0;
    Vec k1 = f(t, y);
    double h = opt.first_step > 0 ? opt.first_step : span / 1000.0;

    for (size_t ig = 1; ig < t_grid.size(); ++ig) {
        const double t_target = t_grid[ig];
        while (t < t_target) {
            h = std::min(h, t_target - t);
            if (h < opt.min_step_frac * span)
                throw solver_error("integrate_ode: step size underflow at t = " +
                                   std::to_string(t) +
                                   " (stiff system; integrate slow variables instead)");
            const Vec k2 = f(t + c2 * h, y + h * (a21 * k1));
            const Vec k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
            const Vec k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
            const Vec k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            const Vec k6 =
                f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            const Vec ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const Vec k7 = f(t + h, ynew);
            const Vec errv =
                h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            double err = 0;
            for (int i = 0; i < errv.size(); ++i) {
                const double sc =
                    opt.atol + opt.rtol * std::max(std::abs(y(i)), std::abs(ynew(i)));
                err = std::max(err, std::abs(errv(i)) / sc);
            }
            if (err <= 1.0) {
                t += h;
                y = ynew;
                k1 = k7; // FSAL
                h *= std::min(5.0, 0.9 * std::pow(std::max(err, 1e-10), -0.2));
            } else {
                h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            }
        }
        out.push_back(y);
    }
    return out;
}

} // namespace cel
