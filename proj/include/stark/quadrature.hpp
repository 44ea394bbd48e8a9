#pragma once

#include <functional>

namespace stark {

using ScalarFn = std::function<double(double)>;

// Adaptive Gauss-Kronrod on a finite interval; stops once the error estimate
// is below rel_tol |I| or abs_tol.
double integrate_interval(const ScalarFn& f, double a, double b, double rel_tol = 1e-12, unsigned max_depth = 12,
                          double abs_tol = 0.0);

struct LineOptions {
    double abs_tol = 1e-9;
    double rel_tol = 1e-12;
    double first_segment = 1.0;  // [0, first_segment] integrated before doubling starts
    double min_reach = 32.0;     // doubling continues at least this far
    double max_reach = 1e12;
};

struct LineResult {
    double value = 0.0;
    double tail_estimate = 0.0;  // extrapolated tail included in value (0 if not needed)
    double reach = 0.0;
};

// Integral over [0, +inf) (direction +1) or (-inf, 0] (direction -1) by interval
// doubling; a geometric tail is extrapolated once segment ratios settle.
LineResult integrate_half_line(const ScalarFn& f, int direction, const LineOptions& opt = {});

// Integral over the whole real line.
LineResult integrate_line(const ScalarFn& f, const LineOptions& opt = {});

}  // namespace stark
