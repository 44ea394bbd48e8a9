#include "stark/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <string>

#include "stark/errors.hpp"

namespace stark {

double integrate_interval(const ScalarFn& f, double a, double b, double rel_tol, unsigned max_depth, double abs_tol) {
    if (a == b) return 0.0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    double err = 0.0;
    // A single rule first: integrands that are pure rounding noise would
    // otherwise bisect to the depth limit chasing a relative target.
    const double coarse = GK::integrate(f, a, b, 0, rel_tol, &err);
    if (err <= std::max(rel_tol * std::abs(coarse), abs_tol)) return coarse;
    const double tol = abs_tol > 0.0 ? std::max(rel_tol, abs_tol / std::max(std::abs(coarse), abs_tol)) : rel_tol;
    return GK::integrate(f, a, b, max_depth, tol, &err);
}

LineResult integrate_half_line(const ScalarFn& f, int direction, const LineOptions& opt) {
    const double s = direction >= 0 ? 1.0 : -1.0;
    auto g = [&](double t) { return f(s * t); };
    // Each segment gets a small share of the absolute budget.
    const double floor = opt.abs_tol / 64.0;
    double acc = integrate_interval(g, 0.0, opt.first_segment, opt.rel_tol, 12, floor);
    if (!std::isfinite(acc)) throw DivergenceError("line integrand is not finite");
    double a = opt.first_segment;
    double seg[3] = {0.0, 0.0, 0.0};
    int nseg = 0;
    int growing = 0;
    while (true) {
        const double piece = integrate_interval(g, a, 2.0 * a, opt.rel_tol, 12, floor);
        if (!std::isfinite(piece)) throw DivergenceError("line integrand is not finite");
        acc += piece;
        a *= 2.0;
        seg[0] = seg[1];
        seg[1] = seg[2];
        seg[2] = piece;
        ++nseg;
        const double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(acc));
        if (a >= opt.min_reach && nseg >= 2) {
            if (std::abs(seg[2]) <= tol && std::abs(seg[1]) <= tol) return {acc, 0.0, a};
            if (nseg >= 3 && seg[0] != 0.0 && seg[1] != 0.0) {
                const double r1 = seg[1] / seg[0];
                const double r2 = seg[2] / seg[1];
                if (r1 > 0.0 && r2 > 0.0 && r2 < 0.95 && std::abs(r2 - r1) <= 0.05 * r2) {
                    const double tail = seg[2] * r2 / (1.0 - r2);
                    const double tail_err = std::abs(tail) * std::abs(r2 - r1) / (1.0 - r2);
                    if (tail_err <= tol) return {acc + tail, tail, a};
                }
                if (std::abs(seg[2]) >= std::abs(seg[1]) && std::abs(seg[2]) > tol)
                    ++growing;
                else
                    growing = 0;
                if (growing >= 6) throw DivergenceError("line integral segments do not decay");
            }
        }
        if (a > opt.max_reach) {
            if (std::abs(seg[2]) < std::abs(seg[1]))
                throw ToleranceError("line integral tail " + std::to_string(seg[2]) + " above tolerance at reach " +
                                     std::to_string(a));
            throw DivergenceError("line integral does not converge");
        }
    }
}

LineResult integrate_line(const ScalarFn& f, const LineOptions& opt) {
    const auto p = integrate_half_line(f, +1, opt);
    const auto m = integrate_half_line(f, -1, opt);
    return {p.value + m.value, p.tail_estimate + m.tail_estimate, std::max(p.reach, m.reach)};
}

}  // namespace stark
