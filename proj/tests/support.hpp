#pragma once

#include <smoothext/fem.hpp>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

namespace smoothext::testing {

inline std::shared_ptr<const Mesh> share(Mesh m) { return std::make_shared<const Mesh>(std::move(m)); }

inline Vector random_vector(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

inline Vector combine(double a, const Vector& x, double b, const Vector& y) {
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + b * y[i];
    return out;
}

inline double rel_diff(const Vector& a, const Vector& b) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

inline AnalyticField zero_field() {
    return {[](const Point&, Region) { return 0.0; },
            [](const Point&, Region) { return std::array<double, 2>{0.0, 0.0}; }};
}

// Control for the flat case whose extended state equals the exact region-1 solution:
// the state continues harmonically into region 2 and w supplies the interface flux jump.
inline AnalyticField flat_target_control(double kappa) {
    constexpr double pi = std::numbers::pi;
    const double b = -(kappa + 2.0) / (2.0 * (kappa + 1.0));
    const double alpha = (0.25 + 0.5 * b) / std::sinh(pi / 2.0);
    const double jump = alpha * pi * std::cosh(pi / 2.0) + (1.0 + b);
    const double gamma = jump / (pi * std::cosh(pi / 2.0));
    return {[gamma](const Point& p, Region) { return gamma * std::sinh(pi * (1 - p.x)) * std::sin(pi * p.y); },
            [gamma](const Point& p, Region) {
                return std::array<double, 2>{-gamma * pi * std::cosh(pi * (1 - p.x)) * std::sin(pi * p.y),
                                             gamma * pi * std::sinh(pi * (1 - p.x)) * std::cos(pi * p.y)};
            }};
}

}  // namespace smoothext::testing
