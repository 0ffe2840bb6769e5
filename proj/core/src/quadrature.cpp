#include "smoothext/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace smoothext {

void gauss_legendre_unit(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        // Newton on P_n starting from the Chebyshev-like guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double pn = n == 0 ? 1.0 : p1;
            const double pnm1 = n == 1 ? 1.0 : p0;
            dp = n * (x * pn - pnm1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const auto idx = static_cast<std::size_t>(i);
        nodes[idx] = 0.5 * (1.0 - x);
        weights[idx] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
}

const QuadratureRule& centroid_rule() {
    static const QuadratureRule rule{{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}}, {1.0}, 1};
    return rule;
}

const QuadratureRule& seven_point_rule() {
    static const QuadratureRule rule = [] {
        const double s = std::sqrt(15.0);
        const double a1 = (6.0 - s) / 21.0;
        const double a2 = (6.0 + s) / 21.0;
        const double w1 = (155.0 - s) / 1200.0;
        const double w2 = (155.0 + s) / 1200.0;
        QuadratureRule r;
        r.degree = 5;
        r.points = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
                    {a1, a1, 1.0 - 2.0 * a1}, {a1, 1.0 - 2.0 * a1, a1}, {1.0 - 2.0 * a1, a1, a1},
                    {a2, a2, 1.0 - 2.0 * a2}, {a2, 1.0 - 2.0 * a2, a2}, {1.0 - 2.0 * a2, a2, a2}};
        r.weights = {9.0 / 40.0, w1, w1, w1, w2, w2, w2};
        return r;
    }();
    return rule;
}

const QuadratureRule& degree7_rule() {
    static const QuadratureRule rule = [] {
        std::vector<double> u;
        std::vector<double> wu;
        std::vector<double> v;
        std::vector<double> wv;
        gauss_legendre_unit(5, u, wu);
        gauss_legendre_unit(4, v, wv);
        QuadratureRule r;
        r.degree = 7;
        for (std::size_t i = 0; i < u.size(); ++i) {
            for (std::size_t j = 0; j < v.size(); ++j) {
                const double x = u[i];
                const double y = v[j] * (1.0 - u[i]);
                r.points.push_back({1.0 - x - y, x, y});
                r.weights.push_back(2.0 * wu[i] * wv[j] * (1.0 - u[i]));
            }
        }
        return r;
    }();
    return rule;
}

}  // namespace smoothext
