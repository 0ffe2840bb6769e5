#pragma once

#include <array>
#include <vector>

namespace smoothext {

/// Triangle rule in barycentric coordinates. Weights sum to one; multiply by the
/// triangle area to integrate.
struct QuadratureRule {
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;
    int degree = 0;
};

/// One point at the centroid, exact for degree 1.
[[nodiscard]] const QuadratureRule& centroid_rule();

/// Seven-point symmetric rule, exact for degree 5.
[[nodiscard]] const QuadratureRule& seven_point_rule();

/// Collapsed (Duffy) Gauss product rule, 5 x 4 points, exact for degree 7.
[[nodiscard]] const QuadratureRule& degree7_rule();

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre_unit(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace smoothext
