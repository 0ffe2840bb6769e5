#pragma once

#include "smoothext/optimize.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace smoothext {

enum class CaseName : std::uint8_t { flat, circular, corner };

[[nodiscard]] std::string_view to_string(CaseName c) noexcept;
[[nodiscard]] CaseName parse_case(std::string_view name);

/// Manufactured two-region solution with eps1 = 1, eps2 = kappa, and the matching source.
struct ManufacturedCase {
    CaseName name = CaseName::flat;
    double kappa = -2.0;
    double eps1 = 1.0;
    double eps2 = -2.0;
    AnalyticField exact;
    AnalyticField source;
    Geometry geometry = Geometry::square_split;
    Region extension_source = Region::one;
    Schedule schedule;
    OpenInterval admissible_q;
    std::optional<double> lambda0;  ///< corner only
    int default_base = 4;           ///< resolution of the coarsest level

    [[nodiscard]] Mesh make_mesh(int resolution) const;
    [[nodiscard]] TransmissionProblem problem() const;
};

/// Each constructor validates continuity, flux continuity, the boundary condition and the
/// source against a finite-difference divergence of the exact gradient, and throws on failure.
[[nodiscard]] ManufacturedCase case_flat(double kappa);
[[nodiscard]] ManufacturedCase case_circular(double kappa);
[[nodiscard]] ManufacturedCase case_corner(double kappa);
[[nodiscard]] ManufacturedCase make_case(CaseName name, double kappa);

/// Worst relative mismatch between the source and -div(eps grad u) by central differences
/// of the exact gradient at `samples` seeded random points per region.
[[nodiscard]] double source_oracle_error(const ManufacturedCase& c, int samples, unsigned seed = 7);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;  ///< in log(error)
};

/// Least-squares slope of log(error) against log(h).
[[nodiscard]] RateFit fit_rate(const std::vector<std::pair<double, double>>& pairs);

struct LevelResult {
    int level = 0;
    double h = 0.0;
    std::size_t vertices = 0;
    double lambda = 0.0;
    int iterations = 0;
    double cost = 0.0;
    double misfit = 0.0;
    double rel_l2 = 0.0;
    double rel_h1 = 0.0;
    Termination reason = Termination::tolerance;
};

struct ConvergenceReport {
    std::vector<LevelResult> levels;  ///< decreasing h
    RateFit rate_l2;
    RateFit rate_h1;

    /// level,h,N,lambda,iters,cost,misfit,relL2,relH1 rows and a "# rates" footer.
    [[nodiscard]] std::string to_csv() const;
};

/// Evaluates a control of one operator set at the control unknowns of another by point
/// location in the source control region (nearest triangle for points just outside).
[[nodiscard]] Control prolong_control(const DiscreteOperators& from, const Control& w, const DiscreteOperators& to);

/// Solves the case on `levels` meshes of resolution base, 2 base, 4 base, ...
/// A base of 0 selects the case default.
[[nodiscard]] ConvergenceReport run_convergence(const ManufacturedCase& c, int levels, int base_resolution = 0,
                                                const OptimizerOptions& opts = {});

}  // namespace smoothext
