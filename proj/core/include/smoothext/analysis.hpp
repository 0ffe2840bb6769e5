#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "smoothext/error.hpp"

namespace smoothext {

/// Thrown by corner_dispersion at a pole of either tangent.
class PoleError : public Error {
public:
    using Error::Error;
};

/// Piecewise-constant contrasts: kappa1 = eps1 / |eps2|, kappa2 = |eps2| / eps1, kappa = eps2 / eps1.
struct ContrastDiagnostics {
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double kappa = 0.0;
};

[[nodiscard]] ContrastDiagnostics contrast_diagnostics(double eps1, double eps2);

enum class GeometryTag : std::uint8_t { annulus, corner };
enum class Verdict : std::uint8_t { well_posed, ill_posed, critical_interval };

[[nodiscard]] std::string_view to_string(GeometryTag g) noexcept;
[[nodiscard]] std::string_view to_string(Verdict v) noexcept;

struct WellPosednessVerdict {
    GeometryTag geometry = GeometryTag::annulus;
    Verdict verdict = Verdict::well_posed;
    /// Annulus: distance to the nearest value of {-1} u S. Corner: distance to [-3, -1].
    double distance = 0.0;
    /// Corner only: the limit regularity exponent.
    std::optional<double> sigma_d;
};

/// -(1 - 4^-n) / (1 + 4^-n) for n = 1..n_max.
[[nodiscard]] std::vector<double> annulus_forbidden_set(int n_max);

[[nodiscard]] WellPosednessVerdict annulus_wellposed(double kappa, double tol = 1e-9);

/// -tan(3 lambda pi / 4) / tan(lambda pi / 4); -3 in the limit lambda -> 0.
[[nodiscard]] double corner_dispersion(double lambda);

/// Smallest root in (0, 1] of corner_dispersion(lambda) = kappa.
[[nodiscard]] double corner_lambda0(double kappa);

[[nodiscard]] WellPosednessVerdict corner_wellposed(double kappa);

}  // namespace smoothext
