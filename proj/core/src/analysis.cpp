#include "smoothext/analysis.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace smoothext {

namespace {

constexpr int annulus_n_cut = 30;

double forbidden_value(int n) {
    const double t = std::ldexp(1.0, -2 * n);
    return -(1.0 - t) / (1.0 + t);
}

void require_nonzero(double kappa, const char* who) {
    if (kappa == 0.0 || !std::isfinite(kappa)) {
        throw InvalidArgument(fmt::format("{}: kappa must be finite and nonzero, got {}", who, kappa));
    }
}

// Bisection for dispersion(lambda) = kappa on [lo, hi]; nullopt without a sign change.
std::optional<double> bisect(double kappa, double lo, double hi) {
    const double tiny = 1e-13 * std::max(1.0, std::abs(kappa));
    double flo = corner_dispersion(lo) - kappa;
    const double fhi = corner_dispersion(hi) - kappa;
    if (std::abs(flo) <= tiny) return lo;
    if (std::abs(fhi) <= tiny) return hi;
    if ((flo < 0.0) == (fhi < 0.0)) return std::nullopt;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = corner_dispersion(mid) - kappa;
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

ContrastDiagnostics contrast_diagnostics(double eps1, double eps2) {
    if (!(eps1 > 0.0) || !(eps2 < 0.0)) {
        throw InvalidArgument(fmt::format("contrast_diagnostics: need eps1 > 0 > eps2, got {} and {}", eps1, eps2));
    }
    return {eps1 / -eps2, -eps2 / eps1, eps2 / eps1};
}

std::string_view to_string(GeometryTag g) noexcept { return g == GeometryTag::annulus ? "annulus" : "corner"; }

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::well_posed: return "well-posed";
        case Verdict::ill_posed: return "ill-posed";
        case Verdict::critical_interval: return "critical-interval";
    }
    return "unknown";
}

std::vector<double> annulus_forbidden_set(int n_max) {
    if (n_max < 1) {
        throw InvalidArgument(fmt::format("annulus_forbidden_set: n_max must be >= 1, got {}", n_max));
    }
    std::vector<double> s;
    s.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) s.push_back(forbidden_value(n));
    return s;
}

WellPosednessVerdict annulus_wellposed(double kappa, double tol) {
    require_nonzero(kappa, "annulus_wellposed");
    if (!(tol >= 0.0)) {
        throw InvalidArgument("annulus_wellposed: tolerance must be nonnegative");
    }
    // Values with n > n_cut lie within 2^-61 of -1 and are covered by the -1 test.
    double distance = std::max(0.0, std::abs(kappa + 1.0) - std::ldexp(1.0, -2 * annulus_n_cut - 1));
    distance = std::min(distance, std::abs(kappa + 1.0));
    for (int n = 1; n <= annulus_n_cut; ++n) {
        distance = std::min(distance, std::abs(kappa - forbidden_value(n)));
    }
    WellPosednessVerdict v;
    v.geometry = GeometryTag::annulus;
    v.distance = distance;
    v.verdict = distance <= tol ? Verdict::ill_posed : Verdict::well_posed;
    return v;
}

double corner_dispersion(double lambda) {
    if (!std::isfinite(lambda)) {
        throw InvalidArgument("corner_dispersion: lambda must be finite");
    }
    if (std::abs(lambda) < 1e-12) return -3.0;
    const double x = lambda * std::numbers::pi / 4.0;
    if (std::abs(std::cos(3.0 * x)) < 1e-14 || std::abs(std::cos(x)) < 1e-14) {
        throw PoleError(fmt::format("corner_dispersion: pole at lambda = {}", lambda));
    }
    if (std::abs(std::sin(x)) < 1e-14) return -3.0;
    return -std::tan(3.0 * x) / std::tan(x);
}

double corner_lambda0(double kappa) {
    require_nonzero(kappa, "corner_lambda0");
    if (kappa >= -3.0 && kappa <= -1.0) {
        throw IllPosedContrast(fmt::format("corner_lambda0: kappa = {} lies in the critical interval [-3, -1]", kappa));
    }
    constexpr double pole = 2.0 / 3.0;
    constexpr double gap = 1e-12;
    if (auto r = bisect(kappa, 1e-12, pole - gap)) return *r;
    if (auto r = bisect(kappa, pole + gap, 1.0)) return *r;
    throw InvalidArgument(fmt::format("corner_lambda0: no root in (0, 1] for kappa = {}", kappa));
}

WellPosednessVerdict corner_wellposed(double kappa) {
    require_nonzero(kappa, "corner_wellposed");
    WellPosednessVerdict v;
    v.geometry = GeometryTag::corner;
    if (kappa >= -3.0 && kappa <= -1.0) {
        v.verdict = Verdict::critical_interval;
        v.distance = 0.0;
        return v;
    }
    v.verdict = Verdict::well_posed;
    v.distance = kappa < -3.0 ? -3.0 - kappa : kappa + 1.0;
    // Without a root in (0, 1] the corner does not limit regularity below 1.
    try {
        v.sigma_d = corner_lambda0(kappa);
    } catch (const InvalidArgument&) {
        v.sigma_d = 1.0;
    }
    return v;
}

}  // namespace smoothext
