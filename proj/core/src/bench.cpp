#include "smoothext/bench.hpp"

#include "smoothext/analysis.hpp"
#include "smoothext/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace smoothext {

namespace {

using std::numbers::pi;
using Grad = std::array<double, 2>;

double theta_of(const Point& p) { return std::atan2(p.y <= 0.0 ? 0.0 : p.y, p.x); }

// Samples of (point, unit normal from region 1 into region 2) on the interface.
using InterfaceSample = std::pair<Point, Grad>;

std::vector<InterfaceSample> interface_samples(const ManufacturedCase& c, std::mt19937& rng, int count) {
    std::uniform_real_distribution<double> u01(0.02, 0.98);
    std::vector<InterfaceSample> out;
    for (int i = 0; i < count; ++i) {
        const double t = u01(rng);
        switch (c.name) {
            case CaseName::flat: out.push_back({{0.5, t}, {1.0, 0.0}}); break;
            case CaseName::circular: {
                const double th = 2.0 * pi * t;
                out.push_back({{std::cos(th), std::sin(th)}, {std::cos(th), std::sin(th)}});
                break;
            }
            case CaseName::corner: {
                const double s = std::sqrt(0.5);
                out.push_back({{t * s, t * s}, {-s, s}});
                break;
            }
        }
    }
    return out;
}

std::vector<Point> boundary_samples(const ManufacturedCase& c, std::mt19937& rng, int count) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<Point> out;
    for (int i = 0; i < count; ++i) {
        const double t = u01(rng);
        switch (c.name) {
            case CaseName::flat: {
                const Point options[4] = {{0.0, t}, {1.0, t}, {t, 0.0}, {t, 1.0}};
                out.push_back(options[i % 4]);
                break;
            }
            case CaseName::circular: {
                const double th = 2.0 * pi * t;
                out.push_back({2.0 * std::cos(th), 2.0 * std::sin(th)});
                break;
            }
            case CaseName::corner: {
                const double th = pi * t;
                const Point options[3] = {{std::cos(th), std::sin(th)}, {t, 0.0}, {-t, 0.0}};
                out.push_back(options[i % 3]);
                break;
            }
        }
    }
    return out;
}

Region region_of(const ManufacturedCase& c, const Point& p) {
    switch (c.name) {
        case CaseName::flat: return p.x < 0.5 ? Region::one : Region::two;
        case CaseName::circular: return std::hypot(p.x, p.y) < 1.0 ? Region::one : Region::two;
        case CaseName::corner: return theta_of(p) < pi / 4.0 ? Region::one : Region::two;
    }
    return Region::one;
}

// Random point strictly inside region r, away from the interface and, for the corner,
// from the singular vertex.
Point interior_sample(const ManufacturedCase& c, Region r, std::mt19937& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double a = u01(rng);
    const double b = u01(rng);
    const bool one = r == Region::one;
    switch (c.name) {
        case CaseName::flat:
            return {one ? 0.01 + 0.48 * a : 0.51 + 0.48 * a, 0.01 + 0.98 * b};
        case CaseName::circular: {
            const double rad = one ? 0.01 + 0.98 * a : 1.01 + 0.98 * a;
            const double th = 2.0 * pi * b;
            return {rad * std::cos(th), rad * std::sin(th)};
        }
        case CaseName::corner: {
            const double rad = 0.05 + 0.94 * a;
            const double th = one ? 0.01 + (pi / 4.0 - 0.02) * b : pi / 4.0 + 0.01 + (3.0 * pi / 4.0 - 0.02) * b;
            return {rad * std::cos(th), rad * std::sin(th)};
        }
    }
    return {};
}

void validate_case(const ManufacturedCase& c) {
    std::mt19937 rng(12345);
    for (const auto& [p, n] : interface_samples(c, rng, 32)) {
        const double u1 = c.exact.value(p, Region::one);
        const double u2 = c.exact.value(p, Region::two);
        if (std::abs(u1 - u2) > 1e-10 * std::max(1.0, std::abs(u1))) {
            throw SemanticError(fmt::format("{} case: exact solution discontinuous at ({}, {}): {} vs {}",
                                            to_string(c.name), p.x, p.y, u1, u2));
        }
        const Grad g1 = c.exact.gradient(p, Region::one);
        const Grad g2 = c.exact.gradient(p, Region::two);
        const double q1 = c.eps1 * (g1[0] * n[0] + g1[1] * n[1]);
        const double q2 = c.eps2 * (g2[0] * n[0] + g2[1] * n[1]);
        if (std::abs(q1 - q2) > 1e-8 * std::max(1.0, std::abs(q1))) {
            throw SemanticError(fmt::format("{} case: flux jump at ({}, {}): {} vs {}", to_string(c.name), p.x,
                                            p.y, q1, q2));
        }
    }
    for (const auto& p : boundary_samples(c, rng, 32)) {
        const double u = c.exact.value(p, region_of(c, p));
        if (std::abs(u) > 1e-10) {
            throw SemanticError(
                fmt::format("{} case: exact solution is {} on the boundary at ({}, {})", to_string(c.name), u, p.x, p.y));
        }
    }
    const double tol = c.name == CaseName::corner ? 1e-4 : 1e-5;
    const double err = source_oracle_error(c, 50);
    if (err > tol) {
        throw SemanticError(fmt::format("{} case: source disagrees with -div(eps grad u) by {} (relative)",
                                        to_string(c.name), err));
    }
}

}  // namespace

std::string_view to_string(CaseName c) noexcept {
    switch (c) {
        case CaseName::flat: return "flat";
        case CaseName::circular: return "circular";
        case CaseName::corner: return "corner";
    }
    return "unknown";
}

CaseName parse_case(std::string_view name) {
    if (name == "flat") return CaseName::flat;
    if (name == "circular") return CaseName::circular;
    if (name == "corner") return CaseName::corner;
    throw InvalidArgument(fmt::format("unknown case '{}' (expected flat, circular or corner)", name));
}

Mesh ManufacturedCase::make_mesh(int resolution) const {
    switch (geometry) {
        case Geometry::square_split: return generate_square_split(resolution);
        case Geometry::disk_annulus: return generate_disk_annulus(resolution);
        case Geometry::corner_halfdisk: return generate_corner_halfdisk(resolution);
        case Geometry::unknown: break;
    }
    throw InvalidArgument("make_mesh: case has no geometry");
}

TransmissionProblem ManufacturedCase::problem() const {
    TransmissionProblem p;
    p.eps1 = eps1;
    p.eps2 = eps2;
    p.source = source;
    p.extension_source = extension_source;
    return p;
}

double source_oracle_error(const ManufacturedCase& c, int samples, unsigned seed) {
    std::mt19937 rng(seed);
    constexpr double d = 1e-5;
    double worst = 0.0;
    for (Region r : {Region::one, Region::two}) {
        const double eps = r == Region::one ? c.eps1 : c.eps2;
        for (int i = 0; i < samples; ++i) {
            const Point p = interior_sample(c, r, rng);
            const double dxx = (c.exact.gradient({p.x + d, p.y}, r)[0] - c.exact.gradient({p.x - d, p.y}, r)[0]) / (2 * d);
            const double dyy = (c.exact.gradient({p.x, p.y + d}, r)[1] - c.exact.gradient({p.x, p.y - d}, r)[1]) / (2 * d);
            const double fd = -eps * (dxx + dyy);
            const double f = c.source.value(p, r);
            worst = std::max(worst, std::abs(fd - f) / std::max(1.0, std::abs(f)));
        }
    }
    return worst;
}

ManufacturedCase case_flat(double kappa) {
    if (kappa == -1.0 || !std::isfinite(kappa) || kappa == 0.0) {
        throw InvalidArgument(fmt::format("case_flat: kappa must be finite and differ from 0 and -1, got {}", kappa));
    }
    ManufacturedCase c;
    c.name = CaseName::flat;
    c.kappa = kappa;
    c.eps2 = kappa;
    c.geometry = Geometry::square_split;
    c.extension_source = Region::one;
    c.schedule = {0.002, 2.0, recommended_q(1.0, 1.0)};
    c.admissible_q = recommended_q(1.0, 1.0);
    c.default_base = 4;
    const double a = 1.0 / (2.0 * (kappa + 1.0));
    const double b = -(kappa + 2.0) / (2.0 * (kappa + 1.0));
    const double e1 = c.eps1;
    const double e2 = c.eps2;
    c.exact.value = [a, b](const Point& p, Region r) {
        const double s = std::sin(pi * p.y);
        return r == Region::one ? (p.x * p.x + b * p.x) * s : a * (p.x - 1.0) * s;
    };
    c.exact.gradient = [a, b](const Point& p, Region r) -> Grad {
        const double s = std::sin(pi * p.y);
        const double co = pi * std::cos(pi * p.y);
        if (r == Region::one) return {(2.0 * p.x + b) * s, (p.x * p.x + b * p.x) * co};
        return {a * s, a * (p.x - 1.0) * co};
    };
    c.source.value = [a, b, e1, e2](const Point& p, Region r) {
        const double s = std::sin(pi * p.y);
        if (r == Region::one) return -e1 * (2.0 - pi * pi * (p.x * p.x + b * p.x)) * s;
        return e2 * pi * pi * a * (p.x - 1.0) * s;
    };
    validate_case(c);
    return c;
}

ManufacturedCase case_circular(double kappa) {
    if (!std::isfinite(kappa) || kappa == 0.0) {
        throw InvalidArgument(fmt::format("case_circular: kappa must be finite and nonzero, got {}", kappa));
    }
    if (annulus_wellposed(kappa, 1e-9).verdict != Verdict::well_posed) {
        throw IllPosedContrast(fmt::format("case_circular: kappa = {} is a forbidden contrast for the annulus", kappa));
    }
    ManufacturedCase c;
    c.name = CaseName::circular;
    c.kappa = kappa;
    c.eps2 = kappa;
    c.geometry = Geometry::disk_annulus;
    c.extension_source = Region::one;
    c.schedule = {0.002, 2.0, recommended_q(1.0, 1.0)};
    c.admissible_q = recommended_q(1.0, 1.0);
    c.default_base = 8;
    const double a = -1.0 / kappa;
    const double b = a - 1.0;
    const double e1 = c.eps1;
    const double e2 = c.eps2;
    c.exact.value = [a, b](const Point& p, Region r) {
        const double rad = std::hypot(p.x, p.y);
        return r == Region::one ? rad * rad + b : a * (rad - 2.0) * (rad - 2.0);
    };
    c.exact.gradient = [a](const Point& p, Region r) -> Grad {
        if (r == Region::one) return {2.0 * p.x, 2.0 * p.y};
        const double rad = std::hypot(p.x, p.y);
        const double f = 2.0 * a * (rad - 2.0) / rad;
        return {f * p.x, f * p.y};
    };
    c.source.value = [a, e1, e2](const Point& p, Region r) {
        if (r == Region::one) return -4.0 * e1;
        return -4.0 * a * e2 * (1.0 - 1.0 / std::hypot(p.x, p.y));
    };
    validate_case(c);
    return c;
}

ManufacturedCase case_corner(double kappa) {
    if (!std::isfinite(kappa) || kappa == 0.0) {
        throw InvalidArgument(fmt::format("case_corner: kappa must be finite and nonzero, got {}", kappa));
    }
    const auto verdict = corner_wellposed(kappa);
    if (verdict.verdict != Verdict::well_posed) {
        throw IllPosedContrast(fmt::format("case_corner: kappa = {} lies in the critical interval [-3, -1]", kappa));
    }
    if (kappa > 0.0) {
        throw InvalidArgument(fmt::format("case_corner: kappa must be negative for a sign-changing problem, got {}", kappa));
    }
    const double lam = corner_lambda0(kappa);
    ManufacturedCase c;
    c.name = CaseName::corner;
    c.kappa = kappa;
    c.eps2 = kappa;
    c.lambda0 = lam;
    c.geometry = Geometry::corner_halfdisk;
    c.extension_source = Region::two;
    c.admissible_q = recommended_q(lam, 1.0);
    double q = 0.5 * c.admissible_q.upper;
    if (std::abs(kappa + 5.0) < 1e-12) q = 1.3;
    if (std::abs(kappa + 3.1) < 1e-12) q = 0.4;
    c.schedule = {1.0, q, c.admissible_q};
    c.default_base = 20;

    const double s1 = std::sin(lam * pi / 4.0);
    const double s2 = std::sin(3.0 * lam * pi / 4.0);
    // Angular factor and its derivative per region.
    const auto angular = [lam, s1, s2](double th, Region r) -> Grad {
        if (r == Region::one) return {std::sin(lam * th) / s1, lam * std::cos(lam * th) / s1};
        return {std::sin(lam * (pi - th)) / s2, -lam * std::cos(lam * (pi - th)) / s2};
    };
    c.exact.value = [lam, angular](const Point& p, Region r) {
        const double rad = std::hypot(p.x, p.y);
        return (1.0 - rad) * std::pow(rad, lam) * angular(theta_of(p), r)[0];
    };
    c.exact.gradient = [lam, angular](const Point& p, Region r) -> Grad {
        const double rad = std::hypot(p.x, p.y);
        const double th = theta_of(p);
        const Grad t = angular(th, r);
        const double rl = std::pow(rad, lam);
        const double dr = (-rl + (1.0 - rad) * lam * rl / rad) * t[0];
        const double dth_over_r = (1.0 - rad) * rl / rad * t[1];
        const double ct = p.x / rad;
        const double st = p.y / rad;
        return {dr * ct - dth_over_r * st, dr * st + dth_over_r * ct};
    };
    const double e1 = c.eps1;
    const double e2 = c.eps2;
    c.source.value = [lam, angular, e1, e2](const Point& p, Region r) {
        const double rad = std::hypot(p.x, p.y);
        const double eps = r == Region::one ? e1 : e2;
        return eps * (2.0 * lam + 1.0) * std::pow(rad, lam - 1.0) * angular(theta_of(p), r)[0];
    };
    validate_case(c);
    return c;
}

ManufacturedCase make_case(CaseName name, double kappa) {
    switch (name) {
        case CaseName::flat: return case_flat(kappa);
        case CaseName::circular: return case_circular(kappa);
        case CaseName::corner: return case_corner(kappa);
    }
    throw InvalidArgument("make_case: unknown case");
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.size() < 3) {
        throw InvalidArgument(fmt::format("fit_rate: need >= 3 points, got {}", pairs.size()));
    }
    double sx = 0.0;
    double sy = 0.0;
    for (const auto& [h, e] : pairs) {
        if (!(h > 0.0) || !(e > 0.0) || !std::isfinite(h) || !std::isfinite(e)) {
            throw InvalidArgument(fmt::format("fit_rate: h and error must be positive, got ({}, {})", h, e));
        }
        sx += std::log(h);
        sy += std::log(e);
    }
    const double n = static_cast<double>(pairs.size());
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& [h, e] : pairs) {
        const double dx = std::log(h) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(e) - my);
    }
    if (sxx == 0.0) {
        throw InvalidArgument("fit_rate: all h values are equal");
    }
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (const auto& [h, e] : pairs) {
        fit.max_residual = std::max(fit.max_residual, std::abs(std::log(e) - fit.intercept - fit.slope * std::log(h)));
    }
    return fit;
}

std::string ConvergenceReport::to_csv() const {
    std::string out = "level,h,N,lambda,iters,cost,misfit,relL2,relH1\n";
    for (const auto& l : levels) {
        out += fmt::format("{},{:.10g},{},{:.10g},{},{:.10g},{:.10g},{:.10g},{:.10g}\n", l.level, l.h, l.vertices,
                           l.lambda, l.iterations, l.cost, l.misfit, l.rel_l2, l.rel_h1);
    }
    out += fmt::format("# rates L2={:.6f} H1={:.6f} residual_L2={:.3g} residual_H1={:.3g}\n", rate_l2.slope,
                       rate_h1.slope, rate_l2.max_residual, rate_h1.max_residual);
    return out;
}

Control prolong_control(const DiscreteOperators& from, const Control& w, const DiscreteOperators& to) {
    if (w.size() != from.control_size()) {
        throw InvalidArgument("prolong_control: control length does not match its space");
    }
    const Mesh& cm = *from.mesh;
    const Region reg = from.control_region;
    if (to.control_region != reg) {
        throw InvalidArgument("prolong_control: control regions differ");
    }
    const FeFunction coarse{from.control, w};

    std::vector<std::size_t> tris;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (std::size_t t = 0; t < cm.triangle_count(); ++t) {
        if (cm.triangles()[t].region != reg) continue;
        tris.push_back(t);
        for (auto v : cm.triangles()[t].v) {
            xmin = std::min(xmin, cm.vertices()[v].x);
            xmax = std::max(xmax, cm.vertices()[v].x);
            ymin = std::min(ymin, cm.vertices()[v].y);
            ymax = std::max(ymax, cm.vertices()[v].y);
        }
    }
    const double cell = std::max(cm.meshsize(), 1e-12);
    const auto nx = static_cast<std::size_t>((xmax - xmin) / cell) + 1;
    const auto ny = static_cast<std::size_t>((ymax - ymin) / cell) + 1;
    const auto cell_of = [&](double x, double lo, std::size_t n) {
        const double k = std::floor((x - lo) / cell);
        return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(n - 1)));
    };
    std::vector<std::vector<std::size_t>> buckets(nx * ny);
    for (auto t : tris) {
        const auto& v = cm.triangles()[t].v;
        double tx0 = 1e300, tx1 = -1e300, ty0 = 1e300, ty1 = -1e300;
        for (auto i : v) {
            tx0 = std::min(tx0, cm.vertices()[i].x);
            tx1 = std::max(tx1, cm.vertices()[i].x);
            ty0 = std::min(ty0, cm.vertices()[i].y);
            ty1 = std::max(ty1, cm.vertices()[i].y);
        }
        for (auto i = cell_of(tx0, xmin, nx); i <= cell_of(tx1, xmin, nx); ++i) {
            for (auto j = cell_of(ty0, ymin, ny); j <= cell_of(ty1, ymin, ny); ++j) buckets[j * nx + i].push_back(t);
        }
    }

    const auto barycentric = [&cm](std::size_t t, const Point& p) {
        const auto& v = cm.triangles()[t].v;
        const Point& a = cm.vertices()[v[0]];
        const Point& b = cm.vertices()[v[1]];
        const Point& c = cm.vertices()[v[2]];
        const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
        const double l1 = ((p.x - a.x) * (c.y - a.y) - (c.x - a.x) * (p.y - a.y)) / det;
        const double l2 = ((b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y)) / det;
        return std::array<double, 3>{1.0 - l1 - l2, l1, l2};
    };

    Control out(to.control_size(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Point& p = to.mesh->vertices()[to.control->vertex(i)];
        const auto ci = cell_of(p.x, xmin, nx);
        const auto cj = cell_of(p.y, ymin, ny);
        std::size_t best = tris.front();
        double best_score = -1e300;
        for (std::size_t di = 0; di < 3; ++di) {
            for (std::size_t dj = 0; dj < 3; ++dj) {
                if (ci + di < 1 || cj + dj < 1 || ci + di - 1 >= nx || cj + dj - 1 >= ny) continue;
                for (auto t : buckets[(cj + dj - 1) * nx + (ci + di - 1)]) {
                    const auto l = barycentric(t, p);
                    const double score = std::min({l[0], l[1], l[2]});
                    if (score > best_score) {
                        best_score = score;
                        best = t;
                    }
                }
            }
        }
        auto l = barycentric(best, p);
        double sum = 0.0;
        for (double& x : l) {
            x = std::max(x, 0.0);
            sum += x;
        }
        double value = 0.0;
        for (std::size_t k = 0; k < 3; ++k) {
            value += l[k] / sum * coarse.value_at_vertex(cm.triangles()[best].v[k]);
        }
        out[i] = value;
    }
    return out;
}

ConvergenceReport run_convergence(const ManufacturedCase& c, int levels, int base_resolution,
                                  const OptimizerOptions& opts) {
    if (levels < 3) {
        throw InvalidArgument(fmt::format("run_convergence: need >= 3 levels, got {}", levels));
    }
    const int base = base_resolution > 0 ? base_resolution : c.default_base;
    const auto problem = c.problem();
    ConvergenceReport report;
    std::optional<DiscreteOperators> prev_ops;
    Control prev_w;
    for (int level = 0; level < levels; ++level) {
        try {
            auto mesh = std::make_shared<const Mesh>(c.make_mesh(base << level));
            DiscreteOperators ops = prepare(problem, mesh);
            const double lambda = lambda_of(c.schedule, ops.h);
            Control w0 = prev_ops ? prolong_control(*prev_ops, prev_w, ops) : Control(ops.control_size(), 0.0);
            auto result = minimize(ops, lambda, w0, opts);
            const auto err = composite_errors(ops, result.state, c.exact, degree7_rule());
            const auto& last = result.history.records.back();
            report.levels.push_back({level, ops.h, mesh->vertex_count(), lambda, result.history.iterations(), last.cost,
                                     last.misfit, err.relative_l2, err.relative_h1, result.history.reason});
            prev_w = std::move(result.w);
            prev_ops = std::move(ops);
        } catch (const Error& e) {
            throw Error(fmt::format("level {}: {}", level, e.what()));
        }
    }
    std::vector<std::pair<double, double>> l2;
    std::vector<std::pair<double, double>> h1;
    for (const auto& l : report.levels) {
        l2.emplace_back(l.h, l.rel_l2);
        h1.emplace_back(l.h, l.rel_h1);
    }
    report.rate_l2 = fit_rate(l2);
    report.rate_h1 = fit_rate(h1);
    return report;
}

}  // namespace smoothext
