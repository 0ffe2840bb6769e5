#include "support.hpp"

#include <smoothext/analysis.hpp>
#include <smoothext/bench.hpp>
#include <smoothext/error.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

using namespace smoothext;
using namespace smoothext::testing;

namespace {

using std::numbers::pi;

// -div(eps grad u) by second-order central differences of the exact value, a separate
// oracle from the constructor check, which differentiates the exact gradient.
double fd_source(const ManufacturedCase& c, const Point& p, Region r) {
    const double d = 1e-4;
    const double eps = r == Region::one ? c.eps1 : c.eps2;
    auto u = [&](double x, double y) { return c.exact.value({x, y}, r); };
    const double lap = (u(p.x + d, p.y) + u(p.x - d, p.y) + u(p.x, p.y + d) + u(p.x, p.y - d) - 4.0 * u(p.x, p.y)) / (d * d);
    return -eps * lap;
}

// Worst relative mismatch of the source against fd_source at points drawn away from the
// interface and the corner.
double source_mismatch(const ManufacturedCase& c, const std::function<Point(std::mt19937&, Region)>& draw) {
    std::mt19937 rng(5);
    double worst = 0.0;
    for (Region r : {Region::one, Region::two}) {
        for (int i = 0; i < 50; ++i) {
            const Point p = draw(rng, r);
            const double f = c.source.value(p, r);
            worst = std::max(worst, std::abs(fd_source(c, p, r) - f) / std::max(1.0, std::abs(f)));
        }
    }
    return worst;
}

}  // namespace

TEST(Flat, PrintedCoefficients) {
    const auto c = case_flat(-1.001);
    const Point left{0.5, 0.5};
    // a = -500, b = 499.5: the exact solution at the interface is (1/4 + b/2) = -a/2 = 250.
    EXPECT_NEAR(c.exact.value(left, Region::one), 250.0, 1e-9);
    EXPECT_NEAR(c.exact.value(left, Region::two), 250.0, 1e-9);
    EXPECT_NEAR(c.exact.value({0.75, 0.5}, Region::two), -500.0 * -0.25, 1e-9);
    EXPECT_EQ(c.schedule.C, 0.002);
    EXPECT_EQ(c.schedule.q, 2.0);
    EXPECT_EQ(c.extension_source, Region::one);
    EXPECT_THROW((void)case_flat(-1.0), InvalidArgument);
}

TEST(Flat, SourceMatchesLaplacianOracle) {
    for (double kappa : {-1.001, -2.0, 3.0}) {
        const auto c = case_flat(kappa);
        const double err = source_mismatch(c, [](std::mt19937& rng, Region r) {
            std::uniform_real_distribution<double> u(0.02, 0.48);
            std::uniform_real_distribution<double> v(0.02, 0.98);
            const double x = u(rng);
            return Point{r == Region::one ? x : 1.0 - x, v(rng)};
        });
        EXPECT_LE(err, 1e-5 * std::max(1.0, std::abs(1.0 / (kappa + 1.0)))) << kappa;
        EXPECT_LE(source_oracle_error(c, 50), 1e-5) << kappa;
    }
}

TEST(Circular, CoefficientsAndFlux) {
    const auto c = case_circular(-2.0);
    const Point on{1.0, 0.0};
    EXPECT_NEAR(c.exact.value(on, Region::one), 0.5, 1e-14);
    EXPECT_NEAR(c.exact.value(on, Region::two), 0.5, 1e-14);
    const double flux1 = c.eps1 * c.exact.gradient(on, Region::one)[0];
    const double flux2 = c.eps2 * c.exact.gradient(on, Region::two)[0];
    EXPECT_NEAR(flux1, 2.0, 1e-14);
    EXPECT_NEAR(flux2, 2.0, 1e-14);
    EXPECT_NEAR(c.exact.value({0.0, 2.0}, Region::two), 0.0, 1e-14);
    EXPECT_THROW((void)case_circular(-0.6), IllPosedContrast);
    EXPECT_THROW((void)case_circular(-1.0), IllPosedContrast);
}

TEST(Circular, SourceMatchesLaplacianOracle) {
    const auto c = case_circular(-2.0);
    const double err = source_mismatch(c, [](std::mt19937& rng, Region r) {
        std::uniform_real_distribution<double> th(0.0, 2.0 * pi);
        std::uniform_real_distribution<double> rad(r == Region::one ? 0.1 : 1.05, r == Region::one ? 0.95 : 1.95);
        const double t = th(rng);
        const double q = rad(rng);
        return Point{q * std::cos(t), q * std::sin(t)};
    });
    EXPECT_LE(err, 1e-5);
}

TEST(Corner, DirichletAndContinuity) {
    const auto c = case_corner(-5.0);
    ASSERT_TRUE(c.lambda0.has_value());
    EXPECT_EQ(*c.lambda0, corner_lambda0(-5.0));
    EXPECT_EQ(c.extension_source, Region::two);
    EXPECT_EQ(c.schedule.C, 1.0);
    EXPECT_EQ(c.schedule.q, 1.3);
    EXPECT_EQ(case_corner(-3.1).schedule.q, 0.4);
    for (double t : {0.1, 0.7, 1.5, 2.5, 3.0}) {
        const Region r = t < pi / 4.0 ? Region::one : Region::two;
        EXPECT_NEAR(c.exact.value({std::cos(t), std::sin(t)}, r), 0.0, 1e-12);
    }
    for (double x : {0.2, 0.5, 0.9}) {
        EXPECT_NEAR(c.exact.value({x, 0.0}, Region::one), 0.0, 1e-12);
        EXPECT_NEAR(c.exact.value({-x, 0.0}, Region::two), 0.0, 1e-12);
        const Point s{x / std::sqrt(2.0), x / std::sqrt(2.0)};
        EXPECT_NEAR(c.exact.value(s, Region::one), c.exact.value(s, Region::two), 1e-10);
    }
    EXPECT_THROW((void)case_corner(-2.0), IllPosedContrast);
    EXPECT_THROW((void)case_corner(-3.0), IllPosedContrast);
}

TEST(Corner, SourceMatchesLaplacianOracle) {
    for (double kappa : {-5.0, -3.1}) {
        const auto c = case_corner(kappa);
        const double err = source_mismatch(c, [](std::mt19937& rng, Region r) {
            std::uniform_real_distribution<double> rad(0.05, 0.95);
            std::uniform_real_distribution<double> th(r == Region::one ? 0.05 : pi / 4.0 + 0.05,
                                                      r == Region::one ? pi / 4.0 - 0.05 : pi - 0.05);
            const double q = rad(rng);
            const double t = th(rng);
            return Point{q * std::cos(t), q * std::sin(t)};
        });
        EXPECT_LE(err, 1e-4) << kappa;
    }
}

TEST(MakeCase, ParsesNames) {
    EXPECT_EQ(parse_case("circular"), CaseName::circular);
    EXPECT_EQ(to_string(CaseName::corner), "corner");
    EXPECT_THROW((void)parse_case("square"), InvalidArgument);
    EXPECT_EQ(make_case(CaseName::flat, -2.0).geometry, Geometry::square_split);
}

TEST(FitRate, ExactPowers) {
    std::vector<std::pair<double, double>> sq;
    std::vector<std::pair<double, double>> fr;
    for (double h : {0.1, 0.05, 0.025, 0.0125}) {
        sq.emplace_back(h, h * h);
        fr.emplace_back(h, 3.0 * std::pow(h, 0.458));
    }
    EXPECT_NEAR(fit_rate(sq).slope, 2.0, 1e-12);
    EXPECT_NEAR(fit_rate(fr).slope, 0.458, 1e-12);
    EXPECT_NEAR(fit_rate(fr).intercept, std::log(3.0), 1e-12);
    EXPECT_LE(fit_rate(fr).max_residual, 1e-12);
}

TEST(FitRate, PerturbedPointMatchesClosedForm) {
    const std::vector<double> hs{0.1, 0.05, 0.025, 0.0125};
    std::vector<std::pair<double, double>> pairs;
    for (double h : hs) pairs.emplace_back(h, h * h);
    pairs[1].second *= 1.1;
    // Closed form: slope = cov(log h, log e) / var(log h).
    double mx = 0.0;
    double my = 0.0;
    for (const auto& [h, e] : pairs) {
        mx += std::log(h) / 4.0;
        my += std::log(e) / 4.0;
    }
    double sxy = 0.0;
    double sxx = 0.0;
    for (const auto& [h, e] : pairs) {
        sxy += (std::log(h) - mx) * (std::log(e) - my);
        sxx += (std::log(h) - mx) * (std::log(h) - mx);
    }
    const auto fit = fit_rate(pairs);
    EXPECT_NEAR(fit.slope, sxy / sxx, 1e-12);
    EXPECT_LE(std::abs(fit.slope - 2.0), 0.1);
    EXPECT_GT(fit.max_residual, 0.0);
}

TEST(FitRate, Errors) {
    EXPECT_THROW((void)fit_rate({{0.1, 0.01}, {0.05, 0.0025}}), InvalidArgument);
    EXPECT_THROW((void)fit_rate({{0.1, 0.01}, {0.05, 0.0}, {0.025, 1e-4}}), InvalidArgument);
    EXPECT_THROW((void)fit_rate({{-0.1, 0.01}, {0.05, 0.1}, {0.025, 1e-4}}), InvalidArgument);
}

TEST(Prolong, MatchesCoarseInterpolant) {
    const auto c = case_corner(-5.0);
    const auto coarse = prepare(c.problem(), share(c.make_mesh(3)));
    const auto fine = prepare(c.problem(), share(c.make_mesh(6)));
    const Control w = random_vector(coarse.control_size(), 31);
    const FeFunction fw{coarse.control, w};
    const Control out = prolong_control(coarse, w, fine);
    ASSERT_EQ(out.size(), fine.control_size());
    // Oracle: brute-force barycentric evaluation of the coarse function.
    const Mesh& m = *coarse.mesh;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Point& x = fine.mesh->vertices()[fine.control->vertex(i)];
        bool found = false;
        for (std::size_t t = 0; t < m.triangle_count() && !found; ++t) {
            const auto& tri = m.triangles()[t];
            if (tri.region != coarse.control_region) continue;
            const Point a = m.vertices()[tri.v[0]];
            const Point b = m.vertices()[tri.v[1]];
            const Point d = m.vertices()[tri.v[2]];
            const double det = (b.x - a.x) * (d.y - a.y) - (d.x - a.x) * (b.y - a.y);
            const double l1 = ((x.x - a.x) * (d.y - a.y) - (d.x - a.x) * (x.y - a.y)) / det;
            const double l2 = ((b.x - a.x) * (x.y - a.y) - (x.x - a.x) * (b.y - a.y)) / det;
            const double l0 = 1.0 - l1 - l2;
            if (l0 < -1e-12 || l1 < -1e-12 || l2 < -1e-12) continue;
            const double expected = l0 * fw.value_at_vertex(tri.v[0]) + l1 * fw.value_at_vertex(tri.v[1]) +
                                    l2 * fw.value_at_vertex(tri.v[2]);
            EXPECT_NEAR(out[i], expected, 1e-10) << x.x << ' ' << x.y;
            found = true;
        }
        EXPECT_TRUE(found) << x.x << ' ' << x.y;
    }
}

TEST(Convergence, NeedsThreeLevels) {
    EXPECT_THROW((void)run_convergence(case_flat(-2.0), 2), InvalidArgument);
}

TEST(Convergence, FlatAndCircularErrorsShrinkAndMisfitDecreases) {
    for (const CaseName name : {CaseName::flat, CaseName::circular}) {
        const auto report = run_convergence(make_case(name, -2.0), 3, 4);
        ASSERT_EQ(report.levels.size(), 3U);
        for (std::size_t i = 1; i < report.levels.size(); ++i) {
            const auto& a = report.levels[i - 1];
            const auto& b = report.levels[i];
            EXPECT_LT(b.h, a.h);
            EXPECT_GT(b.vertices, a.vertices);
            EXPECT_LT(b.misfit, a.misfit) << to_string(name);
            EXPECT_GE(a.rel_l2 / b.rel_l2, 3.0) << to_string(name) << " level " << i;
        }
        EXPECT_GT(report.rate_l2.slope, std::log2(3.0));
    }
}

TEST(Convergence, CornerMisfitDecreases) {
    const auto report = run_convergence(case_corner(-5.0), 3, 4);
    for (std::size_t i = 1; i < report.levels.size(); ++i) {
        EXPECT_LT(report.levels[i].misfit, report.levels[i - 1].misfit);
        EXPECT_LT(report.levels[i].rel_h1, report.levels[i - 1].rel_h1);
    }
}

TEST(Convergence, CsvLayout) {
    const auto report = run_convergence(case_flat(-2.0), 3, 2);
    std::istringstream in(report.to_csv());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "level,h,N,lambda,iters,cost,misfit,relL2,relH1");
    int rows = 0;
    std::string last;
    while (std::getline(in, line)) {
        if (line.rfind("# rates", 0) == 0) {
            last = line;
            continue;
        }
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 8);
        ++rows;
    }
    EXPECT_EQ(rows, 3);
    EXPECT_NE(last.find("L2="), std::string::npos);
    EXPECT_NE(last.find("H1="), std::string::npos);
}

TEST(Convergence, Deterministic) {
    const auto a = run_convergence(case_circular(-2.0), 3, 2);
    const auto b = run_convergence(case_circular(-2.0), 3, 2);
    EXPECT_EQ(a.to_csv(), b.to_csv());
}
