#include "support.hpp"

#include <smoothext/bench.hpp>
#include <smoothext/error.hpp>
#include <smoothext/transmission.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace smoothext;
using namespace smoothext::testing;

namespace {

using std::numbers::pi;

DiscreteOperators flat_ops(double kappa, int n) {
    return prepare(case_flat(kappa).problem(), share(generate_square_split(n)));
}

double max_abs(const Vector& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double full_cost(const DiscreteOperators& ops, const Control& w, double lambda) {
    return cost(ops, solve_state(ops, w), w, lambda);
}

Vector full_gradient(const DiscreteOperators& ops, const Control& w, double lambda) {
    const auto s = solve_state(ops, w);
    return gradient(ops, w, s, solve_adjoint(ops, s), lambda);
}

}  // namespace

TEST(Prepare, FlatProblemFactorizesThreeOperators) {
    const auto ops = flat_ops(-2.0, 4);
    EXPECT_EQ(ops.extended_factor.dimension(), ops.global->unknown_count());
    EXPECT_EQ(ops.control_factor.dimension(), ops.control_size());
    EXPECT_EQ(ops.metric_factor.dimension(), ops.control_size());
    EXPECT_GT(ops.control_size(), 0U);
    EXPECT_EQ(ops.trace.size(), 9U);
}

TEST(Prepare, RejectsPositiveEps2) {
    auto p = case_flat(-2.0).problem();
    p.eps2 = 1.0;
    EXPECT_THROW((void)prepare(p, share(generate_square_split(2))), InvalidArgument);
}

TEST(Prepare, ControlRegionMustTouchBoundary) {
    auto p = case_circular(-2.0).problem();
    p.extension_source = Region::two;
    EXPECT_THROW((void)prepare(p, share(generate_disk_annulus(2))), SemanticError);
}

TEST(Prepare, RejectsNonConformingMesh) {
    const Mesh m = generate_square_split(2);
    auto tris = m.triangles();
    for (auto& t : tris) {
        if (t.region == Region::two) {
            t.region = Region::one;
            break;
        }
    }
    const auto bad = share(Mesh(m.vertices(), tris, m.boundary_edges(), Geometry::square_split));
    EXPECT_THROW((void)prepare(case_flat(-2.0).problem(), bad), SemanticError);
}

TEST(Prepare, CornerIsCanonicalized) {
    const auto c = case_corner(-5.0);
    const auto ops = prepare(c.problem(), share(c.make_mesh(3)));
    EXPECT_EQ(ops.source_region, Region::two);
    EXPECT_EQ(ops.control_region, Region::one);
    EXPECT_GT(ops.a_source, 0.0);
    EXPECT_LT(ops.a_control, 0.0);
    EXPECT_GT(ops.extension, 0.0);
}

TEST(SolveState, ZeroDataGivesZeroState) {
    auto p = case_flat(-2.0).problem();
    p.source = zero_field();
    const auto ops = prepare(p, share(generate_square_split(3)));
    const auto s = solve_state(ops, Control(ops.control_size(), 0.0));
    for (double v : s.u.coefficients) EXPECT_EQ(v, 0.0);
    for (double v : s.u2.coefficients) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(flux_balance_residual(ops, s), 0.0);
    EXPECT_THROW((void)solve_state(ops, Control(ops.control_size() + 1, 0.0)), InvalidArgument);
}

TEST(SolveState, ProjectedDiscreteControlGivesSameState) {
    const auto ops = flat_ops(-2.0, 3);
    const Control w = random_vector(ops.control_size(), 21);
    // Piecewise linear field of w located per triangle of the control region.
    std::vector<double> nodal(ops.mesh->vertex_count(), 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) nodal[ops.control->vertex(i)] = w[i];
    const auto mesh = ops.mesh;
    const auto control_region = ops.control_region;
    auto grad_in = [mesh, nodal, control_region](const Point& x) {
        for (std::size_t t = 0; t < mesh->triangle_count(); ++t) {
            if (mesh->triangles()[t].region != control_region) continue;
            const auto& tri = mesh->triangles()[t];
            const Point a = mesh->vertices()[tri.v[0]];
            const Point b = mesh->vertices()[tri.v[1]];
            const Point c = mesh->vertices()[tri.v[2]];
            const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
            const double l1 = ((x.x - a.x) * (c.y - a.y) - (c.x - a.x) * (x.y - a.y)) / det;
            const double l2 = ((b.x - a.x) * (x.y - a.y) - (x.x - a.x) * (b.y - a.y)) / det;
            if (l1 < -1e-12 || l2 < -1e-12 || l1 + l2 > 1 + 1e-12) continue;
            const double u0 = nodal[tri.v[0]];
            const double u1 = nodal[tri.v[1]];
            const double u2 = nodal[tri.v[2]];
            return std::array<double, 2>{((u1 - u0) * (c.y - a.y) - (u2 - u0) * (b.y - a.y)) / det,
                                         ((u2 - u0) * (b.x - a.x) - (u1 - u0) * (c.x - a.x)) / det};
        }
        return std::array<double, 2>{0.0, 0.0};
    };
    const AnalyticField field{[](const Point&, Region) { return 0.0; },
                              [grad_in](const Point& x, Region) { return grad_in(x); }};
    const auto projected = project_control(field, ops.control, ops.extension, ops.metric_factor);
    EXPECT_LE(rel_diff(projected.coefficients, w), 1e-12);
    const auto s1 = solve_state(ops, w);
    const auto s2 = solve_state(ops, projected.coefficients);
    EXPECT_LE(rel_diff(s2.u.coefficients, s1.u.coefficients), 1e-12);
    EXPECT_LE(rel_diff(s2.u2.coefficients, s1.u2.coefficients), 1e-12);
}

TEST(SolveState, TargetControlMismatchDecays) {
    const double kappa = -2.0;
    const auto c = case_flat(kappa);
    std::vector<double> misfits;
    for (int n : {4, 8}) {
        const auto ops = prepare(c.problem(), share(c.make_mesh(n)));
        const auto w = project_control(flat_target_control(kappa), ops.control, ops.extension, ops.metric_factor);
        misfits.push_back(misfit(ops, solve_state(ops, w.coefficients)));
    }
    // Envelope h^(2p' + sigma) with p' = sigma = 1: factor 8 per halving, at least half of it.
    EXPECT_GE(misfits[0] / misfits[1], std::pow(2.0, 3.0) / 2.0);
}

TEST(SolveState, LinearSystemResiduals) {
    const auto ops = flat_ops(-2.0, 4);
    const Control w = random_vector(ops.control_size(), 3);
    const auto s = solve_state(ops, w);
    Vector rhs = ops.source_load;
    axpy(1.0, ops.restriction.apply_transpose(matvec(ops.control_metric, w)), rhs);
    EXPECT_LE(rel_diff(matvec(ops.extended_stiffness, s.u.coefficients), rhs), 1e-10);
}

TEST(Misfit, UnitTraceDifferenceIsHalfInterfaceLength) {
    const auto ops = flat_ops(-2.0, 4);
    StatePair s{{ops.global, Vector(ops.global->unknown_count(), 0.0)}, {ops.control, Vector(ops.control_size(), 0.0)}};
    EXPECT_EQ(misfit(ops, s), 0.0);
    for (auto v : ops.trace.vertices) {
        const auto d = ops.control->dof(v);
        if (d != FunctionSpace::npos) s.u2.coefficients[d] = 1.0;
    }
    // The two interface end points lie on the outer boundary, where both fields vanish.
    for (auto v : ops.trace.vertices) {
        const auto d = ops.global->dof(v);
        if (d != FunctionSpace::npos) s.u.coefficients[d] = 0.0;
    }
    Vector full_d = trace_difference(ops, s);
    std::size_t ones = 0;
    for (double x : full_d) ones += x == 1.0 ? 1 : 0;
    EXPECT_EQ(ones, ops.trace.size() - 2);
    // Oracle: interior nodal value 1 with zero end points, integrated exactly edge by edge.
    const double h = 1.0 / 8.0;
    EXPECT_NEAR(misfit(ops, s), 0.5 * (1.0 - 2.0 * h + 2.0 * h / 3.0), 1e-12);
}

TEST(Misfit, ConstantOneOnUnitInterface) {
    const Mesh m = generate_square_split(4);
    const auto tr = build_interface_trace(m);
    const auto mass = assemble_interface_mass(m, tr);
    const Vector d(tr.size(), 1.0);
    EXPECT_NEAR(0.5 * dot(d, matvec(mass, d)), 0.5, 1e-12);
}

TEST(Misfit, NonnegativeForRandomControls) {
    const auto ops = flat_ops(-2.0, 3);
    for (unsigned s = 0; s < 100; ++s) {
        EXPECT_GE(misfit(ops, solve_state(ops, random_vector(ops.control_size(), 1000 + s))), 0.0);
    }
}

TEST(Cost, BasicProperties) {
    const auto ops = flat_ops(-2.0, 3);
    const Control zero(ops.control_size(), 0.0);
    const auto s0 = solve_state(ops, zero);
    EXPECT_EQ(cost(ops, s0, zero, 0.1), misfit(ops, s0));
    EXPECT_THROW((void)cost(ops, s0, zero, 0.0), InvalidArgument);
    EXPECT_THROW((void)cost(ops, s0, zero, -1.0), InvalidArgument);

    const Control w = random_vector(ops.control_size(), 4);
    const auto s = solve_state(ops, w);
    const double n = control_norm(ops, w);
    EXPECT_NEAR(cost(ops, s, w, 0.2) - cost(ops, s, w, 0.1), 0.1 * n * n, 1e-12 * cost(ops, s, w, 0.2));

    const Control w1 = random_vector(ops.control_size(), 5);
    const Control w2 = random_vector(ops.control_size(), 6);
    const double lambda = 0.01;
    const double mid = full_cost(ops, combine(0.5, w1, 0.5, w2), lambda);
    EXPECT_LT(mid, 0.5 * (full_cost(ops, w1, lambda) + full_cost(ops, w2, lambda)));
}

TEST(Adjoint, ZeroMismatchGivesZeroAdjoint) {
    const auto ops = flat_ops(-2.0, 3);
    const StatePair s{{ops.global, Vector(ops.global->unknown_count(), 0.0)}, {ops.control, Vector(ops.control_size(), 0.0)}};
    const auto a = solve_adjoint(ops, s);
    for (double v : a.g.coefficients) EXPECT_EQ(v, 0.0);
    for (double v : a.g2.coefficients) EXPECT_EQ(v, 0.0);
}

TEST(Adjoint, SystemResiduals) {
    const auto ops = flat_ops(-2.0, 4);
    const auto s = solve_state(ops, random_vector(ops.control_size(), 7));
    const auto a = solve_adjoint(ops, s);
    const Vector r = matvec(ops.interface_mass, trace_difference(ops, s));
    const Vector rhs2 = ops.control_trace.apply_transpose(r);
    EXPECT_LE(rel_diff(matvec(ops.control_stiffness, a.g2.coefficients), rhs2), 1e-10);
    Vector rhs = ops.restriction.apply_transpose(matvec(ops.control_metric, a.g2.coefficients));
    axpy(1.0, ops.global_trace.apply_transpose(r), rhs);
    EXPECT_LE(rel_diff(matvec(ops.extended_stiffness, a.g.coefficients), rhs), 1e-10);
}

TEST(Adjoint, LinearInTheState) {
    const auto ops = flat_ops(-2.0, 3);
    const Control wa = random_vector(ops.control_size(), 8);
    const Control wb = random_vector(ops.control_size(), 9);
    const auto aa = solve_adjoint(ops, solve_linearized_state(ops, wa));
    const auto ab = solve_adjoint(ops, solve_linearized_state(ops, wb));
    const auto sum = solve_adjoint(ops, solve_linearized_state(ops, combine(1.0, wa, 1.0, wb)));
    EXPECT_LE(rel_diff(sum.g.coefficients, combine(1.0, aa.g.coefficients, 1.0, ab.g.coefficients)), 1e-12);
    EXPECT_LE(rel_diff(sum.g2.coefficients, combine(1.0, aa.g2.coefficients, 1.0, ab.g2.coefficients)), 1e-12);
}

TEST(Gradient, MatchesCentralDifferences) {
    for (const double kappa : {-2.0, -0.5}) {
        const auto ops = flat_ops(kappa, 2);
        const double lambda = 0.01;
        const Control w = random_vector(ops.control_size(), 10);
        const Vector g = full_gradient(ops, w, lambda);
        const double step = 1e-5 * (1.0 + norm(w));
        std::mt19937 rng(11);
        std::uniform_int_distribution<std::size_t> pick(0, ops.control_size() - 1);
        for (int k = 0; k < 10; ++k) {
            const std::size_t i = pick(rng);
            Control wp = w;
            Control wm = w;
            wp[i] += step;
            wm[i] -= step;
            const double fd = (full_cost(ops, wp, lambda) - full_cost(ops, wm, lambda)) / (2.0 * step);
            EXPECT_LE(std::abs(fd - g[i]), 1e-6 * std::max(std::abs(g[i]), max_abs(g))) << kappa << ' ' << i;
        }
    }
}

TEST(Gradient, CornerOrientationMatchesCentralDifferences) {
    const auto c = case_corner(-5.0);
    const auto ops = prepare(c.problem(), share(c.make_mesh(2)));
    const double lambda = 0.05;
    const Control w = random_vector(ops.control_size(), 12);
    const Vector g = full_gradient(ops, w, lambda);
    const Vector v = random_vector(ops.control_size(), 13);
    const double step = 1e-5 * (1.0 + norm(w));
    const double fd =
        (full_cost(ops, combine(1.0, w, step, v), lambda) - full_cost(ops, combine(1.0, w, -step, v), lambda)) /
        (2.0 * step);
    EXPECT_NEAR(fd, dot(g, v), 1e-6 * norm(g) * norm(v));
}

TEST(Gradient, RegularizationTerm) {
    const auto ops = flat_ops(-2.0, 3);
    const Control w = random_vector(ops.control_size(), 14);
    const double lambda = 0.3;
    const Vector diff = combine(1.0, full_gradient(ops, w, lambda), -1.0, full_gradient(ops, w, 0.0));
    const Vector expected = combine(2.0 * lambda, matvec(ops.control_metric, w), 0.0, w);
    EXPECT_LE(rel_diff(diff, expected), 1e-12);
    const auto s = solve_state(ops, w);
    EXPECT_THROW((void)gradient(ops, w, s, solve_adjoint(ops, s), -1.0), InvalidArgument);
}

TEST(Hessvec, PositiveSymmetricAndMatchesGradientDifferences) {
    const auto ops = flat_ops(-2.0, 3);
    const double lambda = 0.02;
    const Vector u = random_vector(ops.control_size(), 15);
    const Vector v = random_vector(ops.control_size(), 16);
    const Vector hv = hessvec(ops, v, lambda);
    const Vector hu = hessvec(ops, u, lambda);
    const double nv = control_norm(ops, v);
    EXPECT_GE(dot(hv, v), 2.0 * lambda * nv * nv * (1.0 - 1e-12));
    EXPECT_NEAR(dot(hv, u), dot(hu, v), 1e-10 * std::max(1.0, std::abs(dot(hv, u))));

    const Control w = random_vector(ops.control_size(), 17);
    const double t = 1e-4;
    const Vector fd = combine(0.5 / t, full_gradient(ops, combine(1.0, w, t, v), lambda), -0.5 / t,
                              full_gradient(ops, combine(1.0, w, -t, v), lambda));
    EXPECT_LE(rel_diff(fd, hv), 1e-5);
}

TEST(FluxBalance, VanishesForAnyControl) {
    for (const CaseName name : {CaseName::flat, CaseName::circular, CaseName::corner}) {
        const auto c = make_case(name, name == CaseName::corner ? -5.0 : -2.0);
        const auto ops = prepare(c.problem(), share(c.make_mesh(3)));
        for (unsigned seed : {18U, 19U}) {
            const auto s = solve_state(ops, random_vector(ops.control_size(), seed));
            EXPECT_LE(flux_balance_residual(ops, s), 1e-10) << to_string(name);
        }
        EXPECT_LE(flux_balance_residual(ops, solve_state(ops, Control(ops.control_size(), 0.0))), 1e-10);
    }
}

TEST(FluxBalance, DetectsBrokenState) {
    const auto ops = flat_ops(-2.0, 3);
    auto s = solve_state(ops, random_vector(ops.control_size(), 20));
    s.u2.coefficients[0] += 1.0;
    EXPECT_GT(flux_balance_residual(ops, s), 1e-3);
}

TEST(ControlNorm, Basics) {
    const auto ops = flat_ops(-2.0, 3);
    EXPECT_EQ(control_norm(ops, Control(ops.control_size(), 0.0)), 0.0);
    const Control w = random_vector(ops.control_size(), 22);
    EXPECT_NEAR(control_norm(ops, combine(2.0, w, 0.0, w)), 2.0 * control_norm(ops, w), 1e-14 * control_norm(ops, w));
    Control hat(ops.control_size(), 0.0);
    hat[0] = 1.0;
    EXPECT_NEAR(control_norm(ops, hat), std::sqrt(ops.control_metric.entry(0, 0)), 1e-15);
}

TEST(ControlNorm, HatOnRightTrianglePatch) {
    // Interior vertex of the structured square split: diagonal stiffness entry 4 for unit coefficient.
    const auto ops = flat_ops(-2.0, 2);
    std::size_t interior = FunctionSpace::npos;
    for (std::size_t i = 0; i < ops.control_size(); ++i) {
        const Point& p = ops.mesh->vertices()[ops.control->vertex(i)];
        if (std::abs(p.x - 0.75) < 1e-12 && std::abs(p.y - 0.5) < 1e-12) interior = i;
    }
    ASSERT_NE(interior, FunctionSpace::npos);
    Control hat(ops.control_size(), 0.0);
    hat[interior] = 1.0;
    EXPECT_NEAR(control_norm(ops, hat), std::sqrt(4.0 * ops.extension), 1e-14);
}

TEST(Composite, ExactSolutionErrorsSmallOnFineMesh) {
    const auto c = case_flat(-2.0);
    const auto ops = prepare(c.problem(), share(c.make_mesh(8)));
    const auto w = project_control(flat_target_control(-2.0), ops.control, ops.extension, ops.metric_factor);
    const auto e = composite_errors(ops, solve_state(ops, w.coefficients), c.exact);
    // Reference: nodal interpolant of the exact solution on each region.
    auto s1 = std::make_shared<const FunctionSpace>(build_space(ops.mesh, Domain::region1));
    auto s2 = std::make_shared<const FunctionSpace>(build_space(ops.mesh, Domain::region2));
    const auto ref = error_norms(interpolate(s1, c.exact), interpolate(s2, c.exact), c.exact);
    EXPECT_LT(e.relative_l2, 0.02);
    EXPECT_LT(e.relative_h1, 1.5 * ref.relative_h1);
}

TEST(Composite, WriteSolutionOneLinePerVertex) {
    const auto ops = flat_ops(-2.0, 2);
    std::ostringstream out;
    write_solution(out, ops, solve_state(ops, Control(ops.control_size(), 0.0)));
    std::istringstream in(out.str());
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) {
        double x = 0;
        double y = 0;
        double v = 0;
        std::istringstream ls(line);
        EXPECT_TRUE(static_cast<bool>(ls >> x >> y >> v));
        ++lines;
    }
    EXPECT_EQ(lines, ops.mesh->vertex_count());
}
