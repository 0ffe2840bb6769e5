#include "smoothext/transmission.hpp"

#include "smoothext/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace smoothext {

namespace {

void check_length(std::size_t got, std::size_t expected, const char* what) {
    if (got != expected) {
        throw InvalidArgument(fmt::format("{}: length {} does not match the space dimension {}", what, got, expected));
    }
}

bool region_touches_boundary(const Mesh& mesh, Region r) {
    for (const auto& be : mesh.boundary_edges()) {
        const std::size_t e = mesh.find_edge(be.v[0], be.v[1]);
        if (e == Edge::none) continue;
        const auto& edge = mesh.edges()[e];
        for (std::size_t k = 0; k < edge.triangle_count && k < 2; ++k) {
            if (mesh.triangles()[edge.tris[k]].region == r) return true;
        }
    }
    return false;
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Global field u from a right-hand side on the source part, then the control field.
StatePair state_from(const DiscreteOperators& ops, const Vector& source_load, const Vector& control_load,
                     const Control& w) {
    check_length(w.size(), ops.control_size(), "solve_state");
    const Vector mw = matvec(ops.control_metric, w);
    Vector rhs = ops.restriction.apply_transpose(mw);
    axpy(1.0, source_load, rhs);
    Vector u = ops.extended_factor.solve(rhs);

    Vector diff = ops.restriction.apply(u);
    axpy(-1.0, w, diff);
    Vector rhs2 = matvec(ops.control_metric, diff);
    axpy(1.0, control_load, rhs2);
    Vector u2 = ops.control_factor.solve(rhs2);
    for (double& x : u2) x = -x;
    return {{ops.global, std::move(u)}, {ops.control, std::move(u2)}};
}

}  // namespace

DiscreteOperators prepare(const TransmissionProblem& problem, std::shared_ptr<const Mesh> mesh) {
    if (!(problem.eps1 > 0.0)) {
        throw InvalidArgument(fmt::format("prepare: eps1 must be positive, got {}", problem.eps1));
    }
    if (!(problem.eps2 < 0.0)) {
        throw InvalidArgument(fmt::format("prepare: eps2 must be negative, got {}", problem.eps2));
    }
    if (problem.extension && !(*problem.extension > 0.0)) {
        throw InvalidArgument(fmt::format("prepare: extension coefficient must be positive, got {}", *problem.extension));
    }
    if (problem.degree != 1) {
        throw InvalidArgument(fmt::format("prepare: unsupported degree {}", problem.degree));
    }
    if (!problem.source.value) {
        throw InvalidArgument("prepare: source field is empty");
    }
    if (!mesh) {
        throw InvalidArgument("prepare: null mesh");
    }
    const auto report = validate(*mesh);
    if (!report.conforming) {
        throw SemanticError(fmt::format("prepare: mesh is not conforming ({})",
                                        report.issues.empty() ? "unknown" : report.issues.front()));
    }
    if (report.interface_edge_count == 0) {
        throw SemanticError("prepare: mesh has no interface");
    }
    const Region src = problem.extension_source;
    const Region ctl = problem.control_region();
    if (!region_touches_boundary(*mesh, ctl)) {
        throw SemanticError(fmt::format(
            "prepare: control region {} does not touch the Dirichlet boundary outside the interface", to_int(ctl)));
    }

    DiscreteOperators ops;
    ops.mesh = mesh;
    ops.source_region = src;
    ops.control_region = ctl;
    const double eps_src = src == Region::one ? problem.eps1 : problem.eps2;
    const double eps_ctl = ctl == Region::one ? problem.eps1 : problem.eps2;
    ops.sign = eps_src > 0.0 ? 1.0 : -1.0;
    ops.a_source = ops.sign * eps_src;
    ops.a_control = ops.sign * eps_ctl;
    ops.extension = problem.extension.value_or(ops.a_source);
    ops.h = mesh->meshsize();

    ops.global = std::make_shared<const FunctionSpace>(mesh, Domain::global);
    ops.control = std::make_shared<const FunctionSpace>(mesh, subdomain(ctl));
    if (ops.global->unknown_count() == 0 || ops.control->unknown_count() == 0) {
        throw SemanticError("prepare: mesh too coarse, a space has no unknowns");
    }

    const auto by_region = [src](double on_src, double on_ctl) {
        return src == Region::one ? PiecewiseConstantCoefficient(on_src, on_ctl)
                                  : PiecewiseConstantCoefficient(on_ctl, on_src);
    };
    ops.extended_stiffness = assemble_stiffness(*ops.global, by_region(ops.a_source, ops.extension));
    ops.source_stiffness = assemble_stiffness(*ops.global, by_region(ops.a_source, 1.0), only(src));
    ops.control_stiffness = assemble_stiffness(*ops.control, by_region(1.0, -ops.a_control));
    ops.control_metric = assemble_stiffness(*ops.control, by_region(1.0, ops.extension));

    ops.extended_factor = factorize_spd(ops.extended_stiffness, "extended global stiffness");
    ops.control_factor = factorize_spd(ops.control_stiffness, "control-region stiffness");
    ops.metric_factor = factorize_spd(ops.control_metric, "control metric");

    const double s = ops.sign;
    const AnalyticField scaled{[f = problem.source.value, s](const Point& p, Region r) { return s * f(p, r); }, {}};
    ops.source_load = assemble_load(*ops.global, scaled, only(src));
    ops.control_load = assemble_load(*ops.control, scaled, only(ctl));

    ops.restriction = restriction_map(*ops.global, *ops.control);
    ops.trace = build_interface_trace(*mesh);
    ops.interface_mass = assemble_interface_mass(*mesh, ops.trace);
    ops.global_trace = trace_map(*ops.global, ops.trace);
    ops.control_trace = trace_map(*ops.control, ops.trace);
    return ops;
}

StatePair solve_state(const DiscreteOperators& ops, const Control& w) {
    return state_from(ops, ops.source_load, ops.control_load, w);
}

StatePair solve_linearized_state(const DiscreteOperators& ops, const Control& w) {
    return state_from(ops, Vector(ops.global->unknown_count(), 0.0), Vector(ops.control_size(), 0.0), w);
}

Vector trace_difference(const DiscreteOperators& ops, const StatePair& state) {
    check_length(state.u.coefficients.size(), ops.global->unknown_count(), "trace_difference (u)");
    check_length(state.u2.coefficients.size(), ops.control_size(), "trace_difference (u2)");
    Vector d = ops.control_trace.apply(state.u2.coefficients);
    axpy(-1.0, ops.global_trace.apply(state.u.coefficients), d);
    return d;
}

double misfit(const DiscreteOperators& ops, const StatePair& state) {
    const Vector d = trace_difference(ops, state);
    return 0.5 * dot(d, matvec(ops.interface_mass, d));
}

double control_norm(const DiscreteOperators& ops, const Control& w) {
    check_length(w.size(), ops.control_size(), "control_norm");
    return std::sqrt(std::max(0.0, dot(w, matvec(ops.control_metric, w))));
}

double cost(const DiscreteOperators& ops, const StatePair& state, const Control& w, double lambda) {
    if (!(lambda > 0.0)) {
        throw InvalidArgument(fmt::format("cost: lambda must be positive, got {}", lambda));
    }
    const double n = control_norm(ops, w);
    return misfit(ops, state) + lambda * n * n;
}

AdjointPair solve_adjoint(const DiscreteOperators& ops, const StatePair& state) {
    const Vector d = trace_difference(ops, state);
    const Vector r = matvec(ops.interface_mass, d);
    Vector g2 = ops.control_factor.solve(ops.control_trace.apply_transpose(r));
    Vector rhs = ops.restriction.apply_transpose(matvec(ops.control_metric, g2));
    axpy(1.0, ops.global_trace.apply_transpose(r), rhs);
    Vector g = ops.extended_factor.solve(rhs);
    return {{ops.global, std::move(g)}, {ops.control, std::move(g2)}};
}

Vector gradient(const DiscreteOperators& ops, const Control& w, const StatePair& /*state*/,
                const AdjointPair& adjoint, double lambda) {
    check_length(w.size(), ops.control_size(), "gradient");
    if (lambda < 0.0) {
        throw InvalidArgument(fmt::format("gradient: lambda must be nonnegative, got {}", lambda));
    }
    Vector diff = adjoint.g2.coefficients;
    axpy(-1.0, ops.restriction.apply(adjoint.g.coefficients), diff);
    axpy(2.0 * lambda, w, diff);
    return matvec(ops.control_metric, diff);
}

Vector hessvec(const DiscreteOperators& ops, const Vector& direction, double lambda) {
    check_length(direction.size(), ops.control_size(), "hessvec");
    const StatePair lin = solve_linearized_state(ops, direction);
    const AdjointPair adj = solve_adjoint(ops, lin);
    return gradient(ops, direction, lin, adj, lambda);
}

double flux_balance_residual(const DiscreteOperators& ops, const StatePair& state) {
    check_length(state.u.coefficients.size(), ops.global->unknown_count(), "flux_balance_residual (u)");
    check_length(state.u2.coefficients.size(), ops.control_size(), "flux_balance_residual (u2)");
    const Vector su = matvec(ops.source_stiffness, state.u.coefficients);
    // a_c < 0, so the control-side form is minus the assembled |a_c| stiffness.
    Vector cu = ops.restriction.apply_transpose(matvec(ops.control_stiffness, state.u2.coefficients));
    for (double& x : cu) x = -x;
    const Vector fc = ops.restriction.apply_transpose(ops.control_load);
    double scale = std::max({max_abs(su), max_abs(cu), max_abs(ops.source_load), max_abs(fc)});
    if (scale == 0.0) return 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < su.size(); ++i) {
        worst = std::max(worst, std::abs(su[i] + cu[i] - ops.source_load[i] - fc[i]));
    }
    return worst / scale;
}

Vector composite_vertex_values(const DiscreteOperators& ops, const StatePair& state) {
    const Mesh& mesh = *ops.mesh;
    std::vector<bool> touches_source(mesh.vertex_count(), false);
    for (const auto& t : mesh.triangles()) {
        if (t.region == ops.source_region) {
            for (auto v : t.v) touches_source[v] = true;
        }
    }
    Vector values(mesh.vertex_count(), 0.0);
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
        values[v] = touches_source[v] ? state.u.value_at_vertex(v) : state.u2.value_at_vertex(v);
    }
    return values;
}

ErrorNorms composite_errors(const DiscreteOperators& ops, const StatePair& state, const AnalyticField& exact,
                            const QuadratureRule& rule) {
    return ops.source_region == Region::one ? error_norms(state.u, state.u2, exact, rule)
                                            : error_norms(state.u2, state.u, exact, rule);
}

void write_solution(std::ostream& out, const DiscreteOperators& ops, const StatePair& state) {
    const Vector values = composite_vertex_values(ops, state);
    const auto& p = ops.mesh->vertices();
    for (std::size_t v = 0; v < values.size(); ++v) {
        out << fmt::format("{:.17g} {:.17g} {:.17g}\n", p[v].x, p[v].y, values[v]);
    }
}

}  // namespace smoothext
