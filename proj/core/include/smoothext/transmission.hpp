#pragma once

#include "smoothext/fem.hpp"

#include <iosfwd>
#include <memory>
#include <optional>

namespace smoothext {

/// -div(eps grad u) = f on a two-region mesh, eps1 > 0 on region 1 and eps2 < 0 on region 2.
///
/// `extension_source` is the region whose solution is smoothly extended over the whole
/// domain; the other region carries the control.
struct TransmissionProblem {
    double eps1 = 1.0;
    double eps2 = -1.0;
    std::optional<double> extension;  ///< coefficient used on the control region; default |eps_source|
    AnalyticField source;
    Region extension_source = Region::one;
    int degree = 1;

    [[nodiscard]] Region control_region() const noexcept { return other(extension_source); }
};

/// Everything assembled once per (problem, mesh).
///
/// Stored in the canonical orientation: with s = sign(eps_source) the equation is
/// multiplied by s, so the source-side coefficient a_s is positive and the control-side
/// one a_c is negative.
struct DiscreteOperators {
    std::shared_ptr<const Mesh> mesh;
    std::shared_ptr<const FunctionSpace> global;
    std::shared_ptr<const FunctionSpace> control;
    Region source_region = Region::one;
    Region control_region = Region::two;
    double sign = 1.0;
    double a_source = 1.0;
    double a_control = -1.0;
    double extension = 1.0;
    double h = 0.0;

    SparseSymMatrix extended_stiffness;  ///< global space, coefficient a_s on S and extension on C
    SparseSymMatrix control_stiffness;   ///< control space, |a_c|
    SparseSymMatrix control_metric;      ///< control space, extension coefficient
    SparseSymMatrix source_stiffness;    ///< global space, a_s on S only
    SparseSymMatrix interface_mass;
    SpdFactorization extended_factor;
    SpdFactorization control_factor;
    SpdFactorization metric_factor;

    Vector source_load;   ///< s f on S, global space
    Vector control_load;  ///< s f on C, control space
    RestrictionMap restriction;
    InterfaceTrace trace;
    TraceMap global_trace;
    TraceMap control_trace;

    [[nodiscard]] std::size_t control_size() const noexcept { return control->unknown_count(); }
};

using Control = Vector;

struct StatePair {
    FeFunction u;   ///< extended field, global space
    FeFunction u2;  ///< control-region field
};

struct AdjointPair {
    FeFunction g;
    FeFunction g2;
};

[[nodiscard]] DiscreteOperators prepare(const TransmissionProblem& problem, std::shared_ptr<const Mesh> mesh);

[[nodiscard]] StatePair solve_state(const DiscreteOperators& ops, const Control& w);

/// State of the homogeneous problem (f = 0) driven by w alone.
[[nodiscard]] StatePair solve_linearized_state(const DiscreteOperators& ops, const Control& w);

/// Control-minus-global difference at the interface vertices.
[[nodiscard]] Vector trace_difference(const DiscreteOperators& ops, const StatePair& state);

[[nodiscard]] double misfit(const DiscreteOperators& ops, const StatePair& state);

[[nodiscard]] double control_norm(const DiscreteOperators& ops, const Control& w);

/// misfit + lambda ||w||^2. lambda must be positive.
[[nodiscard]] double cost(const DiscreteOperators& ops, const StatePair& state, const Control& w, double lambda);

[[nodiscard]] AdjointPair solve_adjoint(const DiscreteOperators& ops, const StatePair& state);

/// Euclidean gradient of the regularized functional with respect to the coefficients of w.
/// lambda may be zero here so the misfit part can be inspected on its own.
[[nodiscard]] Vector gradient(const DiscreteOperators& ops, const Control& w, const StatePair& state,
                              const AdjointPair& adjoint, double lambda);

/// Hessian of the regularized functional applied to a direction.
[[nodiscard]] Vector hessvec(const DiscreteOperators& ops, const Vector& direction, double lambda);

/// Max over global test functions of the summed weak residual of both state equations,
/// divided by the largest of the terms entering it (0 when all vanish).
[[nodiscard]] double flux_balance_residual(const DiscreteOperators& ops, const StatePair& state);

/// Nodal value of the composite solution: u on vertices touching a source-region
/// triangle, u2 on vertices that only touch control-region triangles.
[[nodiscard]] Vector composite_vertex_values(const DiscreteOperators& ops, const StatePair& state);

/// Relative errors of the composite solution against an exact field.
[[nodiscard]] ErrorNorms composite_errors(const DiscreteOperators& ops, const StatePair& state,
                                          const AnalyticField& exact,
                                          const QuadratureRule& rule = seven_point_rule());

/// One "x y value" line per vertex.
void write_solution(std::ostream& out, const DiscreteOperators& ops, const StatePair& state);

}  // namespace smoothext
