#pragma once

#include "smoothext/linalg.hpp"
#include "smoothext/mesh.hpp"
#include "smoothext/quadrature.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

namespace smoothext {

/// Which part of the mesh a P1 space lives on.
enum class Domain : std::uint8_t { global, region1, region2 };

[[nodiscard]] constexpr Domain subdomain(Region r) noexcept {
    return r == Region::one ? Domain::region1 : Domain::region2;
}

/// Which triangles an assembly loop visits.
enum class RegionFilter : std::uint8_t { all, region1, region2 };

[[nodiscard]] constexpr RegionFilter only(Region r) noexcept {
    return r == Region::one ? RegionFilter::region1 : RegionFilter::region2;
}

[[nodiscard]] constexpr bool matches(RegionFilter f, Region r) noexcept {
    return f == RegionFilter::all || (f == RegionFilter::region1) == (r == Region::one);
}

/// P1 Lagrange space with homogeneous Dirichlet conditions eliminated.
///
/// On the global domain every vertex of a labelled boundary edge is constrained. On a
/// subdomain only vertices of boundary edges belonging to that subdomain are
/// constrained, so interface vertices stay free.
class FunctionSpace {
public:
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    FunctionSpace(std::shared_ptr<const Mesh> mesh, Domain domain, int degree = 1);

    [[nodiscard]] const Mesh& mesh() const noexcept { return *mesh_; }
    [[nodiscard]] const std::shared_ptr<const Mesh>& mesh_ptr() const noexcept { return mesh_; }
    [[nodiscard]] Domain domain() const noexcept { return domain_; }
    [[nodiscard]] int degree() const noexcept { return 1; }

    [[nodiscard]] std::size_t unknown_count() const noexcept { return dof_vertex_.size(); }
    [[nodiscard]] std::size_t domain_vertex_count() const noexcept { return domain_vertices_; }
    [[nodiscard]] std::size_t constrained_count() const noexcept { return domain_vertices_ - dof_vertex_.size(); }

    /// Unknown index of a vertex, npos when constrained or outside the domain.
    [[nodiscard]] std::size_t dof(std::size_t vertex) const { return vertex_dof_.at(vertex); }
    [[nodiscard]] std::size_t vertex(std::size_t dof) const { return dof_vertex_.at(dof); }
    [[nodiscard]] bool in_domain(std::size_t vertex) const { return in_domain_.at(vertex); }
    [[nodiscard]] bool contains_triangle(std::size_t tri) const;

private:
    std::shared_ptr<const Mesh> mesh_;
    Domain domain_;
    std::vector<std::size_t> vertex_dof_;
    std::vector<std::size_t> dof_vertex_;
    std::vector<bool> in_domain_;
    std::size_t domain_vertices_ = 0;
};

/// k must be 1.
[[nodiscard]] FunctionSpace build_space(std::shared_ptr<const Mesh> mesh, Domain domain, int k = 1);

struct FeFunction {
    std::shared_ptr<const FunctionSpace> space;
    Vector coefficients;

    /// Nodal value; 0 at constrained vertices. Throws for vertices outside the domain.
    [[nodiscard]] double value_at_vertex(std::size_t vertex) const;
};

/// Scalar field evaluable per region, so two-sided interface values are unambiguous.
struct AnalyticField {
    std::function<double(const Point&, Region)> value;
    std::function<std::array<double, 2>(const Point&, Region)> gradient;
};

class PiecewiseConstantCoefficient {
public:
    PiecewiseConstantCoefficient(double region1, double region2);
    [[nodiscard]] double operator()(Region r) const noexcept { return r == Region::one ? v1_ : v2_; }
    [[nodiscard]] double region1() const noexcept { return v1_; }
    [[nodiscard]] double region2() const noexcept { return v2_; }

private:
    double v1_;
    double v2_;
};

/// Maps subdomain unknowns to global unknowns. A subdomain unknown whose vertex is
/// constrained globally maps to npos and reads as zero.
struct RestrictionMap {
    std::vector<std::size_t> global_dof;
    std::size_t global_size = 0;

    [[nodiscard]] Vector apply(std::span<const double> global) const;
    /// Transpose: scatters-adds subdomain entries into a global vector.
    [[nodiscard]] Vector apply_transpose(std::span<const double> sub) const;
};

[[nodiscard]] RestrictionMap restriction_map(const FunctionSpace& global, const FunctionSpace& sub);

/// Sorted list of vertices on the interface, the index set of the interface mass matrix.
struct InterfaceTrace {
    std::vector<std::size_t> vertices;
    std::vector<std::size_t> index_of_vertex;  ///< npos for non-interface vertices

    [[nodiscard]] std::size_t size() const noexcept { return vertices.size(); }
};

[[nodiscard]] InterfaceTrace build_interface_trace(const Mesh& mesh);

/// Interface trace of a space: entry i is the unknown at interface vertex i, or npos.
struct TraceMap {
    std::vector<std::size_t> dof;
    std::size_t space_size = 0;

    [[nodiscard]] Vector apply(std::span<const double> coefficients) const;
    [[nodiscard]] Vector apply_transpose(std::span<const double> trace) const;
};

[[nodiscard]] TraceMap trace_map(const FunctionSpace& space, const InterfaceTrace& trace);

/// Gradients of the three barycentric hat functions on triangle t (constant).
[[nodiscard]] std::array<std::array<double, 2>, 3> hat_gradients(const Mesh& mesh, std::size_t t);

/// Stiffness matrix of int c grad(phi_i) . grad(phi_j) over the filtered triangles of the
/// space's domain. Every filtered coefficient value must be positive.
[[nodiscard]] SparseSymMatrix assemble_stiffness(const FunctionSpace& space,
                                                 const PiecewiseConstantCoefficient& coeff,
                                                 RegionFilter filter = RegionFilter::all);

/// Same integral without the sign check and returned as triplets, for residual forms.
[[nodiscard]] std::vector<Triplet> stiffness_triplets(const FunctionSpace& space,
                                                      const PiecewiseConstantCoefficient& coeff,
                                                      RegionFilter filter);

[[nodiscard]] Vector assemble_load(const FunctionSpace& space, const AnalyticField& field,
                                   RegionFilter filter = RegionFilter::all,
                                   const QuadratureRule& rule = seven_point_rule());

/// P1 edge mass matrices L/6 [[2,1],[1,2]] summed over interface edges.
[[nodiscard]] SparseSymMatrix assemble_interface_mass(const Mesh& mesh, const InterfaceTrace& trace);

/// Galerkin projection onto `sub` in the metric int metric grad . grad.
[[nodiscard]] FeFunction project_control(const AnalyticField& field, std::shared_ptr<const FunctionSpace> sub,
                                         double metric, const QuadratureRule& rule = seven_point_rule());
[[nodiscard]] FeFunction project_control(const AnalyticField& field, std::shared_ptr<const FunctionSpace> sub,
                                         double metric, const SpdFactorization& metric_factor,
                                         const QuadratureRule& rule = seven_point_rule());

/// Nodal interpolant (zero at constrained vertices).
[[nodiscard]] FeFunction interpolate(std::shared_ptr<const FunctionSpace> space, const AnalyticField& field);

struct ErrorNorms {
    double relative_l2 = 0.0;
    double relative_h1 = 0.0;  ///< H1 seminorm
};

/// Relative errors over the triangles of the function's domain.
[[nodiscard]] ErrorNorms error_norms(const FeFunction& fe, const AnalyticField& exact,
                                     const QuadratureRule& rule = seven_point_rule());

/// Relative errors of the composite field equal to `on_region1` on region-1 triangles and
/// `on_region2` on region-2 triangles.
[[nodiscard]] ErrorNorms error_norms(const FeFunction& on_region1, const FeFunction& on_region2,
                                     const AnalyticField& exact, const QuadratureRule& rule = seven_point_rule());

}  // namespace smoothext
