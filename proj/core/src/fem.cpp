#include "smoothext/fem.hpp"

#include "smoothext/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace smoothext {

namespace {

bool domain_has(Domain d, Region r) {
    return d == Domain::global || (d == Domain::region1) == (r == Region::one);
}

}  // namespace

FunctionSpace::FunctionSpace(std::shared_ptr<const Mesh> mesh, Domain domain, int degree)
    : mesh_(std::move(mesh)), domain_(domain) {
    if (!mesh_) {
        throw InvalidArgument("FunctionSpace: null mesh");
    }
    if (degree != 1) {
        throw InvalidArgument(fmt::format("unsupported degree {}", degree));
    }
    const Mesh& m = *mesh_;
    in_domain_.assign(m.vertex_count(), false);
    for (const auto& t : m.triangles()) {
        if (domain_has(domain_, t.region)) {
            for (auto v : t.v) in_domain_[v] = true;
        }
    }
    std::vector<bool> constrained(m.vertex_count(), false);
    for (const auto& be : m.boundary_edges()) {
        bool applies = domain_ == Domain::global;
        if (!applies) {
            const std::size_t e = m.find_edge(be.v[0], be.v[1]);
            if (e != Edge::none) {
                for (std::size_t k = 0; k < std::min<std::size_t>(2, m.edges()[e].triangle_count); ++k) {
                    applies = applies || domain_has(domain_, m.triangles()[m.edges()[e].tris[k]].region);
                }
            }
        }
        if (applies) {
            constrained[be.v[0]] = true;
            constrained[be.v[1]] = true;
        }
    }
    vertex_dof_.assign(m.vertex_count(), npos);
    for (std::size_t v = 0; v < m.vertex_count(); ++v) {
        if (!in_domain_[v]) continue;
        ++domain_vertices_;
        if (!constrained[v]) {
            vertex_dof_[v] = dof_vertex_.size();
            dof_vertex_.push_back(v);
        }
    }
}

bool FunctionSpace::contains_triangle(std::size_t tri) const {
    return domain_has(domain_, mesh_->triangles().at(tri).region);
}

FunctionSpace build_space(std::shared_ptr<const Mesh> mesh, Domain domain, int k) {
    return FunctionSpace(std::move(mesh), domain, k);
}

double FeFunction::value_at_vertex(std::size_t vertex) const {
    if (!space->in_domain(vertex)) {
        throw InvalidArgument(fmt::format("vertex {} is outside the function's domain", vertex));
    }
    const std::size_t d = space->dof(vertex);
    return d == FunctionSpace::npos ? 0.0 : coefficients.at(d);
}

PiecewiseConstantCoefficient::PiecewiseConstantCoefficient(double region1, double region2)
    : v1_(region1), v2_(region2) {
    if (region1 == 0.0 || region2 == 0.0) {
        throw InvalidArgument("coefficient values must be nonzero");
    }
}

Vector RestrictionMap::apply(std::span<const double> global) const {
    if (global.size() != global_size) {
        throw InvalidArgument("restriction: global vector has wrong length");
    }
    Vector out(global_dof.size(), 0.0);
    for (std::size_t i = 0; i < global_dof.size(); ++i) {
        if (global_dof[i] != FunctionSpace::npos) out[i] = global[global_dof[i]];
    }
    return out;
}

Vector RestrictionMap::apply_transpose(std::span<const double> sub) const {
    if (sub.size() != global_dof.size()) {
        throw InvalidArgument("restriction transpose: subdomain vector has wrong length");
    }
    Vector out(global_size, 0.0);
    for (std::size_t i = 0; i < global_dof.size(); ++i) {
        if (global_dof[i] != FunctionSpace::npos) out[global_dof[i]] += sub[i];
    }
    return out;
}

RestrictionMap restriction_map(const FunctionSpace& global, const FunctionSpace& sub) {
    if (&global.mesh() != &sub.mesh()) {
        throw InvalidArgument("restriction_map: spaces live on different meshes");
    }
    if (global.domain() != Domain::global) {
        throw InvalidArgument("restriction_map: first space must be global");
    }
    RestrictionMap map;
    map.global_size = global.unknown_count();
    map.global_dof.resize(sub.unknown_count());
    for (std::size_t i = 0; i < sub.unknown_count(); ++i) {
        map.global_dof[i] = global.dof(sub.vertex(i));
    }
    return map;
}

InterfaceTrace build_interface_trace(const Mesh& mesh) {
    InterfaceTrace trace;
    trace.index_of_vertex.assign(mesh.vertex_count(), FunctionSpace::npos);
    std::vector<bool> on(mesh.vertex_count(), false);
    for (const auto& e : interface_edges(mesh)) {
        on[e.v[0]] = true;
        on[e.v[1]] = true;
    }
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
        if (on[v]) {
            trace.index_of_vertex[v] = trace.vertices.size();
            trace.vertices.push_back(v);
        }
    }
    return trace;
}

Vector TraceMap::apply(std::span<const double> coefficients) const {
    if (coefficients.size() != space_size) {
        throw InvalidArgument("trace: coefficient vector has wrong length");
    }
    Vector out(dof.size(), 0.0);
    for (std::size_t i = 0; i < dof.size(); ++i) {
        if (dof[i] != FunctionSpace::npos) out[i] = coefficients[dof[i]];
    }
    return out;
}

Vector TraceMap::apply_transpose(std::span<const double> trace) const {
    if (trace.size() != dof.size()) {
        throw InvalidArgument("trace transpose: trace vector has wrong length");
    }
    Vector out(space_size, 0.0);
    for (std::size_t i = 0; i < dof.size(); ++i) {
        if (dof[i] != FunctionSpace::npos) out[dof[i]] += trace[i];
    }
    return out;
}

TraceMap trace_map(const FunctionSpace& space, const InterfaceTrace& trace) {
    TraceMap map;
    map.space_size = space.unknown_count();
    map.dof.resize(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        map.dof[i] = space.dof(trace.vertices[i]);
    }
    return map;
}

std::array<std::array<double, 2>, 3> hat_gradients(const Mesh& mesh, std::size_t t) {
    const auto& v = mesh.triangles()[t].v;
    const auto& p = mesh.vertices();
    const double two_area = 2.0 * mesh.area(t);
    std::array<std::array<double, 2>, 3> g{};
    for (std::size_t i = 0; i < 3; ++i) {
        const Point& a = p[v[(i + 1) % 3]];
        const Point& b = p[v[(i + 2) % 3]];
        g[i] = {(a.y - b.y) / two_area, (b.x - a.x) / two_area};
    }
    return g;
}

std::vector<Triplet> stiffness_triplets(const FunctionSpace& space, const PiecewiseConstantCoefficient& coeff,
                                        RegionFilter filter) {
    const Mesh& mesh = space.mesh();
    std::vector<Triplet> triplets;
    triplets.reserve(mesh.triangle_count() * 9);
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles()[t];
        if (!space.contains_triangle(t) || !matches(filter, tri.region)) continue;
        const auto g = hat_gradients(mesh, t);
        const double scale = coeff(tri.region) * mesh.area(t);
        for (std::size_t i = 0; i < 3; ++i) {
            const std::size_t di = space.dof(tri.v[i]);
            if (di == FunctionSpace::npos) continue;
            for (std::size_t j = 0; j < 3; ++j) {
                const std::size_t dj = space.dof(tri.v[j]);
                if (dj == FunctionSpace::npos) continue;
                triplets.push_back({di, dj, scale * (g[i][0] * g[j][0] + g[i][1] * g[j][1])});
            }
        }
    }
    return triplets;
}

SparseSymMatrix assemble_stiffness(const FunctionSpace& space, const PiecewiseConstantCoefficient& coeff,
                                   RegionFilter filter) {
    for (Region r : {Region::one, Region::two}) {
        const bool used = matches(filter, r) && domain_has(space.domain(), r);
        if (used && !(coeff(r) > 0.0)) {
            throw InvalidArgument(fmt::format("non-coercive form requested (region {} coefficient {})", to_int(r), coeff(r)));
        }
    }
    const auto triplets = stiffness_triplets(space, coeff, filter);
    return from_triplets(std::max<std::size_t>(space.unknown_count(), 1), triplets);
}

Vector assemble_load(const FunctionSpace& space, const AnalyticField& field, RegionFilter filter,
                     const QuadratureRule& rule) {
    const Mesh& mesh = space.mesh();
    Vector load(space.unknown_count(), 0.0);
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles()[t];
        if (!space.contains_triangle(t) || !matches(filter, tri.region)) continue;
        const auto& p = mesh.vertices();
        const double area = mesh.area(t);
        std::array<double, 3> local{};
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const auto& l = rule.points[q];
            const Point x{l[0] * p[tri.v[0]].x + l[1] * p[tri.v[1]].x + l[2] * p[tri.v[2]].x,
                          l[0] * p[tri.v[0]].y + l[1] * p[tri.v[1]].y + l[2] * p[tri.v[2]].y};
            const double f = field.value(x, tri.region) * rule.weights[q] * area;
            for (std::size_t i = 0; i < 3; ++i) local[i] += f * l[i];
        }
        for (std::size_t i = 0; i < 3; ++i) {
            const std::size_t d = space.dof(tri.v[i]);
            if (d != FunctionSpace::npos) load[d] += local[i];
        }
    }
    return load;
}

SparseSymMatrix assemble_interface_mass(const Mesh& mesh, const InterfaceTrace& trace) {
    const auto edges = interface_edges(mesh);
    if (edges.empty() || trace.size() == 0) {
        throw InvalidArgument("assemble_interface_mass: the mesh has no interface");
    }
    std::vector<Triplet> triplets;
    triplets.reserve(edges.size() * 4);
    for (const auto& e : edges) {
        const std::size_t i = trace.index_of_vertex.at(e.v[0]);
        const std::size_t j = trace.index_of_vertex.at(e.v[1]);
        const double d = e.length / 3.0;
        const double o = e.length / 6.0;
        triplets.push_back({i, i, d});
        triplets.push_back({j, j, d});
        triplets.push_back({i, j, o});
        triplets.push_back({j, i, o});
    }
    return from_triplets(trace.size(), triplets);
}

namespace {

Vector projection_load(const AnalyticField& field, const FunctionSpace& sub, double metric,
                       const QuadratureRule& rule) {
    const Mesh& mesh = sub.mesh();
    Vector load(sub.unknown_count(), 0.0);
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        if (!sub.contains_triangle(t)) continue;
        const auto& tri = mesh.triangles()[t];
        const auto g = hat_gradients(mesh, t);
        const auto& p = mesh.vertices();
        const double area = mesh.area(t);
        std::array<double, 2> mean_grad{0.0, 0.0};
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const auto& l = rule.points[q];
            const Point x{l[0] * p[tri.v[0]].x + l[1] * p[tri.v[1]].x + l[2] * p[tri.v[2]].x,
                          l[0] * p[tri.v[0]].y + l[1] * p[tri.v[1]].y + l[2] * p[tri.v[2]].y};
            const auto gw = field.gradient(x, tri.region);
            mean_grad[0] += rule.weights[q] * gw[0];
            mean_grad[1] += rule.weights[q] * gw[1];
        }
        for (std::size_t i = 0; i < 3; ++i) {
            const std::size_t d = sub.dof(tri.v[i]);
            if (d == FunctionSpace::npos) continue;
            load[d] += metric * area * (mean_grad[0] * g[i][0] + mean_grad[1] * g[i][1]);
        }
    }
    return load;
}

}  // namespace

FeFunction project_control(const AnalyticField& field, std::shared_ptr<const FunctionSpace> sub, double metric,
                           const QuadratureRule& rule) {
    const auto region = sub->domain() == Domain::region1 ? Region::one : Region::two;
    const PiecewiseConstantCoefficient c(region == Region::one ? metric : 1.0, region == Region::two ? metric : 1.0);
    const auto factor = factorize_spd(assemble_stiffness(*sub, c), "control metric");
    return project_control(field, std::move(sub), metric, factor, rule);
}

FeFunction project_control(const AnalyticField& field, std::shared_ptr<const FunctionSpace> sub, double metric,
                           const SpdFactorization& metric_factor, const QuadratureRule& rule) {
    if (sub->domain() == Domain::global) {
        throw InvalidArgument("project_control: expected a subdomain space");
    }
    const Vector load = projection_load(field, *sub, metric, rule);
    Vector coeffs = metric_factor.solve(load);
    return {std::move(sub), std::move(coeffs)};
}

FeFunction interpolate(std::shared_ptr<const FunctionSpace> space, const AnalyticField& field) {
    const Mesh& mesh = space->mesh();
    // Region used for the nodal evaluation of each vertex: that of any incident triangle
    // inside the space's domain.
    std::vector<Region> vertex_region(mesh.vertex_count(), Region::one);
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        if (!space->contains_triangle(t)) continue;
        for (auto v : mesh.triangles()[t].v) vertex_region[v] = mesh.triangles()[t].region;
    }
    Vector coeffs(space->unknown_count(), 0.0);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const std::size_t v = space->vertex(i);
        coeffs[i] = field.value(mesh.vertices()[v], vertex_region[v]);
    }
    return {std::move(space), std::move(coeffs)};
}

ErrorNorms error_norms(const FeFunction& fe, const AnalyticField& exact, const QuadratureRule& rule) {
    return error_norms(fe, fe, exact, rule);
}

ErrorNorms error_norms(const FeFunction& on_region1, const FeFunction& on_region2, const AnalyticField& exact,
                       const QuadratureRule& rule) {
    const Mesh& mesh = on_region1.space->mesh();
    if (&on_region2.space->mesh() != &mesh) {
        throw InvalidArgument("error_norms: pieces live on different meshes");
    }
    double err_l2 = 0.0;
    double ref_l2 = 0.0;
    double err_h1 = 0.0;
    double ref_h1 = 0.0;
    const auto& p = mesh.vertices();
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles()[t];
        const FeFunction& fe = tri.region == Region::one ? on_region1 : on_region2;
        if (!fe.space->contains_triangle(t)) continue;
        const auto g = hat_gradients(mesh, t);
        std::array<double, 3> nodal{};
        std::array<double, 2> grad{0.0, 0.0};
        for (std::size_t i = 0; i < 3; ++i) {
            nodal[i] = fe.value_at_vertex(tri.v[i]);
            grad[0] += nodal[i] * g[i][0];
            grad[1] += nodal[i] * g[i][1];
        }
        const double area = mesh.area(t);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const auto& l = rule.points[q];
            const Point x{l[0] * p[tri.v[0]].x + l[1] * p[tri.v[1]].x + l[2] * p[tri.v[2]].x,
                          l[0] * p[tri.v[0]].y + l[1] * p[tri.v[1]].y + l[2] * p[tri.v[2]].y};
            const double uh = l[0] * nodal[0] + l[1] * nodal[1] + l[2] * nodal[2];
            const double u = exact.value(x, tri.region);
            const auto gu = exact.gradient(x, tri.region);
            const double w = rule.weights[q] * area;
            err_l2 += w * (uh - u) * (uh - u);
            ref_l2 += w * u * u;
            err_h1 += w * ((grad[0] - gu[0]) * (grad[0] - gu[0]) + (grad[1] - gu[1]) * (grad[1] - gu[1]));
            ref_h1 += w * (gu[0] * gu[0] + gu[1] * gu[1]);
        }
    }
    if (!(ref_l2 > 0.0) || !(ref_h1 > 0.0)) {
        throw InvalidArgument("error_norms: exact solution has zero norm");
    }
    return {std::sqrt(err_l2 / ref_l2), std::sqrt(err_h1 / ref_h1)};
}

}  // namespace smoothext
