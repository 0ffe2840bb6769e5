#include "smoothext/mesh.hpp"

#include "smoothext/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace smoothext {

namespace {

constexpr double pi = std::numbers::pi;

double cross(const Point& o, const Point& a, const Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::uint64_t edge_key(std::size_t i, std::size_t j) {
    const auto lo = static_cast<std::uint64_t>(std::min(i, j));
    const auto hi = static_cast<std::uint64_t>(std::max(i, j));
    return (hi << 32U) | lo;
}

/// Signed indicator whose sign tells the analytic region: negative means region 1.
/// Returns false when the geometry carries no indicator.
bool region_indicator(Geometry g, const Point& p, double& value) {
    switch (g) {
    case Geometry::square_split:
        value = p.x - 0.5;
        return true;
    case Geometry::disk_annulus:
        value = std::hypot(p.x, p.y) - 1.0;
        return true;
    case Geometry::corner_halfdisk: {
        // Signed distance-like quantity to the ray arg = pi/4: positive on the pi side.
        const double c = std::numbers::sqrt2 / 2.0;
        value = -p.x * c + p.y * c;
        return true;
    }
    case Geometry::unknown:
        break;
    }
    return false;
}

/// Polar sector mesh: `rings` rings at radius(j), `sectors` sectors of angle `sector_angle`,
/// ring j carries j segments per sector. Closed (periodic) when the sectors cover 2*pi.
struct PolarLayout {
    int rings = 0;
    int sectors = 0;
    double sector_angle = 0.0;
    bool periodic = false;
    std::function<double(int)> radius;
    std::function<Region(double r_mid, int sector)> region;
};

Mesh build_polar(const PolarLayout& layout, Geometry geometry) {
    std::vector<Point> vertices;
    vertices.push_back({0.0, 0.0});

    // ring_start[j] = index of node 0 on ring j (j >= 1)
    std::vector<std::size_t> ring_start(static_cast<std::size_t>(layout.rings) + 1, 0);
    auto nodes_on_ring = [&](int j) {
        const int segs = layout.sectors * j;
        return layout.periodic ? segs : segs + 1;
    };
    for (int j = 1; j <= layout.rings; ++j) {
        ring_start[static_cast<std::size_t>(j)] = vertices.size();
        const double r = layout.radius(j);
        for (int s = 0; s < layout.sectors; ++s) {
            const int last = (!layout.periodic && s == layout.sectors - 1) ? j : j - 1;
            for (int k = 0; k <= last; ++k) {
                const double theta = s * layout.sector_angle + k * layout.sector_angle / j;
                Point p{r * std::cos(theta), r * std::sin(theta)};
                if (!layout.periodic && s == layout.sectors - 1 && k == j) {
                    // closing ray of a half disk lies on the x axis
                    p = {-r, 0.0};
                } else if (k == 0 && s * layout.sector_angle == pi / 4.0) {
                    p = {r * std::numbers::sqrt2 / 2.0, r * std::numbers::sqrt2 / 2.0};
                }
                vertices.push_back(p);
            }
        }
    }

    auto node = [&](int j, int idx) -> std::size_t {
        if (j == 0) {
            return 0;
        }
        const int count = nodes_on_ring(j);
        if (layout.periodic) {
            idx = ((idx % count) + count) % count;
        }
        return ring_start[static_cast<std::size_t>(j)] + static_cast<std::size_t>(idx);
    };

    std::vector<Triangle> triangles;
    auto emit = [&](std::size_t a, std::size_t b, std::size_t c, int j, int s) {
        const double r_mid = 0.5 * (layout.radius(j + 1) + (j == 0 ? 0.0 : layout.radius(j)));
        triangles.push_back({{a, b, c}, layout.region(r_mid, s)});
    };

    for (int j = 0; j < layout.rings; ++j) {
        for (int s = 0; s < layout.sectors; ++s) {
            const int inner0 = s * j;
            const int outer0 = s * (j + 1);
            if (j == 0) {
                emit(node(0, 0), node(1, outer0), node(1, outer0 + 1), j, s);
                continue;
            }
            int i = 0;
            int k = 0;
            while (i < j || k < j + 1) {
                const double ti = static_cast<double>(i + 1) / j;
                const double tk = static_cast<double>(k + 1) / (j + 1);
                if (i < j && (k == j + 1 || ti < tk)) {
                    emit(node(j, inner0 + i), node(j + 1, outer0 + k), node(j, inner0 + i + 1), j, s);
                    ++i;
                } else {
                    emit(node(j, inner0 + i), node(j + 1, outer0 + k), node(j + 1, outer0 + k + 1), j, s);
                    ++k;
                }
            }
        }
    }

    std::vector<BoundaryEdge> boundary;
    const int outer = layout.rings;
    const int outer_segments = layout.sectors * outer;
    if (layout.periodic) {
        for (int k = 0; k < outer_segments; ++k) {
            boundary.push_back({{node(outer, k), node(outer, k + 1)}});
        }
    } else {
        for (int j = 0; j < outer; ++j) {
            boundary.push_back({{node(j, 0), node(j + 1, 0)}});
        }
        for (int k = 0; k < outer_segments; ++k) {
            boundary.push_back({{node(outer, k), node(outer, k + 1)}});
        }
        for (int j = outer; j > 0; --j) {
            boundary.push_back({{node(j, layout.sectors * j), node(j - 1, layout.sectors * (j - 1))}});
        }
    }
    return Mesh(std::move(vertices), std::move(triangles), std::move(boundary), geometry);
}

}  // namespace

std::string_view to_string(Geometry g) noexcept {
    switch (g) {
    case Geometry::square_split:
        return "square-split";
    case Geometry::disk_annulus:
        return "disk-annulus";
    case Geometry::corner_halfdisk:
        return "corner";
    case Geometry::unknown:
        break;
    }
    return "unknown";
}

Mesh::Mesh(std::vector<Point> vertices, std::vector<Triangle> triangles,
           std::vector<BoundaryEdge> boundary_edges, Geometry geometry)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      boundary_edges_(std::move(boundary_edges)),
      geometry_(geometry) {
    const std::size_t nv = vertices_.size();
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        auto& tri = triangles_[t];
        for (auto v : tri.v) {
            if (v >= nv) {
                throw SemanticError(fmt::format("triangle {}: vertex index {} out of range", t, v));
            }
        }
        if (tri.v[0] == tri.v[1] || tri.v[1] == tri.v[2] || tri.v[0] == tri.v[2]) {
            throw SemanticError(fmt::format("triangle {}: degenerate triangle", t));
        }
        if (tri.region != Region::one && tri.region != Region::two) {
            throw SemanticError(fmt::format("triangle {}: region must be 1 or 2", t));
        }
        if (cross(vertices_[tri.v[0]], vertices_[tri.v[1]], vertices_[tri.v[2]]) < 0.0) {
            std::swap(tri.v[1], tri.v[2]);
        }
    }
    for (std::size_t e = 0; e < boundary_edges_.size(); ++e) {
        const auto& be = boundary_edges_[e];
        if (be.v[0] >= nv || be.v[1] >= nv) {
            throw SemanticError(fmt::format("boundary edge {}: vertex index out of range", e));
        }
        if (be.v[0] == be.v[1]) {
            throw SemanticError(fmt::format("boundary edge {}: degenerate edge", e));
        }
    }

    std::unordered_map<std::uint64_t, std::size_t> lookup;
    lookup.reserve(triangles_.size() * 2);
    vertex_edges_.assign(nv, {});
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto& v = triangles_[t].v;
        for (int k = 0; k < 3; ++k) {
            const std::size_t i = v[static_cast<std::size_t>(k)];
            const std::size_t j = v[static_cast<std::size_t>((k + 1) % 3)];
            auto [it, inserted] = lookup.try_emplace(edge_key(i, j), edges_.size());
            if (inserted) {
                edges_.push_back({std::min(i, j), std::max(i, j), {Edge::none, Edge::none}, 0});
                vertex_edges_[i].push_back(it->second);
                vertex_edges_[j].push_back(it->second);
            }
            Edge& e = edges_[it->second];
            if (e.triangle_count < 2) {
                e.tris[e.triangle_count] = t;
            }
            ++e.triangle_count;
            h_ = std::max(h_, distance(vertices_[i], vertices_[j]));
        }
    }
}

double Mesh::area(std::size_t tri) const {
    const auto& v = triangles_.at(tri).v;
    return 0.5 * cross(vertices_[v[0]], vertices_[v[1]], vertices_[v[2]]);
}

Point Mesh::centroid(std::size_t tri) const {
    const auto& v = triangles_.at(tri).v;
    return {(vertices_[v[0]].x + vertices_[v[1]].x + vertices_[v[2]].x) / 3.0,
            (vertices_[v[0]].y + vertices_[v[1]].y + vertices_[v[2]].y) / 3.0};
}

std::size_t Mesh::find_edge(std::size_t i, std::size_t j) const {
    if (i >= vertex_edges_.size()) {
        return Edge::none;
    }
    const std::size_t lo = std::min(i, j);
    const std::size_t hi = std::max(i, j);
    for (auto e : vertex_edges_[i]) {
        if (edges_[e].a == lo && edges_[e].b == hi) {
            return e;
        }
    }
    return Edge::none;
}

Mesh generate_square_split(int n) {
    if (n < 1) {
        throw InvalidArgument("generate_square_split: n must be >= 1");
    }
    const int m = 2 * n;
    const auto stride = static_cast<std::size_t>(m + 1);
    auto id = [&](int i, int j) { return static_cast<std::size_t>(j) * stride + static_cast<std::size_t>(i); };

    std::vector<Point> vertices;
    vertices.reserve(stride * stride);
    for (int j = 0; j <= m; ++j) {
        for (int i = 0; i <= m; ++i) {
            vertices.push_back({static_cast<double>(i) / m, static_cast<double>(j) / m});
        }
    }
    std::vector<Triangle> triangles;
    triangles.reserve(static_cast<std::size_t>(2 * m * m));
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
            const Region r = i < n ? Region::one : Region::two;
            triangles.push_back({{id(i, j), id(i + 1, j), id(i + 1, j + 1)}, r});
            triangles.push_back({{id(i, j), id(i + 1, j + 1), id(i, j + 1)}, r});
        }
    }
    std::vector<BoundaryEdge> boundary;
    for (int i = 0; i < m; ++i) boundary.push_back({{id(i, 0), id(i + 1, 0)}});
    for (int j = 0; j < m; ++j) boundary.push_back({{id(m, j), id(m, j + 1)}});
    for (int i = m; i > 0; --i) boundary.push_back({{id(i, m), id(i - 1, m)}});
    for (int j = m; j > 0; --j) boundary.push_back({{id(0, j), id(0, j - 1)}});
    return Mesh(std::move(vertices), std::move(triangles), std::move(boundary), Geometry::square_split);
}

Mesh generate_disk_annulus(int n) {
    if (n < 2) {
        throw InvalidArgument("generate_disk_annulus: n must be >= 2");
    }
    PolarLayout layout;
    layout.rings = 2 * n;
    layout.sectors = 6;
    layout.sector_angle = pi / 3.0;
    layout.periodic = true;
    layout.radius = [n](int j) { return static_cast<double>(j) / n; };
    layout.region = [](double r_mid, int) { return r_mid < 1.0 ? Region::one : Region::two; };
    return build_polar(layout, Geometry::disk_annulus);
}

Mesh generate_corner_halfdisk(int n) {
    if (n < 2) {
        throw InvalidArgument("generate_corner_halfdisk: n must be >= 2");
    }
    PolarLayout layout;
    layout.rings = n;
    layout.sectors = 4;
    layout.sector_angle = pi / 4.0;
    layout.periodic = false;
    layout.radius = [n](int j) { return static_cast<double>(j) / n; };
    layout.region = [](double, int sector) { return sector == 0 ? Region::one : Region::two; };
    return build_polar(layout, Geometry::corner_halfdisk);
}

Mesh refine_uniform(const Mesh& mesh) {
    const auto& verts = mesh.vertices();
    std::vector<Point> vertices = verts;
    const auto& edges = mesh.edges();

    // Edges lying on a curved boundary or on a curved interface get their midpoint
    // projected back onto the analytic circle.
    std::vector<double> snap_radius(edges.size(), 0.0);
    auto on_circle = [&](std::size_t v, double r) {
        return std::abs(std::hypot(verts[v].x, verts[v].y) - r) <= 1e-9 * std::max(1.0, r);
    };
    auto is_interface = [&](const Edge& e) {
        return e.triangle_count == 2 &&
               mesh.triangles()[e.tris[0]].region != mesh.triangles()[e.tris[1]].region;
    };
    if (mesh.geometry() == Geometry::disk_annulus || mesh.geometry() == Geometry::corner_halfdisk) {
        const std::vector<double> radii = mesh.geometry() == Geometry::disk_annulus
                                              ? std::vector<double>{1.0, 2.0}
                                              : std::vector<double>{1.0};
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const bool candidate = edges[e].triangle_count == 1 ||
                                   (mesh.geometry() == Geometry::disk_annulus && is_interface(edges[e]));
            if (!candidate) continue;
            for (double r : radii) {
                if (on_circle(edges[e].a, r) && on_circle(edges[e].b, r)) {
                    snap_radius[e] = r;
                }
            }
        }
    }

    std::vector<std::size_t> midpoint(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const Point& p = verts[edges[e].a];
        const Point& q = verts[edges[e].b];
        Point m{0.5 * (p.x + q.x), 0.5 * (p.y + q.y)};
        if (snap_radius[e] > 0.0) {
            const double scale = snap_radius[e] / std::hypot(m.x, m.y);
            m = {m.x * scale, m.y * scale};
        }
        midpoint[e] = vertices.size();
        vertices.push_back(m);
    }

    auto mid = [&](std::size_t i, std::size_t j) {
        const std::size_t e = mesh.find_edge(i, j);
        if (e == Edge::none) {
            throw SemanticError("refine_uniform: boundary edge is not a triangle edge");
        }
        return midpoint[e];
    };

    std::vector<Triangle> triangles;
    triangles.reserve(mesh.triangle_count() * 4);
    for (const auto& t : mesh.triangles()) {
        const auto [a, b, c] = t.v;
        const std::size_t ab = mid(a, b);
        const std::size_t bc = mid(b, c);
        const std::size_t ca = mid(c, a);
        triangles.push_back({{a, ab, ca}, t.region});
        triangles.push_back({{ab, b, bc}, t.region});
        triangles.push_back({{ca, bc, c}, t.region});
        triangles.push_back({{ab, bc, ca}, t.region});
    }
    std::vector<BoundaryEdge> boundary;
    boundary.reserve(mesh.boundary_edges().size() * 2);
    for (const auto& be : mesh.boundary_edges()) {
        const std::size_t m = mid(be.v[0], be.v[1]);
        boundary.push_back({{be.v[0], m}, be.label});
        boundary.push_back({{m, be.v[1]}, be.label});
    }
    return Mesh(std::move(vertices), std::move(triangles), std::move(boundary), mesh.geometry());
}

MeshQualityReport validate(const Mesh& mesh) {
    MeshQualityReport report;
    report.min_angle = pi;
    const auto& verts = mesh.vertices();
    const auto& tris = mesh.triangles();
    bool conforming = true;

    for (std::size_t t = 0; t < tris.size(); ++t) {
        const auto& v = tris[t].v;
        const Point& p0 = verts[v[0]];
        const Point& p1 = verts[v[1]];
        const Point& p2 = verts[v[2]];
        const double area2 = cross(p0, p1, p2);
        if (!(area2 > 0.0)) {
            report.issues.push_back(fmt::format("triangle {} has non-positive area", t));
            report.min_angle = 0.0;
            continue;
        }
        const double a = distance(p1, p2);
        const double b = distance(p0, p2);
        const double c = distance(p0, p1);
        const std::array<double, 3> angles{
            std::atan2(area2, (p1.x - p0.x) * (p2.x - p0.x) + (p1.y - p0.y) * (p2.y - p0.y)),
            std::atan2(area2, (p0.x - p1.x) * (p2.x - p1.x) + (p0.y - p1.y) * (p2.y - p1.y)),
            std::atan2(area2, (p0.x - p2.x) * (p1.x - p2.x) + (p0.y - p2.y) * (p1.y - p2.y))};
        report.min_angle = std::min(report.min_angle, *std::min_element(angles.begin(), angles.end()));
        const double area = 0.5 * area2;
        const double circumradius = a * b * c / (4.0 * area);
        const double inradius = area / (0.5 * (a + b + c));
        report.max_aspect_ratio = std::max(report.max_aspect_ratio, circumradius / (2.0 * inradius));

        double centre_value = 0.0;
        if (region_indicator(mesh.geometry(), mesh.centroid(t), centre_value)) {
            const double tol = 1e-10;
            bool neg = false;
            bool pos = false;
            for (auto vi : v) {
                double value = 0.0;
                region_indicator(mesh.geometry(), verts[vi], value);
                neg = neg || value < -tol;
                pos = pos || value > tol;
            }
            const Region expected = centre_value < 0.0 ? Region::one : Region::two;
            if (neg && pos) {
                conforming = false;
                report.issues.push_back(fmt::format("triangle {} straddles the interface", t));
            } else if (expected != tris[t].region) {
                conforming = false;
                report.issues.push_back(
                    fmt::format("triangle {} labelled region {} lies in region {}", t, to_int(tris[t].region),
                                to_int(expected)));
            }
        }
    }

    // Edge topology: manifold, boundary edges match the labelled list.
    std::unordered_map<std::uint64_t, int> labelled;
    for (const auto& be : mesh.boundary_edges()) {
        ++labelled[edge_key(be.v[0], be.v[1])];
    }
    std::vector<int> interface_degree(verts.size(), 0);
    for (const auto& e : mesh.edges()) {
        const auto key = edge_key(e.a, e.b);
        const auto it = labelled.find(key);
        const int labels = it == labelled.end() ? 0 : it->second;
        if (e.triangle_count > 2) {
            report.issues.push_back(fmt::format("edge ({}, {}) shared by {} triangles", e.a, e.b, e.triangle_count));
        } else if (e.triangle_count == 1 && labels != 1) {
            report.issues.push_back(fmt::format("boundary edge ({}, {}) is not labelled exactly once", e.a, e.b));
        } else if (e.triangle_count == 2) {
            if (labels != 0) {
                report.issues.push_back(fmt::format("interior edge ({}, {}) carries a boundary label", e.a, e.b));
            }
            if (tris[e.tris[0]].region != tris[e.tris[1]].region) {
                ++report.interface_edge_count;
                ++interface_degree[e.a];
                ++interface_degree[e.b];
            }
        }
    }
    for (const auto& [key, count] : labelled) {
        const std::size_t lo = key & 0xffffffffULL;
        const std::size_t hi = key >> 32U;
        const std::size_t e = mesh.find_edge(lo, hi);
        if (e == Edge::none) {
            report.issues.push_back(fmt::format("labelled boundary edge ({}, {}) is not a mesh edge", lo, hi));
        }
    }
    for (std::size_t v = 0; v < verts.size(); ++v) {
        if (interface_degree[v] > 2) {
            conforming = false;
            report.issues.push_back(fmt::format("interface branches at vertex {}", v));
        }
    }
    report.conforming = conforming;
    return report;
}

std::vector<InterfaceEdge> interface_edges(const Mesh& mesh) {
    std::vector<InterfaceEdge> out;
    for (const auto& e : mesh.edges()) {
        if (e.triangle_count == 2 && mesh.triangles()[e.tris[0]].region != mesh.triangles()[e.tris[1]].region) {
            out.push_back({{e.a, e.b}, distance(mesh.vertices()[e.a], mesh.vertices()[e.b])});
        }
    }
    return out;
}

std::vector<bool> boundary_vertex_mask(const Mesh& mesh) {
    std::vector<bool> mask(mesh.vertex_count(), false);
    for (const auto& be : mesh.boundary_edges()) {
        mask[be.v[0]] = true;
        mask[be.v[1]] = true;
    }
    return mask;
}

// ---------------------------------------------------------------------------
// text format

namespace {

struct LineReader {
    std::vector<std::pair<std::size_t, std::vector<std::string>>> lines;
    std::size_t pos = 0;

    explicit LineReader(std::string_view text) {
        std::size_t line_no = 0;
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t end = text.find('\n', start);
            if (end == std::string_view::npos) end = text.size();
            ++line_no;
            std::string_view line = text.substr(start, end - start);
            std::vector<std::string> tokens;
            std::istringstream in{std::string(line)};
            std::string tok;
            while (in >> tok) tokens.push_back(tok);
            if (!tokens.empty() && tokens.front().front() != '#') {
                lines.emplace_back(line_no, std::move(tokens));
            }
            if (end == text.size()) break;
            start = end + 1;
        }
    }

    [[nodiscard]] bool done() const { return pos >= lines.size(); }

    const std::pair<std::size_t, std::vector<std::string>>& next(std::size_t last_line, const char* expecting) {
        if (done()) {
            throw ParseError(last_line, "<eof>", fmt::format("unexpected end of input, expecting {}", expecting));
        }
        return lines[pos++];
    }
};

template <typename T>
T parse_number(const std::string& tok, std::size_t line) {
    T value{};
    const auto* first = tok.data();
    const auto* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw ParseError(line, tok, "expected a number");
    }
    return value;
}

std::size_t parse_header(LineReader& in, const char* keyword, std::size_t& line_no) {
    const auto& [line, toks] = in.next(line_no, keyword);
    line_no = line;
    if (toks.size() != 2 || toks[0] != keyword) {
        throw ParseError(line, toks[0], fmt::format("expected '{} <count>'", keyword));
    }
    return parse_number<std::size_t>(toks[1], line);
}

}  // namespace

Mesh read_mesh(std::string_view text) {
    LineReader in(text);
    std::size_t line_no = 0;

    const std::size_t nv = parse_header(in, "vertices", line_no);
    std::vector<Point> vertices;
    vertices.reserve(nv);
    for (std::size_t i = 0; i < nv; ++i) {
        const auto& [line, toks] = in.next(line_no, "a vertex line");
        line_no = line;
        if (toks.size() != 2) {
            throw ParseError(line, toks[0], "vertex line needs exactly two coordinates");
        }
        vertices.push_back({parse_number<double>(toks[0], line), parse_number<double>(toks[1], line)});
    }

    const std::size_t nt = parse_header(in, "triangles", line_no);
    std::vector<Triangle> triangles;
    triangles.reserve(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        const auto& [line, toks] = in.next(line_no, "a triangle line");
        line_no = line;
        if (toks.size() != 4) {
            throw ParseError(line, toks[0], "triangle line needs three indices and a region");
        }
        Triangle t;
        for (std::size_t k = 0; k < 3; ++k) t.v[k] = parse_number<std::size_t>(toks[k], line);
        const int region = parse_number<int>(toks[3], line);
        if (region != 1 && region != 2) {
            throw SemanticError(fmt::format("line {}: region must be 1 or 2", line));
        }
        t.region = static_cast<Region>(region);
        triangles.push_back(t);
    }

    const std::size_t nb = parse_header(in, "boundary_edges", line_no);
    std::vector<BoundaryEdge> boundary;
    boundary.reserve(nb);
    for (std::size_t i = 0; i < nb; ++i) {
        const auto& [line, toks] = in.next(line_no, "a boundary edge line");
        line_no = line;
        if (toks.size() != 3) {
            throw ParseError(line, toks[0], "boundary edge line needs two indices and a label");
        }
        if (toks[2] != "dirichlet") {
            throw ParseError(line, toks[2], "unknown boundary label");
        }
        boundary.push_back({{parse_number<std::size_t>(toks[0], line), parse_number<std::size_t>(toks[1], line)},
                            BoundaryLabel::dirichlet});
    }
    if (!in.done()) {
        const auto& [line, toks] = in.lines[in.pos];
        throw ParseError(line, toks[0], "unexpected content after boundary edges");
    }
    return Mesh(std::move(vertices), std::move(triangles), std::move(boundary));
}

std::string write_mesh(const Mesh& mesh) {
    fmt::memory_buffer out;
    auto it = std::back_inserter(out);
    fmt::format_to(it, "vertices {}\n", mesh.vertex_count());
    for (const auto& p : mesh.vertices()) {
        fmt::format_to(it, "{:.17g} {:.17g}\n", p.x, p.y);
    }
    fmt::format_to(it, "triangles {}\n", mesh.triangle_count());
    for (const auto& t : mesh.triangles()) {
        fmt::format_to(it, "{} {} {} {}\n", t.v[0], t.v[1], t.v[2], to_int(t.region));
    }
    fmt::format_to(it, "boundary_edges {}\n", mesh.boundary_edges().size());
    for (const auto& be : mesh.boundary_edges()) {
        fmt::format_to(it, "{} {} dirichlet\n", be.v[0], be.v[1]);
    }
    return fmt::to_string(out);
}

}  // namespace smoothext
