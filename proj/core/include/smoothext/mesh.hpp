#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace smoothext {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

enum class Region : std::uint8_t { one = 1, two = 2 };

[[nodiscard]] constexpr int to_int(Region r) noexcept { return static_cast<int>(r); }
[[nodiscard]] constexpr Region other(Region r) noexcept { return r == Region::one ? Region::two : Region::one; }

enum class BoundaryLabel : std::uint8_t { dirichlet };

/// Generator provenance. Lets validation check an analytic region indicator and lets
/// refinement snap new boundary/interface midpoints back onto circles.
enum class Geometry : std::uint8_t { unknown, square_split, disk_annulus, corner_halfdisk };

[[nodiscard]] std::string_view to_string(Geometry g) noexcept;

struct Triangle {
    std::array<std::size_t, 3> v{};
    Region region = Region::one;
};

struct BoundaryEdge {
    std::array<std::size_t, 2> v{};
    BoundaryLabel label = BoundaryLabel::dirichlet;
};

/// Unique mesh edge with its (up to two) incident triangles.
struct Edge {
    static constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    std::size_t a = 0;  ///< smaller vertex index
    std::size_t b = 0;  ///< larger vertex index
    std::array<std::size_t, 2> tris{none, none};
    std::size_t triangle_count = 0;
};

/// Region-labelled triangulation. Immutable once built; construction orients every
/// triangle counter-clockwise and rejects malformed indices.
class Mesh {
public:
    Mesh() = default;
    Mesh(std::vector<Point> vertices, std::vector<Triangle> triangles,
         std::vector<BoundaryEdge> boundary_edges, Geometry geometry = Geometry::unknown);

    [[nodiscard]] const std::vector<Point>& vertices() const noexcept { return vertices_; }
    [[nodiscard]] const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
    [[nodiscard]] const std::vector<BoundaryEdge>& boundary_edges() const noexcept { return boundary_edges_; }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
    [[nodiscard]] Geometry geometry() const noexcept { return geometry_; }

    [[nodiscard]] std::size_t vertex_count() const noexcept { return vertices_.size(); }
    [[nodiscard]] std::size_t triangle_count() const noexcept { return triangles_.size(); }

    /// Maximum over triangles of the longest edge.
    [[nodiscard]] double meshsize() const noexcept { return h_; }

    [[nodiscard]] double area(std::size_t tri) const;
    [[nodiscard]] Point centroid(std::size_t tri) const;

    /// Index into edges() for the edge {i, j}, or Edge::none.
    [[nodiscard]] std::size_t find_edge(std::size_t i, std::size_t j) const;

private:
    std::vector<Point> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<BoundaryEdge> boundary_edges_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> vertex_edges_;
    Geometry geometry_ = Geometry::unknown;
    double h_ = 0.0;
};

struct MeshQualityReport {
    double min_angle = 0.0;          ///< radians
    double max_aspect_ratio = 1.0;   ///< circumradius / (2 * inradius), 1 for equilateral
    bool conforming = false;
    std::size_t interface_edge_count = 0;
    std::vector<std::string> issues;  ///< one entry per violated invariant
};

struct InterfaceEdge {
    std::array<std::size_t, 2> v{};
    double length = 0.0;
};

/// (0,1)^2 cut at x = 1/2 into a 2n x 2n grid of split squares.
[[nodiscard]] Mesh generate_square_split(int n);

/// Unit disk (region 1) inside the annulus 1 < |x| < 2 (region 2). n rings per unit radius.
[[nodiscard]] Mesh generate_disk_annulus(int n);

/// Half disk |x| < 1, arg in (0, pi); region 1 is arg < pi/4. n rings.
[[nodiscard]] Mesh generate_corner_halfdisk(int n);

/// Red refinement: every triangle split into four through its edge midpoints.
[[nodiscard]] Mesh refine_uniform(const Mesh& mesh);

[[nodiscard]] MeshQualityReport validate(const Mesh& mesh);

[[nodiscard]] std::vector<InterfaceEdge> interface_edges(const Mesh& mesh);

/// Vertices touched by at least one labelled boundary edge.
[[nodiscard]] std::vector<bool> boundary_vertex_mask(const Mesh& mesh);

[[nodiscard]] Mesh read_mesh(std::string_view text);
[[nodiscard]] std::string write_mesh(const Mesh& mesh);

}  // namespace smoothext
