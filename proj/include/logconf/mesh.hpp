/**
 * @file mesh.hpp
 * @brief 2D meshes with boundary tags and periodic pairing, generators for
 *        the three benchmark geometries, and a plain-text mesh format.
 */
#pragma once

#include "logconf/discretization.hpp"

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace logconf {

enum class BoundaryTag { Inflow, Outflow, Wall, Cylinder, Symmetry, PeriodicX, PeriodicY };

const char* to_string(BoundaryTag tag);
std::optional<BoundaryTag> parse_boundary_tag(const std::string& s);

struct BoundaryEdge {
    int a = 0;
    int b = 0;
    BoundaryTag tag = BoundaryTag::Wall;
};

class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Mesh {
    ElementKind kind = ElementKind::Triangle;
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 4>> elements;  ///< counter-clockwise; slot 3 unused (-1) for triangles
    std::vector<BoundaryEdge> boundary;
    std::vector<std::pair<int, int>> periodic;  ///< (master, slave)
    std::vector<Vec2> lattice;                  ///< translation vectors generating the periodic pairs

    [[nodiscard]] int n_nodes() const { return static_cast<int>(nodes.size()); }
    [[nodiscard]] int n_elements() const { return static_cast<int>(elements.size()); }
    [[nodiscard]] int nodes_per_element() const { return logconf::nodes_per_element(kind); }
    [[nodiscard]] std::span<const int> element(int e) const
    {
        return {elements[e].data(), static_cast<std::size_t>(nodes_per_element())};
    }
    /// Node coordinates of element e.
    [[nodiscard]] std::array<Vec2, 4> element_coords(int e) const;

    /// Sum of element areas.
    [[nodiscard]] double area() const;

    /// Throws MeshError naming the first violated invariant.
    void validate() const;

    /// For every node: itself, or its master if it is a periodic slave.
    [[nodiscard]] std::vector<int> master_of() const;
};

/// Uniform n x n quad mesh on [-L, L]^2, periodic in x and y.
Mesh gen_periodic_box(int n_per_side, double half_length);

struct GradingSpec {
    double target_h = 0.04;      ///< element size at the re-entrant corner
    double growth = 1.12;        ///< geometric growth ratio away from the corner
    double h_max = 1.0;          ///< cap on the element size
    double wall_h = 0.0;         ///< size at the upstream wall; <= 0 uses target_h
    double h2 = 1.0;             ///< downstream half-height
    double ratio = 4.0;          ///< contraction ratio (upstream half-height = ratio * h2)
    double upstream_length = 40.0;
    double downstream_length = 40.0;
};

/// Graded quad mesh of the half 4:1 contraction; re-entrant corner at (0, -h2), symmetry at y = 0.
Mesh gen_contraction(const GradingSpec& grading);

struct CylinderSpec {
    int refinement = 0;
    double radius = 1.0;
    double half_height = 2.0;
    double upstream_length = 15.0;
    double downstream_length = 15.0;
    int arc_segments = 96;  ///< segments on the half circle at refinement 0
    int radial_layers = 20; ///< layers between the cylinder and the box x = +-2R at refinement 0
};

/// Triangle mesh of the half channel around a cylinder centred at the origin.
Mesh gen_cylinder_channel(const CylinderSpec& spec);
inline Mesh gen_cylinder_channel(int refinement)
{
    CylinderSpec spec;
    spec.refinement = refinement;
    return gen_cylinder_channel(spec);
}

/// Polygonal area of the cylinder channel (the half disc is approximated by its inscribed polygon).
double cylinder_channel_area(const CylinderSpec& spec);

/// Loads and validates a mesh in the text format written by save_mesh.
Mesh load_mesh(const std::string& path);
Mesh parse_mesh(const std::string& text);
void save_mesh(const Mesh& mesh, const std::string& path);
std::string format_mesh(const Mesh& mesh);

}  // namespace logconf
