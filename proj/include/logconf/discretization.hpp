/**
 * @file discretization.hpp
 * @brief P1 triangles and Q1 quadrilaterals: shape functions, quadrature and
 *        the covariant element metric.
 */
#pragma once

#include "logconf/tensor.hpp"

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace logconf {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

/// Row-major 2x2 matrix.
struct Mat2x2 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;
    [[nodiscard]] double det() const { return a11 * a22 - a12 * a21; }
};

enum class ElementKind { Triangle, Quad };

constexpr int nodes_per_element(ElementKind k) { return k == ElementKind::Triangle ? 3 : 4; }

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Points and weights on the reference element.  Triangle: (0,0)-(1,0)-(0,1); quad: [-1,1]^2.
struct QuadratureRule {
    std::vector<Vec2> points;
    std::vector<double> weights;
};

/// 3-point degree-2 rule (triangles) or 2x2 Gauss (quads).
const QuadratureRule& default_rule(ElementKind kind);
/// n x n Gauss-Legendre on the quad, or its collapsed (Duffy) image on the triangle.
QuadratureRule gauss_rule(ElementKind kind, int n);
/// Two-point Gauss rule on [0, 1] for edge integrals.
const QuadratureRule& edge_rule();

/// Shape values and reference gradients at a reference point.
void shape_functions(ElementKind kind, Vec2 ref, std::array<double, 4>& n,
                     std::array<std::array<double, 2>, 4>& dn_ref);

/// Basis data of one element at the points of a quadrature rule.
struct ElementBasis {
    ElementKind kind = ElementKind::Triangle;
    int n_nodes = 3;
    std::vector<double> weights;                          ///< reference weights
    std::vector<double> jxw;                              ///< weight * det J
    std::vector<std::array<double, 4>> n;                 ///< [qp][node]
    std::vector<std::array<std::array<double, 2>, 4>> dn; ///< physical gradients [qp][node][dim]
    std::vector<Mat2x2> jac;                              ///< d x_i / d xi_j
    std::vector<Mat2x2> jac_inv;                          ///< d xi_k / d x_i
    std::vector<double> det;
    std::vector<Vec2> x;                                  ///< physical point

    [[nodiscard]] int n_qp() const { return static_cast<int>(weights.size()); }
};

/// Throws GeometryError if det J <= 0 at any point.
ElementBasis basis_eval(ElementKind kind, std::span<const Vec2> coords);
ElementBasis basis_eval(ElementKind kind, std::span<const Vec2> coords, const QuadratureRule& rule);

using MetricTensor = SymTensor2;

/// G_ij = (d xi_k / d x_i)(d xi_k / d x_j) at quadrature point qp.
MetricTensor metric_tensor(const ElementBasis& basis, int qp);

/// u . G . u
inline double metric_quadratic(const MetricTensor& g, Vec2 u)
{
    return g.xx * u.x * u.x + 2.0 * g.xy * u.x * u.y + g.yy * u.y * u.y;
}

/// Physical point of a reference coordinate.
Vec2 map_to_physical(ElementKind kind, std::span<const Vec2> coords, Vec2 ref);

/// Reference coordinate of a physical point if it lies in the element (within tol).
std::optional<Vec2> locate_reference(ElementKind kind, std::span<const Vec2> coords, Vec2 p, double tol = 1e-10);

}  // namespace logconf
