#include "logconf/discretization.hpp"

#include <cmath>
#include <sstream>

namespace logconf {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] via Newton on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w)
{
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

QuadratureRule make_default(ElementKind kind)
{
    QuadratureRule r;
    if (kind == ElementKind::Triangle) {
        r.points = {{1.0 / 6.0, 1.0 / 6.0}, {2.0 / 3.0, 1.0 / 6.0}, {1.0 / 6.0, 2.0 / 3.0}};
        r.weights = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
    } else {
        const double g = 1.0 / std::sqrt(3.0);
        r.points = {{-g, -g}, {g, -g}, {g, g}, {-g, g}};
        r.weights = {1.0, 1.0, 1.0, 1.0};
    }
    return r;
}

}  // namespace

const QuadratureRule& default_rule(ElementKind kind)
{
    static const QuadratureRule tri = make_default(ElementKind::Triangle);
    static const QuadratureRule quad = make_default(ElementKind::Quad);
    return kind == ElementKind::Triangle ? tri : quad;
}

QuadratureRule gauss_rule(ElementKind kind, int n)
{
    if (n < 1) throw std::invalid_argument("gauss_rule: n must be >= 1");
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    QuadratureRule r;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (kind == ElementKind::Quad) {
                r.points.push_back({x[i], x[j]});
                r.weights.push_back(w[i] * w[j]);
            } else {
                // (u, v) in [0,1]^2 -> (u, v (1 - u)), Jacobian (1 - u)
                const double u = 0.5 * (x[i] + 1.0);
                const double v = 0.5 * (x[j] + 1.0);
                r.points.push_back({u, v * (1.0 - u)});
                r.weights.push_back(0.25 * w[i] * w[j] * (1.0 - u));
            }
        }
    }
    return r;
}

const QuadratureRule& edge_rule()
{
    static const QuadratureRule rule = [] {
        const double g = 0.5 / std::sqrt(3.0);
        QuadratureRule r;
        r.points = {{0.5 - g, 0.0}, {0.5 + g, 0.0}};
        r.weights = {0.5, 0.5};
        return r;
    }();
    return rule;
}

void shape_functions(ElementKind kind, Vec2 ref, std::array<double, 4>& n, std::array<std::array<double, 2>, 4>& dn)
{
    if (kind == ElementKind::Triangle) {
        n = {1.0 - ref.x - ref.y, ref.x, ref.y, 0.0};
        dn[0] = {-1.0, -1.0};
        dn[1] = {1.0, 0.0};
        dn[2] = {0.0, 1.0};
        dn[3] = {0.0, 0.0};
        return;
    }
    static constexpr double sx[4] = {-1.0, 1.0, 1.0, -1.0};
    static constexpr double sy[4] = {-1.0, -1.0, 1.0, 1.0};
    for (int a = 0; a < 4; ++a) {
        const double fx = 1.0 + sx[a] * ref.x;
        const double fy = 1.0 + sy[a] * ref.y;
        n[a] = 0.25 * fx * fy;
        dn[a] = {0.25 * sx[a] * fy, 0.25 * sy[a] * fx};
    }
}

ElementBasis basis_eval(ElementKind kind, std::span<const Vec2> coords)
{
    return basis_eval(kind, coords, default_rule(kind));
}

ElementBasis basis_eval(ElementKind kind, std::span<const Vec2> coords, const QuadratureRule& rule)
{
    const int nn = nodes_per_element(kind);
    if (static_cast<int>(coords.size()) != nn) {
        throw std::invalid_argument("basis_eval: wrong number of element nodes");
    }
    const int nq = static_cast<int>(rule.weights.size());
    ElementBasis b;
    b.kind = kind;
    b.n_nodes = nn;
    b.weights = rule.weights;
    b.jxw.resize(nq);
    b.n.resize(nq);
    b.dn.resize(nq);
    b.jac.resize(nq);
    b.jac_inv.resize(nq);
    b.det.resize(nq);
    b.x.resize(nq);
    std::array<std::array<double, 2>, 4> dref{};
    for (int q = 0; q < nq; ++q) {
        shape_functions(kind, rule.points[q], b.n[q], dref);
        Mat2x2 j;
        Vec2 x;
        for (int a = 0; a < nn; ++a) {
            j.a11 += coords[a].x * dref[a][0];
            j.a12 += coords[a].x * dref[a][1];
            j.a21 += coords[a].y * dref[a][0];
            j.a22 += coords[a].y * dref[a][1];
            x = x + b.n[q][a] * coords[a];
        }
        const double det = j.det();
        if (!(det > 0.0)) {
            std::ostringstream os;
            os << "basis_eval: non-positive Jacobian determinant " << det << " at quadrature point " << q;
            throw GeometryError(os.str());
        }
        const Mat2x2 ji{j.a22 / det, -j.a12 / det, -j.a21 / det, j.a11 / det};
        b.jac[q] = j;
        b.jac_inv[q] = ji;
        b.det[q] = det;
        b.jxw[q] = det * rule.weights[q];
        b.x[q] = x;
        for (int a = 0; a < 4; ++a) {
            // dN/dx_i = sum_k dN/dxi_k dxi_k/dx_i
            b.dn[q][a] = {dref[a][0] * ji.a11 + dref[a][1] * ji.a21, dref[a][0] * ji.a12 + dref[a][1] * ji.a22};
        }
    }
    return b;
}

MetricTensor metric_tensor(const ElementBasis& basis, int qp)
{
    const Mat2x2& ji = basis.jac_inv.at(qp);
    return {ji.a11 * ji.a11 + ji.a21 * ji.a21, ji.a11 * ji.a12 + ji.a21 * ji.a22, ji.a12 * ji.a12 + ji.a22 * ji.a22};
}

Vec2 map_to_physical(ElementKind kind, std::span<const Vec2> coords, Vec2 ref)
{
    std::array<double, 4> n{};
    std::array<std::array<double, 2>, 4> dn{};
    shape_functions(kind, ref, n, dn);
    Vec2 x;
    for (int a = 0; a < nodes_per_element(kind); ++a) x = x + n[a] * coords[a];
    return x;
}

std::optional<Vec2> locate_reference(ElementKind kind, std::span<const Vec2> coords, Vec2 p, double tol)
{
    if (kind == ElementKind::Triangle) {
        const Vec2 e1 = coords[1] - coords[0];
        const Vec2 e2 = coords[2] - coords[0];
        const Vec2 d = p - coords[0];
        const double det = cross(e1, e2);
        const Vec2 r{cross(d, e2) / det, cross(e1, d) / det};
        if (r.x >= -tol && r.y >= -tol && r.x + r.y <= 1.0 + tol) return r;
        return std::nullopt;
    }
    Vec2 r{0.0, 0.0};
    std::array<double, 4> n{};
    std::array<std::array<double, 2>, 4> dn{};
    for (int it = 0; it < 30; ++it) {
        shape_functions(kind, r, n, dn);
        Vec2 x;
        Mat2x2 j;
        for (int a = 0; a < 4; ++a) {
            x = x + n[a] * coords[a];
            j.a11 += coords[a].x * dn[a][0];
            j.a12 += coords[a].x * dn[a][1];
            j.a21 += coords[a].y * dn[a][0];
            j.a22 += coords[a].y * dn[a][1];
        }
        const Vec2 res = x - p;
        const double det = j.det();
        const Vec2 step{(j.a22 * res.x - j.a12 * res.y) / det, (-j.a21 * res.x + j.a11 * res.y) / det};
        r = r - step;
        if (std::abs(step.x) + std::abs(step.y) < 1e-14) break;
        if (std::abs(r.x) > 10.0 || std::abs(r.y) > 10.0) return std::nullopt;
    }
    if (std::abs(r.x) <= 1.0 + tol && std::abs(r.y) <= 1.0 + tol) return r;
    return std::nullopt;
}

}  // namespace logconf
