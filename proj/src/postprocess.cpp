#include "logconf/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

namespace logconf {

namespace {

std::vector<double> element_local(const Mesh& mesh, const DofMap& dofs, const FieldState& state, int e)
{
    std::vector<double> local(static_cast<std::size_t>(kDofsPerNode) * mesh.nodes_per_element());
    gather_local(mesh, dofs, state, e, local);
    return local;
}

std::span<const Vec2> coords_span(const std::array<Vec2, 4>& xy, const Mesh& mesh)
{
    return {xy.data(), static_cast<std::size_t>(mesh.nodes_per_element())};
}

/// Element owning each boundary edge, keyed by the sorted node pair.
std::map<std::pair<int, int>, int> edge_owners(const Mesh& mesh)
{
    std::map<std::pair<int, int>, int> want;
    for (const auto& b : mesh.boundary) want[{std::min(b.a, b.b), std::max(b.a, b.b)}] = -1;
    const int nn = mesh.nodes_per_element();
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const auto el = mesh.element(e);
        for (int k = 0; k < nn; ++k) {
            const int a = el[k], b = el[(k + 1) % nn];
            auto it = want.find({std::min(a, b), std::max(a, b)});
            if (it != want.end()) it->second = e;
        }
    }
    return want;
}

int owner_of(const std::map<std::pair<int, int>, int>& owners, const BoundaryEdge& b)
{
    const int e = owners.at({std::min(b.a, b.b), std::max(b.a, b.b)});
    if (e < 0) throw MeshError("boundary edge (" + std::to_string(b.a) + ", " + std::to_string(b.b) + ") has no element");
    return e;
}

Vec2 centroid(const Mesh& mesh, int e)
{
    Vec2 c;
    for (int n : mesh.element(e)) c = c + mesh.nodes[n];
    return (1.0 / mesh.nodes_per_element()) * c;
}

}  // namespace

PointState evaluate_at(const Mesh& mesh, const DofMap& dofs, const FieldState& state, int element, Vec2 x)
{
    const auto xy = mesh.element_coords(element);
    const auto coords = coords_span(xy, mesh);
    const auto ref = locate_reference(mesh.kind, coords, x, 1e-8);
    if (!ref) throw std::invalid_argument("evaluate_at: point is not inside the element");
    QuadratureRule rule;
    rule.points = {*ref};
    rule.weights = {1.0};
    const ElementBasis basis = basis_eval(mesh.kind, coords, rule);
    const auto local = element_local(mesh, dofs, state, element);
    return interpolate(basis, local, 0);
}

PointLocator::PointLocator(const Mesh& mesh) : mesh_(&mesh)
{
    boxes_.reserve(mesh.n_elements());
    for (int e = 0; e < mesh.n_elements(); ++e) {
        std::array<double, 4> b{std::numeric_limits<double>::max(), -std::numeric_limits<double>::max(),
                                std::numeric_limits<double>::max(), -std::numeric_limits<double>::max()};
        for (int n : mesh.element(e)) {
            const Vec2 p = mesh.nodes[n];
            b[0] = std::min(b[0], p.x);
            b[1] = std::max(b[1], p.x);
            b[2] = std::min(b[2], p.y);
            b[3] = std::max(b[3], p.y);
        }
        boxes_.push_back(b);
    }
}

std::optional<int> PointLocator::find(Vec2 x) const
{
    constexpr double pad = 1e-9;
    for (int e = 0; e < mesh_->n_elements(); ++e) {
        const auto& b = boxes_[e];
        if (x.x < b[0] - pad || x.x > b[1] + pad || x.y < b[2] - pad || x.y > b[3] + pad) continue;
        const auto xy = mesh_->element_coords(e);
        if (locate_reference(mesh_->kind, coords_span(xy, *mesh_), x, 1e-9)) return e;
    }
    return std::nullopt;
}

double drag_coefficient(const Mesh& mesh, const PhysicalParams& p, const FieldState& state, double mean_velocity)
{
    const DofMap dofs = DofMap::from_mesh(mesh);
    const auto owners = edge_owners(mesh);
    const QuadratureRule& rule = edge_rule();
    double force = 0.0;
    int edges = 0;
    for (const auto& b : mesh.boundary) {
        if (b.tag != BoundaryTag::Cylinder) continue;
        ++edges;
        const int e = owner_of(owners, b);
        const Vec2 xa = mesh.nodes[b.a], xb = mesh.nodes[b.b];
        const Vec2 t = xb - xa;
        const double len = std::hypot(t.x, t.y);
        Vec2 n{t.y / len, -t.x / len};
        if (dot(n, 0.5 * (xa + xb) - centroid(mesh, e)) < 0.0) n = -1.0 * n;
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const Vec2 x = xa + rule.points[q].x * t;
            const PointState s = evaluate_at(mesh, dofs, state, e, x);
            const SymTensor2 sigma = sigma_from_chi(p, s.chi);
            const SymTensor2 eps = s.eps();
            const double eta_s = p.eta_solvent();
            const double txx = -s.p + 2.0 * eta_s * eps.xx + sigma.xx;
            const double txy = 2.0 * eta_s * eps.xy + sigma.xy;
            force += rule.weights[q] * len * (txx * n.x + txy * n.y);
        }
    }
    if (edges == 0) throw std::invalid_argument("drag_coefficient: mesh has no Cylinder boundary");
    return -2.0 / (p.eta_total * mean_velocity) * force;
}

std::vector<CurvePoint> segment_curve(Vec2 a, Vec2 b, int n, double s0)
{
    if (n < 2) throw std::invalid_argument("segment_curve: need at least 2 points");
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    std::vector<CurvePoint> c(n);
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        c[i] = {s0 + t * len, i == n - 1 ? b : a + t * (b - a)};
    }
    return c;
}

std::vector<CurvePoint> cylinder_wake_curve(double radius, double x_end, int n_arc, int n_wake)
{
    if (n_arc < 2 || n_wake < 2) throw std::invalid_argument("cylinder_wake_curve: need at least 2 points per part");
    if (!(x_end > radius)) throw std::invalid_argument("cylinder_wake_curve: wake must extend past the cylinder");
    std::vector<CurvePoint> c;
    for (int i = 0; i < n_arc; ++i) {
        const double th = M_PI * i / (n_arc - 1);
        Vec2 x{-radius * std::cos(th), radius * std::sin(th)};
        if (i == n_arc - 1) x = {radius, 0.0};
        c.push_back({radius * th, x});
    }
    const auto wake = segment_curve({radius, 0.0}, {x_end, 0.0}, n_wake, M_PI * radius);
    c.insert(c.end(), wake.begin() + 1, wake.end());
    return c;
}

LineProfile sample_line(const Mesh& mesh, const PhysicalParams& p, const FieldState& state,
                        const std::vector<CurvePoint>& curve)
{
    const DofMap dofs = DofMap::from_mesh(mesh);
    const PointLocator locator(mesh);
    LineProfile out;
    out.samples.reserve(curve.size());
    for (const auto& c : curve) {
        LineSample s;
        s.s = c.s;
        s.x = c.x;
        if (const auto e = locator.find(c.x)) {
            const PointState ps = evaluate_at(mesh, dofs, state, *e, c.x);
            s.found = true;
            s.u = ps.u;
            s.p = ps.p;
            s.chi = ps.chi;
            s.sigma = sigma_from_chi(p, ps.chi);
        }
        out.samples.push_back(s);
    }
    return out;
}

std::pair<std::vector<WallSample>, std::vector<WallSample>> contraction_wall_vorticity(const Mesh& mesh,
                                                                                       const FieldState& state,
                                                                                       const ContractionGeometry& g)
{
    const DofMap dofs = DofMap::from_mesh(mesh);
    const auto owners = edge_owners(mesh);
    const double y_wall = -g.ratio * g.h2;
    const double tol = 1e-9 * g.ratio * g.h2;
    std::vector<WallSample> upstream, plane;
    for (const auto& b : mesh.boundary) {
        if (b.tag != BoundaryTag::Wall) continue;
        const Vec2 xa = mesh.nodes[b.a], xb = mesh.nodes[b.b];
        const Vec2 mid = 0.5 * (xa + xb);
        const bool on_upstream = std::abs(xa.y - y_wall) < tol && std::abs(xb.y - y_wall) < tol && mid.x < 0.0;
        const bool on_plane = std::abs(xa.x) < tol && std::abs(xb.x) < tol && mid.y < -g.h2;
        if (!on_upstream && !on_plane) continue;
        const PointState s = evaluate_at(mesh, dofs, state, owner_of(owners, b), mid);
        const WallSample w{mid, s.grad_u.a21 - s.grad_u.a12};
        (on_upstream ? upstream : plane).push_back(w);
    }
    std::sort(upstream.begin(), upstream.end(), [](const auto& a, const auto& b) { return a.x.x < b.x.x; });
    std::sort(plane.begin(), plane.end(), [](const auto& a, const auto& b) { return a.x.y > b.x.y; });
    return {upstream, plane};
}

namespace {

/// First point where omega changes sign from `from` to the opposite, by linear interpolation.
std::optional<Vec2> first_crossing(const std::vector<WallSample>& w, double from)
{
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        const double a = w[i].omega, b = w[i + 1].omega;
        if (a * from > 0.0 && b * from <= 0.0) {
            const double t = a / (a - b);
            return w[i].x + t * (w[i + 1].x - w[i].x);
        }
    }
    return std::nullopt;
}

}  // namespace

VortexReport vortex_sizes(const Mesh& mesh, const FieldState& state, const ContractionGeometry& g)
{
    const auto [upstream, plane] = contraction_wall_vorticity(mesh, state, g);
    VortexReport r;
    if (const auto c = first_crossing(upstream, -1.0)) {
        r.corner_found = true;
        r.corner_reattachment = c;
        r.x_r = -c->x;
    }
    if (!plane.empty() && plane.front().omega > 0.0) {
        if (const auto c = first_crossing(plane, 1.0)) {
            r.lip_found = true;
            r.lip_reattachment = c;
            r.x_l = -g.h2 - c->y;
        }
    }
    return r;
}

BoxCentre box_centre_values(const Mesh& mesh, const FieldState& state)
{
    const DofMap dofs = DofMap::from_mesh(mesh);
    const Vec2 origin{0.0, 0.0};
    BoxCentre c;
    int count = 0;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const auto xy = mesh.element_coords(e);
        if (!locate_reference(mesh.kind, coords_span(xy, mesh), origin, 1e-9)) continue;
        const PointState s = evaluate_at(mesh, dofs, state, e, origin);
        c.chi11 += s.chi.xx;
        c.eps0 += s.grad_u.a11;
        ++count;
    }
    if (count == 0) throw std::invalid_argument("box_centre_values: the origin is not in the mesh");
    c.chi11 /= count;
    c.eps0 /= count;
    return c;
}

IdentityDefect newtonian_identity_defect(const Mesh& mesh, const PhysicalParams& p, const FieldState& state)
{
    const DofMap dofs = DofMap::from_mesh(mesh);
    IdentityDefect d;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const auto xy = mesh.element_coords(e);
        const ElementBasis basis = basis_eval(mesh.kind, coords_span(xy, mesh));
        const auto local = element_local(mesh, dofs, state, e);
        for (std::size_t q = 0; q < basis.weights.size(); ++q) {
            const PointState s = interpolate(basis, local, static_cast<int>(q));
            const SymTensor2 target = (2.0 * p.eta_polymer()) * s.eps();
            d.max_defect = std::max(d.max_defect, (s.chi - target).norm());
            d.max_scale = std::max(d.max_scale, target.norm());
        }
    }
    return d;
}

EocResult richardson_eoc(double q_h, double q_2h, double q_4h)
{
    EocResult r;
    const double num = q_2h - q_h;
    const double den = q_4h - q_2h;
    if (!std::isfinite(q_h) || !std::isfinite(q_2h) || !std::isfinite(q_4h) || den == 0.0 || num / den <= 0.0) {
        r.degenerate = true;
        r.extrapolated = q_h;
        return r;
    }
    r.order = std::log(num / den) / std::log(0.5);
    const double k = std::pow(2.0, r.order);
    r.extrapolated = (k * q_h - q_2h) / (k - 1.0);
    if (!std::isfinite(r.order) || !std::isfinite(r.extrapolated)) r.degenerate = true;
    return r;
}

std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y, double x_lo,
                                   double x_hi)
{
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (!(x[i] >= x_lo && x[i] <= x_hi) || !(x[i] > 0.0) || !(y[i] > 0.0)) continue;
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) return std::nullopt;
    const double den = n * sxx - sx * sx;
    if (!(std::abs(den) > 0.0)) return std::nullopt;
    return (n * sxy - sx * sy) / den;
}

SlopeReport asymptotic_slopes(const Mesh& mesh, const PhysicalParams& p, const FieldState& state,
                              const ContractionGeometry& g, double r_lo, double r_hi, int n)
{
    if (!(r_lo > 0.0 && r_hi > r_lo && r_hi <= g.h2) || n < 2)
        throw std::invalid_argument("asymptotic_slopes: need 0 < r_lo < r_hi <= h2 and n >= 2");
    std::vector<CurvePoint> curve;
    for (int i = 0; i < n; ++i) {
        const double r = r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (n - 1));
        curve.push_back({r, {0.0, -g.h2 + r}});
    }
    const LineProfile prof = sample_line(mesh, p, state, curve);
    SlopeReport rep;
    for (const auto& s : prof.samples) {
        if (!s.found) continue;
        rep.r.push_back(s.s);
        rep.s11.push_back(std::abs(s.sigma.xx));
        rep.s12.push_back(std::abs(s.sigma.xy));
        rep.s22.push_back(std::abs(s.sigma.yy));
        rep.u1.push_back(std::abs(s.u.x));
        rep.u2.push_back(std::abs(s.u.y));
    }
    rep.slope_s11 = loglog_slope(rep.r, rep.s11, r_lo, r_hi);
    rep.slope_s12 = loglog_slope(rep.r, rep.s12, r_lo, r_hi);
    rep.slope_s22 = loglog_slope(rep.r, rep.s22, r_lo, r_hi);
    rep.slope_u1 = loglog_slope(rep.r, rep.u1, r_lo, r_hi);
    rep.slope_u2 = loglog_slope(rep.r, rep.u2, r_lo, r_hi);
    return rep;
}

void write_csv(const std::string& path, const std::string& comment, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows)
{
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << "# " << comment << "\n";
    for (std::size_t i = 0; i < header.size(); ++i) f << (i ? "," : "") << header[i];
    f << "\n";
    char buf[64];
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            f << (i ? "," : "") << buf;
        }
        f << "\n";
    }
    if (!f) throw std::runtime_error("error writing " + path);
}

void write_profile_csv(const std::string& path, const std::string& comment, const LineProfile& profile)
{
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<double>> rows;
    for (const auto& s : profile.samples) {
        if (s.found)
            rows.push_back({s.s, s.u.x, s.u.y, s.p, s.sigma.xx, s.sigma.xy, s.sigma.yy});
        else
            rows.push_back({s.s, nan, nan, nan, nan, nan, nan});
    }
    write_csv(path, comment, {"s", "u1", "u2", "p", "s11", "s12", "s22"}, rows);
}

}  // namespace logconf
