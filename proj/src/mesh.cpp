#include "logconf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace logconf {

const char* to_string(BoundaryTag tag)
{
    switch (tag) {
    case BoundaryTag::Inflow: return "Inflow";
    case BoundaryTag::Outflow: return "Outflow";
    case BoundaryTag::Wall: return "Wall";
    case BoundaryTag::Cylinder: return "Cylinder";
    case BoundaryTag::Symmetry: return "Symmetry";
    case BoundaryTag::PeriodicX: return "PeriodicX";
    case BoundaryTag::PeriodicY: return "PeriodicY";
    }
    return "?";
}

std::optional<BoundaryTag> parse_boundary_tag(const std::string& s)
{
    for (BoundaryTag t : {BoundaryTag::Inflow, BoundaryTag::Outflow, BoundaryTag::Wall, BoundaryTag::Cylinder,
                          BoundaryTag::Symmetry, BoundaryTag::PeriodicX, BoundaryTag::PeriodicY}) {
        if (s == to_string(t)) return t;
    }
    return std::nullopt;
}

std::array<Vec2, 4> Mesh::element_coords(int e) const
{
    std::array<Vec2, 4> c{};
    for (int a = 0; a < nodes_per_element(); ++a) c[a] = nodes[elements[e][a]];
    return c;
}

double Mesh::area() const
{
    double total = 0.0;
    for (int e = 0; e < n_elements(); ++e) {
        const auto c = element_coords(e);
        double twice = 0.0;
        const int nn = nodes_per_element();
        for (int a = 0; a < nn; ++a) twice += cross(c[a], c[(a + 1) % nn]);
        total += 0.5 * twice;
    }
    return total;
}

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

std::map<EdgeKey, int> edge_counts(const Mesh& m)
{
    std::map<EdgeKey, int> counts;
    const int nn = m.nodes_per_element();
    for (const auto& el : m.elements) {
        for (int a = 0; a < nn; ++a) ++counts[edge_key(el[a], el[(a + 1) % nn])];
    }
    return counts;
}

[[noreturn]] void fail(const std::string& msg) { throw MeshError(msg); }

}  // namespace

void Mesh::validate() const
{
    const int nn = nodes_per_element();
    const int nv = n_nodes();
    if (nodes.empty() || elements.empty()) fail("mesh has no nodes or no elements");
    for (int i = 0; i < nv; ++i) {
        if (!std::isfinite(nodes[i].x) || !std::isfinite(nodes[i].y)) {
            fail("node " + std::to_string(i) + " has non-finite coordinates");
        }
    }
    for (int e = 0; e < n_elements(); ++e) {
        const auto& el = elements[e];
        for (int a = 0; a < nn; ++a) {
            if (el[a] < 0 || el[a] >= nv) fail("element " + std::to_string(e) + " references a missing node");
            for (int b = 0; b < a; ++b) {
                if (el[a] == el[b]) fail("element " + std::to_string(e) + " repeats a node");
            }
        }
        const auto c = element_coords(e);
        try {
            (void)basis_eval(kind, std::span<const Vec2>(c.data(), nn));
        } catch (const GeometryError& err) {
            fail("element " + std::to_string(e) + ": " + err.what());
        }
    }

    const auto counts = edge_counts(*this);
    for (const auto& [key, count] : counts) {
        if (count > 2) fail("edge (" + std::to_string(key.first) + ", " + std::to_string(key.second) +
                            ") is shared by more than two elements");
    }
    std::set<EdgeKey> tagged;
    for (std::size_t i = 0; i < boundary.size(); ++i) {
        const auto key = edge_key(boundary[i].a, boundary[i].b);
        const auto it = counts.find(key);
        if (it == counts.end()) fail("boundary edge " + std::to_string(i) + " is not an element edge");
        if (it->second != 1) fail("boundary edge " + std::to_string(i) + " is an interior edge");
        if (!tagged.insert(key).second) fail("boundary edge " + std::to_string(i) + " is tagged twice");
    }
    for (const auto& [key, count] : counts) {
        if (count == 1 && !tagged.count(key)) {
            fail("untagged boundary edge (" + std::to_string(key.first) + ", " + std::to_string(key.second) + ")");
        }
    }

    if (!periodic.empty()) {
        if (lattice.empty()) fail("periodic pairs given without lattice vectors");
        std::set<int> slaves;
        for (const auto& [m, s] : periodic) {
            if (m < 0 || m >= nv || s < 0 || s >= nv || m == s) fail("invalid periodic pair");
            if (!slaves.insert(s).second) fail("node " + std::to_string(s) + " is a slave twice");
        }
        double scale = 0.0;
        for (const Vec2& t : lattice) scale = std::max(scale, std::hypot(t.x, t.y));
        for (const auto& [m, s] : periodic) {
            if (slaves.count(m)) fail("periodic master " + std::to_string(m) + " is itself a slave");
            const Vec2 d = nodes[s] - nodes[m];
            bool ok = false;
            const int nl = static_cast<int>(lattice.size());
            const int combos = 1;
            for (int c0 = -combos; c0 <= combos && !ok; ++c0) {
                for (int c1 = (nl > 1 ? -combos : 0); c1 <= (nl > 1 ? combos : 0) && !ok; ++c1) {
                    if (c0 == 0 && c1 == 0) continue;
                    Vec2 t = static_cast<double>(c0) * lattice[0];
                    if (nl > 1) t = t + static_cast<double>(c1) * lattice[1];
                    ok = std::hypot(d.x - t.x, d.y - t.y) <= 1e-10 * scale;
                }
            }
            if (!ok) fail("periodic pair (" + std::to_string(m) + ", " + std::to_string(s) +
                          ") is not a lattice translation");
        }
    }
}

std::vector<int> Mesh::master_of() const
{
    std::vector<int> out(nodes.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<int>(i);
    for (const auto& [m, s] : periodic) out[s] = m;
    return out;
}

namespace {

// Cell sizes of an interval of the given length: geometric growth from
// size ha at the start and hb at the end, capped at h_max.
std::vector<double> two_sided_sizes(double length, double ha, double hb, double growth, double h_max)
{
    std::vector<double> a, b;
    double na = std::min(ha, h_max);
    double nb = std::min(hb, h_max);
    double rem = length;
    while (true) {
        const bool take_a = na <= nb;
        const double h = take_a ? na : nb;
        if (h > rem) break;
        if (take_a) {
            a.push_back(na);
            na = std::min(na * growth, h_max);
        } else {
            b.push_back(nb);
            nb = std::min(nb * growth, h_max);
        }
        rem -= h;
    }
    if (rem > 0.5 * std::min(na, nb) || (a.empty() && b.empty())) {
        a.push_back(rem);
    } else if (!b.empty() && (a.empty() || b.back() > a.back())) {
        b.back() += rem;
    } else {
        a.back() += rem;
    }
    a.insert(a.end(), b.rbegin(), b.rend());
    return a;
}

// Coordinates start, start + s0, ... ending exactly at start + length (sign gives direction).
std::vector<double> graded_coords(double start, double length, double ha, double hb, double growth, double h_max)
{
    const auto sizes = two_sided_sizes(std::abs(length), ha, hb, growth, h_max);
    std::vector<double> out{start};
    const double sign = length < 0.0 ? -1.0 : 1.0;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
        acc += sizes[i];
        out.push_back(start + sign * acc);
    }
    out.push_back(start + length);
    return out;
}

// Node registry deduplicating coordinates on a 1e-9 lattice.
class NodeSet {
public:
    int add(Vec2 p)
    {
        const auto key = std::make_pair(std::llround(p.x * 1e9), std::llround(p.y * 1e9));
        const auto it = index_.find(key);
        if (it != index_.end()) return it->second;
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back(p);
        index_.emplace(key, id);
        return id;
    }
    std::vector<Vec2>& nodes() { return nodes_; }

private:
    std::vector<Vec2> nodes_;
    std::map<std::pair<long long, long long>, int> index_;
};

double signed_area(const Mesh& m, const std::array<int, 4>& el, int nn)
{
    double twice = 0.0;
    for (int a = 0; a < nn; ++a) twice += cross(m.nodes[el[a]], m.nodes[el[(a + 1) % nn]]);
    return 0.5 * twice;
}

void orient_ccw(Mesh& m)
{
    const int nn = m.nodes_per_element();
    for (auto& el : m.elements) {
        if (signed_area(m, el, nn) < 0.0) std::reverse(el.begin(), el.begin() + nn);
    }
}

template <class Classify>
void tag_boundary(Mesh& m, Classify classify)
{
    const int nn = m.nodes_per_element();
    const auto counts = edge_counts(m);
    m.boundary.clear();
    for (const auto& el : m.elements) {
        for (int a = 0; a < nn; ++a) {
            const int p = el[a];
            const int q = el[(a + 1) % nn];
            if (counts.at(edge_key(p, q)) == 1) m.boundary.push_back({p, q, classify(m.nodes[p], m.nodes[q])});
        }
    }
}

// Splits quad (p00, p10, p11, p01) into two triangles along an alternating diagonal.
void push_split_quad(Mesh& m, int p00, int p10, int p11, int p01, bool flip)
{
    if (!flip) {
        m.elements.push_back({p00, p10, p11, -1});
        m.elements.push_back({p00, p11, p01, -1});
    } else {
        m.elements.push_back({p00, p10, p01, -1});
        m.elements.push_back({p10, p11, p01, -1});
    }
}

}  // namespace

Mesh gen_periodic_box(int n, double half_length)
{
    if (n < 4) throw std::invalid_argument("gen_periodic_box: n_per_side must be >= 4");
    if (!(half_length > 0.0)) throw std::invalid_argument("gen_periodic_box: half_length must be > 0");
    Mesh m;
    m.kind = ElementKind::Quad;
    const double h = 2.0 * half_length / n;
    auto id = [n](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            // exact end coordinates so that paired nodes are exact translates
            const double x = (i == n) ? half_length : -half_length + h * i;
            const double y = (j == n) ? half_length : -half_length + h * j;
            m.nodes.push_back({x, y});
        }
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) m.elements.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    }
    for (int i = 0; i < n; ++i) {
        m.boundary.push_back({id(i, 0), id(i + 1, 0), BoundaryTag::PeriodicY});
        m.boundary.push_back({id(i + 1, n), id(i, n), BoundaryTag::PeriodicY});
        m.boundary.push_back({id(n, i), id(n, i + 1), BoundaryTag::PeriodicX});
        m.boundary.push_back({id(0, i + 1), id(0, i), BoundaryTag::PeriodicX});
    }
    for (int j = 0; j < n; ++j) m.periodic.emplace_back(id(0, j), id(n, j));
    for (int i = 0; i < n; ++i) m.periodic.emplace_back(id(i, 0), id(i, n));
    m.periodic.emplace_back(id(0, 0), id(n, n));
    m.lattice = {{2.0 * half_length, 0.0}, {0.0, 2.0 * half_length}};
    return m;
}

Mesh gen_contraction(const GradingSpec& g)
{
    if (!(g.h2 > 0.0)) throw std::invalid_argument("gen_contraction: h2 must be > 0");
    if (!(g.growth > 1.0)) throw std::invalid_argument("gen_contraction: growth ratio must be > 1");
    if (!(g.target_h > 0.0) || !(g.h_max >= g.target_h)) {
        throw std::invalid_argument("gen_contraction: need 0 < target_h <= h_max");
    }
    if (!(g.ratio > 1.0)) throw std::invalid_argument("gen_contraction: ratio must be > 1");
    if (!(g.upstream_length > 0.0) || !(g.downstream_length > 0.0)) {
        throw std::invalid_argument("gen_contraction: channel lengths must be > 0");
    }
    const double h1 = g.ratio * g.h2;
    const double wall_h = std::min(g.h_max, g.wall_h > 0.0 ? g.wall_h : g.target_h);

    // x lines: graded away from the contraction plane x = 0 in both directions.
    std::vector<double> xs = graded_coords(0.0, -g.upstream_length, g.target_h, g.h_max, g.growth, g.h_max);
    std::reverse(xs.begin(), xs.end());
    const auto xd = graded_coords(0.0, g.downstream_length, g.target_h, g.h_max, g.growth, g.h_max);
    xs.insert(xs.end(), xd.begin() + 1, xd.end());
    // y lines: graded away from the corner at y = -h2, and toward the upstream wall.
    std::vector<double> ys = graded_coords(-g.h2, -(h1 - g.h2), g.target_h, wall_h, g.growth, g.h_max);
    std::reverse(ys.begin(), ys.end());
    const auto yu = graded_coords(-g.h2, g.h2, g.target_h, g.h_max, g.growth, g.h_max);
    ys.insert(ys.end(), yu.begin() + 1, yu.end());

    Mesh m;
    m.kind = ElementKind::Quad;
    const int nx = static_cast<int>(xs.size());
    const int ny = static_cast<int>(ys.size());
    std::vector<int> id(static_cast<std::size_t>(nx) * ny, -1);
    const double tol = 1e-12 * h1;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (xs[i] <= tol || ys[j] >= -g.h2 - tol) {
                id[j * nx + i] = m.n_nodes();
                m.nodes.push_back({xs[i], ys[j]});
            }
        }
    }
    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            const double xc = 0.5 * (xs[i] + xs[i + 1]);
            const double yc = 0.5 * (ys[j] + ys[j + 1]);
            if (xc < 0.0 || yc > -g.h2) {
                m.elements.push_back({id[j * nx + i], id[j * nx + i + 1], id[(j + 1) * nx + i + 1], id[(j + 1) * nx + i]});
            }
        }
    }
    const double x_in = xs.front();
    const double x_out = xs.back();
    tag_boundary(m, [&](Vec2 p, Vec2 q) {
        const Vec2 c = 0.5 * (p + q);
        if (std::abs(c.x - x_in) < tol && std::abs(p.x - q.x) < tol) return BoundaryTag::Inflow;
        if (std::abs(c.x - x_out) < tol && std::abs(p.x - q.x) < tol) return BoundaryTag::Outflow;
        if (std::abs(c.y) < tol && std::abs(p.y - q.y) < tol) return BoundaryTag::Symmetry;
        return BoundaryTag::Wall;
    });
    return m;
}

namespace {

// Geometric ratio q with first layer share (q - 1)/(q^n - 1) = first.
double layer_ratio(int n, double first)
{
    if (first * n >= 1.0) return 1.0;
    double lo = 1.0 + 1e-12;
    double hi = 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double share = (mid - 1.0) / (std::pow(mid, n) - 1.0);
        if (share > first) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double cylinder_channel_area(const CylinderSpec& s)
{
    const int n = s.arc_segments << s.refinement;
    const double channel = (s.upstream_length + s.downstream_length) * s.half_height;
    return channel - 0.5 * n * std::sin(M_PI / n) * s.radius * s.radius;
}

Mesh gen_cylinder_channel(const CylinderSpec& s)
{
    if (s.refinement < 0 || s.refinement > 6) throw std::invalid_argument("gen_cylinder_channel: refinement in [0, 6]");
    if (!(s.radius > 0.0) || !(s.half_height > s.radius)) {
        throw std::invalid_argument("gen_cylinder_channel: need 0 < radius < half_height");
    }
    const double b = s.half_height;
    if (!(s.upstream_length > b) || !(s.downstream_length > b)) {
        throw std::invalid_argument("gen_cylinder_channel: channel must extend beyond the cylinder block");
    }
    const int scale = 1 << s.refinement;
    const int nt = s.arc_segments * scale;
    const int nr = s.radial_layers * scale;
    if (nt % 4 != 0) throw std::invalid_argument("gen_cylinder_channel: arc_segments must be divisible by 4");

    NodeSet ns;
    Mesh m;
    m.kind = ElementKind::Triangle;

    // Cylinder block: rays from the arc to the square [-b, b] x [0, b].
    const double arc_h = M_PI * s.radius / nt;
    const double q = layer_ratio(nr, arc_h / (b - s.radius));
    std::vector<double> rho(nr + 1);
    for (int j = 0; j <= nr; ++j) {
        rho[j] = q == 1.0 ? static_cast<double>(j) / nr : (std::pow(q, j) - 1.0) / (std::pow(q, nr) - 1.0);
    }
    std::vector<int> block((nt + 1) * (nr + 1));
    for (int k = 0; k <= nt; ++k) {
        const double th = M_PI * k / nt;
        Vec2 inner{s.radius * std::cos(th), s.radius * std::sin(th)};
        Vec2 outer;
        if (4 * k <= nt) {
            outer = {b, b * std::tan(th)};
        } else if (4 * k >= 3 * nt) {
            outer = {-b, b * std::tan(M_PI - th)};
        } else {
            outer = {b / std::tan(th), b};
        }
        if (k == 0) inner.y = 0.0, outer.y = 0.0;
        if (k == nt) inner = {-s.radius, 0.0}, outer = {-b, 0.0};
        if (4 * k == nt) outer = {b, b};
        if (4 * k == 3 * nt) outer = {-b, b};
        if (2 * k == nt) inner = {0.0, s.radius}, outer = {0.0, b};
        for (int j = 0; j <= nr; ++j) block[k * (nr + 1) + j] = ns.add((1.0 - rho[j]) * inner + rho[j] * outer);
    }
    for (int k = 0; k < nt; ++k) {
        for (int j = 0; j < nr; ++j) {
            const int p00 = block[k * (nr + 1) + j];
            const int p10 = block[(k + 1) * (nr + 1) + j];
            const int p11 = block[(k + 1) * (nr + 1) + j + 1];
            const int p01 = block[k * (nr + 1) + j + 1];
            push_split_quad(m, p00, p10, p11, p01, (k + j) % 2 == 1);
        }
    }

    // Side blocks share the y levels of the block's vertical sides.
    std::vector<double> ys;
    for (int k = 0; k <= nt / 4; ++k) ys.push_back(4 * k == nt ? b : (k == 0 ? 0.0 : b * std::tan(M_PI * k / nt)));
    const double h_start = (b - s.radius) * (1.0 - rho[nr - 1]);
    const double h_max_up = 0.5 / scale;
    const double h_max_down = 0.25 / scale;
    const auto xu = graded_coords(-b, -(s.upstream_length - b), h_start, h_max_up, std::pow(1.1, 1.0 / scale), h_max_up);
    const auto xd = graded_coords(b, s.downstream_length - b, h_start, h_max_down, std::pow(1.05, 1.0 / scale), h_max_down);
    for (const auto* xs : {&xu, &xd}) {
        const int nx = static_cast<int>(xs->size());
        const int ny = static_cast<int>(ys.size());
        std::vector<int> id(static_cast<std::size_t>(nx) * ny);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) id[j * nx + i] = ns.add({(*xs)[i], ys[j]});
        for (int j = 0; j + 1 < ny; ++j) {
            for (int i = 0; i + 1 < nx; ++i) {
                push_split_quad(m, id[j * nx + i], id[j * nx + i + 1], id[(j + 1) * nx + i + 1], id[(j + 1) * nx + i],
                                (i + j) % 2 == 1);
            }
        }
    }
    m.nodes = std::move(ns.nodes());
    orient_ccw(m);

    const double tol = 1e-9;
    const double x_in = -s.upstream_length;
    const double x_out = s.downstream_length;
    tag_boundary(m, [&](Vec2 p, Vec2 q2) {
        const Vec2 c = 0.5 * (p + q2);
        if (std::abs(c.x - x_in) < tol) return BoundaryTag::Inflow;
        if (std::abs(c.x - x_out) < tol) return BoundaryTag::Outflow;
        if (std::abs(c.y - b) < tol) return BoundaryTag::Wall;
        if (std::abs(p.y) < tol && std::abs(q2.y) < tol) return BoundaryTag::Symmetry;
        return BoundaryTag::Cylinder;
    });
    return m;
}

// ---------------------------------------------------------------- text format

namespace {

class Tokenizer {
public:
    explicit Tokenizer(const std::string& text)
    {
        std::istringstream in(text);
        std::string line;
        int no = 0;
        while (std::getline(in, line)) {
            ++no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            std::vector<std::string> toks;
            std::string t;
            while (ls >> t) toks.push_back(t);
            if (!toks.empty()) lines_.push_back({no, std::move(toks)});
        }
    }
    bool done() const { return pos_ >= lines_.size(); }
    const std::vector<std::string>& next(const char* what)
    {
        if (done()) throw MeshError(std::string("unexpected end of file, expected ") + what);
        current_ = lines_[pos_].first;
        return lines_[pos_++].second;
    }
    const std::vector<std::string>* peek() const { return done() ? nullptr : &lines_[pos_].second; }
    [[noreturn]] void error(const std::string& msg) const
    {
        throw MeshError("line " + std::to_string(current_) + ": " + msg);
    }
    double to_double(const std::string& s) const
    {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) error("bad number '" + s + "'");
            return v;
        } catch (const std::logic_error&) {
            error("bad number '" + s + "'");
        }
    }
    int to_int(const std::string& s) const
    {
        try {
            std::size_t used = 0;
            const long v = std::stol(s, &used);
            if (used != s.size()) error("bad integer '" + s + "'");
            return static_cast<int>(v);
        } catch (const std::logic_error&) {
            error("bad integer '" + s + "'");
        }
    }

private:
    std::vector<std::pair<int, std::vector<std::string>>> lines_;
    std::size_t pos_ = 0;
    int current_ = 0;
};

}  // namespace

Mesh parse_mesh(const std::string& text)
{
    Tokenizer tk(text);
    if (tk.done()) throw MeshError("empty mesh file");
    const auto& head = tk.next("header");
    if (head.size() != 6 || head[0] != "nodes" || head[2] != "elements" || head[4] != "kind") {
        tk.error("expected 'nodes N elements M kind tri|quad'");
    }
    Mesh m;
    const int nn = tk.to_int(head[1]);
    const int ne = tk.to_int(head[3]);
    if (head[5] == "tri") m.kind = ElementKind::Triangle;
    else if (head[5] == "quad") m.kind = ElementKind::Quad;
    else tk.error("unknown element kind '" + head[5] + "'");
    if (nn <= 0 || ne <= 0) tk.error("node and element counts must be positive");
    const int npe = m.nodes_per_element();
    for (int i = 0; i < nn; ++i) {
        const auto& t = tk.next("node coordinates");
        if (t.size() != 2) tk.error("expected 'x y'");
        m.nodes.push_back({tk.to_double(t[0]), tk.to_double(t[1])});
    }
    for (int e = 0; e < ne; ++e) {
        const auto& t = tk.next("element");
        if (static_cast<int>(t.size()) != npe) tk.error("expected " + std::to_string(npe) + " node indices");
        std::array<int, 4> el{-1, -1, -1, -1};
        for (int a = 0; a < npe; ++a) el[a] = tk.to_int(t[a]);
        m.elements.push_back(el);
    }
    while (!tk.done()) {
        const auto& t = tk.next("section");
        if (t.size() == 2 && t[0] == "boundary") {
            const int k = tk.to_int(t[1]);
            for (int i = 0; i < k; ++i) {
                const auto& r = tk.next("boundary edge");
                if (r.size() != 3) tk.error("expected 'a b TAG'");
                const auto tag = parse_boundary_tag(r[2]);
                if (!tag) tk.error("unknown boundary tag '" + r[2] + "'");
                m.boundary.push_back({tk.to_int(r[0]), tk.to_int(r[1]), *tag});
            }
        } else if (t.size() == 2 && t[0] == "periodic") {
            const int k = tk.to_int(t[1]);
            for (int i = 0; i < k; ++i) {
                const auto& r = tk.next("periodic pair");
                if (r.size() != 2) tk.error("expected 'master slave'");
                m.periodic.emplace_back(tk.to_int(r[0]), tk.to_int(r[1]));
            }
        } else if (t.size() == 2 && t[0] == "lattice") {
            const int k = tk.to_int(t[1]);
            if (k < 1 || k > 2) tk.error("lattice needs 1 or 2 vectors");
            for (int i = 0; i < k; ++i) {
                const auto& r = tk.next("lattice vector");
                if (r.size() != 2) tk.error("expected 'tx ty'");
                m.lattice.push_back({tk.to_double(r[0]), tk.to_double(r[1])});
            }
        } else {
            tk.error("unknown section '" + t[0] + "'");
        }
    }
    m.validate();
    return m;
}

Mesh load_mesh(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open mesh file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_mesh(ss.str());
    } catch (const MeshError& err) {
        throw MeshError(path + ": " + err.what());
    }
}

std::string format_mesh(const Mesh& m)
{
    std::ostringstream os;
    os.precision(17);
    const int npe = m.nodes_per_element();
    os << "nodes " << m.n_nodes() << " elements " << m.n_elements() << " kind "
       << (m.kind == ElementKind::Triangle ? "tri" : "quad") << "\n";
    for (const Vec2& p : m.nodes) os << p.x << ' ' << p.y << '\n';
    for (const auto& el : m.elements) {
        for (int a = 0; a < npe; ++a) os << (a ? " " : "") << el[a];
        os << '\n';
    }
    os << "boundary " << m.boundary.size() << '\n';
    for (const auto& be : m.boundary) os << be.a << ' ' << be.b << ' ' << to_string(be.tag) << '\n';
    if (!m.periodic.empty()) {
        os << "periodic " << m.periodic.size() << '\n';
        for (const auto& [a, b] : m.periodic) os << a << ' ' << b << '\n';
        os << "lattice " << m.lattice.size() << '\n';
        for (const Vec2& t : m.lattice) os << t.x << ' ' << t.y << '\n';
    }
    return os.str();
}

void save_mesh(const Mesh& mesh, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw MeshError("cannot write mesh file '" + path + "'");
    out << format_mesh(mesh);
}

}  // namespace logconf
