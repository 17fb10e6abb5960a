#include "logconf/formulation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace logconf {

const char* to_string(Variant v)
{
    switch (v) {
    case Variant::Galerkin: return "galerkin";
    case Variant::SUPG: return "supg";
    case Variant::GLS: return "gls";
    case Variant::ASGS: return "asgs";
    }
    return "?";
}

std::optional<Variant> parse_variant(const std::string& s)
{
    for (Variant v : {Variant::Galerkin, Variant::SUPG, Variant::GLS, Variant::ASGS}) {
        if (s == to_string(v)) return v;
    }
    return std::nullopt;
}

const char* to_string(Benchmark b)
{
    switch (b) {
    case Benchmark::Box: return "box";
    case Benchmark::Cylinder: return "cylinder";
    case Benchmark::Contraction: return "contraction";
    }
    return "?";
}

std::optional<Benchmark> parse_benchmark(const std::string& s)
{
    for (Benchmark b : {Benchmark::Box, Benchmark::Cylinder, Benchmark::Contraction}) {
        if (s == to_string(b)) return b;
    }
    return std::nullopt;
}

DofMap DofMap::from_mesh(const Mesh& mesh)
{
    const std::vector<int> master = mesh.master_of();
    DofMap d;
    d.node_index.assign(mesh.n_nodes(), -1);
    for (int i = 0; i < mesh.n_nodes(); ++i) {
        if (master[i] == i) d.node_index[i] = d.n_nodes++;
    }
    for (int i = 0; i < mesh.n_nodes(); ++i) {
        if (master[i] != i) d.node_index[i] = d.node_index[master[i]];
    }
    return d;
}

void gather_local(const Mesh& mesh, const DofMap& dofs, const FieldState& state, int element,
                  std::span<double> local)
{
    const auto nodes = mesh.element(element);
    for (std::size_t a = 0; a < nodes.size(); ++a) {
        const int base = kDofsPerNode * dofs.node_index[nodes[a]];
        for (int c = 0; c < kDofsPerNode; ++c) local[kDofsPerNode * a + c] = state[base + c];
    }
}

PointState interpolate(const ElementBasis& basis, std::span<const double> local, int qp)
{
    PointState s;
    const auto& n = basis.n[qp];
    const auto& dn = basis.dn[qp];
    for (int a = 0; a < basis.n_nodes; ++a) {
        const double* v = &local[kDofsPerNode * a];
        const double nx = dn[a][0], ny = dn[a][1];
        s.u.x += n[a] * v[U1];
        s.u.y += n[a] * v[U2];
        s.p += n[a] * v[P];
        s.chi += n[a] * SymTensor2{v[CHI11], v[CHI12], v[CHI22]};
        s.grad_u.a11 += nx * v[U1];
        s.grad_u.a12 += ny * v[U1];
        s.grad_u.a21 += nx * v[U2];
        s.grad_u.a22 += ny * v[U2];
        s.grad_p.x += nx * v[P];
        s.grad_p.y += ny * v[P];
        s.grad_chi[0] += nx * SymTensor2{v[CHI11], v[CHI12], v[CHI22]};
        s.grad_chi[1] += ny * SymTensor2{v[CHI11], v[CHI12], v[CHI22]};
    }
    return s;
}

namespace {

/// Integrand of one quadrature point: r_a += JxW (a N_a + b . grad N_a) per field.
struct QpFlux {
    std::array<double, kDofsPerNode> a{};
    std::array<std::array<double, 2>, kDofsPerNode> b{};
};

void add_flux(const ElementBasis& basis, int qp, const QpFlux& f, std::span<double> out)
{
    const double w = basis.jxw[qp];
    const auto& n = basis.n[qp];
    const auto& dn = basis.dn[qp];
    for (int a = 0; a < basis.n_nodes; ++a) {
        double* r = &out[kDofsPerNode * a];
        for (int c = 0; c < kDofsPerNode; ++c) {
            r[c] += w * (f.a[c] * n[a] + f.b[c][0] * dn[a][0] + f.b[c][1] * dn[a][1]);
        }
    }
}

/// Contraction of a symmetric tensor with each basis tensor E_m.
std::array<double, 3> against_basis(const SymTensor2& t) { return {t.xx, 2.0 * t.xy, t.yy}; }

/// Row i of a symmetric tensor, used as the flux of sum_l T_il d_l N.
std::array<double, 2> row(const SymTensor2& t, int i) { return i == 0 ? std::array{t.xx, t.xy} : std::array{t.xy, t.yy}; }

Vec2 convect(Vec2 w, const Mat2x2& g) { return {w.x * g.a11 + w.y * g.a12, w.x * g.a21 + w.y * g.a22}; }

SymTensor2 convect(Vec2 w, const std::array<SymTensor2, 2>& g) { return w.x * g[0] + w.y * g[1]; }

Vec2 divergence(const std::array<SymTensor2, 2>& g) { return {g[0].xx + g[1].xy, g[0].xy + g[1].yy}; }

struct Coeffs {
    double eta, beta, rho, lambda, a, c1, cl, cdk;
    explicit Coeffs(const PhysicalParams& p)
        : eta(p.eta_total), beta(p.beta), rho(p.rho), lambda(p.lambda), a(p.a()),
          c1(0.5 / p.eta_total), cl(0.5 * p.lambda / p.eta_total), cdk(p.lambda / p.eta_total)
    {
    }
};

Vec2 body_at(const BodyForce& body, Vec2 x) { return body ? body(x) : Vec2{}; }

/// Everything the fluxes need at one point.
struct PointEval {
    PointState s;
    ConstitutivePoint cp;
    Vec2 u_adv;
    SymTensor2 eps;
    double omega;
    StrongResiduals res;
};

PointEval evaluate_point(const Coeffs& k, const ElementBasis& basis, std::span<const double> local, int qp,
                         const BodyForce& body, const Vec2* u_adv)
{
    PointState s = interpolate(basis, local, qp);
    ConstitutivePoint cp(k.a, s.chi);
    const Vec2 w = u_adv ? *u_adv : s.u;
    const SymTensor2 eps = s.eps();
    const double omega = s.omega();
    const Vec2 b = body_at(body, basis.x[qp]);

    StrongResiduals r;
    const Vec2 uu = convect(w, s.grad_u);
    const Vec2 dchi = divergence(s.grad_chi);
    const Vec2 df = divergence({cp.df_plus(s.grad_chi[0]), cp.df_plus(s.grad_chi[1])});
    r.r_mom = {k.rho * uu.x - dchi.x - df.x + s.grad_p.x - b.x, k.rho * uu.y - dchi.y - df.y + s.grad_p.y - b.y};
    r.r_con = s.div();
    r.r_const = k.c1 * (s.chi - cp.f_minus()) - (1.0 - k.beta) * eps +
                k.cl * (convect(w, s.grad_chi) + commutator_with_skew(s.chi, omega)) +
                (1.0 - k.beta) * cp.kappa(eps);
    return {s, cp, w, eps, omega, r};
}

void galerkin_flux(const Coeffs& k, const PointEval& e, Vec2 b, QpFlux& f)
{
    const PointState& s = e.s;
    const Vec2 uu = convect(e.u_adv, s.grad_u);
    const SymTensor2 sigma = s.chi + e.cp.f_plus();
    const SymTensor2 visc = 2.0 * k.beta * k.eta * e.eps;
    const SymTensor2 stress = visc + sigma - s.p * SymTensor2::identity();
    f.a[U1] += k.rho * uu.x - b.x;
    f.a[U2] += k.rho * uu.y - b.y;
    for (int i = 0; i < 2; ++i) {
        const auto r = row(stress, i);
        f.b[i][0] += r[0];
        f.b[i][1] += r[1];
    }
    f.a[P] += s.div();
    const auto c = against_basis(e.res.r_const);
    for (int m = 0; m < 3; ++m) f.a[CHI11 + m] += c[m];
}

/// Momentum and continuity channels shared by SUPG and GLS; the tau part is scaled by tau_scale.
void momentum_stabilization(const Coeffs& k, const PointEval& e, const StabParams& st, double tau_scale, QpFlux& f)
{
    const Vec2 rm = e.res.r_mom;
    const double rc = e.res.r_con;
    const Vec2 w = e.u_adv;
    const double rmi[2] = {rm.x, rm.y};
    const double wj[2] = {w.x, w.y};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) f.b[i][j] += st.alpha_mom * k.rho * rmi[i] * wj[j];
        f.b[i][i] += st.alpha_con * rc;
    }
    f.b[P][0] += st.alpha_mom * rm.x;
    f.b[P][1] += st.alpha_mom * rm.y;
    // -div(tau) against E_m: rows (r1, 0), (r2, r1), (0, r2)
    const double s = -tau_scale * st.alpha_mom;
    f.b[CHI11][0] += s * rm.x;
    f.b[CHI12][0] += s * rm.y;
    f.b[CHI12][1] += s * rm.x;
    f.b[CHI22][1] += s * rm.y;
}

void supg_streamline(const Coeffs& k, const PointEval& e, const StabParams& st, QpFlux& f)
{
    const auto c = against_basis(e.res.r_const);
    for (int m = 0; m < 3; ++m) {
        f.b[CHI11 + m][0] += st.alpha_const * k.cl * c[m] * e.u_adv.x;
        f.b[CHI11 + m][1] += st.alpha_const * k.cl * c[m] * e.u_adv.y;
    }
}

void supg_gls_flux(Variant variant, const Coeffs& k, const PointEval& e, const StabParams& st, QpFlux& f)
{
    momentum_stabilization(k, e, st, 1.0, f);
    supg_streamline(k, e, st, f);
    if (variant != Variant::GLS) return;
    const SymTensor2& rc = e.res.r_const;
    // (R, -(1-beta) eps(v))
    for (int i = 0; i < 2; ++i) {
        const auto r = row(rc, i);
        f.b[i][0] -= st.alpha_const * (1.0 - k.beta) * r[0];
        f.b[i][1] -= st.alpha_const * (1.0 - k.beta) * r[1];
    }
    // (R, (1/2eta)(tau + Df(a,-chi)[tau]) + (lambda/2eta)(tau W - W tau) + (lambda/eta) Dkappa[tau])
    for (int m = 0; m < 3; ++m) {
        const SymTensor2 em = sym_basis(m);
        const double v = k.c1 * ddot(rc, em + e.cp.df_minus(em)) +
                         k.cl * ddot(rc, commutator_with_skew(em, e.omega)) +
                         k.cdk * ddot(rc, e.cp.dkappa(e.eps, em));
        f.a[CHI11 + m] += st.alpha_const * v;
    }
}

void asgs_flux(const Coeffs& k, const PointEval& e, const StabParams& st, QpFlux& f)
{
    const Vec2 rm = e.res.r_mom;
    const double rcon = e.res.r_con;
    const SymTensor2& rc = e.res.r_const;
    const Vec2 w = e.u_adv;
    const double rmi[2] = {rm.x, rm.y};
    const double wj[2] = {w.x, w.y};
    const SymTensor2 q = rc + e.cp.df_plus(rc);
    for (int i = 0; i < 2; ++i) {
        const auto qi = row(q, i);
        for (int j = 0; j < 2; ++j) f.b[i][j] += st.alpha_mom * k.rho * rmi[i] * wj[j] - st.alpha_const * qi[j];
        f.b[i][i] += st.alpha_con * rcon;
    }
    f.b[P][0] += st.alpha_mom * rm.x;
    f.b[P][1] += st.alpha_mom * rm.y;
    const double s = -(1.0 - k.beta) * st.alpha_mom;
    f.b[CHI11][0] += s * rm.x;
    f.b[CHI12][0] += s * rm.y;
    f.b[CHI12][1] += s * rm.x;
    f.b[CHI22][1] += s * rm.y;
    supg_streamline(k, e, st, f);
    const SymTensor2 t = k.cl * commutator_with_skew(rc, e.omega) + k.c1 * (rc + e.cp.df_minus(rc)) +
                         k.cdk * e.cp.dkappa(e.eps, rc);
    const auto c = against_basis(t);
    for (int m = 0; m < 3; ++m) f.a[CHI11 + m] -= st.alpha_const * c[m];
}

StabParams stab_from_point(const Coeffs& k, const MetricTensor& g, Vec2 u, const ConstitutivePoint& cp,
                           const SymTensor2& eps, double omega, Variant variant)
{
    StabParams st;
    const double ug = std::sqrt(std::max(0.0, metric_quadratic(g, u)));
    st.alpha_mom = 1.0 / (k.eta * std::sqrt(ddot(g, g)) + k.rho * ug);
    st.alpha_con = 1.0 / (st.alpha_mom * g.trace());
    if (variant == Variant::GLS || variant == Variant::ASGS) {
        double sum_f = 0.0, sum_k = 0.0;
        for (int m = 0; m < 3; ++m) {
            const SymTensor2 em = sym_basis(m);
            sum_f += (em + cp.df_minus(em)).norm();
            sum_k += cp.dkappa(eps, em).norm();
        }
        const double denom = k.cl * ug + k.cdk * std::sqrt(2.0) * std::abs(omega) + k.c1 * sum_f + k.cdk * sum_k;
        st.alpha_const = 1.0 / denom;
    } else {
        st.alpha_const = 1.0 / (k.c1 + k.cl * ug);
    }
    return st;
}

bool stabilized(Variant v) { return v != Variant::Galerkin; }

void residual_core(const ElementContext& ctx, const ElementBasis& basis, std::span<const double> local,
                   const FrozenCoefficients* frozen, std::span<double> out)
{
    const Coeffs k(ctx.params);
    std::fill(out.begin(), out.end(), 0.0);
    for (int q = 0; q < basis.n_qp(); ++q) {
        const PointEval e = evaluate_point(k, basis, local, q, ctx.body, frozen ? &frozen->u_adv[q] : nullptr);
        QpFlux f;
        galerkin_flux(k, e, body_at(ctx.body, basis.x[q]), f);
        if (stabilized(ctx.variant)) {
            const StabParams st = frozen ? frozen->stab[q]
                                         : stab_from_point(k, metric_tensor(basis, q), e.s.u, e.cp, e.eps, e.omega,
                                                           ctx.variant);
            if (ctx.variant == Variant::ASGS)
                asgs_flux(k, e, st, f);
            else
                supg_gls_flux(ctx.variant, k, e, st, f);
        }
        add_flux(basis, q, f, out);
    }
}

}  // namespace

StabParams stab_params(const PhysicalParams& p, const MetricTensor& g, Vec2 u, const SymTensor2& chi,
                       const SymTensor2& eps, double omega, Variant variant)
{
    const Coeffs k(p);
    const ConstitutivePoint cp(k.a, chi);
    return stab_from_point(k, g, u, cp, eps, omega, variant);
}

std::vector<StabParams> element_stab_params(const PhysicalParams& p, const ElementBasis& basis,
                                            std::span<const double> local, Variant variant)
{
    std::vector<StabParams> out;
    out.reserve(basis.n_qp());
    for (int q = 0; q < basis.n_qp(); ++q) {
        const PointState s = interpolate(basis, local, q);
        out.push_back(stab_params(p, metric_tensor(basis, q), s.u, s.chi, s.eps(), s.omega(), variant));
    }
    return out;
}

StrongResiduals strong_residuals(const PhysicalParams& p, const ElementBasis& basis, std::span<const double> local,
                                 int qp, const BodyForce& body)
{
    return evaluate_point(Coeffs(p), basis, local, qp, body, nullptr).res;
}

void galerkin_element_residual(const PhysicalParams& p, const ElementBasis& basis, std::span<const double> local,
                               const BodyForce& body, std::span<double> out)
{
    const Coeffs k(p);
    for (int q = 0; q < basis.n_qp(); ++q) {
        const PointEval e = evaluate_point(k, basis, local, q, body, nullptr);
        QpFlux f;
        galerkin_flux(k, e, body_at(body, basis.x[q]), f);
        add_flux(basis, q, f, out);
    }
}

void supg_gls_element_terms(Variant variant, const PhysicalParams& p, const ElementBasis& basis,
                            std::span<const double> local, std::span<const StabParams> stab, const BodyForce& body,
                            std::span<double> out)
{
    if (variant != Variant::SUPG && variant != Variant::GLS)
        throw std::invalid_argument("supg_gls_element_terms: variant must be SUPG or GLS");
    const Coeffs k(p);
    for (int q = 0; q < basis.n_qp(); ++q) {
        const PointEval e = evaluate_point(k, basis, local, q, body, nullptr);
        QpFlux f;
        supg_gls_flux(variant, k, e, stab[q], f);
        add_flux(basis, q, f, out);
    }
}

void asgs_element_terms(const PhysicalParams& p, const ElementBasis& basis, std::span<const double> local,
                        std::span<const StabParams> stab, const BodyForce& body, std::span<double> out)
{
    const Coeffs k(p);
    for (int q = 0; q < basis.n_qp(); ++q) {
        const PointEval e = evaluate_point(k, basis, local, q, body, nullptr);
        QpFlux f;
        asgs_flux(k, e, stab[q], f);
        add_flux(basis, q, f, out);
    }
}

void element_residual(const ElementContext& ctx, const ElementBasis& basis, std::span<const double> local,
                      std::span<double> out)
{
    residual_core(ctx, basis, local, nullptr, out);
}

FrozenCoefficients freeze(const ElementContext& ctx, const ElementBasis& basis, std::span<const double> local)
{
    FrozenCoefficients fc;
    fc.stab = element_stab_params(ctx.params, basis, local, ctx.variant);
    for (int q = 0; q < basis.n_qp(); ++q) fc.u_adv.push_back(interpolate(basis, local, q).u);
    return fc;
}

void element_residual_frozen(const ElementContext& ctx, const ElementBasis& basis, std::span<const double> local,
                             const FrozenCoefficients& frozen, std::span<double> out)
{
    residual_core(ctx, basis, local, &frozen, out);
}

void frozen_element_jacobian(const ElementContext& ctx, const ElementBasis& basis, std::span<const double> local,
                             const FrozenCoefficients& frozen, std::span<double> jac)
{
    if (ctx.variant != Variant::Galerkin && ctx.variant != Variant::SUPG)
        throw std::invalid_argument("frozen_element_jacobian: only Galerkin and SUPG are supported");
    const Coeffs k(ctx.params);
    const int n = kDofsPerNode * basis.n_nodes;
    std::fill(jac.begin(), jac.end(), 0.0);
    std::vector<double> unit(n, 0.0), col(n);
    for (int q = 0; q < basis.n_qp(); ++q) {
        const PointState s = interpolate(basis, local, q);
        const ConstitutivePoint cp(k.a, s.chi);
        const Vec2 w = frozen.u_adv[q];
        const StabParams& st = frozen.stab[q];
        const SymTensor2 eps = s.eps();
        const double omega = s.omega();
        for (int c = 0; c < n; ++c) {
            unit[c] = 1.0;
            const PointState d = interpolate(basis, unit, q);
            unit[c] = 0.0;
            const SymTensor2 deps = d.eps();
            const double domega = d.omega();

            const Vec2 duu = convect(w, d.grad_u);
            const SymTensor2 dsigma = d.chi + cp.df_plus(d.chi);
            SymTensor2 dc = k.c1 * (d.chi + cp.df_minus(d.chi)) - (1.0 - k.beta) * deps +
                            k.cl * (convect(w, d.grad_chi) + commutator_with_skew(d.chi, omega) +
                                    commutator_with_skew(s.chi, domega)) +
                            (1.0 - k.beta) * (cp.kappa(deps) + k.a * cp.dkappa(eps, d.chi));

            QpFlux f;
            f.a[U1] = k.rho * duu.x;
            f.a[U2] = k.rho * duu.y;
            const SymTensor2 stress = 2.0 * k.beta * k.eta * deps + dsigma - d.p * SymTensor2::identity();
            for (int i = 0; i < 2; ++i) {
                const auto r = row(stress, i);
                f.b[i][0] = r[0];
                f.b[i][1] = r[1];
            }
            f.a[P] = d.div();
            const auto cm = against_basis(dc);
            for (int m = 0; m < 3; ++m) f.a[CHI11 + m] = cm[m];

            if (ctx.variant == Variant::SUPG) {
                Vec2 ddf;
                for (int j = 0; j < 2; ++j) {
                    const SymTensor2 t = d2fn_f(k.a, s.chi, s.grad_chi[j], d.chi) + cp.df_plus(d.grad_chi[j]);
                    ddf.x += j == 0 ? t.xx : t.xy;
                    ddf.y += j == 0 ? t.xy : t.yy;
                }
                const Vec2 ddchi = divergence(d.grad_chi);
                PointEval pe{d, cp, w, deps, omega, {}};
                pe.res.r_mom = {k.rho * duu.x - ddchi.x - ddf.x + d.grad_p.x,
                                k.rho * duu.y - ddchi.y - ddf.y + d.grad_p.y};
                pe.res.r_con = d.div();
                pe.res.r_const = dc;
                momentum_stabilization(k, pe, st, 1.0, f);
                supg_streamline(k, pe, st, f);
            }
            std::fill(col.begin(), col.end(), 0.0);
            add_flux(basis, q, f, col);
            for (int r = 0; r < n; ++r) jac[r * n + c] += col[r];
        }
    }
}

InletSpec default_inlet(Benchmark b)
{
    if (b == Benchmark::Contraction) return {1.0, 1.0};
    return {2.0, 2.0};
}

InletState inlet_profiles(Benchmark b, const PhysicalParams& p, double y)
{
    return inlet_profiles(b, p, y, default_inlet(b));
}

InletState inlet_profiles(Benchmark b, const PhysicalParams& p, double y, const InletSpec& spec)
{
    if (b == Benchmark::Box) throw std::invalid_argument("inlet_profiles: the periodic box has no inlet");
    // The contraction inlet is the wide channel: four times the height, a quarter of the mean velocity.
    const double ubar = b == Benchmark::Contraction ? spec.mean_velocity / 4.0 : spec.mean_velocity;
    const double h = b == Benchmark::Contraction ? 4.0 * spec.half_height : spec.half_height;
    const double eta_p = p.eta_polymer();
    InletState s;
    s.u = {1.5 * ubar * (1.0 - (y / h) * (y / h)), 0.0};
    const SymTensor2 sigma{18.0 * p.lambda * eta_p * ubar * ubar * y * y / (h * h * h * h),
                           -3.0 * eta_p * ubar * y / (h * h), 0.0};
    s.chi = chi_from_sigma(p, sigma);
    return s;
}

Vec2 four_roll_force(Vec2 x)
{
    return {2.0 * std::sin(x.x) * std::cos(x.y), -2.0 * std::cos(x.x) * std::sin(x.y)};
}

BCSet build_bcs(Benchmark b, const Mesh& mesh, const DofMap& dofs, const PhysicalParams& p)
{
    return build_bcs(b, mesh, dofs, p, default_inlet(b));
}

namespace {

int precedence(BoundaryTag t)
{
    switch (t) {
    case BoundaryTag::Wall:
    case BoundaryTag::Cylinder: return 3;
    case BoundaryTag::Inflow: return 2;
    case BoundaryTag::Symmetry: return 1;
    case BoundaryTag::Outflow: return 0;
    default: return -1;
    }
}

}  // namespace

BCSet build_bcs(Benchmark b, const Mesh& mesh, const DofMap& dofs, const PhysicalParams& p, const InletSpec& spec)
{
    BCSet set;
    if (b == Benchmark::Box) {
        // Two gauges: the pressure constant and, with no inflow or walls, a uniform drift of the
        // velocity.  Mesh node 0 is the corner (-L, -L), a stagnation point of the four-roll flow.
        const int base = dofs.dof(0, U1);
        set.constraints = {{base + U1, 0.0}, {base + U2, 0.0}, {base + P, 0.0}};
        return set;
    }
    struct Entry {
        int rank;
        double value;
        BoundaryTag tag;
    };
    std::map<int, Entry> table;
    auto put = [&](int node, int field, double value, BoundaryTag tag) {
        const int dof = dofs.dof(node, field);
        const int rank = precedence(tag);
        auto [it, inserted] = table.try_emplace(dof, Entry{rank, value, tag});
        if (inserted) return;
        Entry& e = it->second;
        if (rank > e.rank) {
            e = {rank, value, tag};
        } else if (rank == e.rank && std::abs(e.value - value) > 1e-12 * (1.0 + std::abs(value))) {
            throw BoundaryConditionError("conflicting " + std::string(to_string(tag)) + " constraints at node " +
                                         std::to_string(node));
        }
    };
    for (const auto& edge : mesh.boundary) {
        for (int node : {edge.a, edge.b}) {
            const double y = mesh.nodes[node].y;
            switch (edge.tag) {
            case BoundaryTag::Inflow: {
                const InletState in = inlet_profiles(b, p, y, spec);
                put(node, U1, in.u.x, edge.tag);
                put(node, U2, in.u.y, edge.tag);
                put(node, CHI11, in.chi.xx, edge.tag);
                put(node, CHI12, in.chi.xy, edge.tag);
                put(node, CHI22, in.chi.yy, edge.tag);
                break;
            }
            case BoundaryTag::Wall:
            case BoundaryTag::Cylinder:
                put(node, U1, 0.0, edge.tag);
                put(node, U2, 0.0, edge.tag);
                break;
            case BoundaryTag::Symmetry:
                put(node, U2, 0.0, edge.tag);
                put(node, CHI12, 0.0, edge.tag);
                break;
            case BoundaryTag::Outflow:
                put(node, U2, 0.0, edge.tag);
                if (b == Benchmark::Contraction) {
                    const double h = spec.half_height;
                    put(node, U1, 1.5 * spec.mean_velocity * (1.0 - (y / h) * (y / h)), edge.tag);
                    put(node, P, 0.0, edge.tag);
                }
                break;
            default:
                throw BoundaryConditionError(std::string("unexpected boundary tag ") + to_string(edge.tag) +
                                             " for the " + to_string(b) + " benchmark");
            }
        }
    }
    set.constraints.reserve(table.size());
    for (const auto& [dof, e] : table) set.constraints.push_back({dof, e.value});
    return set;
}

}  // namespace logconf
