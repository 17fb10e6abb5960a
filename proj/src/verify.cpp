#include "logconf/verify.hpp"

#include "logconf/oracle.hpp"
#include "logconf/solver.hpp"

#include <cmath>
#include <cstdio>
#include <random>

namespace logconf {

namespace {

CheckResult below(std::string name, double measured, double tol, std::string detail)
{
    return {std::move(name), measured < tol, measured, tol, "<", std::move(detail)};
}

std::vector<double> local_state(int nodes, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(kDofsPerNode) * nodes);
    for (int a = 0; a < nodes; ++a)
        for (int c = 0; c < kDofsPerNode; ++c) v[kDofsPerNode * a + c] = (c >= CHI11 ? 0.6 : 1.0) * u(rng);
    return v;
}

std::vector<double> matvec(const std::vector<double>& a, const std::vector<double>& x)
{
    const std::size_t n = x.size();
    std::vector<double> y(n, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) y[r] += a[r * n + c] * x[c];
    return y;
}

double distance(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace

std::vector<CheckResult> verify_kernels(int n_equivalence, int n_derivative)
{
    std::vector<CheckResult> out;
    std::mt19937_64 rng(20240611);
    double worst = 0.0;
    for (int i = 0; i < n_equivalence; ++i) {
        const auto s = oracle::equivalence_draw(rng);
        worst = std::max(worst, s.error / s.scale);
    }
    out.push_back(below("kernels/chi_form_equals_c_form", worst, 1e-9,
                        std::to_string(n_equivalence) + " draws, Frobenius error relative to the largest term"));

    // relative error against max(|exact|, 1e-2)
    const double h = 1e-6;
    double worst_f = 0.0, worst_k = 0.0;
    std::uniform_real_distribution<double> ua(0.1, 5.0);
    for (int i = 0; i < n_derivative; ++i) {
        const double a = ua(rng);
        const SymTensor2 chi = oracle::random_sym(rng, 1.0);
        const SymTensor2 dir = oracle::random_sym(rng, 1.0);
        const SymTensor2 exact = dfn_f(a, chi, dir);
        const SymTensor2 fd = (1.0 / (2.0 * h)) * (fn_f(a, chi + h * dir) - fn_f(a, chi - h * dir));
        worst_f = std::max(worst_f, (exact - fd).norm() / std::max(exact.norm(), 1e-2));

        const SymTensor2 b = oracle::random_sym(rng, 3.0);
        const SymTensor2 d = oracle::random_sym(rng, 1.0);
        const SymTensor2 kd = dfn_kappa(b, d, dir);
        const SymTensor2 kfd = (1.0 / (2.0 * h)) * (fn_kappa(b + h * dir, d) - fn_kappa(b - h * dir, d));
        worst_k = std::max(worst_k, (kd - kfd).norm() / std::max(kd.norm(), 1e-2));
    }
    const std::string what = std::to_string(n_derivative) + " draws, central difference h = 1e-6, error / max(|D|, 1e-2)";
    out.push_back(below("kernels/dfn_f_vs_fd", worst_f, 1e-5, what));
    out.push_back(below("kernels/dfn_kappa_vs_fd", worst_k, 1e-5, what));
    return out;
}

std::vector<CheckResult> verify_jacobian()
{
    std::vector<CheckResult> out;
    PhysicalParams p;
    p.rho = 1.0;
    p.eta_total = 1.3;
    p.beta = 0.4;
    p.lambda = 0.7;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> jitter(-0.08, 0.08);
    for (ElementKind kind : {ElementKind::Triangle, ElementKind::Quad}) {
        for (Variant v : {Variant::Galerkin, Variant::SUPG, Variant::GLS, Variant::ASGS}) {
            std::vector<Vec2> xy = kind == ElementKind::Quad
                                       ? std::vector<Vec2>{{0.0, 0.0}, {0.4, 0.0}, {0.4, 0.3}, {0.0, 0.3}}
                                       : std::vector<Vec2>{{0.0, 0.0}, {0.4, 0.05}, {0.1, 0.35}};
            for (auto& q : xy) q = q + Vec2{jitter(rng), jitter(rng)};
            const ElementBasis basis = basis_eval(kind, xy);
            const ElementContext ctx{p, v, four_roll_force};
            const auto local = local_state(basis.n_nodes, rng);
            const auto dir = local_state(basis.n_nodes, rng);
            std::vector<std::vector<double>> jd;
            for (double d : {4e-3, 2e-3, 1e-3}) jd.push_back(matvec(fd_element_jacobian(ctx, basis, local, d), dir));
            const double e1 = distance(jd[0], jd[1]);
            const double e2 = distance(jd[1], jd[2]);
            const double order = e2 > 0.0 ? std::log2(e1 / e2) : INFINITY;
            const std::string name = std::string("jacobian/fd_order/") + to_string(v) + "/" +
                                     (kind == ElementKind::Quad ? "quad" : "triangle");
            out.push_back({name, order >= 1.9, order, 1.9, ">=",
                           "log2 ratio of successive J_D d differences, D = 4e-3, 2e-3, 1e-3"});
        }
    }
    return out;
}

std::vector<CheckResult> verify_newtonian(int threads)
{
    std::vector<CheckResult> out;
    PhysicalParams p;
    p.rho = 0.0;
    p.eta_total = 1.0;
    p.beta = 2.0 / 3.0;
    for (Variant v : {Variant::SUPG, Variant::GLS, Variant::ASGS}) {
        const std::string tag = std::string("newtonian/") + to_string(v);
        std::vector<double> errors;
        int worst_iters = 0;
        bool converged = true;
        for (int n : {16, 32}) {
            const Mesh mesh = gen_periodic_box(n, M_PI);
            const DofMap dofs = DofMap::from_mesh(mesh);
            const Assembler as(mesh, ElementContext{p, v, four_roll_force}, build_bcs(Benchmark::Box, mesh, dofs, p),
                               threads);
            const NewtonResult r = newton_solve(as, FieldState::Zero(as.n_dofs()), NewtonConfig{});
            converged = converged && r.converged();
            worst_iters = std::max(worst_iters, r.iterations());
            double err = INFINITY;
            if (r.converged()) {
                err = 0.0;
                const double eta_p = p.eta_polymer();
                for (int i = 0; i < mesh.n_nodes(); ++i) {
                    const double x = mesh.nodes[i].x, y = mesh.nodes[i].y;
                    // Stokes solution for the four-roll force: u = (sin x cos y, -cos x sin y), chi = 2 eta_p eps(u)
                    const double c = std::cos(x) * std::cos(y);
                    err = std::max(err, std::abs(r.state[dofs.dof(i, U1)] - std::sin(x) * std::cos(y)));
                    err = std::max(err, std::abs(r.state[dofs.dof(i, U2)] + std::cos(x) * std::sin(y)));
                    err = std::max(err, std::abs(r.state[dofs.dof(i, CHI11)] - 2.0 * eta_p * c));
                    err = std::max(err, std::abs(r.state[dofs.dof(i, CHI12)]));
                    err = std::max(err, std::abs(r.state[dofs.dof(i, CHI22)] + 2.0 * eta_p * c));
                }
            }
            errors.push_back(err);
        }
        // only the stabilization parameters depend on the state at lambda = 0
        out.push_back({tag + "/converges_in_two_steps", converged && worst_iters <= 2, static_cast<double>(worst_iters),
                       2.0, "<=", "Newton iterations at lambda = 0, 16^2 and 32^2 boxes"});
        const double order = std::log2(errors[0] / errors[1]);
        out.push_back({tag + "/converges_to_stokes_solution", std::isfinite(order) && order >= 1.7, order, 1.7, ">=",
                       "log2 of the max nodal error ratio between the 16^2 and 32^2 boxes"});
    }
    return out;
}

std::optional<std::vector<CheckResult>> run_suite(const std::string& name, int threads)
{
    if (name == "kernels") return verify_kernels();
    if (name == "jacobian") return verify_jacobian();
    if (name == "newtonian") return verify_newtonian(threads);
    return std::nullopt;
}

std::string format_check(const CheckResult& c)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, "%s %s  measured %.4g %s %.4g  (%s)", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                  c.measured, c.relation.c_str(), c.bound, c.detail.c_str());
    return buf;
}

}  // namespace logconf
