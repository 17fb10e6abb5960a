// Acceptance run: one PASS/FAIL line per criterion, supporting numbers indented below it.
// The exit status is 0 whenever the run completes; the verdicts are in the output,
// which is also copied to the file named by the optional first argument.

#include "logconf/config.hpp"
#include "logconf/runner.hpp"
#include "logconf/verify.hpp"

#include <algorithm>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

using namespace logconf;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...)
{
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

int n_pass = 0, n_fail = 0;
std::FILE* report = nullptr;

void emit(const std::string& line)
{
    std::fputs(line.c_str(), stdout);
    std::fflush(stdout);
    if (report) {
        std::fputs(line.c_str(), report);
        std::fflush(report);
    }
}

void verdict(int id, const std::string& title, bool pass, const std::string& summary)
{
    (pass ? n_pass : n_fail)++;
    emit(fmt("%s  criterion %2d  %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), summary.c_str()));
}

void note(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void note(const char* fmt, ...)
{
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    emit(std::string("      ") + buf + "\n");
}

long long wi_key(double wi) { return std::llround(wi * 1e6); }

struct Sweep {
    std::unique_ptr<Problem> problem;
    RunConfig cfg;
    double limit = 0.0;
    bool completed = false;
    std::map<long long, FieldState> states;  ///< converged states by Wi
    std::map<long long, int> iterations;
    double seconds = 0.0;

    [[nodiscard]] bool has(double wi) const { return states.count(wi_key(wi)) > 0; }
    [[nodiscard]] const FieldState& at(double wi) const { return states.at(wi_key(wi)); }
    [[nodiscard]] PhysicalParams params_at(double wi) const
    {
        PhysicalParams p = problem->params;
        p.lambda = wi / wi_per_lambda(cfg);
        return p;
    }
};

Sweep run_sweep(const std::string& config_text, Mesh mesh)
{
    Sweep s;
    s.cfg = parse_config(config_text);
    s.problem = make_problem(s.cfg, std::move(mesh));
    const double k = wi_per_lambda(s.cfg);
    const auto t0 = Clock::now();
    auto on_step = [&](double lambda, const NewtonResult& r) {
        s.states[wi_key(lambda * k)] = r.state;
        s.iterations[wi_key(lambda * k)] = r.iterations();
    };
    const ContinuationResult res =
        continuation_run(*s.problem->assembler, s.problem->params, make_plan(s.cfg), s.cfg.newton,
                         FieldState::Zero(s.problem->assembler->n_dofs()), s.problem->bc_factory(), on_step);
    s.limit = res.limiting_lambda * k;
    s.completed = res.completed;
    s.seconds = seconds_since(t0);
    return s;
}

Sweep channel_sweep(const std::string& config_text)
{
    return run_sweep(config_text, make_mesh(parse_config(config_text)));
}

std::string limit_text(const Sweep& s)
{
    return s.completed ? fmt(">= %.2f (cap reached)", s.limit) : fmt("%.2f", s.limit);
}

double rel(double measured, double reference) { return std::abs(measured - reference) / std::abs(reference); }

// sigma11 at the downstream wall nodes y = -H2, x > 0, ordered in x
double corner_line_tv(const Sweep& s, double wi)
{
    const Mesh& m = s.problem->mesh;
    std::vector<double> xs;
    for (const Vec2& n : m.nodes)
        if (std::abs(n.y + 1.0) < 1e-9 && n.x > 1e-12) xs.push_back(n.x);
    std::sort(xs.begin(), xs.end());
    std::vector<CurvePoint> curve;
    for (double x : xs) curve.push_back({x, {x, -1.0}});
    const LineProfile prof = sample_line(m, s.params_at(wi), s.at(wi), curve);
    double tv = 0.0;
    const LineSample* prev = nullptr;
    for (const auto& smp : prof.samples) {
        if (!smp.found) continue;
        if (prev) tv += std::abs(smp.sigma.xx - prev->sigma.xx);
        prev = &smp;
    }
    return tv;
}

const char* kVariants[] = {"supg", "gls", "asgs"};

}  // namespace

int main(int argc, char** argv)
{
    const auto t_all = Clock::now();
    if (argc > 1 && !(report = std::fopen(argv[1], "w"))) std::fprintf(stderr, "cannot write %s\n", argv[1]);
    emit("acceptance run, one line per criterion\n\n");

    // 1-2: kernels and Jacobians
    {
        auto t0 = Clock::now();
        const auto k = verify_kernels(10000, 0);
        const double t = seconds_since(t0);
        verdict(1, "constitutive equivalence", k[0].pass && t < 10.0,
                fmt("worst relative Frobenius error %.3e < 1e-9 over 10^4 draws, %.2f s < 10 s", k[0].measured, t));

        t0 = Clock::now();
        const auto d = verify_kernels(0, 1000);
        const auto j = verify_jacobian();
        const double t2 = seconds_since(t0);
        bool ok = t2 < 30.0;
        double min_order = INFINITY;
        for (std::size_t i = 1; i < d.size(); ++i) ok = ok && d[i].pass;
        for (const auto& c : j) {
            ok = ok && c.pass;
            min_order = std::min(min_order, c.measured);
        }
        verdict(2, "derivative checks", ok,
                fmt("dfn_f %.2e, dfn_kappa %.2e < 1e-5; min FD Jacobian order %.3f >= 1.9; %.2f s < 30 s",
                    d[1].measured, d[2].measured, min_order, t2));
        for (const auto& c : j) note("%s", format_check(c).c_str());
    }

    // 3: box convergence; the lambda = 0 ASGS states also feed criterion 10
    std::vector<std::pair<std::string, IdentityDefect>> identity;
    const double newton_tol = NewtonConfig{}.epsilon;
    {
        const auto t0 = Clock::now();
        bool ok = true;
        std::vector<std::string> lines;
        for (const char* v : kVariants) {
            std::vector<BoxCentre> centre;
            for (int n : {16, 32, 64}) {
                const std::string text = std::string("benchmark = box\nvariant = ") + v +
                                         "\nbeta = 0.6666666666666666\nrho = 0\nwi_max = 0.15\n";
                Sweep s = run_sweep(text, make_box_mesh(n));
                if (!s.completed) {
                    ok = false;
                    lines.push_back(fmt("%s %d^2: sweep stopped at Wi %.3f", v, n, s.limit));
                    centre.push_back({NAN, NAN});
                    continue;
                }
                centre.push_back(box_centre_values(s.problem->mesh, s.at(0.15)));
                if (std::string(v) == "asgs")
                    identity.emplace_back(fmt("box %d^2", n),
                                          newtonian_identity_defect(s.problem->mesh, s.params_at(0.0), s.at(0.0)));
            }
            const EocResult a = richardson_eoc(centre[2].chi11, centre[1].chi11, centre[0].chi11);
            const EocResult b = richardson_eoc(centre[2].eps0, centre[1].eps0, centre[0].eps0);
            const bool in_a = !a.degenerate && a.order >= 1.7 && a.order <= 2.3;
            const bool in_b = !b.degenerate && b.order >= 1.7 && b.order <= 2.3;
            ok = ok && in_a && in_b;
            lines.push_back(fmt("%-4s  chi11_0: n = %.4f (extrapolated %.6f)   eps_0: n = %.4f (extrapolated %.6f)", v,
                                a.order, a.extrapolated, b.order, b.extrapolated));
        }
        verdict(3, "four-roll box EOC at Wi = 0.15", ok,
                fmt("n in [1.7, 2.3] for chi11_0 and eps_0 on 16^2/32^2/64^2, all three variants (%.1f s)",
                    seconds_since(t0)));
        for (const auto& l : lines) note("%s", l.c_str());
    }

    // 4, 6 (cylinder part): coarse cylinder sweeps
    const std::string cyl = "benchmark = cylinder\nbeta = 0.59\nrho = 0\nrefinement = 0\n";
    Sweep cyl_asgs = channel_sweep(cyl + "variant = asgs\nwi_max = 6\n");
    Sweep cyl_gls = channel_sweep(cyl + "variant = gls\nwi_max = 6\n");
    identity.emplace_back("cylinder coarse",
                          newtonian_identity_defect(cyl_asgs.problem->mesh, cyl_asgs.params_at(0.0), cyl_asgs.at(0.0)));
    {
        const double wis[] = {0.0, 0.5, 0.9};
        const double refs[] = {132.36, 118.836, 117.79};
        const double tols[] = {0.01, 0.015, 0.02};
        bool ok = true;
        std::vector<std::string> lines;
        for (int i = 0; i < 3; ++i) {
            if (!cyl_asgs.has(wis[i])) {
                ok = false;
                lines.push_back(fmt("Wi %.1f: not reached", wis[i]));
                continue;
            }
            const double k = drag_coefficient(cyl_asgs.problem->mesh, cyl_asgs.params_at(wis[i]), cyl_asgs.at(wis[i]));
            const double e = rel(k, refs[i]);
            ok = ok && e < tols[i];
            lines.push_back(fmt("Wi %.1f: K = %.4f vs %.3f, rel. error %.2f%% (bound %.1f%%) %s", wis[i], k, refs[i],
                                100 * e, 100 * tols[i], e < tols[i] ? "ok" : "outside"));
        }
        verdict(4, "cylinder drag, coarse mesh, ASGS", ok,
                fmt("%d nodes, sweep %.0f s", cyl_asgs.problem->mesh.n_nodes(), cyl_asgs.seconds));
        for (const auto& l : lines) note("%s", l.c_str());
    }

    // 5: finite-difference step insensitivity at Wi = 0.3
    {
        std::vector<double> drag;
        std::vector<int> iters, totals;
        bool reached = true;
        for (const char* h : {"1e-4", "1e-6", "1e-8"}) {
            Sweep s = channel_sweep(cyl + "variant = asgs\nwi_max = 0.3\nfd_step = " + h + "\n");
            if (!s.has(0.3)) {
                reached = false;
                note("fd_step %s: Wi 0.3 not reached", h);
                continue;
            }
            drag.push_back(drag_coefficient(s.problem->mesh, s.params_at(0.3), s.at(0.3)));
            iters.push_back(s.iterations.at(wi_key(0.3)));
            int total = 0;
            for (const auto& [w, n] : s.iterations) total += n;
            totals.push_back(total);
        }
        bool ok = reached && drag.size() == 3;
        double spread = INFINITY;
        int it_spread = 1 << 20;
        if (ok) {
            spread = (*std::max_element(drag.begin(), drag.end()) - *std::min_element(drag.begin(), drag.end())) /
                     std::abs(drag[1]);
            it_spread = *std::max_element(iters.begin(), iters.end()) - *std::min_element(iters.begin(), iters.end());
            ok = spread < 1e-6 && it_spread <= 2;
        }
        verdict(5, "FD step insensitivity, cylinder Wi = 0.3", ok,
                fmt("drag spread %.2e < 1e-6 relative; iteration spread %d <= 2", spread, it_spread));
        for (std::size_t i = 0; i < drag.size(); ++i)
            note("fd_step 1e-%zu: K = %.10f, %d iterations at Wi 0.3, %d over the sweep", 4 + 2 * i, drag[i],
                   iters[i], totals[i]);
    }

    // 6-9, 11: coarse contraction sweeps
    const std::string con = "benchmark = contraction\nbeta = 0.1111111111111111\nrho = 0\n";
    Sweep con_asgs = channel_sweep(con + "variant = asgs\nwi_max = 20\n");
    Sweep con_supg = channel_sweep(con + "variant = supg\nwi_max = 20\n");
    identity.emplace_back("contraction coarse",
                          newtonian_identity_defect(con_asgs.problem->mesh, con_asgs.params_at(0.0), con_asgs.at(0.0)));
    {
        const bool ok_c = cyl_asgs.limit >= cyl_gls.limit && cyl_gls.limit >= 1.0;
        const bool ok_k = con_supg.limit < con_asgs.limit;
        verdict(6, "robustness ordering", ok_c && ok_k,
                fmt("cylinder ASGS %s >= GLS %s >= 1.0 %s; contraction SUPG %s < ASGS %s %s",
                    limit_text(cyl_asgs).c_str(), limit_text(cyl_gls).c_str(), ok_c ? "holds" : "violated",
                    limit_text(con_supg).c_str(), limit_text(con_asgs).c_str(), ok_k ? "holds" : "violated"));
        note("sweep times: cylinder ASGS %.0f s, GLS %.0f s; contraction ASGS %.0f s, SUPG %.0f s", cyl_asgs.seconds,
               cyl_gls.seconds, con_asgs.seconds, con_supg.seconds);
    }
    {
        const double wis[] = {0.0, 1.0, 3.0};
        const double refs[] = {1.464, 1.352, 0.977};
        const double tols[] = {0.03, 0.05, 0.07};
        bool ok = true;
        std::vector<std::string> lines;
        for (int i = 0; i < 3; ++i) {
            if (!con_asgs.has(wis[i])) {
                ok = false;
                lines.push_back(fmt("Wi %.0f: not reached", wis[i]));
                continue;
            }
            const VortexReport v = vortex_sizes(con_asgs.problem->mesh, con_asgs.at(wis[i]), ContractionGeometry{});
            const double e = rel(v.x_r, refs[i]);
            const bool pass = v.corner_found && e < tols[i];
            ok = ok && pass;
            lines.push_back(fmt("Wi %.0f: X_R = %.4f vs %.3f, rel. error %.2f%% (bound %.0f%%) %s", wis[i], v.x_r,
                                refs[i], 100 * e, 100 * tols[i], pass ? "ok" : "outside"));
        }
        verdict(7, "contraction corner vortex, ASGS", ok,
                fmt("%d nodes, channels 40 H2 each side", con_asgs.problem->mesh.n_nodes()));
        for (const auto& l : lines) note("%s", l.c_str());
    }
    if (con_asgs.has(1.0)) {
        const CenterlineMaxima m = contraction_maxima(con_asgs.problem->mesh, con_asgs.params_at(1.0), con_asgs.at(1.0));
        const double es = rel(m.s11_scaled, 0.542), eu = rel(m.u1, 1.526);
        verdict(8, "centerline maxima at Wi = 1, ASGS", es < 0.03 && eu < 0.005,
                fmt("max sigma11 / (3 eta_T u2 / H2) = %.4f vs 0.542 (%.2f%%, bound 3%%); max u1 = %.4f vs 1.526 "
                    "(%.2f%%, bound 0.5%%)",
                    m.s11_scaled, 100 * es, m.u1, 100 * eu));
        note("unscaled max sigma11 = %.4f; the reference values are in units of the downstream wall shear stress",
               m.s11);
    } else {
        verdict(8, "centerline maxima at Wi = 1, ASGS", false, "Wi = 1 not reached");
    }
    if (con_asgs.has(1.0)) {
        const SlopeReport r =
            asymptotic_slopes(con_asgs.problem->mesh, con_asgs.params_at(1.0), con_asgs.at(1.0), ContractionGeometry{});
        const bool ok12 = r.slope_s12 && std::abs(*r.slope_s12 + 2.0 / 3.0) <= 0.15;
        const bool oku = r.slope_u1 && std::abs(*r.slope_u1 - 5.0 / 9.0) <= 0.15;
        verdict(9, "asymptotic slopes at Wi = 1, ASGS", ok12 && oku,
                fmt("sigma12 exponent %.4f vs -2/3 +- 0.15; u1 exponent %.4f vs 5/9 +- 0.15 (fit over r in [0.05, 0.5])",
                    r.slope_s12 ? *r.slope_s12 : NAN, r.slope_u1 ? *r.slope_u1 : NAN));
    } else {
        verdict(9, "asymptotic slopes at Wi = 1, ASGS", false, "Wi = 1 not reached");
    }

    // 10: Newtonian identity at quadrature points
    {
        double worst = 0.0;
        for (const auto& [name, d] : identity) worst = std::max(worst, d.max_defect);
        verdict(10, "Newtonian identity at quadrature points", worst < newton_tol,
                fmt("max |chi - 2 eta_p eps(u_h)|_F = %.3e < Newton tolerance %.0e", worst, newton_tol));
        for (const auto& [name, d] : identity)
            note("%-18s max defect %.3e, max |2 eta_p eps| %.3e, ratio %.3e", name.c_str(), d.max_defect, d.max_scale,
                   d.max_defect / d.max_scale);
    }

    // 11: oscillations downstream of the re-entrant corner
    if (con_asgs.has(4.0) && con_supg.has(4.0)) {
        const double tv_s = corner_line_tv(con_supg, 4.0), tv_a = corner_line_tv(con_asgs, 4.0);
        verdict(11, "SUPG vs ASGS oscillation at Wi = 4", tv_s >= 1.5 * tv_a,
                fmt("TV(sigma11) on y = -H2, x > 0: SUPG %.4f, ASGS %.4f, ratio %.3f >= 1.5", tv_s, tv_a, tv_s / tv_a));
    } else {
        verdict(11, "SUPG vs ASGS oscillation at Wi = 4", false,
                fmt("Wi = 4 not reached (SUPG limit %s, ASGS limit %s)", limit_text(con_supg).c_str(),
                    limit_text(con_asgs).c_str()));
    }

    emit(fmt("\n%d passed, %d failed, %.0f s\n", n_pass, n_fail, seconds_since(t_all)));
    if (report) std::fclose(report);
    return 0;
}
