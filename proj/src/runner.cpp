#include "logconf/runner.hpp"

#include "logconf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <sstream>

namespace logconf {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string wi_label(double wi)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", wi);
    return buf;
}

std::string comment_for(const std::string& hash) { return "config " + hash; }

std::pair<double, double> x_range(const Mesh& m)
{
    double lo = std::numeric_limits<double>::max(), hi = -lo;
    for (const auto& n : m.nodes) {
        lo = std::min(lo, n.x);
        hi = std::max(hi, n.x);
    }
    return {lo, hi};
}

double opt_or_nan(const std::optional<double>& v) { return v ? *v : kNaN; }

using Meta = std::vector<std::pair<std::string, std::string>>;

std::string meta_value(const Meta& meta, const std::string& key)
{
    for (const auto& [k, v] : meta)
        if (k == key) return v;
    return {};
}

struct Converged {
    double lambda = 0.0;
    std::string path;
};

struct SweepOutcome {
    bool completed = false;
    double limiting_wi = 0.0;
    std::vector<Converged> converged;  ///< ordered by lambda, including resumed steps
};

/// Checkpoints in dir/checkpoints carrying exactly the given identity meta, ordered by lambda.
std::vector<Converged> matching_checkpoints(const fs::path& dir, const Meta& identity)
{
    std::vector<Converged> out;
    const fs::path cdir = dir / "checkpoints";
    if (!fs::is_directory(cdir)) return out;
    for (const auto& entry : fs::directory_iterator(cdir)) {
        if (entry.path().extension() != ".chk") continue;
        Checkpoint cp;
        try {
            cp = load_checkpoint(entry.path().string());
        } catch (const std::exception&) {
            continue;
        }
        bool same = true;
        for (const auto& [k, v] : identity) same = same && meta_value(cp.meta, k) == v;
        if (same) out.push_back({cp.lambda, entry.path().string()});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
    return out;
}

SweepOutcome sweep(const RunConfig& cfg, Problem& pr, const fs::path& dir, const Meta& identity, bool resume,
                   std::ostream& log)
{
    fs::create_directories(dir / "checkpoints");
    fs::create_directories(dir / "traces");
    const double k = wi_per_lambda(cfg);
    ContinuationPlan plan = make_plan(cfg);
    FieldState init = FieldState::Zero(pr.assembler->n_dofs());

    SweepOutcome out;
    if (resume) {
        const auto found = matching_checkpoints(dir, identity);
        if (!found.empty()) {
            const Checkpoint cp = load_checkpoint(found.back().path);
            if (cp.state.size() != init.size()) throw ConfigError("checkpoint " + found.back().path + " does not fit the mesh");
            plan.resume_lambda = cp.lambda;
            init = cp.state;
            out.converged = found;
            log << "resuming from Wi " << wi_label(cp.lambda * k) << " (" << found.back().path << ")\n";
        }
    }

    Meta meta = identity;
    {
        std::istringstream lines(cfg.canonical());
        std::string line;
        while (std::getline(lines, line)) {
            const auto eq = line.find(" = ");
            meta.emplace_back("cfg." + line.substr(0, eq), line.substr(eq + 3));
        }
    }
    auto on_step = [&](double lambda, const NewtonResult& r) {
        Checkpoint cp{lambda, r.state, meta};
        cp.meta.emplace_back("wi", wi_label(lambda * k));
        cp.meta.emplace_back("iterations", std::to_string(r.iterations()));
        const std::string path = (dir / "checkpoints" / ("wi_" + wi_label(lambda * k) + ".chk")).string();
        save_checkpoint(cp, path);
        out.converged.push_back({lambda, path});
        char buf[160];
        std::snprintf(buf, sizeof buf, "Wi %s  converged in %d iterations, residual %.3e\n", wi_label(lambda * k).c_str(),
                      r.iterations(), r.trace.back());
        log << buf << std::flush;
    };
    const ContinuationResult res =
        continuation_run(*pr.assembler, pr.params, plan, cfg.newton, init, pr.bc_factory(), on_step);
    for (const auto& s : res.steps) {
        const std::string name = "wi_" + wi_label(s.lambda * k) + (s.result.converged() ? "" : "_failed") + ".csv";
        write_trace_csv(s.result.trace, (dir / "traces" / name).string(),
                        comment_for(cfg.hash()) + " status " + to_string(s.result.status));
        if (!s.result.converged()) {
            log << "Wi " << wi_label(s.lambda * k) << "  " << to_string(s.result.status) << ": " << s.result.message
                << "\n";
        }
    }
    out.completed = res.completed;
    out.limiting_wi = res.limiting_lambda * k;
    return out;
}

PhysicalParams at_lambda(PhysicalParams p, double lambda)
{
    p.lambda = lambda;
    return p;
}

// Rows of the benchmark tables for one converged state; profiles go to dir/profiles.
void cylinder_outputs(const Mesh& mesh, const PhysicalParams& p, const FieldState& s, double wi, const std::string& hash,
                      const fs::path& dir, std::vector<std::vector<double>>& drag)
{
    drag.push_back({wi, drag_coefficient(mesh, p, s)});
    fs::create_directories(dir / "profiles");
    write_profile_csv((dir / "profiles" / ("wake_wi_" + wi_label(wi) + ".csv")).string(), comment_for(hash),
                      sample_line(mesh, p, s, cylinder_wake()));
}

void contraction_outputs(const Mesh& mesh, const PhysicalParams& p, const FieldState& s, double wi,
                         const std::string& hash, const fs::path& dir, std::vector<std::vector<double>>& vortex,
                         std::vector<std::vector<double>>& maxima, std::vector<std::vector<double>>& slopes)
{
    const VortexReport v = vortex_sizes(mesh, s, ContractionGeometry{});
    vortex.push_back({wi, v.x_r, v.x_l});
    const CenterlineMaxima m = contraction_maxima(mesh, p, s);
    maxima.push_back({wi, m.s11, m.s11_scaled, m.u1});
    const SlopeReport sl = asymptotic_slopes(mesh, p, s, ContractionGeometry{});
    slopes.push_back({wi, opt_or_nan(sl.slope_s11), opt_or_nan(sl.slope_s12), opt_or_nan(sl.slope_s22),
                      opt_or_nan(sl.slope_u1), opt_or_nan(sl.slope_u2)});
    fs::create_directories(dir / "profiles");
    write_profile_csv((dir / "profiles" / ("centerline_wi_" + wi_label(wi) + ".csv")).string(), comment_for(hash),
                      sample_line(mesh, p, s, contraction_centerline(mesh)));
    write_profile_csv((dir / "profiles" / ("corner_wi_" + wi_label(wi) + ".csv")).string(), comment_for(hash),
                      sample_line(mesh, p, s, contraction_corner_line(mesh)));
}

const std::vector<std::string> kVortexHeader{"Wi", "X_R", "X_L"};
const std::vector<std::string> kMaximaHeader{"Wi", "s11_max", "s11_max_shear_scaled", "u1_max"};
const std::vector<std::string> kSlopesHeader{"Wi", "s11", "s12", "s22", "u1", "u2"};

void write_summary(const fs::path& dir, const std::string& hash, const std::vector<std::vector<double>>& rows)
{
    write_csv((dir / "summary.csv").string(), comment_for(hash), {"mesh", "wi_limit", "completed"}, rows);
}

int solve_box(const RunConfig& cfg, const fs::path& out_dir, bool resume, std::ostream& log)
{
    std::vector<std::unique_ptr<Problem>> problems;
    for (int n : cfg.box_sizes) problems.push_back(make_problem(cfg, make_box_mesh(n)));

    const double k = wi_per_lambda(cfg);
    const std::string hash = cfg.hash();
    std::vector<std::vector<double>> summary;
    std::vector<BoxCentre> finals;
    bool all_done = true;
    for (std::size_t i = 0; i < problems.size(); ++i) {
        const int n = cfg.box_sizes[i];
        log << "box " << n << "x" << n << "\n";
        const fs::path dir = out_dir / ("box_" + std::to_string(n));
        const SweepOutcome o = sweep(cfg, *problems[i], dir, {{"hash", hash}, {"box_size", std::to_string(n)}}, resume, log);
        summary.push_back({static_cast<double>(n), o.limiting_wi, o.completed ? 1.0 : 0.0});
        std::vector<std::vector<double>> rows;
        BoxCentre last;
        for (const auto& c : o.converged) {
            last = box_centre_values(problems[i]->mesh, load_checkpoint(c.path).state);
            rows.push_back({c.lambda * k, last.chi11, last.eps0});
        }
        write_csv((dir / "centre.csv").string(), comment_for(hash), {"Wi", "chi11", "eps0"}, rows);
        finals.push_back(last);
        all_done = all_done && o.completed;
    }
    write_summary(out_dir, hash, summary);
    if (all_done && finals.size() == 3) {
        auto eoc_table = [&](const std::string& name, double BoxCentre::*field) {
            const double q1 = finals[2].*field, q2 = finals[1].*field, q4 = finals[0].*field;
            const EocResult r = richardson_eoc(q1, q2, q4);
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 0; i < 3; ++i) {
                const double h = 2.0 * M_PI / cfg.box_sizes[i];
                const double v = finals[i].*field;
                rows.push_back({h, v, r.degenerate ? kNaN : v - r.extrapolated});
            }
            char buf[160];
            if (r.degenerate)
                std::snprintf(buf, sizeof buf, "; degenerate triple");
            else
                std::snprintf(buf, sizeof buf, "; order %.6g extrapolated %.10g", r.order, r.extrapolated);
            write_csv((out_dir / ("eoc_" + name + ".csv")).string(), comment_for(hash) + buf,
                      {"h", "value", "error_vs_extrapolated"}, rows);
            log << "EOC " << name << " " << buf + 2 << "\n";
        };
        eoc_table("chi11", &BoxCentre::chi11);
        eoc_table("eps0", &BoxCentre::eps0);
    }
    return all_done ? kExitOk : kExitBreakdown;
}

int solve_channel(const RunConfig& cfg, const fs::path& out_dir, bool resume, std::ostream& log)
{
    auto pr = make_problem(cfg, make_mesh(cfg));
    const std::string hash = cfg.hash();
    const double k = wi_per_lambda(cfg);
    const SweepOutcome o = sweep(cfg, *pr, out_dir, {{"hash", hash}}, resume, log);
    write_summary(out_dir, hash, {{0.0, o.limiting_wi, o.completed ? 1.0 : 0.0}});

    std::vector<std::vector<double>> drag, vortex, maxima, slopes;
    for (const auto& c : o.converged) {
        const FieldState s = load_checkpoint(c.path).state;
        const PhysicalParams p = at_lambda(pr->params, c.lambda);
        if (cfg.benchmark == Benchmark::Cylinder)
            cylinder_outputs(pr->mesh, p, s, c.lambda * k, hash, out_dir, drag);
        else
            contraction_outputs(pr->mesh, p, s, c.lambda * k, hash, out_dir, vortex, maxima, slopes);
    }
    if (cfg.benchmark == Benchmark::Cylinder) {
        write_csv((out_dir / "drag.csv").string(), comment_for(hash), {"Wi", "K"}, drag);
    } else {
        write_csv((out_dir / "vortex.csv").string(), comment_for(hash), kVortexHeader, vortex);
        write_csv((out_dir / "maxima.csv").string(), comment_for(hash), kMaximaHeader, maxima);
        write_csv((out_dir / "slopes.csv").string(), comment_for(hash), kSlopesHeader, slopes);
    }
    if (!o.completed) log << "breakdown: limiting Wi " << wi_label(o.limiting_wi) << "\n";
    return o.completed ? kExitOk : kExitBreakdown;
}

}  // namespace

CenterlineMaxima contraction_maxima(const Mesh& mesh, const PhysicalParams& p, const FieldState& state)
{
    const LineProfile prof = sample_line(mesh, p, state, contraction_centerline(mesh));
    CenterlineMaxima m{-std::numeric_limits<double>::max(), 0.0, -std::numeric_limits<double>::max()};
    for (const auto& s : prof.samples) {
        if (!s.found) continue;
        m.s11 = std::max(m.s11, s.sigma.xx);
        m.u1 = std::max(m.u1, s.u.x);
    }
    const InletSpec down = default_inlet(Benchmark::Contraction);
    m.s11_scaled = m.s11 / (3.0 * p.eta_total * down.mean_velocity / ContractionGeometry{}.h2);
    return m;
}

std::vector<CurvePoint> contraction_centerline(const Mesh& mesh, int n)
{
    const auto [lo, hi] = x_range(mesh);
    return segment_curve({lo, 0.0}, {hi, 0.0}, n, lo);
}

std::vector<CurvePoint> contraction_corner_line(const Mesh& mesh, int n)
{
    const double h2 = ContractionGeometry{}.h2;
    return segment_curve({0.0, -h2}, {x_range(mesh).second, -h2}, n, 0.0);
}

std::vector<CurvePoint> cylinder_wake(int n_arc, int n_wake) { return cylinder_wake_curve(1.0, 15.0, n_arc, n_wake); }

int run_solve(const std::string& config_path, const RunOptions& opt, std::ostream& log)
{
    RunConfig cfg;
    try {
        cfg = load_config(config_path);
        if (!opt.output.empty()) cfg.output = opt.output;
        if (opt.threads > 0) cfg.threads = opt.threads;
        // build every mesh up front so that a bad config leaves no output behind
        if (cfg.benchmark == Benchmark::Box) {
            for (int n : cfg.box_sizes) make_problem(cfg, make_box_mesh(n));
        } else {
            make_problem(cfg, make_mesh(cfg));
        }
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    const fs::path out_dir(cfg.output);
    log << "config " << cfg.hash() << " -> " << out_dir.string() << "\n";
    try {
        fs::create_directories(out_dir);
        return cfg.benchmark == Benchmark::Box ? solve_box(cfg, out_dir, opt.resume, log)
                                               : solve_channel(cfg, out_dir, opt.resume, log);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::runtime_error& e) {
        // the Newtonian step failing means the problem is set up wrongly
        log << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

int run_verify(const std::string& suite, const RunOptions& opt, std::ostream& log)
{
    const auto results = run_suite(suite, std::max(1, opt.threads));
    if (!results) {
        log << "unknown suite '" << suite << "' (kernels, jacobian, newtonian)\n";
        return kExitConfig;
    }
    bool ok = true;
    for (const auto& r : *results) {
        log << format_check(r) << "\n";
        ok = ok && r.pass;
    }
    return ok ? kExitOk : kExitCheckFailed;
}

int run_postprocess(const std::string& checkpoint, const std::string& what, const RunOptions& opt, std::ostream& log)
{
    Checkpoint cp;
    RunConfig cfg;
    try {
        cp = load_checkpoint(checkpoint);
        std::string text;
        for (const auto& [k, v] : cp.meta)
            if (k.rfind("cfg.", 0) == 0) text += k.substr(4) + " = " + v + "\n";
        cfg = parse_config(text);
    } catch (const std::exception& e) {
        log << "cannot use checkpoint: " << e.what() << "\n";
        return kExitConfig;
    }
    const std::string hash = meta_value(cp.meta, "hash");
    const double wi = cp.lambda * wi_per_lambda(cfg);
    const PhysicalParams p = at_lambda(cfg.params, cp.lambda);
    const fs::path dir = opt.output.empty() ? fs::path(checkpoint).parent_path() : fs::path(opt.output);

    static const std::map<std::string, Benchmark> owner{
        {"drag", Benchmark::Cylinder},    {"wake", Benchmark::Cylinder},       {"vortex", Benchmark::Contraction},
        {"maxima", Benchmark::Contraction}, {"slopes", Benchmark::Contraction}, {"centerline", Benchmark::Contraction},
        {"corner", Benchmark::Contraction}, {"centre", Benchmark::Box}};
    const auto it = owner.find(what);
    if (it == owner.end() || it->second != cfg.benchmark) {
        log << "'" << what << "' is not available for benchmark " << to_string(cfg.benchmark) << "\n";
        return kExitConfig;
    }
    Mesh mesh;
    try {
        if (cfg.benchmark == Benchmark::Box) {
            const std::string n = meta_value(cp.meta, "box_size");
            if (n.empty()) throw ConfigError("checkpoint has no box_size");
            mesh = make_box_mesh(std::stoi(n));
        } else {
            mesh = make_mesh(cfg);
        }
        if (DofMap::from_mesh(mesh).n_dofs() != cp.state.size()) throw ConfigError("checkpoint does not fit the mesh");
    } catch (const std::exception& e) {
        log << "cannot rebuild the mesh: " << e.what() << "\n";
        return kExitConfig;
    }
    fs::create_directories(dir);
    const std::string base = (dir / (what + "_wi_" + wi_label(wi) + ".csv")).string();
    const FieldState& s = cp.state;
    const std::string c = comment_for(hash);
    char buf[256];
    if (what == "drag") {
        const double k = drag_coefficient(mesh, p, s);
        write_csv(base, c, {"Wi", "K"}, {{wi, k}});
        std::snprintf(buf, sizeof buf, "Wi %s  K %.10g", wi_label(wi).c_str(), k);
    } else if (what == "wake" || what == "centerline" || what == "corner") {
        const auto curve = what == "wake" ? cylinder_wake()
                           : what == "centerline" ? contraction_centerline(mesh)
                                                  : contraction_corner_line(mesh);
        write_profile_csv(base, c, sample_line(mesh, p, s, curve));
        std::snprintf(buf, sizeof buf, "wrote %s", base.c_str());
    } else if (what == "vortex") {
        const VortexReport v = vortex_sizes(mesh, s, ContractionGeometry{});
        write_csv(base, c, kVortexHeader, {{wi, v.x_r, v.x_l}});
        std::snprintf(buf, sizeof buf, "Wi %s  X_R %.6g  X_L %.6g", wi_label(wi).c_str(), v.x_r, v.x_l);
    } else if (what == "maxima") {
        const CenterlineMaxima m = contraction_maxima(mesh, p, s);
        write_csv(base, c, kMaximaHeader, {{wi, m.s11, m.s11_scaled, m.u1}});
        std::snprintf(buf, sizeof buf, "Wi %s  s11_max %.6g  s11_max_shear_scaled %.6g  u1_max %.6g",
                      wi_label(wi).c_str(), m.s11, m.s11_scaled, m.u1);
    } else if (what == "slopes") {
        const SlopeReport r = asymptotic_slopes(mesh, p, s, ContractionGeometry{});
        write_csv(base, c, kSlopesHeader,
                  {{wi, opt_or_nan(r.slope_s11), opt_or_nan(r.slope_s12), opt_or_nan(r.slope_s22),
                    opt_or_nan(r.slope_u1), opt_or_nan(r.slope_u2)}});
        std::snprintf(buf, sizeof buf, "Wi %s  slope s12 %.4g  u1 %.4g", wi_label(wi).c_str(), opt_or_nan(r.slope_s12),
                      opt_or_nan(r.slope_u1));
    } else {
        const BoxCentre b = box_centre_values(mesh, s);
        write_csv(base, c, {"Wi", "chi11", "eps0"}, {{wi, b.chi11, b.eps0}});
        std::snprintf(buf, sizeof buf, "Wi %s  chi11 %.10g  eps0 %.10g", wi_label(wi).c_str(), b.chi11, b.eps0);
    }
    log << buf << "\n";
    return kExitOk;
}

}  // namespace logconf
