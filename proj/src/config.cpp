#include "logconf/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

namespace logconf {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(const std::string& key, const std::string& v)
{
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size() || !std::isfinite(x)) throw ConfigError(key + ": expected a number, got '" + v + "'");
    return x;
}

int to_int(const std::string& key, const std::string& v)
{
    const double x = to_double(key, v);
    if (x != std::floor(x) || std::abs(x) > 1e9) throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return static_cast<int>(x);
}

std::vector<int> to_int_list(const std::string& key, const std::string& v)
{
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_int(key, trim(item)));
    return out;
}

}  // namespace

std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string RunConfig::canonical() const
{
    std::ostringstream o;
    o << "benchmark = " << to_string(benchmark) << "\n";
    o << "variant = " << to_string(variant) << "\n";
    o << "eta_total = " << fmt(params.eta_total) << "\n";
    o << "beta = " << fmt(params.beta) << "\n";
    o << "rho = " << fmt(params.rho) << "\n";
    o << "wi_max = " << fmt(wi_max) << "\n";
    o << "wi_step = " << fmt(wi_step) << "\n";
    o << "wi_min_step = " << fmt(wi_min_step) << "\n";
    if (benchmark == Benchmark::Box) {
        o << "box_sizes = ";
        for (std::size_t i = 0; i < box_sizes.size(); ++i) o << (i ? "," : "") << box_sizes[i];
        o << "\n";
    } else if (!mesh_file.empty()) {
        o << "mesh_file = " << mesh_file << "\n";
    } else if (benchmark == Benchmark::Cylinder) {
        o << "refinement = " << refinement << "\n";
    } else {
        o << "target_h = " << fmt(grading.target_h) << "\n";
        o << "growth = " << fmt(grading.growth) << "\n";
        o << "h_max = " << fmt(grading.h_max) << "\n";
        o << "wall_h = " << fmt(grading.wall_h) << "\n";
        o << "upstream_length = " << fmt(grading.upstream_length) << "\n";
        o << "downstream_length = " << fmt(grading.downstream_length) << "\n";
    }
    o << "newton_tol = " << fmt(newton.epsilon) << "\n";
    o << "newton_max_iters = " << newton.max_iters << "\n";
    o << "fd_step = " << fmt(newton.fd_step) << "\n";
    o << "jacobian = " << (newton.jacobian == JacobianMode::CentralFD ? "fd" : "semi") << "\n";
    return o.str();
}

std::string RunConfig::hash() const
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical())));
    return buf;
}

RunConfig parse_config(const std::string& text, const std::string& base_dir)
{
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string body = line;
        bool quoted = false;
        for (std::size_t i = 0; i < body.size(); ++i) {
            if (body[i] == '"') quoted = !quoted;
            if (body[i] == '#' && !quoted) {
                body.resize(i);
                break;
            }
        }
        body = trim(body);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(body.substr(0, eq));
        std::string value = trim(body.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (!kv.emplace(key, value).second) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key " + key);
    }

    RunConfig c;
    auto take = [&](const std::string& key) -> std::optional<std::string> {
        const auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    const auto bench = take("benchmark");
    if (!bench) throw ConfigError("benchmark: missing (box, cylinder or contraction)");
    const auto b = parse_benchmark(*bench);
    if (!b) throw ConfigError("benchmark: unknown value '" + *bench + "'");
    c.benchmark = *b;
    c.params.beta = c.benchmark == Benchmark::Box ? 2.0 / 3.0 : c.benchmark == Benchmark::Cylinder ? 0.59 : 1.0 / 9.0;
    c.params.rho = 0.0;
    c.params.eta_total = 1.0;

    if (const auto v = take("variant")) {
        const auto var = parse_variant(*v);
        if (!var) throw ConfigError("variant: unknown value '" + *v + "'");
        c.variant = *var;
    }
    if (const auto v = take("eta_total")) c.params.eta_total = to_double("eta_total", *v);
    if (const auto v = take("beta")) c.params.beta = to_double("beta", *v);
    if (const auto v = take("rho")) c.params.rho = to_double("rho", *v);
    const auto wi = take("wi_max");
    if (!wi) throw ConfigError("wi_max: missing");
    c.wi_max = to_double("wi_max", *wi);
    if (const auto v = take("wi_step")) c.wi_step = to_double("wi_step", *v);
    if (const auto v = take("wi_min_step")) c.wi_min_step = to_double("wi_min_step", *v);
    if (const auto v = take("newton_tol")) c.newton.epsilon = to_double("newton_tol", *v);
    if (const auto v = take("newton_max_iters")) c.newton.max_iters = to_int("newton_max_iters", *v);
    if (const auto v = take("fd_step")) c.newton.fd_step = to_double("fd_step", *v);
    if (const auto v = take("jacobian")) {
        if (*v == "fd") c.newton.jacobian = JacobianMode::CentralFD;
        else if (*v == "semi") c.newton.jacobian = JacobianMode::SemiAnalytic;
        else throw ConfigError("jacobian: expected fd or semi, got '" + *v + "'");
    }
    if (const auto v = take("threads")) c.threads = to_int("threads", *v);
    if (const auto v = take("output")) c.output = *v;

    if (c.benchmark == Benchmark::Box) {
        if (const auto v = take("box_sizes")) c.box_sizes = to_int_list("box_sizes", *v);
    } else {
        if (const auto v = take("mesh_file")) {
            namespace fs = std::filesystem;
            fs::path p(*v);
            if (p.is_relative()) p = fs::path(base_dir) / p;
            c.mesh_file = fs::weakly_canonical(p).string();
        }
        if (c.benchmark == Benchmark::Cylinder) {
            if (const auto v = take("refinement")) c.refinement = to_int("refinement", *v);
        } else {
            if (const auto v = take("target_h")) c.grading.target_h = to_double("target_h", *v);
            if (const auto v = take("growth")) c.grading.growth = to_double("growth", *v);
            if (const auto v = take("h_max")) c.grading.h_max = to_double("h_max", *v);
            if (const auto v = take("wall_h")) c.grading.wall_h = to_double("wall_h", *v);
            if (const auto v = take("upstream_length")) c.grading.upstream_length = to_double("upstream_length", *v);
            if (const auto v = take("downstream_length")) c.grading.downstream_length = to_double("downstream_length", *v);
        }
    }
    if (!kv.empty()) {
        throw ConfigError(kv.begin()->first + ": not a key for benchmark " + std::string(to_string(c.benchmark)));
    }

    try {
        c.params.validate();
        c.newton.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!(c.wi_max >= 0.0)) throw ConfigError("wi_max: must be >= 0");
    if (!(c.wi_step >= 0.0)) throw ConfigError("wi_step: must be >= 0");
    if (!(c.wi_min_step >= 0.0)) throw ConfigError("wi_min_step: must be >= 0");
    if (!(c.threads >= 1 && c.threads <= 256)) throw ConfigError("threads: must lie in [1, 256]");
    if (c.output.empty()) throw ConfigError("output: empty");
    if (c.benchmark == Benchmark::Box) {
        if (c.box_sizes.empty()) throw ConfigError("box_sizes: empty");
        for (int n : c.box_sizes)
            if (n < 2 || n > 1024) throw ConfigError("box_sizes: each size must lie in [2, 1024]");
        if (c.box_sizes.size() == 3 && !(c.box_sizes[1] == 2 * c.box_sizes[0] && c.box_sizes[2] == 2 * c.box_sizes[1]))
            throw ConfigError("box_sizes: three sizes must be in 2:1 refinement");
    } else if (!c.mesh_file.empty()) {
        if (!std::filesystem::is_regular_file(c.mesh_file)) throw ConfigError("mesh_file: no such file " + c.mesh_file);
    } else if (c.benchmark == Benchmark::Cylinder) {
        if (c.refinement < 0 || c.refinement > 6) throw ConfigError("refinement: must lie in [0, 6]");
    }
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    const auto dir = std::filesystem::absolute(path).parent_path().string();
    return parse_config(ss.str(), dir);
}

double wi_per_lambda(const RunConfig& cfg)
{
    switch (cfg.benchmark) {
    case Benchmark::Box: return 1.0 / (cfg.params.beta * cfg.params.eta_total);
    case Benchmark::Cylinder: return default_inlet(Benchmark::Cylinder).mean_velocity / 1.0;
    case Benchmark::Contraction: return default_inlet(Benchmark::Contraction).mean_velocity / 1.0;
    }
    return 1.0;
}

ContinuationPlan make_plan(const RunConfig& cfg)
{
    const double k = wi_per_lambda(cfg);
    ContinuationPlan plan;
    if (cfg.wi_step > 0.0) {
        for (int i = 0;; ++i) {
            const double w = cfg.wi_step * i;
            if (w > cfg.wi_max + 1e-12) break;
            plan.lambdas.push_back(w / k);
        }
        if (plan.lambdas.back() * k < cfg.wi_max - 1e-12) plan.lambdas.push_back(cfg.wi_max / k);
    } else {
        plan = weissenberg_plan(cfg.wi_max, k);
    }
    plan.min_step = cfg.wi_min_step / k;
    return plan;
}

Mesh make_mesh(const RunConfig& cfg)
{
    try {
        if (cfg.benchmark == Benchmark::Box) throw ConfigError("make_mesh: the box uses make_box_mesh");
        if (!cfg.mesh_file.empty()) return load_mesh(cfg.mesh_file);
        if (cfg.benchmark == Benchmark::Cylinder) return gen_cylinder_channel(cfg.refinement);
        return gen_contraction(cfg.grading);
    } catch (const MeshError& e) {
        throw ConfigError(std::string("mesh: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("mesh: ") + e.what());
    }
}

Mesh make_box_mesh(int n) { return gen_periodic_box(n, M_PI); }

BcFactory Problem::bc_factory() const
{
    return [this](const PhysicalParams& q) { return build_bcs(bench, mesh, dofs, q); };
}

std::unique_ptr<Problem> make_problem(const RunConfig& cfg, Mesh mesh)
{
    auto pr = std::make_unique<Problem>();
    pr->mesh = std::move(mesh);
    pr->bench = cfg.benchmark;
    pr->params = cfg.params;
    pr->params.lambda = 0.0;
    try {
        pr->mesh.validate();
        pr->dofs = DofMap::from_mesh(pr->mesh);
        BCSet bcs = build_bcs(cfg.benchmark, pr->mesh, pr->dofs, pr->params);
        const BodyForce body = cfg.benchmark == Benchmark::Box ? BodyForce(four_roll_force) : BodyForce{};
        pr->assembler = std::make_unique<Assembler>(pr->mesh, ElementContext{pr->params, cfg.variant, body},
                                                    std::move(bcs), cfg.threads);
    } catch (const BoundaryConditionError& e) {
        throw ConfigError(std::string("boundary conditions: ") + e.what());
    } catch (const MeshError& e) {
        throw ConfigError(std::string("mesh: ") + e.what());
    }
    return pr;
}

}  // namespace logconf
