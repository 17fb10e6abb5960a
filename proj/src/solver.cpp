#include "logconf/solver.hpp"

#include <umfpack.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace logconf {

const char* to_string(JacobianMode m) { return m == JacobianMode::CentralFD ? "central_fd" : "semi_analytic"; }

const char* to_string(NewtonStatus s)
{
    switch (s) {
    case NewtonStatus::Converged: return "converged";
    case NewtonStatus::Diverged: return "diverged";
    case NewtonStatus::MaxIterations: return "max_iterations";
    case NewtonStatus::LinearFailure: return "linear_failure";
    case NewtonStatus::KernelFailure: return "kernel_failure";
    }
    return "?";
}

void NewtonConfig::validate() const
{
    if (!(epsilon > 0.0)) throw std::invalid_argument("newton: epsilon must be positive");
    if (max_iters < 0) throw std::invalid_argument("newton: max_iters must be non-negative");
    if (!(fd_step >= 1e-12 && fd_step <= 1e-2)) throw std::invalid_argument("newton: fd_step must lie in [1e-12, 1e-2]");
    if (!(divergence_factor > 1.0)) throw std::invalid_argument("newton: divergence_factor must exceed 1");
}

std::vector<double> fd_element_jacobian(const ElementContext& ctx, const ElementBasis& basis,
                                        std::span<const double> local, double fd_step)
{
    const int n = static_cast<int>(local.size());
    std::vector<double> jac(static_cast<std::size_t>(n) * n);
    std::vector<double> u(local.begin(), local.end()), rp(n), rm(n);
    const double inv = 1.0 / (2.0 * fd_step);
    for (int c = 0; c < n; ++c) {
        const double keep = u[c];
        u[c] = keep + fd_step;
        element_residual(ctx, basis, u, rp);
        u[c] = keep - fd_step;
        element_residual(ctx, basis, u, rm);
        u[c] = keep;
        for (int r = 0; r < n; ++r) jac[static_cast<std::size_t>(r) * n + c] = (rp[r] - rm[r]) * inv;
    }
    return jac;
}

std::vector<double> semi_analytic_element_jacobian(const ElementContext& ctx, const ElementBasis& basis,
                                                   std::span<const double> local)
{
    const std::size_t n = local.size();
    std::vector<double> jac(n * n);
    frozen_element_jacobian(ctx, basis, local, freeze(ctx, basis, local), jac);
    return jac;
}

Assembler::Assembler(const Mesh& mesh, ElementContext ctx, BCSet bcs, int threads)
    : mesh_(&mesh), ctx_(std::move(ctx)), dofs_(DofMap::from_mesh(mesh)), threads_(std::max(1, threads))
{
    const int ne = mesh.n_elements();
    const int nn = mesh.nodes_per_element();
    const int nl = kDofsPerNode * nn;
    bases_.reserve(ne);
    element_dofs_.resize(ne);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(ne) * nl * nl);
    for (int e = 0; e < ne; ++e) {
        const auto xy = mesh.element_coords(e);
        try {
            bases_.push_back(basis_eval(mesh.kind, std::span<const Vec2>(xy.data(), nn)));
        } catch (const GeometryError& err) {
            throw AssemblyError(e, err.what());
        }
        auto& d = element_dofs_[e];
        for (int node : mesh.element(e))
            for (int c = 0; c < kDofsPerNode; ++c) d.push_back(dofs_.dof(node, c));
        for (int r : d)
            for (int c : d) trip.emplace_back(r, c, 0.0);
    }
    const int n = dofs_.n_dofs();
    pattern_.resize(n, n);
    pattern_.setFromTriplets(trip.begin(), trip.end());
    pattern_.makeCompressed();
    const int* outer = pattern_.outerIndexPtr();
    const int* inner = pattern_.innerIndexPtr();
    slot_.resize(ne);
    for (int e = 0; e < ne; ++e) {
        const auto& d = element_dofs_[e];
        auto& s = slot_[e];
        s.resize(static_cast<std::size_t>(nl) * nl);
        for (int c = 0; c < nl; ++c) {
            const int* lo = inner + outer[d[c]];
            const int* hi = inner + outer[d[c] + 1];
            for (int r = 0; r < nl; ++r) s[r * nl + c] = static_cast<int>(std::lower_bound(lo, hi, d[r]) - inner);
        }
    }
    set_bcs(std::move(bcs));
}

void Assembler::set_bcs(BCSet bcs)
{
    bcs_ = std::move(bcs);
    const int n = dofs_.n_dofs();
    std::vector<int> which(n, -1);
    for (int i = 0; i < bcs_.size(); ++i) {
        const int dof = bcs_.constraints[i].dof;
        if (dof < 0 || dof >= n) throw std::out_of_range("boundary condition dof out of range");
        which[dof] = i;
    }
    bc_row_slots_.assign(bcs_.size(), {});
    bc_diag_slot_.assign(bcs_.size(), -1);
    const int* outer = pattern_.outerIndexPtr();
    const int* inner = pattern_.innerIndexPtr();
    for (int col = 0; col < n; ++col) {
        for (int k = outer[col]; k < outer[col + 1]; ++k) {
            const int i = which[inner[k]];
            if (i < 0) continue;
            bc_row_slots_[i].push_back(k);
            if (inner[k] == col) bc_diag_slot_[i] = k;
        }
    }
}

void Assembler::apply_bcs(FieldState& state) const
{
    for (const auto& c : bcs_.constraints) state[c.dof] = c.value;
}

template <class Fn>
void Assembler::for_each_element(Fn&& fn) const
{
    const int ne = mesh_->n_elements();
    const int nt = std::min(threads_, std::max(1, ne));
    std::mutex mu;
    int bad_element = std::numeric_limits<int>::max();
    std::string bad_what;
    auto run = [&](int begin, int end) {
        for (int e = begin; e < end; ++e) {
            try {
                fn(e);
            } catch (const std::exception& err) {
                std::lock_guard<std::mutex> lock(mu);
                if (e < bad_element) {
                    bad_element = e;
                    bad_what = err.what();
                }
                return;
            }
        }
    };
    if (nt == 1) {
        run(0, ne);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nt; ++t) pool.emplace_back(run, ne * t / nt, ne * (t + 1) / nt);
        for (auto& th : pool) th.join();
    }
    if (bad_element != std::numeric_limits<int>::max()) throw AssemblyError(bad_element, bad_what);
}

Eigen::VectorXd Assembler::residual(const FieldState& state) const
{
    if (state.size() != n_dofs()) throw std::invalid_argument("residual: state length does not match the dof layout");
    const int ne = mesh_->n_elements();
    const int nl = kDofsPerNode * mesh_->nodes_per_element();
    std::vector<double> buf(static_cast<std::size_t>(ne) * nl);
    for_each_element([&](int e) {
        std::vector<double> local(nl);
        for (int i = 0; i < nl; ++i) local[i] = state[element_dofs_[e][i]];
        element_residual(ctx_, bases_[e], local, std::span<double>(&buf[static_cast<std::size_t>(e) * nl], nl));
    });
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n_dofs());
    for (int e = 0; e < ne; ++e) {
        const double* b = &buf[static_cast<std::size_t>(e) * nl];
        for (int i = 0; i < nl; ++i) r[element_dofs_[e][i]] += b[i];
    }
    for (const auto& c : bcs_.constraints) r[c.dof] = state[c.dof] - c.value;
    return r;
}

SparseSystem Assembler::linearize(const FieldState& state, const Eigen::VectorXd& residual, JacobianMode mode,
                                  double fd_step) const
{
    const int ne = mesh_->n_elements();
    const int nl = kDofsPerNode * mesh_->nodes_per_element();
    const std::size_t nl2 = static_cast<std::size_t>(nl) * nl;
    std::vector<double> buf(static_cast<std::size_t>(ne) * nl2);
    for_each_element([&](int e) {
        std::vector<double> local(nl);
        for (int i = 0; i < nl; ++i) local[i] = state[element_dofs_[e][i]];
        const std::vector<double> j = mode == JacobianMode::CentralFD
                                          ? fd_element_jacobian(ctx_, bases_[e], local, fd_step)
                                          : semi_analytic_element_jacobian(ctx_, bases_[e], local);
        std::copy(j.begin(), j.end(), buf.begin() + static_cast<std::ptrdiff_t>(e * nl2));
    });
    SparseSystem sys;
    sys.matrix = pattern_;
    double* val = sys.matrix.valuePtr();
    std::fill(val, val + sys.matrix.nonZeros(), 0.0);
    for (int e = 0; e < ne; ++e) {
        const double* b = &buf[e * nl2];
        const auto& s = slot_[e];
        for (std::size_t k = 0; k < nl2; ++k) val[s[k]] += b[k];
    }
    for (int i = 0; i < bcs_.size(); ++i) {
        for (int k : bc_row_slots_[i]) val[k] = 0.0;
        val[bc_diag_slot_[i]] = 1.0;
    }
    sys.rhs = -residual;
    return sys;
}

struct LinearSolver::Impl {
    void* symbolic = nullptr;
    std::vector<int> ap, ai;
    double control[UMFPACK_CONTROL];

    Impl() { umfpack_di_defaults(control); }
    ~Impl() { release(); }
    void release()
    {
        if (symbolic) umfpack_di_free_symbolic(&symbolic);
        symbolic = nullptr;
    }
};

LinearSolver::LinearSolver() : impl_(std::make_unique<Impl>()) {}
LinearSolver::~LinearSolver() = default;

namespace {

/// Field shares and spread of an approximate null vector.
std::string null_space_summary(const Eigen::VectorXd& x)
{
    static const char* names[kDofsPerNode] = {"u1", "u2", "p", "chi11", "chi12", "chi22"};
    double share[kDofsPerNode] = {};
    const double total = x.squaredNorm();
    for (Eigen::Index i = 0; i < x.size(); ++i) share[i % kDofsPerNode] += x[i] * x[i];
    int top = 0;
    for (int c = 1; c < kDofsPerNode; ++c)
        if (share[c] > share[top]) top = c;
    double mean = 0.0, sq = 0.0;
    const Eigen::Index nodes = x.size() / kDofsPerNode;
    for (Eigen::Index k = 0; k < nodes; ++k) mean += x[kDofsPerNode * k + top];
    mean /= static_cast<double>(nodes);
    for (Eigen::Index k = 0; k < nodes; ++k) sq += std::pow(x[kDofsPerNode * k + top] - mean, 2);
    const double spread = std::sqrt(sq / static_cast<double>(nodes)) / std::max(std::abs(mean), 1e-300);
    std::ostringstream os;
    os << "near-null vector: " << std::setprecision(3) << 100.0 * share[top] / total << "% in " << names[top]
       << ", relative spread " << spread;
    if (top == P && spread < 1e-3) os << " (constant pressure mode: missing pressure gauge?)";
    if (top <= U2 && spread < 1e-3) os << " (uniform velocity mode: missing velocity gauge?)";
    return os.str();
}

}  // namespace

Eigen::VectorXd LinearSolver::solve(const SparseSystem& sys, LinearSolveInfo* info)
{
    const Eigen::SparseMatrix<double>& a = sys.matrix;
    if (!a.isCompressed()) throw std::invalid_argument("linear_solve: matrix must be compressed");
    const int n = static_cast<int>(a.rows());
    const int nnz = static_cast<int>(a.nonZeros());
    const int* ap = a.outerIndexPtr();
    const int* ai = a.innerIndexPtr();
    const double* ax = a.valuePtr();
    Impl& m = *impl_;
    double uinfo[UMFPACK_INFO];
    const bool same = m.symbolic && static_cast<int>(m.ap.size()) == n + 1 && std::equal(ap, ap + n + 1, m.ap.begin()) &&
                      static_cast<int>(m.ai.size()) == nnz && std::equal(ai, ai + nnz, m.ai.begin());
    if (!same) {
        m.release();
        if (umfpack_di_symbolic(n, n, ap, ai, ax, &m.symbolic, m.control, uinfo) != UMFPACK_OK)
            throw LinearSolverError("UMFPACK symbolic analysis failed");
        m.ap.assign(ap, ap + n + 1);
        m.ai.assign(ai, ai + nnz);
    }
    void* numeric = nullptr;
    const int status = umfpack_di_numeric(ap, ai, ax, m.symbolic, &numeric, m.control, uinfo);
    const double rcond = uinfo[UMFPACK_RCOND];
    struct Guard {
        void*& p;
        ~Guard() { if (p) umfpack_di_free_numeric(&p); }
    } guard{numeric};
    if (status != UMFPACK_OK && status != UMFPACK_WARNING_singular_matrix)
        throw LinearSolverError("UMFPACK numeric factorization failed (status " + std::to_string(status) + ")");

    Eigen::VectorXd x(n);
    // UMFPACK's rcond is the pivot ratio; regular systems here sit above 1e-3, gauge-deficient ones below 1e-11.
    const bool singular = status == UMFPACK_WARNING_singular_matrix || !(rcond > 1e-10);
    if (singular) {
        // One inverse-iteration step exposes the dominant near-null direction.
        std::ostringstream os;
        os << "singular matrix (rcond " << std::setprecision(3) << rcond << ")";
        if (status != UMFPACK_WARNING_singular_matrix) {
            std::mt19937_64 rng(1);
            std::normal_distribution<double> g;
            Eigen::VectorXd b(n);
            for (int i = 0; i < n; ++i) b[i] = g(rng);
            if (umfpack_di_solve(UMFPACK_A, ap, ai, ax, x.data(), b.data(), numeric, m.control, uinfo) == UMFPACK_OK &&
                x.allFinite())
                os << "; " << null_space_summary(x);
        } else {
            os << "; exactly zero pivot";
        }
        throw LinearSolverError(os.str());
    }
    if (umfpack_di_solve(UMFPACK_A, ap, ai, ax, x.data(), sys.rhs.data(), numeric, m.control, uinfo) != UMFPACK_OK)
        throw LinearSolverError("UMFPACK solve failed");
    const double bn = sys.rhs.norm();
    const double rel = bn > 0.0 ? (a * x - sys.rhs).norm() / bn : (a * x).norm();
    if (!(rel < 1e-8)) {
        std::ostringstream os;
        os << "inaccurate solve (relative residual " << std::setprecision(3) << rel << ", rcond " << rcond << ")";
        throw LinearSolverError(os.str());
    }
    if (info) {
        info->relative_residual = rel;
        info->rcond = rcond;
    }
    return x;
}

Eigen::VectorXd linear_solve(const SparseSystem& sys, LinearSolveInfo* info)
{
    LinearSolver s;
    return s.solve(sys, info);
}

NewtonResult newton_solve(const Assembler& assembler, const FieldState& init, const NewtonConfig& cfg)
{
    cfg.validate();
    if (!init.allFinite()) throw std::invalid_argument("newton: initial state is not finite");
    NewtonResult res;
    res.state = init;
    assembler.apply_bcs(res.state);
    const double scale = 1.0 / std::sqrt(static_cast<double>(assembler.n_dofs()));
    LinearSolver lin;
    for (int it = 0;; ++it) {
        Eigen::VectorXd r;
        try {
            r = assembler.residual(res.state);
        } catch (const std::exception& err) {
            res.status = NewtonStatus::KernelFailure;
            res.message = err.what();
            return res;
        }
        const double norm = r.norm() * scale;
        res.trace.push_back(norm);
        if (!std::isfinite(norm)) {
            res.status = NewtonStatus::Diverged;
            res.message = "residual is not finite";
            return res;
        }
        if (norm < cfg.epsilon) {
            res.status = NewtonStatus::Converged;
            return res;
        }
        if (norm > cfg.divergence_factor * res.trace.front()) {
            res.status = NewtonStatus::Diverged;
            res.message = "residual grew beyond the divergence factor";
            return res;
        }
        if (it == cfg.max_iters) {
            res.status = NewtonStatus::MaxIterations;
            res.message = "no convergence in " + std::to_string(cfg.max_iters) + " iterations";
            return res;
        }
        try {
            const SparseSystem sys = assembler.linearize(res.state, r, cfg.jacobian, cfg.fd_step);
            res.state += lin.solve(sys);
        } catch (const LinearSolverError& err) {
            res.status = NewtonStatus::LinearFailure;
            res.message = err.what();
            return res;
        } catch (const std::exception& err) {
            res.status = NewtonStatus::KernelFailure;
            res.message = err.what();
            return res;
        }
    }
}

void ContinuationPlan::validate() const
{
    if (lambdas.empty()) throw std::invalid_argument("continuation: empty plan");
    if (lambdas.front() != 0.0) throw std::invalid_argument("continuation: plan must start at lambda = 0");
    for (std::size_t i = 1; i < lambdas.size(); ++i)
        if (!(lambdas[i] > lambdas[i - 1])) throw std::invalid_argument("continuation: lambdas must increase strictly");
    if (min_step < 0.0) throw std::invalid_argument("continuation: min_step must be non-negative");
}

ContinuationResult continuation_run(Assembler& assembler, const PhysicalParams& base, const ContinuationPlan& plan,
                                    const NewtonConfig& cfg, const FieldState& init, const BcFactory& bc_for,
                                    const StepCallback& on_step)
{
    plan.validate();
    ContinuationResult out;
    FieldState state = init;
    auto attempt = [&](double lambda) {
        PhysicalParams p = base;
        p.lambda = lambda;
        assembler.set_params(p);
        if (bc_for) assembler.set_bcs(bc_for(p));
        ContinuationStep step{lambda, newton_solve(assembler, state, cfg)};
        out.steps.push_back(step);
        if (step.result.converged()) {
            state = step.result.state;
            out.limiting_lambda = lambda;
            if (on_step) on_step(lambda, step.result);
        }
        return step.result.converged();
    };

    const bool resumed = plan.resume_lambda >= 0.0;
    double current = resumed ? plan.resume_lambda : 0.0;
    out.limiting_lambda = current;
    std::size_t k = 0;
    if (!resumed) {
        if (!attempt(plan.lambdas[0])) {
            const auto& r = out.steps.back().result;
            throw std::runtime_error(std::string("Newtonian solve failed (") + to_string(r.status) + "): " + r.message);
        }
        k = 1;
    }
    for (; k < plan.lambdas.size(); ++k) {
        const double target = plan.lambdas[k];
        if (target <= current) continue;
        double step = target - current;
        while (current < target) {
            const double next = std::min(target, current + step);
            if (attempt(next)) {
                current = next;
                continue;
            }
            if (plan.min_step <= 0.0 || step <= plan.min_step * (1.0 + 1e-12)) {
                out.last_state = state;
                return out;
            }
            step = std::max(0.5 * step, plan.min_step);
        }
    }
    out.completed = true;
    out.last_state = state;
    return out;
}

ContinuationPlan weissenberg_plan(double wi_max, double wi_per_lambda)
{
    if (!(wi_per_lambda > 0.0)) throw std::invalid_argument("weissenberg_plan: wi_per_lambda must be positive");
    if (wi_max < 0.0) throw std::invalid_argument("weissenberg_plan: wi_max must be non-negative");
    ContinuationPlan plan;
    // integer grid avoids accumulated rounding in the targets
    for (int i = 0;; ++i) {
        const double wi = i <= 10 ? 0.1 * i : 1.0 + 0.25 * (i - 10);
        if (wi > wi_max + 1e-12) break;
        plan.lambdas.push_back(wi / wi_per_lambda);
    }
    if (plan.lambdas.back() * wi_per_lambda < wi_max - 1e-12) plan.lambdas.push_back(wi_max / wi_per_lambda);
    plan.min_step = 0.01 / wi_per_lambda;
    return plan;
}

void save_checkpoint(const Checkpoint& cp, const std::string& path)
{
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write checkpoint " + path);
    f << "logconf-checkpoint 1\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", cp.lambda);
    f << "lambda " << buf << "\n";
    for (const auto& [k, v] : cp.meta) f << "meta " << k << " " << v << "\n";
    f << "dofs " << cp.state.size() << "\n";
    for (Eigen::Index i = 0; i < cp.state.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", cp.state[i]);
        f << buf << "\n";
    }
    if (!f) throw std::runtime_error("error writing checkpoint " + path);
}

Checkpoint load_checkpoint(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open checkpoint " + path);
    std::string line, key;
    if (!std::getline(f, line) || line != "logconf-checkpoint 1")
        throw std::runtime_error(path + ": not a version 1 checkpoint");
    Checkpoint cp;
    while (std::getline(f, line)) {
        std::istringstream ls(line);
        ls >> key;
        if (key == "lambda") {
            ls >> cp.lambda;
        } else if (key == "meta") {
            std::string k, v;
            ls >> k;
            std::getline(ls >> std::ws, v);
            cp.meta.emplace_back(k, v);
        } else if (key == "dofs") {
            long n = -1;
            ls >> n;
            if (n < 0) throw std::runtime_error(path + ": bad dof count");
            cp.state.resize(n);
            for (long i = 0; i < n; ++i) {
                if (!std::getline(f, line)) throw std::runtime_error(path + ": truncated state");
                cp.state[i] = std::strtod(line.c_str(), nullptr);
            }
            if (!cp.state.allFinite()) throw std::runtime_error(path + ": non-finite state");
            return cp;
        } else {
            throw std::runtime_error(path + ": unexpected key '" + key + "'");
        }
    }
    throw std::runtime_error(path + ": missing state");
}

void write_trace_csv(const std::vector<double>& trace, const std::string& path, const std::string& comment)
{
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    if (!comment.empty()) f << "# " << comment << "\n";
    f << "iter,residual_norm\n";
    char buf[64];
    for (std::size_t i = 0; i < trace.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", trace[i]);
        f << i << "," << buf << "\n";
    }
}

}  // namespace logconf
