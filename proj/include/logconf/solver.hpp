/**
 * @file solver.hpp
 * @brief Global assembly with Dirichlet rows, element Jacobians by central
 *        finite differences, sparse LU, Newton iteration and continuation in
 *        the relaxation time.
 */
#pragma once

#include "logconf/formulation.hpp"

#include <Eigen/SparseCore>

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace logconf {

enum class JacobianMode { CentralFD, SemiAnalytic };

const char* to_string(JacobianMode m);

struct NewtonConfig {
    double epsilon = 1e-10;
    int max_iters = 30;
    double fd_step = 1e-5;
    JacobianMode jacobian = JacobianMode::CentralFD;
    double divergence_factor = 1e4;  ///< residual growth over the initial value treated as divergence

    void validate() const;
};

struct SparseSystem {
    Eigen::SparseMatrix<double> matrix;  ///< compressed column storage
    Eigen::VectorXd rhs;

    [[nodiscard]] int n_dof() const { return static_cast<int>(rhs.size()); }
};

/// Kernel failure inside an element, tagged with its index.
class AssemblyError : public std::runtime_error {
public:
    AssemblyError(int element, const std::string& what)
        : std::runtime_error("element " + std::to_string(element) + ": " + what), element_(element) {}
    [[nodiscard]] int element() const noexcept { return element_; }

private:
    int element_;
};

class LinearSolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense local Jacobian (row-major) by central differences of element_residual.
std::vector<double> fd_element_jacobian(const ElementContext& ctx, const ElementBasis& basis,
                                        std::span<const double> local, double fd_step);

/// Analytic Jacobian with alpha and the advective velocity frozen at local (Galerkin, SUPG).
std::vector<double> semi_analytic_element_jacobian(const ElementContext& ctx, const ElementBasis& basis,
                                                   std::span<const double> local);

/// Element bases, dof maps and the Jacobian sparsity pattern of one mesh.
class Assembler {
public:
    Assembler(const Mesh& mesh, ElementContext ctx, BCSet bcs, int threads = 1);

    [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
    [[nodiscard]] const DofMap& dofs() const { return dofs_; }
    [[nodiscard]] const BCSet& bcs() const { return bcs_; }
    [[nodiscard]] const ElementContext& context() const { return ctx_; }
    [[nodiscard]] const ElementBasis& basis(int e) const { return bases_[e]; }
    [[nodiscard]] int n_dofs() const { return dofs_.n_dofs(); }

    void set_params(const PhysicalParams& p) { ctx_.params = p; }
    void set_bcs(BCSet bcs);

    /// Overwrites constrained slots with their prescribed values.
    void apply_bcs(FieldState& state) const;

    /// Global residual; Dirichlet slots hold state - prescribed.
    [[nodiscard]] Eigen::VectorXd residual(const FieldState& state) const;

    /// Jacobian with identity Dirichlet rows; rhs = -residual (as returned by residual(state)).
    [[nodiscard]] SparseSystem linearize(const FieldState& state, const Eigen::VectorXd& residual, JacobianMode mode,
                                         double fd_step) const;

private:
    template <class Fn>
    void for_each_element(Fn&& fn) const;

    const Mesh* mesh_;
    ElementContext ctx_;
    BCSet bcs_;
    DofMap dofs_;
    int threads_;
    std::vector<ElementBasis> bases_;
    std::vector<std::vector<int>> element_dofs_;
    Eigen::SparseMatrix<double> pattern_;
    std::vector<std::vector<int>> slot_;         ///< value index of local entry (r, c) per element
    std::vector<std::vector<int>> bc_row_slots_; ///< value indices of each constrained row
    std::vector<int> bc_diag_slot_;
};

struct LinearSolveInfo {
    double relative_residual = 0.0;
    double rcond = 0.0;
};

/// Sparse LU with partial pivoting (UMFPACK).  Reuses the symbolic analysis while the pattern is unchanged.
class LinearSolver {
public:
    LinearSolver();
    ~LinearSolver();
    LinearSolver(const LinearSolver&) = delete;
    LinearSolver& operator=(const LinearSolver&) = delete;

    /// Throws LinearSolverError on a (numerically) singular matrix with a near-null-space summary.
    Eigen::VectorXd solve(const SparseSystem& sys, LinearSolveInfo* info = nullptr);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

Eigen::VectorXd linear_solve(const SparseSystem& sys, LinearSolveInfo* info = nullptr);

enum class NewtonStatus { Converged, Diverged, MaxIterations, LinearFailure, KernelFailure };

const char* to_string(NewtonStatus s);

struct NewtonResult {
    FieldState state;
    std::vector<double> trace;  ///< ||Res|| / sqrt(n_dof) before each update
    NewtonStatus status = NewtonStatus::MaxIterations;
    std::string message;

    [[nodiscard]] bool converged() const { return status == NewtonStatus::Converged; }
    [[nodiscard]] int iterations() const { return trace.empty() ? 0 : static_cast<int>(trace.size()) - 1; }
};

/// Plain Newton (no damping) from init with Dirichlet values imposed first.
NewtonResult newton_solve(const Assembler& assembler, const FieldState& init, const NewtonConfig& cfg);

struct ContinuationPlan {
    std::vector<double> lambdas;  ///< strictly increasing, starting at 0
    double min_step = 0.0;        ///< bisection resolution in lambda on failure; 0 disables bisection
    double resume_lambda = -1.0;  ///< when >= 0, init is a converged state at this lambda; earlier entries are skipped

    void validate() const;
};

struct ContinuationStep {
    double lambda = 0.0;
    NewtonResult result;
};

struct ContinuationResult {
    std::vector<ContinuationStep> steps;  ///< every attempt, in order
    double limiting_lambda = 0.0;         ///< last converged lambda
    bool completed = false;               ///< every planned lambda converged
    FieldState last_state;
};

/// Called after every converged step (checkpointing, output).
using StepCallback = std::function<void(double lambda, const NewtonResult&)>;

/// BCs that depend on lambda (inlet stresses) are rebuilt through bc_for when given.
using BcFactory = std::function<BCSet(const PhysicalParams&)>;

/**
 * Marches lambda through the plan, warm-starting each solve.  On failure the
 * step is halved down to plan.min_step; when that fails too the sweep stops
 * and the last converged lambda is reported.  A failure of the first solve is
 * thrown as std::runtime_error (configuration problem).
 */
ContinuationResult continuation_run(Assembler& assembler, const PhysicalParams& base, const ContinuationPlan& plan,
                                    const NewtonConfig& cfg, const FieldState& init, const BcFactory& bc_for = {},
                                    const StepCallback& on_step = {});

/// Lambda values for Weissenberg targets: step 0.1 up to Wi = 1, 0.25 beyond, scaled by wi_per_lambda.
ContinuationPlan weissenberg_plan(double wi_max, double wi_per_lambda);

struct Checkpoint {
    double lambda = 0.0;
    FieldState state;
    std::vector<std::pair<std::string, std::string>> meta;  ///< free-form key/value pairs (config echo)
};

void save_checkpoint(const Checkpoint& cp, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

/// Writes "iter,residual_norm" rows.
void write_trace_csv(const std::vector<double>& trace, const std::string& path, const std::string& comment = {});

}  // namespace logconf
