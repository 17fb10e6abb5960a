/**
 * @file formulation.hpp
 * @brief Element-level weak form of the log-conformation Oldroyd-B problem:
 *        Galerkin residual, strong residuals, stabilization parameters, the
 *        SUPG/GLS/ASGS additions, and Dirichlet data for the benchmarks.
 *
 * Unknowns per node are (u1, u2, p, chi11, chi12, chi22).  Every element
 * routine adds into a local vector of length 6 * n_nodes laid out node-major.
 */
#pragma once

#include "logconf/discretization.hpp"
#include "logconf/mesh.hpp"
#include "logconf/tensor.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace logconf {

inline constexpr int kDofsPerNode = 6;

enum Field : int { U1 = 0, U2 = 1, P = 2, CHI11 = 3, CHI12 = 4, CHI22 = 5 };

enum class Variant { Galerkin, SUPG, GLS, ASGS };

const char* to_string(Variant v);
std::optional<Variant> parse_variant(const std::string& s);

enum class Benchmark { Box, Cylinder, Contraction };

const char* to_string(Benchmark b);
std::optional<Benchmark> parse_benchmark(const std::string& s);

using BodyForce = std::function<Vec2(Vec2)>;

/// Global coefficient vector, 6 slots per master node.
using FieldState = Eigen::VectorXd;

/// Compact numbering of master nodes; periodic slaves share their master's slots.
struct DofMap {
    std::vector<int> node_index;  ///< mesh node -> compact node index
    int n_nodes = 0;              ///< number of compact (master) nodes

    static DofMap from_mesh(const Mesh& mesh);

    [[nodiscard]] int n_dofs() const { return kDofsPerNode * n_nodes; }
    [[nodiscard]] int dof(int mesh_node, int field) const { return kDofsPerNode * node_index[mesh_node] + field; }
};

/// Copies the element's dofs out of a global state.
void gather_local(const Mesh& mesh, const DofMap& dofs, const FieldState& state, int element,
                  std::span<double> local);

struct StabParams {
    double alpha_mom = 0.0;
    double alpha_con = 0.0;
    double alpha_const = 0.0;
};

struct StrongResiduals {
    Vec2 r_mom;
    double r_con = 0.0;
    SymTensor2 r_const;
};

/// Interpolated fields and gradients at one point.
struct PointState {
    Vec2 u;
    double p = 0.0;
    SymTensor2 chi;
    Mat2x2 grad_u;                     ///< a_ij = d u_i / d x_j
    Vec2 grad_p;
    std::array<SymTensor2, 2> grad_chi; ///< d chi / d x_j

    [[nodiscard]] SymTensor2 eps() const { return {grad_u.a11, 0.5 * (grad_u.a12 + grad_u.a21), grad_u.a22}; }
    /// Off-diagonal entry of the spin tensor, (d u1/d x2 - d u2/d x1) / 2.
    [[nodiscard]] double omega() const { return 0.5 * (grad_u.a12 - grad_u.a21); }
    [[nodiscard]] double div() const { return grad_u.a11 + grad_u.a22; }
};

PointState interpolate(const ElementBasis& basis, std::span<const double> local, int qp);

StabParams stab_params(const PhysicalParams& p, const MetricTensor& g, Vec2 u, const SymTensor2& chi,
                       const SymTensor2& eps, double omega, Variant variant);

/// Stabilization parameters at every quadrature point of the element.
std::vector<StabParams> element_stab_params(const PhysicalParams& p, const ElementBasis& basis,
                                            std::span<const double> local, Variant variant);

StrongResiduals strong_residuals(const PhysicalParams& p, const ElementBasis& basis, std::span<const double> local,
                                 int qp, const BodyForce& body = {});

/// Adds the Galerkin form minus the load (b, v).
void galerkin_element_residual(const PhysicalParams& p, const ElementBasis& basis, std::span<const double> local,
                               const BodyForce& body, std::span<double> out);

/// Adds the SUPG or GLS stabilization terms with one StabParams per quadrature point.
void supg_gls_element_terms(Variant variant, const PhysicalParams& p, const ElementBasis& basis,
                            std::span<const double> local, std::span<const StabParams> stab, const BodyForce& body,
                            std::span<double> out);

/// Adds the algebraic sub-grid scale terms.
void asgs_element_terms(const PhysicalParams& p, const ElementBasis& basis, std::span<const double> local,
                        std::span<const StabParams> stab, const BodyForce& body, std::span<double> out);

struct ElementContext {
    PhysicalParams params;
    Variant variant = Variant::Galerkin;
    BodyForce body;
};

/// Full stabilized element residual (overwrites out).
void element_residual(const ElementContext& ctx, const ElementBasis& basis, std::span<const double> local,
                      std::span<double> out);

/// Stabilization parameters and advective velocity held at a linearization state.
struct FrozenCoefficients {
    std::vector<StabParams> stab;
    std::vector<Vec2> u_adv;
};

FrozenCoefficients freeze(const ElementContext& ctx, const ElementBasis& basis, std::span<const double> local);

/// Element residual with alpha and the advective velocity taken from frozen (overwrites out).
void element_residual_frozen(const ElementContext& ctx, const ElementBasis& basis, std::span<const double> local,
                             const FrozenCoefficients& frozen, std::span<double> out);

/// Analytic Jacobian of element_residual_frozen, row-major (n x n, n = 6 * nodes).  Galerkin and SUPG only.
void frozen_element_jacobian(const ElementContext& ctx, const ElementBasis& basis, std::span<const double> local,
                             const FrozenCoefficients& frozen, std::span<double> jac);

/// Benchmark inflow geometry: mean velocity and half-height of the inlet channel.
struct InletSpec {
    double mean_velocity = 2.0;
    double half_height = 2.0;
};

/// Inlet data for the cylinder (u_bar = 2, H = 2) or contraction (u_bar_2 = 1, H_2 = 1) defaults.
InletSpec default_inlet(Benchmark b);

struct InletState {
    Vec2 u;
    SymTensor2 chi;
};

/// Fully developed Oldroyd-B channel profiles; y measured from the symmetry line.
InletState inlet_profiles(Benchmark b, const PhysicalParams& p, double y);
InletState inlet_profiles(Benchmark b, const PhysicalParams& p, double y, const InletSpec& spec);

struct Constraint {
    int dof = 0;
    double value = 0.0;
};

struct BCSet {
    std::vector<Constraint> constraints;  ///< sorted by dof, each dof once

    [[nodiscard]] int size() const { return static_cast<int>(constraints.size()); }
};

class BoundaryConditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dirichlet data from boundary tags; corner conflicts resolved by Wall > Inflow > Symmetry > Outflow.
BCSet build_bcs(Benchmark b, const Mesh& mesh, const DofMap& dofs, const PhysicalParams& p);
BCSet build_bcs(Benchmark b, const Mesh& mesh, const DofMap& dofs, const PhysicalParams& p, const InletSpec& spec);

/// Body force of the four-roll box, 2 (sin x cos y, -cos x sin y).
Vec2 four_roll_force(Vec2 x);

}  // namespace logconf
