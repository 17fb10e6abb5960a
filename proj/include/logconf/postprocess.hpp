/**
 * @file postprocess.hpp
 * @brief Benchmark quantities from a converged state: cylinder drag, line
 *        profiles, contraction vortex sizes, Richardson extrapolation and
 *        near-corner power-law fits, plus their CSV output.
 */
#pragma once

#include "logconf/formulation.hpp"

#include <optional>
#include <string>
#include <vector>

namespace logconf {

/// Field values at a physical point inside element `element`.
PointState evaluate_at(const Mesh& mesh, const DofMap& dofs, const FieldState& state, int element, Vec2 x);

/// Element containing x, or nullopt.  Linear scan with a bounding-box filter.
class PointLocator {
public:
    explicit PointLocator(const Mesh& mesh);
    [[nodiscard]] std::optional<int> find(Vec2 x) const;

private:
    const Mesh* mesh_;
    std::vector<std::array<double, 4>> boxes_;  ///< xmin, xmax, ymin, ymax
};

/**
 * K = -(2 / (eta_T u_bar)) * integral over the Cylinder edges of e_x . T . n,
 * with n the outward normal of the fluid domain and T = -p I + 2 eta_s eps(u) + sigma(chi).
 * Traction is taken one-sided from the element owning each edge.
 */
double drag_coefficient(const Mesh& mesh, const PhysicalParams& p, const FieldState& state, double mean_velocity = 2.0);

struct CurvePoint {
    double s = 0.0;  ///< curve parameter
    Vec2 x;
};

/// n points from a to b (endpoints included), parameter s0 + distance from a.
std::vector<CurvePoint> segment_curve(Vec2 a, Vec2 b, int n, double s0 = 0.0);

/// Upper half of the cylinder from (-R, 0) (s = 0) to (R, 0) (s = pi R), then the wake line y = 0 up to x_end.
std::vector<CurvePoint> cylinder_wake_curve(double radius, double x_end, int n_arc, int n_wake);

struct LineSample {
    double s = 0.0;
    Vec2 x;
    bool found = false;  ///< false marks a gap (point outside the mesh)
    Vec2 u;
    double p = 0.0;
    SymTensor2 chi;
    SymTensor2 sigma;
};

struct LineProfile {
    std::vector<LineSample> samples;
};

LineProfile sample_line(const Mesh& mesh, const PhysicalParams& p, const FieldState& state,
                        const std::vector<CurvePoint>& curve);

struct ContractionGeometry {
    double h2 = 1.0;     ///< downstream half-height; re-entrant corner at (0, -h2)
    double ratio = 4.0;  ///< upstream half-height / h2
};

struct VortexReport {
    double x_r = 0.0;            ///< corner vortex: upstream distance of the reattachment point from x = 0
    double x_l = 0.0;            ///< lip vortex: distance of its reattachment point from the re-entrant corner
    bool corner_found = false;   ///< a sign change exists on the upstream wall
    bool lip_found = false;      ///< a separate lip vortex touches the re-entrant corner
    std::optional<Vec2> corner_reattachment;
    std::optional<Vec2> lip_reattachment;
};

struct WallSample {
    Vec2 x;
    double omega = 0.0;  ///< d u2 / d x1 - d u1 / d x2
};

/// Wall vorticity at the midpoints of the upstream wall (ordered upstream to corner) and the
/// contraction-plane wall (ordered from the re-entrant corner downward).
std::pair<std::vector<WallSample>, std::vector<WallSample>> contraction_wall_vorticity(const Mesh& mesh,
                                                                                       const FieldState& state,
                                                                                       const ContractionGeometry& g);

/**
 * Vortex sizes of the half contraction (flow in +x, symmetry line y = 0, walls below).  On both walls
 * the main flow gives omega < 0 and recirculation omega > 0.  X_R is the first sign change met when
 * walking from far upstream toward the corner; X_L the first sign change below the re-entrant corner
 * when omega > 0 there, and 0 otherwise.
 */
VortexReport vortex_sizes(const Mesh& mesh, const FieldState& state, const ContractionGeometry& g);

struct BoxCentre {
    double chi11 = 0.0;
    double eps0 = 0.0;  ///< d u1 / d x1
};

/// Values at the origin of the periodic box; the gradient is averaged over the elements sharing the point.
BoxCentre box_centre_values(const Mesh& mesh, const FieldState& state);

struct IdentityDefect {
    double max_defect = 0.0;  ///< max over quadrature points of |chi_h - 2 eta_p eps(u_h)|_F
    double max_scale = 0.0;   ///< max over quadrature points of |2 eta_p eps(u_h)|_F
};

/// Newtonian identity chi = 2 eta_p eps(u) checked at the quadrature points of every element.
IdentityDefect newtonian_identity_defect(const Mesh& mesh, const PhysicalParams& p, const FieldState& state);

struct EocResult {
    double order = 0.0;
    double extrapolated = 0.0;
    bool degenerate = false;  ///< zero denominator, non-positive ratio or non-finite input
};

/// Order and Richardson value from q(h), q(2h), q(4h).
EocResult richardson_eoc(double q_h, double q_2h, double q_4h);

/// Least-squares slope of log y against log x over points with x in [x_lo, x_hi] and x, y > 0.
std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y, double x_lo,
                                   double x_hi);

struct SlopeReport {
    std::vector<double> r;
    std::vector<double> s11, s12, s22, u1, u2;  ///< magnitudes along x = 0
    std::optional<double> slope_s11, slope_s12, slope_s22, slope_u1, slope_u2;
};

/// |sigma_ij| and |u_i| at geometrically spaced r above the re-entrant corner along x = 0, fitted over [r_lo, r_hi].
SlopeReport asymptotic_slopes(const Mesh& mesh, const PhysicalParams& p, const FieldState& state,
                              const ContractionGeometry& g, double r_lo = 0.05, double r_hi = 0.5, int n = 41);

/// Writes "# comment", the header, then rows with %.17g values.
void write_csv(const std::string& path, const std::string& comment, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// s, u1, u2, p, s11, s12, s22; gaps are written as nan.
void write_profile_csv(const std::string& path, const std::string& comment, const LineProfile& profile);

}  // namespace logconf
