/**
 * @file runner.hpp
 * @brief The `solve`, `verify` and `postprocess` commands: continuation
 *        sweeps with per-step checkpoints and traces, benchmark CSV output,
 *        and exit-status mapping.
 */
#pragma once

#include "logconf/config.hpp"
#include "logconf/postprocess.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace logconf {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,       ///< malformed config, unknown suite or quantity, unreadable input
    kExitBreakdown = 2,    ///< continuation stopped before the last planned Wi
    kExitCheckFailed = 3,  ///< a verify property failed
};

struct RunOptions {
    std::string output;  ///< overrides the config's output directory when not empty
    int threads = 0;     ///< overrides the config when > 0
    bool resume = false; ///< continue from the last matching checkpoint in the output directory
};

int run_solve(const std::string& config_path, const RunOptions& opt, std::ostream& log);
int run_verify(const std::string& suite, const RunOptions& opt, std::ostream& log);
/// what: drag, wake (cylinder); vortex, maxima, slopes, centerline, corner (contraction); centre (box).
int run_postprocess(const std::string& checkpoint, const std::string& what, const RunOptions& opt, std::ostream& log);

/// Contraction maxima along the centerline y = 0.
struct CenterlineMaxima {
    double s11 = 0.0;         ///< max sigma11
    double s11_scaled = 0.0;  ///< max sigma11 / (3 eta_T u_bar_2 / H_2), the downstream wall shear stress unit
    double u1 = 0.0;          ///< max u1
};
CenterlineMaxima contraction_maxima(const Mesh& mesh, const PhysicalParams& p, const FieldState& state);

/// Sampling curves used for the profile CSVs; contraction lines span the mesh in x.
std::vector<CurvePoint> contraction_centerline(const Mesh& mesh, int n = 4001);
/// y = -H_2 from the re-entrant corner to the outlet.
std::vector<CurvePoint> contraction_corner_line(const Mesh& mesh, int n = 2001);
std::vector<CurvePoint> cylinder_wake(int n_arc = 181, int n_wake = 281);

}  // namespace logconf
