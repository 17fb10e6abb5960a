/**
 * @file verify.hpp
 * @brief Self-check suites run by `logconf verify`: kernel identities,
 *        element Jacobian order, and the Newtonian limit.
 */
#pragma once

#include <optional>
#include <string>
#include <vector>

namespace logconf {

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double bound = 0.0;
    std::string relation = "<";  ///< how measured compares to bound for a pass
    std::string detail;          ///< what `measured` is
};

/// Constitutive equivalence over n_equivalence draws; dfn_f and dfn_kappa against central differences.
std::vector<CheckResult> verify_kernels(int n_equivalence = 10000, int n_derivative = 1000);
/// Taylor order of the FD element Jacobian under step halving, every variant and element kind.
std::vector<CheckResult> verify_jacobian();
/// lambda = 0 on the periodic box: Newton convergence in two steps and second-order convergence to the Stokes solution.
std::vector<CheckResult> verify_newtonian(int threads = 1);

/// Suites by name ("kernels", "jacobian", "newtonian"); nullopt for an unknown name.
std::optional<std::vector<CheckResult>> run_suite(const std::string& name, int threads = 1);

/// "PASS name  measured <relation> bound  (detail)" on one line.
std::string format_check(const CheckResult& c);

}  // namespace logconf
