/**
 * @file config.hpp
 * @brief Run configuration: flat `key = value` files, validation, a stable
 *        hash of the effective settings, and the benchmark setup (mesh,
 *        parameters, Dirichlet data, continuation plan) derived from them.
 */
#pragma once

#include "logconf/solver.hpp"

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace logconf {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    Benchmark benchmark = Benchmark::Cylinder;
    Variant variant = Variant::ASGS;
    PhysicalParams params;        ///< lambda is driven by the continuation and stays 0 here
    double wi_max = 0.0;
    double wi_step = 0.0;         ///< 0: steps of 0.1 up to Wi = 1, then 0.25
    double wi_min_step = 0.01;    ///< bisection resolution in Wi
    std::string mesh_file;        ///< cylinder/contraction; empty uses the generator
    int refinement = 0;           ///< cylinder generator level
    std::vector<int> box_sizes{16, 32, 64};
    GradingSpec grading;          ///< contraction generator
    NewtonConfig newton;
    int threads = 1;
    std::string output = "out";

    /// Effective settings, one `key = value` per line in a fixed order (threads and output excluded).
    [[nodiscard]] std::string canonical() const;
    /// FNV-1a of canonical(), as 16 hex digits.
    [[nodiscard]] std::string hash() const;
};

/// Parses and validates; `base_dir` resolves a relative mesh_file.  Throws ConfigError.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

std::uint64_t fnv1a(const std::string& s);

/// Wi per unit lambda: box L F_s / (pi beta eta_T) with L = pi, F_s = 1; cylinder u_bar / R; contraction u_bar_2 / H_2.
double wi_per_lambda(const RunConfig& cfg);

/// Continuation plan in lambda for cfg.wi_max.
ContinuationPlan make_plan(const RunConfig& cfg);

/// Cylinder or contraction mesh (file or generator).  Throws ConfigError for the box.
Mesh make_mesh(const RunConfig& cfg);
/// Periodic box [-pi, pi]^2 with n elements per side.
Mesh make_box_mesh(int n);

/// Mesh, dofs and the assembler for one benchmark mesh at lambda = 0.
struct Problem {
    Benchmark bench = Benchmark::Box;
    Mesh mesh;
    DofMap dofs;
    PhysicalParams params;
    std::unique_ptr<Assembler> assembler;

    [[nodiscard]] BcFactory bc_factory() const;
};

/// Builds the problem; BC or mesh inconsistencies are reported as ConfigError.
std::unique_ptr<Problem> make_problem(const RunConfig& cfg, Mesh mesh);

}  // namespace logconf
