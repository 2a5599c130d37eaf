#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "faultfem/evolution.hpp"
#include "faultfem/manufactured.hpp"
#include "faultfem/solvers.hpp"

namespace ffem {

// Refinement labels L = Lmin, 2Lmin, ..., Lmax denote element width h = 1/L;
// the mesh builder's refinement index is n = L/2.

struct ConvergeRow {
    double h = 0.0;
    double l2_u = 0.0;
    double h1_u = 0.0;
    double l2_gamma = 0.0; // slip error, or slip norm for the dislocation run
    int ndofs = 0;
    bool has_rates = false;
    double rate_l2 = 0.0;
    double rate_h1 = 0.0;
    double rate_gamma = 0.0;
};

struct ConvergeTable {
    std::string problem;
    std::vector<ConvergeRow> rows;
    bool has_gamma = false;
    bool has_norms = false;
    double norm_l2 = 0.0;
    double norm_h1 = 0.0;
    double norm_gamma = 0.0;
};

// problem: limit-uncoupled | limit-coupled | eps-uncoupled | eps-coupled |
// dislocation.  eps is used by the eps-* problems.
ConvergeTable run_convergence(const std::string& problem, int label_min,
                              int label_max, double eps, double tol);

void write_convergence_csv(const ConvergeTable& t, std::ostream& out);

// Single solve with grid + interface dumps.
struct SolveDump {
    StationaryResult result;
};
SolveDump run_solve(const std::string& problem, int label, double eps, double tol);
void write_grid_csv(const StationaryResult& r, std::ostream& out);
void write_interface_csv(const StationaryResult& r, std::ostream& out);

// Evolution driver with a fixed smooth forcing and zero initial data.
EvolveResult run_evolve_problem(const std::string& problem, int label, double eps,
                                double dt, double tfinal);
void write_trajectory_csv(const EvolveResult& r, std::ostream& out);

// Verification suites; each writes an audit CSV and returns overall pass.
bool verify_suite(const std::string& suite, unsigned seed, std::ostream& out);

// Reference error values used by the verification harness (uncoupled /
// coupled manufactured runs and the dislocation study) at labels 8..256.
struct ReferenceTables {
    static const std::vector<double>& uncoupled_l2();
    static const std::vector<double>& uncoupled_h1();
    static const std::vector<double>& coupled_l2();
    static const std::vector<double>& coupled_h1();
    static const std::vector<double>& coupled_gamma();
    static const std::vector<double>& dislocation_l2();
    static const std::vector<double>& dislocation_gamma_norm();
};

} // namespace ffem
