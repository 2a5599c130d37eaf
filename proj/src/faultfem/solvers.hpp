#pragma once

#include <optional>

#include "faultfem/fem_core.hpp"

namespace ffem {

struct SolveReport {
    int n_free = 0;
    int iterations = 0;
    double rel_residual = 0.0;
    double seconds = 0.0;
};

// Sparse SPD solve (Cholesky).  Throws std::runtime_error on factorization
// breakdown (matrix not SPD) or if the relative residual exceeds tol.
Eigen::VectorXd solve_spd(const ReducedSystem& red, double tol,
                          SolveReport* report = nullptr);

// A stationary solution: the mesh, its DOF map and the full coefficient
// vector (Dirichlet values filled in), plus the solve report.
struct StationaryResult {
    StructuredMesh mesh;
    DofMap dofs;
    Eigen::VectorXd z;
    SolveReport report;
};

// Sharp-interface problem with the slip given as data.
StationaryResult solve_limit_uncoupled(int n, const Material& mat,
                                       const LineFunc& gamma_given,
                                       const BodyForce& f,
                                       const BodyForce* dirich = nullptr,
                                       const BodyForce* side_traction = nullptr,
                                       double tol = 1e-12);

// Sharp-interface problem with the slip as an unknown (monolithic solve).
StationaryResult solve_limit_coupled(int n, const Material& mat,
                                     const BodyForce& f, const LineFunc& f0,
                                     const BodyForce* dirich = nullptr,
                                     const BodyForce* side_traction = nullptr,
                                     double tol = 1e-12);

// Strip-fault problem at eps > 0; coupled solves the slip monolithically,
// uncoupled takes gamma_given as data.
StationaryResult solve_eps_stationary(int n, double eps, const Material& mat,
                                      const BodyForce& f, const LineFunc* f0,
                                      bool coupled,
                                      const LineFunc* gamma_given = nullptr,
                                      const BodyForce* dirich = nullptr,
                                      const BodyForce* side_traction = nullptr,
                                      double tol = 1e-12);

// Direct quadrature of the quadratic energy of the discrete state z:
// bulk strain energy (masked on fault elements for eps > 0), the interface
// or strip slip-coupling terms, and the slip form.  If the DOF map has no
// slip DOFs, gamma_given supplies the slip data (null means zero slip).
double energy_of(const StructuredMesh& mesh, const DofMap& dofs,
                 const Material& mat, const Eigen::VectorXd& z,
                 const LineFunc* gamma_given = nullptr);

} // namespace ffem
