#pragma once

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "faultfem/geometry.hpp"
#include "faultfem/material.hpp"

namespace ffem {

// Side hint: +1 above the fault, -1 below; relevant when a callable is
// two-valued on y=0.
using BodyForce = std::function<std::array<double, 2>(double x, double y, int side)>;
using LineFunc = std::function<double(double x)>;

// Quadratic strain-energy density
//   W(A) = mu (A11^2 + A22^2) + (lambda/2)(A11+A22)^2 + (mu/2)(A12+A21)^2.
double strain_energy_density(const std::array<std::array<double, 2>, 2>& A,
                             double mu, double lambda);

// Triplet-based symmetric sparse accumulator with right-hand side.
struct SparseSystem {
    int ndof = 0;
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd rhs;

    explicit SparseSystem(int n) : ndof(n), rhs(Eigen::VectorXd::Zero(n)) {}
    void add(int i, int j, double v) { trips.emplace_back(i, j, v); }
    void add_rhs(int i, double v) { rhs[i] += v; }
    Eigen::SparseMatrix<double> matrix() const;
};

// Bulk elastic stiffness of int W(grad u).  Over Fault elements, if masked,
// the off-diagonal shear entries are scaled: the energy uses the entries
// (u1_x, s*u1_y; s*u2_x, u2_y) with s^2 = fault_shear_scale.  Passing a
// negative fault_shear_scale uses the mesh's eps (the model scaling); the
// value 1.0 reproduces the unmasked operator on fault blocks (test switch).
void assemble_bulk_elasticity(const StructuredMesh& mesh, const DofMap& dofs,
                              const Material& mat, bool masked,
                              SparseSystem& sys, double fault_shear_scale = -1.0);

// Sharp-interface terms along S0: jump blocks int mu [u1][v1]; when gamma
// DOFs are present also the -mu gamma [v1] coupling, the mu gamma^2 block and
// the slip form l(g,g^) = nu g_x g^_x + eta_hat g g^.  With gamma_given the
// slip is data: its coupling moves to the right-hand side.
void assemble_interface_coupling(const StructuredMesh& mesh, const DofMap& dofs,
                                 const Material& mat, const LineFunc* gamma_given,
                                 SparseSystem& sys);

// Strip-fault gamma terms for eps > 0 meshes: the -mu gamma (u1_y + u2_x)
// coupling over S_eps (slip depends on x only) plus the 1/eps-scaled slip
// forms, which collapse to 1D integrals in x.  With gamma_given the coupling
// is a load.
void assemble_eps_fault_coupling(const StructuredMesh& mesh, const DofMap& dofs,
                                 const Material& mat, const LineFunc* gamma_given,
                                 SparseSystem& sys);

// Body force int rho f . v (3x3 rule) and slip source int f0 g^ (3-point 1D).
void assemble_load(const StructuredMesh& mesh, const DofMap& dofs,
                   const Material& mat, const BodyForce* f, const LineFunc* f0,
                   SparseSystem& sys);

// Neumann data on the sides x = +-1: int t . v over each side.
// t receives (sx, y, side) with sx = +-1.
void assemble_side_tractions(const StructuredMesh& mesh, const DofMap& dofs,
                             const BodyForce& traction, SparseSystem& sys);

// Displacement mass int rho u . v (u DOFs only).
void assemble_mass(const StructuredMesh& mesh, const DofMap& dofs,
                   const Material& mat, SparseSystem& sys);

// coef * int_(-1,1) g g^ dx over the slip DOFs.
void assemble_gamma_mass(const StructuredMesh& mesh, const DofMap& dofs,
                         double coef, SparseSystem& sys);

// Constrained system after symmetric elimination of Dirichlet DOFs.
struct ReducedSystem {
    Eigen::SparseMatrix<double> K;
    Eigen::VectorXd F;
    std::vector<int> free2global;
    Eigen::VectorXd bc_values; // full-length, fixed entries filled

    Eigen::VectorXd expand(const Eigen::VectorXd& xfree) const;
    Eigen::VectorXd restrict_to_free(const Eigen::VectorXd& full) const;
};

// values: full-length vector of Dirichlet values (ignored on free DOFs).
ReducedSystem apply_dirichlet(const SparseSystem& sys,
                              const std::vector<char>& constrained,
                              const Eigen::VectorXd& values);

// Nodal Dirichlet values at y=+-1 from a displacement callable (zero if null).
Eigen::VectorXd dirichlet_values(const StructuredMesh& mesh, const DofMap& dofs,
                                 const BodyForce* u_bc);

// Evaluate the FE displacement (and optionally its gradient) at a point.
// side disambiguates y=0 on sharp meshes.
std::array<double, 2> eval_displacement(const StructuredMesh& mesh,
                                        const DofMap& dofs,
                                        const Eigen::VectorXd& z, double x,
                                        double y, int side);

// Evaluate the FE slip field at x in (-1,1).
double eval_gamma(const StructuredMesh& mesh, const DofMap& dofs,
                  const Eigen::VectorXd& z, double x);

} // namespace ffem
