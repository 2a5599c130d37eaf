#pragma once

#include <array>

#include "faultfem/fem_core.hpp"
#include "faultfem/material.hpp"

namespace ffem {

using Grad2 = std::array<std::array<double, 2>, 2>;

// Parameters of the closed-form solution used for the convergence studies.
struct ManufacturedParams {
    double a = 0.5;
    double ell = 0.25;
    Material mat{}; // mu=1, lambda=2, eta_hat=2, nu=0
    double kappa() const { return mat.lambda / (2.0 * mat.mu + mat.lambda); }
};

// Piecewise-smooth exact displacement with jump [u1] = e^{a x} across y=0.
std::array<double, 2> exact_u0(double x, double y, int side);
Grad2 exact_grad_u0(double x, double y, int side);

// Exact slip gamma(x) = e^{a x} - 2 ell^2 cos(ell x).
double exact_gamma0(double x);
double exact_gamma0_x(double x);

// Stress C(A) for the isotropic law.
Grad2 stress_of(const Grad2& A, double mu, double lambda);

// Manufactured right-hand sides: f = -div(C(grad u0)) and
// f0 = eta_hat*gamma - C(grad u0)_12 - nu*gamma_xx.
std::array<double, 2> manufactured_f(double x, double y, int side);
double manufactured_f0(double x);

// Traction C(grad u0) n on the side x = sx (n = (sx, 0)).
std::array<double, 2> manufactured_side_traction(double sx, double y, int side);

// Edge-dislocation solution: [u1] = 1 on x<0, 0 on x>0 across y=0.
std::array<double, 2> dislocation_u(double x, double y, int side);
Grad2 dislocation_grad(double x, double y, int side);

// Slip source for the dislocation run, f0 = eta_hat*[u1] - T12(x,0).
double dislocation_f0(double x);
std::array<double, 2> dislocation_side_traction(double sx, double y, int side);

struct ErrorReport {
    double l2_u = 0.0;    // L2(Omega) displacement error
    double h1_u = 0.0;    // full broken H1 norm over the bulk region
    double l2_gamma = 0.0; // L2(-1,1) slip error (0 if no slip data)
    int ndofs = 0;        // free DOFs
    double h = 0.0;       // element width label 1/(2n)
};

// Exact-solution handles for error evaluation.
struct ExactSolution {
    std::function<std::array<double, 2>(double, double, int)> u;
    std::function<Grad2(double, double, int)> grad;
    std::function<double(double)> gamma; // may be null
};

ExactSolution manufactured_exact();
ExactSolution dislocation_exact();

// 5x5-point element quadrature of the error norms; fault elements are
// excluded from the H1 (gradient) norm on strip meshes.
ErrorReport error_norms(const StructuredMesh& mesh, const DofMap& dofs,
                        const Eigen::VectorXd& z, const ExactSolution& exact);

// L2(-1,1) norm of the discrete slip (used where the exact slip is not
// square-integrable).
double gamma_field_norm(const StructuredMesh& mesh, const DofMap& dofs,
                        const Eigen::VectorXd& z);

} // namespace ffem
