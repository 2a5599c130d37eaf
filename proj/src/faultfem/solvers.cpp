#include "faultfem/solvers.hpp"

#include <chrono>
#include <stdexcept>

#include <Eigen/SparseCholesky>

#include "faultfem/quadrature.hpp"

namespace ffem {

Eigen::VectorXd solve_spd(const ReducedSystem& red, double tol,
                          SolveReport* report) {
    const auto t0 = std::chrono::steady_clock::now();
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
    llt.compute(red.K);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("solve_spd: factorization breakdown (matrix not SPD)");
    Eigen::VectorXd x = llt.solve(red.F);
    const double fn = red.F.norm();
    const double res = fn > 0.0 ? (red.K * x - red.F).norm() / fn : 0.0;
    const auto t1 = std::chrono::steady_clock::now();
    if (report) {
        report->n_free = static_cast<int>(red.K.rows());
        report->iterations = 1;
        report->rel_residual = res;
        report->seconds = std::chrono::duration<double>(t1 - t0).count();
    }
    if (res > tol)
        throw std::runtime_error("solve_spd: residual above tolerance");
    return x;
}

namespace {

StationaryResult finish_solve(StructuredMesh mesh, DofMap dofs,
                              const SparseSystem& sys, const BodyForce* dirich,
                              double tol) {
    const Eigen::VectorXd bc = dirichlet_values(mesh, dofs, dirich);
    ReducedSystem red = apply_dirichlet(sys, dofs.dirichlet, bc);
    StationaryResult res;
    Eigen::VectorXd xf = solve_spd(red, tol, &res.report);
    res.z = red.expand(xf);
    res.mesh = std::move(mesh);
    res.dofs = std::move(dofs);
    return res;
}

} // namespace

StationaryResult solve_limit_uncoupled(int n, const Material& mat,
                                       const LineFunc& gamma_given,
                                       const BodyForce& f,
                                       const BodyForce* dirich,
                                       const BodyForce* side_traction,
                                       double tol) {
    StructuredMesh mesh = build_mesh(n, FaultGeometry{0.0});
    DofMap dofs = build_dof_map(mesh, false);
    SparseSystem sys(dofs.ndof);
    assemble_bulk_elasticity(mesh, dofs, mat, false, sys);
    assemble_interface_coupling(mesh, dofs, mat, &gamma_given, sys);
    assemble_load(mesh, dofs, mat, &f, nullptr, sys);
    if (side_traction) assemble_side_tractions(mesh, dofs, *side_traction, sys);
    return finish_solve(std::move(mesh), std::move(dofs), sys, dirich, tol);
}

StationaryResult solve_limit_coupled(int n, const Material& mat,
                                     const BodyForce& f, const LineFunc& f0,
                                     const BodyForce* dirich,
                                     const BodyForce* side_traction,
                                     double tol) {
    StructuredMesh mesh = build_mesh(n, FaultGeometry{0.0});
    DofMap dofs = build_dof_map(mesh, true);
    SparseSystem sys(dofs.ndof);
    assemble_bulk_elasticity(mesh, dofs, mat, false, sys);
    assemble_interface_coupling(mesh, dofs, mat, nullptr, sys);
    assemble_load(mesh, dofs, mat, &f, &f0, sys);
    if (side_traction) assemble_side_tractions(mesh, dofs, *side_traction, sys);
    return finish_solve(std::move(mesh), std::move(dofs), sys, dirich, tol);
}

StationaryResult solve_eps_stationary(int n, double eps, const Material& mat,
                                      const BodyForce& f, const LineFunc* f0,
                                      bool coupled, const LineFunc* gamma_given,
                                      const BodyForce* dirich,
                                      const BodyForce* side_traction,
                                      double tol) {
    if (eps <= 0.0)
        throw std::invalid_argument("solve_eps_stationary: eps must be positive");
    if (!coupled && !gamma_given)
        throw std::invalid_argument("solve_eps_stationary: uncoupled needs gamma data");
    StructuredMesh mesh = build_mesh(n, FaultGeometry{eps});
    DofMap dofs = build_dof_map(mesh, coupled);
    SparseSystem sys(dofs.ndof);
    assemble_bulk_elasticity(mesh, dofs, mat, true, sys);
    assemble_eps_fault_coupling(mesh, dofs, mat, coupled ? nullptr : gamma_given, sys);
    assemble_load(mesh, dofs, mat, &f, coupled ? f0 : nullptr, sys);
    if (side_traction) assemble_side_tractions(mesh, dofs, *side_traction, sys);
    return finish_solve(std::move(mesh), std::move(dofs), sys, dirich, tol);
}

double energy_of(const StructuredMesh& mesh, const DofMap& dofs,
                 const Material& mat, const Eigen::VectorXd& z,
                 const LineFunc* gamma_given) {
    const GaussRule g = gauss_rule(3);
    const double eps = mesh.eps;
    const double seps = std::sqrt(eps > 0.0 ? eps : 1.0);

    auto gamma_at = [&](double x) -> double {
        if (dofs.with_gamma) return eval_gamma(mesh, dofs, z, x);
        if (gamma_given) return (*gamma_given)(x);
        return 0.0;
    };
    auto gamma_x_at = [&](double x) -> double {
        if (dofs.with_gamma) {
            const double h = 1e-6;
            const double xm = std::max(-1.0 + h, x - h);
            const double xp = std::min(1.0 - h, x + h);
            return (eval_gamma(mesh, dofs, z, xp) - eval_gamma(mesh, dofs, z, xm)) /
                   (xp - xm);
        }
        if (gamma_given) {
            const double h = 1e-6;
            return ((*gamma_given)(x + h) - (*gamma_given)(x - h)) / (2.0 * h);
        }
        return 0.0;
    };

    double E = 0.0;
    for (int ey = 0; ey < mesh.nrows(); ++ey) {
        const auto& row = mesh.rows[ey];
        const bool below = 0.5 * (row.y0 + row.y1) < 0.0;
        const bool fault = row.tag == Region::Fault;
        for (int ex = 0; ex < mesh.ncols(); ++ex) {
            const double x0 = mesh.xs[2 * ex], x1 = mesh.xs[2 * ex + 2];
            for (size_t qa = 0; qa < g.pts.size(); ++qa) {
                for (size_t qb = 0; qb < g.pts.size(); ++qb) {
                    double N[9], dNx[9], dNy[9];
                    q2_shape(g.pts[qa], g.pts[qb], N, dNx, dNy);
                    const double jx = 2.0 / (x1 - x0);
                    const double jy = 2.0 / (row.y1 - row.y0);
                    const double jac = (x1 - x0) * (row.y1 - row.y0) / 4.0 *
                                       g.wts[qa] * g.wts[qb];
                    const double x = 0.5 * (x0 + x1) + 0.5 * g.pts[qa] * (x1 - x0);
                    double u1x = 0, u1y = 0, u2x = 0, u2y = 0;
                    for (int j = 0; j < 3; ++j)
                        for (int i = 0; i < 3; ++i) {
                            const int k = 3 * j + i;
                            const double z1 = z[dofs.u1(2 * ex + i, 2 * ey + j, below)];
                            const double z2 = z[dofs.u2(2 * ex + i, 2 * ey + j)];
                            u1x += dNx[k] * jx * z1;
                            u1y += dNy[k] * jy * z1;
                            u2x += dNx[k] * jx * z2;
                            u2y += dNy[k] * jy * z2;
                        }
                    std::array<std::array<double, 2>, 2> A;
                    if (fault) {
                        const double gv = gamma_at(x);
                        A = {{{u1x, seps * u1y - gv / seps},
                              {seps * u2x, u2y}}};
                    } else {
                        A = {{{u1x, u1y}, {u2x, u2y}}};
                    }
                    E += jac * strain_energy_density(A, mat.mu, mat.lambda);
                }
            }
        }
    }

    // 1D slip terms along (-1,1): interface coupling for the sharp mesh and
    // the collapsed 1/eps slip form for the strip mesh.
    for (int ex = 0; ex < mesh.ncols(); ++ex) {
        const double x0 = mesh.xs[2 * ex], x1 = mesh.xs[2 * ex + 2];
        for (size_t q = 0; q < g.pts.size(); ++q) {
            const double x = 0.5 * (x0 + x1) + 0.5 * g.pts[q] * (x1 - x0);
            const double jac = 0.5 * (x1 - x0) * g.wts[q];
            const double gv = gamma_at(x);
            const double gx = mat.nu != 0.0 ? gamma_x_at(x) : 0.0;
            if (mesh.sharp()) {
                double N1[3], dN1[3];
                shape1d(g.pts[q], N1, dN1);
                double up = 0, um = 0;
                for (int i = 0; i < 3; ++i) {
                    up += N1[i] * z[dofs.u1(2 * ex + i, dofs.interface_node_row, false)];
                    um += N1[i] * z[dofs.u1(2 * ex + i, dofs.interface_node_row, true)];
                }
                const double jmp = up - um;
                E += jac * 0.5 * mat.mu * (jmp - gv) * (jmp - gv);
            }
            E += jac * 0.5 * (mat.eta_hat * gv * gv + mat.nu * gx * gx);
        }
    }
    return E;
}

} // namespace ffem
