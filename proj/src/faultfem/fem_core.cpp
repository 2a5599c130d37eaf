#include "faultfem/fem_core.hpp"

#include <cmath>
#include <stdexcept>

#include "faultfem/quadrature.hpp"

namespace ffem {

double strain_energy_density(const std::array<std::array<double, 2>, 2>& A,
                             double mu, double lambda) {
    const double tr = A[0][0] + A[1][1];
    const double sh = A[0][1] + A[1][0];
    return mu * (A[0][0] * A[0][0] + A[1][1] * A[1][1]) +
           0.5 * lambda * tr * tr + 0.5 * mu * sh * sh;
}

Eigen::SparseMatrix<double> SparseSystem::matrix() const {
    Eigen::SparseMatrix<double> K(ndof, ndof);
    K.setFromTriplets(trips.begin(), trips.end());
    return K;
}

namespace {

struct ElemDofs {
    int d1[9];
    int d2[9];
};

ElemDofs elem_dofs(const DofMap& dofs, int ex, int ey, bool below) {
    ElemDofs e;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
            e.d1[3 * j + i] = dofs.u1(2 * ex + i, 2 * ey + j, below);
            e.d2[3 * j + i] = dofs.u2(2 * ex + i, 2 * ey + j);
        }
    return e;
}

} // namespace

void assemble_bulk_elasticity(const StructuredMesh& mesh, const DofMap& dofs,
                              const Material& mat, bool masked,
                              SparseSystem& sys, double fault_shear_scale) {
    if (sys.ndof != dofs.ndof)
        throw std::invalid_argument("assemble_bulk_elasticity: dimension mismatch");
    const GaussRule g = gauss_rule(3);
    const double mu = mat.mu, lam = mat.lambda;
    for (int ey = 0; ey < mesh.nrows(); ++ey) {
        const auto& row = mesh.rows[ey];
        const bool below = 0.5 * (row.y0 + row.y1) < 0.0;
        const bool fault = row.tag == Region::Fault;
        double shear = 1.0;
        if (fault && masked)
            shear = fault_shear_scale < 0.0 ? mesh.eps : fault_shear_scale;
        for (int ex = 0; ex < mesh.ncols(); ++ex) {
            const double x0 = mesh.xs[2 * ex], x1 = mesh.xs[2 * ex + 2];
            const ElemDofs ed = elem_dofs(dofs, ex, ey, below);
            for (size_t qa = 0; qa < g.pts.size(); ++qa) {
                for (size_t qb = 0; qb < g.pts.size(); ++qb) {
                    double N[9], dNx[9], dNy[9];
                    q2_shape(g.pts[qa], g.pts[qb], N, dNx, dNy);
                    const double jx = 2.0 / (x1 - x0);
                    const double jy = 2.0 / (row.y1 - row.y0);
                    const double jac =
                        (x1 - x0) * (row.y1 - row.y0) / 4.0 * g.wts[qa] * g.wts[qb];
                    double gx[9], gy[9];
                    for (int A = 0; A < 9; ++A) {
                        gx[A] = dNx[A] * jx;
                        gy[A] = dNy[A] * jy;
                    }
                    for (int A = 0; A < 9; ++A) {
                        for (int B = 0; B < 9; ++B) {
                            sys.add(ed.d1[A], ed.d1[B],
                                    jac * ((2 * mu + lam) * gx[A] * gx[B] +
                                           mu * shear * gy[A] * gy[B]));
                            sys.add(ed.d2[A], ed.d2[B],
                                    jac * ((2 * mu + lam) * gy[A] * gy[B] +
                                           mu * shear * gx[A] * gx[B]));
                            sys.add(ed.d1[A], ed.d2[B],
                                    jac * (lam * gy[B] * gx[A] +
                                           mu * shear * gx[B] * gy[A]));
                            sys.add(ed.d2[B], ed.d1[A],
                                    jac * (lam * gx[A] * gy[B] +
                                           mu * shear * gy[A] * gx[B]));
                        }
                    }
                }
            }
        }
    }
}

void assemble_interface_coupling(const StructuredMesh& mesh, const DofMap& dofs,
                                 const Material& mat, const LineFunc* gamma_given,
                                 SparseSystem& sys) {
    if (!mesh.sharp())
        throw std::logic_error("assemble_interface_coupling: sharp mesh required");
    const GaussRule g = gauss_rule(3);
    const double mu = mat.mu;
    const int iy0 = dofs.interface_node_row;
    const bool coupled = dofs.with_gamma;
    for (int ex = 0; ex < mesh.ncols(); ++ex) {
        const double x0 = mesh.xs[2 * ex], x1 = mesh.xs[2 * ex + 2];
        int dp[3], dm[3], dg[3];
        for (int i = 0; i < 3; ++i) {
            dp[i] = dofs.u1(2 * ex + i, iy0, false);
            dm[i] = dofs.u1(2 * ex + i, iy0, true);
            if (coupled) dg[i] = dofs.gdof(2 * ex + i);
        }
        for (size_t q = 0; q < g.pts.size(); ++q) {
            double N1[3], dN1[3];
            shape1d(g.pts[q], N1, dN1);
            const double x = 0.5 * (x0 + x1) + 0.5 * g.pts[q] * (x1 - x0);
            const double jac = 0.5 * (x1 - x0) * g.wts[q];
            const double jx = 2.0 / (x1 - x0);
            for (int A = 0; A < 3; ++A) {
                for (int B = 0; B < 3; ++B) {
                    const double v = jac * mu * N1[A] * N1[B];
                    sys.add(dp[A], dp[B], v);
                    sys.add(dm[A], dm[B], v);
                    sys.add(dp[A], dm[B], -v);
                    sys.add(dm[A], dp[B], -v);
                }
            }
            if (coupled) {
                for (int A = 0; A < 3; ++A) {
                    for (int B = 0; B < 3; ++B) {
                        const double v = jac * mu * N1[A] * N1[B];
                        sys.add(dg[A], dp[B], -v);
                        sys.add(dp[B], dg[A], -v);
                        sys.add(dg[A], dm[B], v);
                        sys.add(dm[B], dg[A], v);
                        sys.add(dg[A], dg[B],
                                jac * (mat.eta_hat * N1[A] * N1[B] +
                                       mat.nu * dN1[A] * jx * dN1[B] * jx +
                                       mu * N1[A] * N1[B]));
                    }
                }
            } else if (gamma_given) {
                const double gv = (*gamma_given)(x);
                for (int A = 0; A < 3; ++A) {
                    sys.add_rhs(dp[A], jac * mu * gv * N1[A]);
                    sys.add_rhs(dm[A], -jac * mu * gv * N1[A]);
                }
            }
        }
    }
}

void assemble_eps_fault_coupling(const StructuredMesh& mesh, const DofMap& dofs,
                                 const Material& mat, const LineFunc* gamma_given,
                                 SparseSystem& sys) {
    if (mesh.sharp())
        throw std::logic_error("assemble_eps_fault_coupling: strip mesh required");
    const GaussRule g = gauss_rule(3);
    const double mu = mat.mu;
    const bool coupled = dofs.with_gamma;
    // 2D coupling over fault elements
    for (int ey = 0; ey < mesh.nrows(); ++ey) {
        const auto& row = mesh.rows[ey];
        if (row.tag != Region::Fault) continue;
        for (int ex = 0; ex < mesh.ncols(); ++ex) {
            const double x0 = mesh.xs[2 * ex], x1 = mesh.xs[2 * ex + 2];
            const ElemDofs ed = elem_dofs(dofs, ex, ey, false);
            int dg[3];
            if (coupled)
                for (int i = 0; i < 3; ++i) dg[i] = dofs.gdof(2 * ex + i);
            for (size_t qa = 0; qa < g.pts.size(); ++qa) {
                for (size_t qb = 0; qb < g.pts.size(); ++qb) {
                    double N[9], dNx[9], dNy[9];
                    q2_shape(g.pts[qa], g.pts[qb], N, dNx, dNy);
                    const double jx = 2.0 / (x1 - x0);
                    const double jy = 2.0 / (row.y1 - row.y0);
                    const double jac = (x1 - x0) * (row.y1 - row.y0) / 4.0 *
                                       g.wts[qa] * g.wts[qb];
                    const double x = 0.5 * (x0 + x1) + 0.5 * g.pts[qa] * (x1 - x0);
                    double N1[3], dN1[3];
                    shape1d(g.pts[qa], N1, dN1);
                    if (coupled) {
                        for (int A = 0; A < 9; ++A) {
                            const double gyA = dNy[A] * jy;
                            const double gxA = dNx[A] * jx;
                            for (int B = 0; B < 3; ++B) {
                                sys.add(ed.d1[A], dg[B], -jac * mu * gyA * N1[B]);
                                sys.add(dg[B], ed.d1[A], -jac * mu * gyA * N1[B]);
                                sys.add(ed.d2[A], dg[B], -jac * mu * gxA * N1[B]);
                                sys.add(dg[B], ed.d2[A], -jac * mu * gxA * N1[B]);
                            }
                        }
                    } else if (gamma_given) {
                        const double gv = (*gamma_given)(x);
                        for (int A = 0; A < 9; ++A) {
                            sys.add_rhs(ed.d1[A], jac * mu * gv * dNy[A] * jy);
                            sys.add_rhs(ed.d2[A], jac * mu * gv * dNx[A] * jx);
                        }
                    }
                }
            }
        }
    }
    // 1D slip forms: the strip integrals of the x-only slip collapse to
    // int (eta_hat g g^ + nu g_x g^_x + mu g g^) dx.
    if (coupled) {
        for (int ex = 0; ex < mesh.ncols(); ++ex) {
            const double x0 = mesh.xs[2 * ex], x1 = mesh.xs[2 * ex + 2];
            int dg[3];
            for (int i = 0; i < 3; ++i) dg[i] = dofs.gdof(2 * ex + i);
            for (size_t q = 0; q < g.pts.size(); ++q) {
                double N1[3], dN1[3];
                shape1d(g.pts[q], N1, dN1);
                const double jac = 0.5 * (x1 - x0) * g.wts[q];
                const double jx = 2.0 / (x1 - x0);
                for (int A = 0; A < 3; ++A)
                    for (int B = 0; B < 3; ++B)
                        sys.add(dg[A], dg[B],
                                jac * (mat.eta_hat * N1[A] * N1[B] +
                                       mat.nu * dN1[A] * jx * dN1[B] * jx +
                                       mu * N1[A] * N1[B]));
            }
        }
    }
}

void assemble_load(const StructuredMesh& mesh, const DofMap& dofs,
                   const Material& mat, const BodyForce* f, const LineFunc* f0,
                   SparseSystem& sys) {
    const GaussRule g = gauss_rule(3);
    if (f) {
        for (int ey = 0; ey < mesh.nrows(); ++ey) {
            const auto& row = mesh.rows[ey];
            const bool below = 0.5 * (row.y0 + row.y1) < 0.0;
            const int side = below ? -1 : 1;
            for (int ex = 0; ex < mesh.ncols(); ++ex) {
                const double x0 = mesh.xs[2 * ex], x1 = mesh.xs[2 * ex + 2];
                const ElemDofs ed = elem_dofs(dofs, ex, ey, below);
                for (size_t qa = 0; qa < g.pts.size(); ++qa) {
                    for (size_t qb = 0; qb < g.pts.size(); ++qb) {
                        double N[9], dNx[9], dNy[9];
                        q2_shape(g.pts[qa], g.pts[qb], N, dNx, dNy);
                        const double jac = (x1 - x0) * (row.y1 - row.y0) / 4.0 *
                                           g.wts[qa] * g.wts[qb];
                        const double x =
                            0.5 * (x0 + x1) + 0.5 * g.pts[qa] * (x1 - x0);
                        const double y =
                            0.5 * (row.y0 + row.y1) + 0.5 * g.pts[qb] * (row.y1 - row.y0);
                        const auto fv = (*f)(x, y, side);
                        if (!std::isfinite(fv[0]) || !std::isfinite(fv[1]))
                            throw std::domain_error("assemble_load: non-finite body force");
                        for (int A = 0; A < 9; ++A) {
                            sys.add_rhs(ed.d1[A], jac * mat.rho * N[A] * fv[0]);
                            sys.add_rhs(ed.d2[A], jac * mat.rho * N[A] * fv[1]);
                        }
                    }
                }
            }
        }
    }
    if (f0 && dofs.with_gamma) {
        for (int ex = 0; ex < mesh.ncols(); ++ex) {
            const double x0 = mesh.xs[2 * ex], x1 = mesh.xs[2 * ex + 2];
            int dg[3];
            for (int i = 0; i < 3; ++i) dg[i] = dofs.gdof(2 * ex + i);
            for (size_t q = 0; q < g.pts.size(); ++q) {
                double N1[3], dN1[3];
                shape1d(g.pts[q], N1, dN1);
                const double x = 0.5 * (x0 + x1) + 0.5 * g.pts[q] * (x1 - x0);
                const double jac = 0.5 * (x1 - x0) * g.wts[q];
                const double v = (*f0)(x);
                if (!std::isfinite(v))
                    throw std::domain_error("assemble_load: non-finite slip source");
                for (int A = 0; A < 3; ++A) sys.add_rhs(dg[A], jac * v * N1[A]);
            }
        }
    }
}

void assemble_side_tractions(const StructuredMesh& mesh, const DofMap& dofs,
                             const BodyForce& traction, SparseSystem& sys) {
    const GaussRule g = gauss_rule(3);
    const int ixs[2] = {0, mesh.nxn() - 1};
    const double sxs[2] = {-1.0, 1.0};
    for (int s = 0; s < 2; ++s) {
        for (int ey = 0; ey < mesh.nrows(); ++ey) {
            const auto& row = mesh.rows[ey];
            const bool below = 0.5 * (row.y0 + row.y1) < 0.0;
            const int side = below ? -1 : 1;
            int d1[3], d2[3];
            for (int j = 0; j < 3; ++j) {
                d1[j] = dofs.u1(ixs[s], 2 * ey + j, below);
                d2[j] = dofs.u2(ixs[s], 2 * ey + j);
            }
            for (size_t q = 0; q < g.pts.size(); ++q) {
                double N1[3], dN1[3];
                shape1d(g.pts[q], N1, dN1);
                const double y =
                    0.5 * (row.y0 + row.y1) + 0.5 * g.pts[q] * (row.y1 - row.y0);
                const double jac = 0.5 * (row.y1 - row.y0) * g.wts[q];
                const auto t = traction(sxs[s], y, side);
                for (int A = 0; A < 3; ++A) {
                    sys.add_rhs(d1[A], jac * t[0] * N1[A]);
                    sys.add_rhs(d2[A], jac * t[1] * N1[A]);
                }
            }
        }
    }
}

void assemble_mass(const StructuredMesh& mesh, const DofMap& dofs,
                   const Material& mat, SparseSystem& sys) {
    const GaussRule g = gauss_rule(3);
    for (int ey = 0; ey < mesh.nrows(); ++ey) {
        const auto& row = mesh.rows[ey];
        const bool below = 0.5 * (row.y0 + row.y1) < 0.0;
        for (int ex = 0; ex < mesh.ncols(); ++ex) {
            const double x0 = mesh.xs[2 * ex], x1 = mesh.xs[2 * ex + 2];
            const ElemDofs ed = elem_dofs(dofs, ex, ey, below);
            for (size_t qa = 0; qa < g.pts.size(); ++qa) {
                for (size_t qb = 0; qb < g.pts.size(); ++qb) {
                    double N[9], dNx[9], dNy[9];
                    q2_shape(g.pts[qa], g.pts[qb], N, dNx, dNy);
                    const double jac = (x1 - x0) * (row.y1 - row.y0) / 4.0 *
                                       g.wts[qa] * g.wts[qb];
                    for (int A = 0; A < 9; ++A)
                        for (int B = 0; B < 9; ++B) {
                            const double v = jac * mat.rho * N[A] * N[B];
                            sys.add(ed.d1[A], ed.d1[B], v);
                            sys.add(ed.d2[A], ed.d2[B], v);
                        }
                }
            }
        }
    }
}

void assemble_gamma_mass(const StructuredMesh& mesh, const DofMap& dofs,
                         double coef, SparseSystem& sys) {
    if (!dofs.with_gamma)
        throw std::logic_error("assemble_gamma_mass: no slip DOFs");
    const GaussRule g = gauss_rule(3);
    for (int ex = 0; ex < mesh.ncols(); ++ex) {
        const double x0 = mesh.xs[2 * ex], x1 = mesh.xs[2 * ex + 2];
        int dg[3];
        for (int i = 0; i < 3; ++i) dg[i] = dofs.gdof(2 * ex + i);
        for (size_t q = 0; q < g.pts.size(); ++q) {
            double N1[3], dN1[3];
            shape1d(g.pts[q], N1, dN1);
            const double jac = 0.5 * (x1 - x0) * g.wts[q];
            for (int A = 0; A < 3; ++A)
                for (int B = 0; B < 3; ++B)
                    sys.add(dg[A], dg[B], jac * coef * N1[A] * N1[B]);
        }
    }
}

Eigen::VectorXd ReducedSystem::expand(const Eigen::VectorXd& xfree) const {
    Eigen::VectorXd full = bc_values;
    for (size_t i = 0; i < free2global.size(); ++i)
        full[free2global[i]] = xfree[static_cast<Eigen::Index>(i)];
    return full;
}

Eigen::VectorXd ReducedSystem::restrict_to_free(const Eigen::VectorXd& full) const {
    Eigen::VectorXd r(static_cast<Eigen::Index>(free2global.size()));
    for (size_t i = 0; i < free2global.size(); ++i)
        r[static_cast<Eigen::Index>(i)] = full[free2global[i]];
    return r;
}

ReducedSystem apply_dirichlet(const SparseSystem& sys,
                              const std::vector<char>& constrained,
                              const Eigen::VectorXd& values) {
    const int n = sys.ndof;
    std::vector<int> g2f(n, -1);
    ReducedSystem red;
    for (int i = 0; i < n; ++i) {
        if (!constrained[i]) {
            g2f[i] = static_cast<int>(red.free2global.size());
            red.free2global.push_back(i);
        }
    }
    const int nf = static_cast<int>(red.free2global.size());
    red.bc_values = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
        if (constrained[i]) red.bc_values[i] = values[i];

    red.F = Eigen::VectorXd::Zero(nf);
    for (int i = 0; i < n; ++i)
        if (g2f[i] >= 0) red.F[g2f[i]] = sys.rhs[i];

    std::vector<Eigen::Triplet<double>> ft;
    ft.reserve(sys.trips.size());
    for (const auto& t : sys.trips) {
        const int fi = g2f[t.row()];
        const int fj = g2f[t.col()];
        if (fi >= 0 && fj >= 0) {
            ft.emplace_back(fi, fj, t.value());
        } else if (fi >= 0 && fj < 0) {
            red.F[fi] -= t.value() * red.bc_values[t.col()];
        }
    }
    red.K.resize(nf, nf);
    red.K.setFromTriplets(ft.begin(), ft.end());
    return red;
}

Eigen::VectorXd dirichlet_values(const StructuredMesh& mesh, const DofMap& dofs,
                                 const BodyForce* u_bc) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dofs.ndof);
    if (!u_bc) return v;
    const int rows[2] = {0, dofs.nyn - 1};
    const double ys[2] = {-1.0, 1.0};
    for (int r = 0; r < 2; ++r) {
        const int side = r == 0 ? -1 : 1;
        for (int ix = 0; ix < dofs.nxn; ++ix) {
            const auto u = (*u_bc)(mesh.xs[ix], ys[r], side);
            v[dofs.u1(ix, rows[r], false)] = u[0];
            v[dofs.u2(ix, rows[r])] = u[1];
        }
    }
    return v;
}

namespace {

int find_interval(const std::vector<double>& knots, int stride, double v) {
    // knots has 2k+1 entries for k elements spanning [knots.front(), knots.back()]
    const int nelem = (static_cast<int>(knots.size()) - 1) / stride;
    int lo = 0, hi = nelem - 1;
    while (lo < hi) {
        const int mid = (lo + hi + 1) / 2;
        if (v >= knots[stride * mid])
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

} // namespace

std::array<double, 2> eval_displacement(const StructuredMesh& mesh,
                                        const DofMap& dofs,
                                        const Eigen::VectorXd& z, double x,
                                        double y, int side) {
    const int ex = find_interval(mesh.xs, 2, x);
    // locate element row
    int ey = 0;
    {
        int lo = 0, hi = mesh.nrows() - 1;
        while (lo < hi) {
            const int mid = (lo + hi + 1) / 2;
            if (y >= mesh.rows[mid].y0)
                lo = mid;
            else
                hi = mid - 1;
        }
        ey = lo;
    }
    if (mesh.sharp() && y == 0.0 && side < 0) ey = mesh.interface_elem_row - 1;
    if (mesh.sharp() && y == 0.0 && side >= 0) ey = mesh.interface_elem_row;
    const auto& row = mesh.rows[ey];
    const bool below = 0.5 * (row.y0 + row.y1) < 0.0;
    const double x0 = mesh.xs[2 * ex], x1 = mesh.xs[2 * ex + 2];
    const double xi = (2.0 * x - x0 - x1) / (x1 - x0);
    const double eta = (2.0 * y - row.y0 - row.y1) / (row.y1 - row.y0);
    double N[9], dNx[9], dNy[9];
    q2_shape(xi, eta, N, dNx, dNy);
    std::array<double, 2> u = {0.0, 0.0};
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
            const double w = N[3 * j + i];
            u[0] += w * z[dofs.u1(2 * ex + i, 2 * ey + j, below)];
            u[1] += w * z[dofs.u2(2 * ex + i, 2 * ey + j)];
        }
    return u;
}

double eval_gamma(const StructuredMesh& mesh, const DofMap& dofs,
                  const Eigen::VectorXd& z, double x) {
    if (!dofs.with_gamma)
        throw std::logic_error("eval_gamma: no slip DOFs");
    const int ex = find_interval(mesh.xs, 2, x);
    const double x0 = mesh.xs[2 * ex], x1 = mesh.xs[2 * ex + 2];
    const double xi = (2.0 * x - x0 - x1) / (x1 - x0);
    double N1[3], dN1[3];
    shape1d(xi, N1, dN1);
    double v = 0.0;
    for (int i = 0; i < 3; ++i) v += N1[i] * z[dofs.gdof(2 * ex + i)];
    return v;
}

} // namespace ffem
