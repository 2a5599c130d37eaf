#include "faultfem/manufactured.hpp"

#include <cmath>
#include <stdexcept>

#include "faultfem/quadrature.hpp"

namespace ffem {

namespace {
constexpr double kMu = 1.0;
constexpr double kLam = 2.0;
constexpr double kA = 0.5;
constexpr double kEll = 0.25;
constexpr double kEtaHat = 2.0;
constexpr double kKappa = kLam / (2.0 * kMu + kLam);
constexpr double kPi = 3.14159265358979323846;

struct PhiParts {
    double px, py, pxx, pxy, pyy;
};

// phi(x,y) = e^{-ell y} cos(ell x); the (phi_y, -phi_x) part is added on
// both sides of the fault.
PhiParts phi_parts(double x, double y) {
    const double e = std::exp(-kEll * y);
    PhiParts p;
    p.px = -kEll * e * std::sin(kEll * x);
    p.py = -kEll * e * std::cos(kEll * x);
    p.pxx = -kEll * kEll * e * std::cos(kEll * x);
    p.pxy = kEll * kEll * e * std::sin(kEll * x);
    p.pyy = kEll * kEll * e * std::cos(kEll * x);
    return p;
}

int side_of(double y, int side) { return y > 0.0 ? 1 : (y < 0.0 ? -1 : side); }

} // namespace

std::array<double, 2> exact_u0(double x, double y, int side) {
    const int s = side_of(y, side);
    const PhiParts p = phi_parts(x, y);
    if (s > 0) {
        return {0.5 * std::exp(kA * (x - y)) + p.py,
                0.5 * std::exp(kA * (x - kKappa * y)) - p.px};
    }
    return {-0.5 * std::exp(kA * (x + y)) + p.py,
            0.5 * std::exp(kA * (x + kKappa * y)) - p.px};
}

Grad2 exact_grad_u0(double x, double y, int side) {
    const int s = side_of(y, side);
    const PhiParts p = phi_parts(x, y);
    Grad2 g;
    if (s > 0) {
        const double E1 = std::exp(kA * (x - y));
        const double E2 = std::exp(kA * (x - kKappa * y));
        g = {{{0.5 * kA * E1, -0.5 * kA * E1},
              {0.5 * kA * E2, -0.5 * kKappa * kA * E2}}};
    } else {
        const double E1 = std::exp(kA * (x + y));
        const double E2 = std::exp(kA * (x + kKappa * y));
        g = {{{-0.5 * kA * E1, -0.5 * kA * E1},
              {0.5 * kA * E2, 0.5 * kKappa * kA * E2}}};
    }
    g[0][0] += p.pxy;
    g[0][1] += p.pyy;
    g[1][0] += -p.pxx;
    g[1][1] += -p.pxy;
    return g;
}

double exact_gamma0(double x) {
    return std::exp(kA * x) - 2.0 * kEll * kEll * std::cos(kEll * x);
}

double exact_gamma0_x(double x) {
    return kA * std::exp(kA * x) + 2.0 * kEll * kEll * kEll * std::sin(kEll * x);
}

Grad2 stress_of(const Grad2& A, double mu, double lambda) {
    const double sh = mu * (A[0][1] + A[1][0]);
    return {{{(2.0 * mu + lambda) * A[0][0] + lambda * A[1][1], sh},
             {sh, (2.0 * mu + lambda) * A[1][1] + lambda * A[0][0]}}};
}

std::array<double, 2> manufactured_f(double x, double y, int side) {
    const int s = side_of(y, side);
    if (s > 0) {
        const double E1 = std::exp(kA * (x - y));
        const double E2 = std::exp(kA * (x - kKappa * y));
        return {-(kA * kA / 2.0) * ((3.0 * kMu + kLam) * E1 -
                                    kKappa * (kLam + kMu) * E2),
                -(kA * kA / 2.0) * ((kMu + kKappa * kLam) * E2 -
                                    (kMu + kLam) * E1)};
    }
    const double E1 = std::exp(kA * (x + y));
    const double E2 = std::exp(kA * (x + kKappa * y));
    return {(kA * kA / 2.0) * ((3.0 * kMu + kLam) * E1 -
                               kKappa * (kLam + kMu) * E2),
            -(kA * kA / 2.0) * ((kMu + kKappa * kLam) * E2 -
                                (kMu + kLam) * E1)};
}

double manufactured_f0(double x) {
    // eta_hat*gamma - C(grad u0)_12 with C12 = mu([u1]-gamma) on the line
    return kEtaHat * exact_gamma0(x) -
           2.0 * kMu * kEll * kEll * std::cos(kEll * x);
}

std::array<double, 2> manufactured_side_traction(double sx, double y, int side) {
    const Grad2 T = stress_of(exact_grad_u0(sx, y, side), kMu, kLam);
    return {T[0][0] * sx, T[1][0] * sx};
}

namespace {
// Plane-strain Poisson ratio for the dislocation solution.
constexpr double kNuHat = kLam / (2.0 * (kMu + kLam));
constexpr double kC1 = 1.0 / (2.0 * kPi);
constexpr double kC2 = 1.0 / (2.0 * (1.0 - kNuHat));

double branch_angle(double x, double y, int side) {
    if (y == 0.0) {
        if (x >= 0.0) return 0.0;
        return side >= 0 ? kPi : -kPi;
    }
    return std::atan2(y, x);
}
} // namespace

std::array<double, 2> dislocation_u(double x, double y, int side) {
    const double r2 = x * x + y * y;
    if (r2 == 0.0) throw std::domain_error("dislocation_u: origin");
    const double u1 = kC1 * (branch_angle(x, y, side) + kC2 * x * y / r2);
    const double u2 = -kC1 * (kC2 / 2.0) *
                      ((1.0 - 2.0 * kNuHat) * std::log(r2) + (x * x - y * y) / r2);
    return {u1, u2};
}

Grad2 dislocation_grad(double x, double y, int side) {
    (void)side;
    const double r2 = x * x + y * y;
    if (r2 == 0.0) throw std::domain_error("dislocation_grad: origin");
    const double r4 = r2 * r2;
    Grad2 g;
    g[0][0] = kC1 * (-y / r2 + kC2 * y * (y * y - x * x) / r4);
    g[0][1] = kC1 * (x / r2 + kC2 * x * (x * x - y * y) / r4);
    g[1][0] = -kC1 * kC2 * x * ((1.0 - 2.0 * kNuHat) / r2 + 2.0 * y * y / r4);
    g[1][1] = -kC1 * kC2 * y * ((1.0 - 2.0 * kNuHat) / r2 - 2.0 * x * x / r4);
    return g;
}

double dislocation_f0(double x) {
    if (x == 0.0) throw std::domain_error("dislocation_f0: x = 0");
    const double jump = x < 0.0 ? 1.0 : 0.0;
    // T12(x,0) = mu(mu+lambda) / (pi (2 mu + lambda) x); the slip source is
    // f0 = eta_hat*[u1] - T12 - nu*gamma_xx with gamma = [u1] - T12/mu:
    // f0 = eta_hat*[u1] - (lambda+mu)(eta_hat+mu)/(pi (2 mu+lambda) x) ... for
    // the stationary slip identity; here nu = 0.
    const double sing = (kLam + kMu) * (kEtaHat + kMu) /
                        (kPi * (2.0 * kMu + kLam) * x);
    return kEtaHat * jump - sing;
}

std::array<double, 2> dislocation_side_traction(double sx, double y, int side) {
    const Grad2 T = stress_of(dislocation_grad(sx, y, side), kMu, kLam);
    return {T[0][0] * sx, T[1][0] * sx};
}

ExactSolution manufactured_exact() {
    ExactSolution e;
    e.u = [](double x, double y, int s) { return exact_u0(x, y, s); };
    e.grad = [](double x, double y, int s) { return exact_grad_u0(x, y, s); };
    e.gamma = [](double x) { return exact_gamma0(x); };
    return e;
}

ExactSolution dislocation_exact() {
    ExactSolution e;
    e.u = [](double x, double y, int s) { return dislocation_u(x, y, s); };
    e.grad = [](double x, double y, int s) { return dislocation_grad(x, y, s); };
    e.gamma = nullptr;
    return e;
}

ErrorReport error_norms(const StructuredMesh& mesh, const DofMap& dofs,
                        const Eigen::VectorXd& z, const ExactSolution& exact) {
    const GaussRule g = gauss_rule(5);
    double L2 = 0.0, H1 = 0.0;
    for (int ey = 0; ey < mesh.nrows(); ++ey) {
        const auto& row = mesh.rows[ey];
        const bool below = 0.5 * (row.y0 + row.y1) < 0.0;
        const int side = below ? -1 : 1;
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
                    const double y =
                        0.5 * (row.y0 + row.y1) + 0.5 * g.pts[qb] * (row.y1 - row.y0);
                    double u1 = 0, u2 = 0, u1x = 0, u1y = 0, u2x = 0, u2y = 0;
                    for (int j = 0; j < 3; ++j)
                        for (int i = 0; i < 3; ++i) {
                            const int k = 3 * j + i;
                            const double z1 = z[dofs.u1(2 * ex + i, 2 * ey + j, below)];
                            const double z2 = z[dofs.u2(2 * ex + i, 2 * ey + j)];
                            u1 += N[k] * z1;
                            u2 += N[k] * z2;
                            u1x += dNx[k] * jx * z1;
                            u1y += dNy[k] * jy * z1;
                            u2x += dNx[k] * jx * z2;
                            u2y += dNy[k] * jy * z2;
                        }
                    const auto ue = exact.u(x, y, side);
                    const double d1 = u1 - ue[0], d2 = u2 - ue[1];
                    L2 += jac * (d1 * d1 + d2 * d2);
                    if (!fault) {
                        const Grad2 ge = exact.grad(x, y, side);
                        const double e11 = u1x - ge[0][0], e12 = u1y - ge[0][1];
                        const double e21 = u2x - ge[1][0], e22 = u2y - ge[1][1];
                        H1 += jac * (d1 * d1 + d2 * d2 + e11 * e11 + e12 * e12 +
                                     e21 * e21 + e22 * e22);
                    }
                }
            }
        }
    }
    ErrorReport rep;
    rep.l2_u = std::sqrt(L2);
    rep.h1_u = std::sqrt(H1);
    if (dofs.with_gamma && exact.gamma) {
        double G = 0.0;
        for (int ex = 0; ex < mesh.ncols(); ++ex) {
            const double x0 = mesh.xs[2 * ex], x1 = mesh.xs[2 * ex + 2];
            for (size_t q = 0; q < g.pts.size(); ++q) {
                double N1[3], dN1[3];
                shape1d(g.pts[q], N1, dN1);
                const double x = 0.5 * (x0 + x1) + 0.5 * g.pts[q] * (x1 - x0);
                const double jac = 0.5 * (x1 - x0) * g.wts[q];
                double gh = 0.0;
                for (int i = 0; i < 3; ++i) gh += N1[i] * z[dofs.gdof(2 * ex + i)];
                const double d = gh - exact.gamma(x);
                G += jac * d * d;
            }
        }
        rep.l2_gamma = std::sqrt(G);
    }
    rep.ndofs = dofs.free_count();
    rep.h = 1.0 / (2.0 * mesh.n);
    return rep;
}

double gamma_field_norm(const StructuredMesh& mesh, const DofMap& dofs,
                        const Eigen::VectorXd& z) {
    if (!dofs.with_gamma)
        throw std::logic_error("gamma_field_norm: no slip DOFs");
    const GaussRule g = gauss_rule(5);
    double G = 0.0;
    for (int ex = 0; ex < mesh.ncols(); ++ex) {
        const double x0 = mesh.xs[2 * ex], x1 = mesh.xs[2 * ex + 2];
        for (size_t q = 0; q < g.pts.size(); ++q) {
            double N1[3], dN1[3];
            shape1d(g.pts[q], N1, dN1);
            const double jac = 0.5 * (x1 - x0) * g.wts[q];
            double gh = 0.0;
            for (int i = 0; i < 3; ++i) gh += N1[i] * z[dofs.gdof(2 * ex + i)];
            G += jac * gh * gh;
        }
    }
    return std::sqrt(G);
}

} // namespace ffem
