#include <doctest.h>

#include <cmath>
#include <random>

#include "faultfem/fem_core.hpp"
#include "faultfem/solvers.hpp"

using namespace ffem;

namespace {

Eigen::SparseMatrix<double> stiffness(const StructuredMesh& m, const DofMap& d,
                                      const Material& mat, bool masked,
                                      double scale = -1.0) {
    SparseSystem sys(d.ndof);
    assemble_bulk_elasticity(m, d, mat, masked, sys, scale);
    if (m.sharp()) assemble_interface_coupling(m, d, mat, nullptr, sys);
    else assemble_eps_fault_coupling(m, d, mat, nullptr, sys);
    return sys.matrix();
}

} // namespace

TEST_SUITE("fem_core") {

TEST_CASE("strain energy density examples") {
    const double mu = 1.0, lam = 2.0;
    CHECK(strain_energy_density({{{1.0, 0.0}, {0.0, 0.0}}}, mu, lam) ==
          doctest::Approx(2.0).epsilon(1e-14));
    // Antisymmetric gradients carry no energy.
    CHECK(strain_energy_density({{{0.0, 3.0}, {-3.0, 0.0}}}, mu, lam) ==
          doctest::Approx(0.0).epsilon(1e-14));
    // Pure shear: (mu/2)(A12+A21)^2.
    CHECK(strain_energy_density({{{0.0, 1.0}, {1.0, 0.0}}}, mu, lam) ==
          doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("assembled operator is symmetric") {
    Material mat;
    for (double eps : {0.0, 0.1}) {
        StructuredMesh m = build_mesh(2, FaultGeometry{eps});
        DofMap d = build_dof_map(m, true);
        Eigen::SparseMatrix<double> K = stiffness(m, d, mat, true);
        Eigen::SparseMatrix<double> Kt = K.transpose();
        CHECK((K - Kt).norm() < 1e-12 * K.norm());
    }
}

TEST_CASE("patch test: affine displacement reproduced exactly") {
    // u1 = 0.3 + 0.7x + 0.2y, u2 = -0.1 + 0.4x - 0.5y has zero body force
    // and zero jump; constrain the whole boundary and solve.
    Material mat;
    auto uex = [](double x, double y, int) {
        return std::array<double, 2>{0.3 + 0.7 * x + 0.2 * y,
                                     -0.1 + 0.4 * x - 0.5 * y};
    };
    for (double eps : {0.0, 0.1}) {
        StructuredMesh m = build_mesh(2, FaultGeometry{eps});
        DofMap d = build_dof_map(m, false);
        SparseSystem sys(d.ndof);
        assemble_bulk_elasticity(m, d, mat, false, sys, 1.0);
        // Constrain every boundary DOF, not just y=+-1; on the sharp mesh
        // also pin the interface row so each half sees full Dirichlet data.
        std::vector<char> fixed = d.dirichlet;
        for (int iy = 0; iy < d.nyn; ++iy)
            for (int ix : {0, d.nxn - 1}) {
                fixed[d.u1(ix, iy, false)] = 1;
                fixed[d.u1(ix, iy, true)] = 1;
                fixed[d.u2(ix, iy)] = 1;
            }
        if (m.sharp()) {
            for (int ix = 0; ix < d.nxn; ++ix) {
                fixed[d.u1(ix, d.interface_node_row, false)] = 1;
                fixed[d.u1(ix, d.interface_node_row, true)] = 1;
                fixed[d.u2(ix, d.interface_node_row)] = 1;
            }
        }
        Eigen::VectorXd vals = Eigen::VectorXd::Zero(d.ndof);
        for (int iy = 0; iy < d.nyn; ++iy)
            for (int ix = 0; ix < d.nxn; ++ix) {
                double x = m.xs[ix], y = m.ynodes[iy];
                auto u = uex(x, y, 0);
                vals[d.u1(ix, iy, false)] = u[0];
                vals[d.u1(ix, iy, true)] = u[0];
                vals[d.u2(ix, iy)] = u[1];
            }
        ReducedSystem red = apply_dirichlet(sys, fixed, vals);
        Eigen::VectorXd z = red.expand(solve_spd(red, 1e-10));
        double err = 0.0;
        for (int iy = 0; iy < d.nyn; ++iy)
            for (int ix = 0; ix < d.nxn; ++ix) {
                double x = m.xs[ix], y = m.ynodes[iy];
                auto u = uex(x, y, 0);
                err = std::max(err, std::abs(z[d.u1(ix, iy, false)] - u[0]));
                err = std::max(err, std::abs(z[d.u2(ix, iy)] - u[1]));
            }
        CHECK(err < 1e-11);
    }
}

TEST_CASE("energy quadrature matches the assembled quadratic form") {
    Material mat;
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (double eps : {0.0, 0.1}) {
        StructuredMesh m = build_mesh(2, FaultGeometry{eps});
        DofMap d = build_dof_map(m, true);
        Eigen::SparseMatrix<double> K = stiffness(m, d, mat, true);
        for (int trial = 0; trial < 10; ++trial) {
            Eigen::VectorXd z(d.ndof);
            for (int i = 0; i < d.ndof; ++i) z[i] = U(rng);
            double quad = energy_of(m, d, mat, z);
            double form = 0.5 * z.dot(K * z);
            CHECK(std::abs(quad - form) <
                  1e-12 * std::max(1.0, std::abs(form)));
        }
    }
}

TEST_CASE("fault shear scale 1 reproduces the unmasked operator") {
    Material mat;
    StructuredMesh m = build_mesh(2, FaultGeometry{0.1});
    DofMap d = build_dof_map(m, false);
    SparseSystem a(d.ndof), b(d.ndof);
    assemble_bulk_elasticity(m, d, mat, true, a, 1.0);
    assemble_bulk_elasticity(m, d, mat, false, b);
    Eigen::SparseMatrix<double> diff = a.matrix() - b.matrix();
    CHECK(diff.norm() < 1e-12 * b.matrix().norm());
}

TEST_CASE("mass matrix integrates constants to the domain area") {
    Material mat;
    StructuredMesh m = build_mesh(3, FaultGeometry{0.0});
    DofMap d = build_dof_map(m, false);
    SparseSystem sys(d.ndof);
    assemble_mass(m, d, mat, sys);
    Eigen::VectorXd one = Eigen::VectorXd::Zero(d.ndof);
    for (int iy = 0; iy < d.nyn; ++iy)
        for (int ix = 0; ix < d.nxn; ++ix) {
            one[d.u1(ix, iy, false)] = 1.0;
            one[d.u1(ix, iy, true)] = 1.0;
        }
    double v = one.dot(sys.matrix() * one);
    CHECK(std::abs(v - 4.0) < 1e-12); // rho * |Omega| with rho = 1
}

TEST_CASE("slip mass integrates constants to the interface length") {
    StructuredMesh m = build_mesh(3, FaultGeometry{0.0});
    DofMap d = build_dof_map(m, true);
    SparseSystem sys(d.ndof);
    assemble_gamma_mass(m, d, 2.5, sys);
    Eigen::VectorXd one = Eigen::VectorXd::Zero(d.ndof);
    for (int k = 0; k < d.ngamma; ++k) one[d.gdof(k)] = 1.0;
    double v = one.dot(sys.matrix() * one);
    CHECK(std::abs(v - 2.5 * 2.0) < 1e-12);
}

TEST_CASE("load assembly rejects non-finite data") {
    Material mat;
    StructuredMesh m = build_mesh(2, FaultGeometry{0.0});
    DofMap d = build_dof_map(m, false);
    SparseSystem sys(d.ndof);
    BodyForce bad = [](double, double, int) {
        return std::array<double, 2>{std::nan(""), 0.0};
    };
    CHECK_THROWS_AS(assemble_load(m, d, mat, &bad, nullptr, sys),
                    std::domain_error);
}

} // TEST_SUITE
