#include <doctest.h>

#include <cmath>
#include <random>

#include "faultfem/analysis_checks.hpp"
#include "faultfem/manufactured.hpp"

using namespace ffem;

namespace {

SidedVectorField manufactured_sided() {
    SidedVectorField f;
    f.value = [](double x, double y, int side) { return exact_u0(x, y, side); };
    f.grad = [](double x, double y, int side) {
        return exact_grad_u0(x, y, side);
    };
    return f;
}

Grid3 test_grid(int m) {
    Grid3 g;
    g.nt = 8 * m + 1;
    g.nx = 16 * m + 1;
    g.ny = 8 * m + 1;
    g.t0 = 0.0; g.t1 = 0.5;
    g.x0 = 0.2; g.x1 = 1.2;
    g.y0 = 0.0; g.y1 = 0.4;
    return g;
}

PlasticityInput test_plasticity_input() {
    PlasticityInput in;
    const double beta = 0.7, nu = 0.3;
    in.beta = beta;
    in.nu = nu;
    in.gamma = [](double t, double x) { return std::exp(t) * std::sin(x) + 2.0; };
    in.gamma_t = [](double t, double x) { return std::exp(t) * std::sin(x); };
    in.gamma_x = [](double t, double x) { return std::exp(t) * std::cos(x); };
    in.gamma_xx = [](double t, double x) { return -std::exp(t) * std::sin(x); };
    in.eta_prime = [](double g) { return 2.0 * g; };
    auto gamma = in.gamma;
    auto gamma_t = in.gamma_t;
    auto gamma_x = in.gamma_x;
    auto gamma_xx = in.gamma_xx;
    auto etap = in.eta_prime;
    in.u = [](double t, double x, double y) {
        return Vec3{std::sin(x + y + 0.1 * t), std::cos(x - y) * (1.0 + 0.2 * t),
                    0.3 * x * y * t};
    };
    in.T = [=](double t, double x, double y) {
        double g = gamma(t, x);
        double t12 = etap(g) - nu * gamma_xx(t, x) +
                     gamma_t(t, x) / (beta * gamma_x(t, x) * gamma_x(t, x));
        Mat3 T{};
        T[0][0] = std::cos(x + y) + 0.1 * t;
        T[1][1] = std::sin(x) * std::cos(y);
        T[2][2] = 0.2 * x + 0.1 * y;
        T[0][1] = T[1][0] = t12;
        T[0][2] = T[2][0] = 0.05 * std::sin(x * y + t);
        T[1][2] = T[2][1] = 0.05 * std::cos(x + t);
        return T;
    };
    return in;
}

} // namespace

TEST_SUITE("analysis_checks") {

TEST_CASE("strip trace inequality holds for random admissible fields") {
    std::mt19937 rng(2024);
    for (double eps : {0.2, 0.1, 0.05}) {
        for (int k = 0; k < 10; ++k) {
            ScalarField u = random_vanishing_field(rng);
            PoincareResult r = poincare_check(u, eps);
            CHECK(r.pass);
            CHECK(r.lhs <= r.rhs + 1e-10);
        }
    }
}

TEST_CASE("strip trace inequality rejects non-admissible fields") {
    ScalarField one;
    one.val = [](double, double) { return 1.0; };
    one.grad = [](double, double) { return std::array<double, 2>{0.0, 0.0}; };
    CHECK_THROWS_AS(poincare_check(one, 0.1), std::invalid_argument);
}

TEST_CASE("coercivity ratios are finite and positive on random states") {
    Material mat;
    CoercivitySuite s = coercivity_suite(99, 5, {0.2, 0.1}, mat);
    CHECK(s.max_ratio1 > 0.0);
    CHECK(s.max_ratio2 > 0.0);
    CHECK(s.max_ratio3 > 0.0);
    CHECK(std::isfinite(s.max_ratio1));
    CHECK(std::isfinite(s.max_ratio2));
    CHECK(std::isfinite(s.max_ratio3));
    CHECK(s.max_ratio1 < coercivity_frozen_constant());
}

TEST_CASE("recovery lift is linear in the field") {
    SidedVectorField u = manufactured_sided();
    SidedVectorField u2;
    u2.value = [&u](double x, double y, int s) {
        auto v = u.value(x, y, s);
        return std::array<double, 2>{2.0 * v[0], 2.0 * v[1]};
    };
    u2.grad = [&u](double x, double y, int s) {
        Grad2ref g = u.grad(x, y, s);
        for (auto& row : g) for (double& v : row) v *= 2.0;
        return g;
    };
    const double eps = 0.1;
    for (double y : {-0.8, -0.02, 0.0, 0.03, 0.6}) {
        for (double x : {-0.5, 0.2}) {
            auto a = lift_value(u, eps, x, y);
            auto b = lift_value(u2, eps, x, y);
            CHECK(std::abs(b[0] - 2.0 * a[0]) < 1e-12);
            CHECK(std::abs(b[1] - 2.0 * a[1]) < 1e-12);
        }
    }
}

TEST_CASE("recovery lift carries the trace jump across the strip") {
    SidedVectorField u = manufactured_sided();
    const double eps = 0.08;
    for (double x : {-0.7, 0.0, 0.5}) {
        auto top = lift_value(u, eps, x, eps / 2.0);
        auto bot = lift_value(u, eps, x, -eps / 2.0);
        CHECK(std::abs((top[0] - bot[0]) - std::exp(0.5 * x)) < 1e-12);
        // u2 is not remapped; across the strip it only varies by O(eps).
        CHECK(std::abs(top[1] - bot[1]) < eps);
    }
    // Outside the strip u1 is the affine pullback; u2 is left in place.
    auto v = lift_value(u, eps, 0.3, 0.7);
    double Y = (0.7 - eps / 2.0) / (1.0 - eps / 2.0);
    CHECK(std::abs(v[0] - u.value(0.3, Y, +1)[0]) < 1e-13);
    CHECK(std::abs(v[1] - u.value(0.3, 0.7, +1)[1]) < 1e-13);
}

TEST_CASE("strip energies of the lifted state approach the limit energy") {
    SidedVectorField u = manufactured_sided();
    LineFunc g = [](double x) { return exact_gamma0(x); };
    LineFunc gx = [](double x) { return exact_gamma0_x(x); };
    Material mat;
    double e_limit = limit_energy(u, g, gx, mat);
    CHECK(e_limit > 0.0);
    std::vector<GammaAuditRow> rows =
        gamma_limit_audit(u, g, gx, mat, {0.2, 0.1, 0.05});
    double prev = 1e300;
    for (const GammaAuditRow& r : rows) {
        CHECK(std::isfinite(r.gap));
        CHECK(r.gap < prev);
        prev = r.gap;
        CHECK(std::abs(r.energy_limit - e_limit) < 1e-10);
    }
}

TEST_CASE("axial vector and row-wise cross product basics") {
    Mat3 A{};
    A[0][1] = 3.0;
    A[1][0] = 3.0; // symmetric part contributes nothing
    CHECK(axial(A)[2] == doctest::Approx(0.0));
    Mat3 B{};
    B[0][1] = 1.0;
    Vec3 x = axial(B);
    CHECK(x[2] == doctest::Approx(1.0)); // e_{312} A_{12}
    CHECK(x[0] == doctest::Approx(0.0));
    CHECK(x[1] == doctest::Approx(0.0));

    // Row-wise cross with e3: row (1,0,0) x e3 = (0,-1,0).
    Mat3 R{};
    R[0][0] = 1.0;
    Mat3 C = cross_rowwise(R, Vec3{0.0, 0.0, 1.0});
    CHECK(C[0][0] == doctest::Approx(0.0));
    CHECK(C[0][1] == doctest::Approx(-1.0));
    CHECK(C[0][2] == doctest::Approx(0.0));
}

TEST_CASE("row-wise curl of the plastic distortion isolates -gamma_x") {
    // U = grad(u) - gamma e1 (x) e2 with smooth u: the gradient part is
    // curl-free, so Curl(U) has the single entry (1,3) = -gamma_x.
    Grid3 g = test_grid(2);
    auto gamma = [](double x) { return std::sin(2.0 * x); };
    auto gamma_x = [](double x) { return 2.0 * std::cos(2.0 * x); };
    MatField3 U;
    U.g = g;
    U.v.resize(static_cast<size_t>(g.nt) * g.nx * g.ny);
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix)
            for (int iy = 0; iy < g.ny; ++iy) {
                double x = g.x(ix), y = g.y(iy);
                Mat3 G{};
                // grad of u = (sin(x+y), cos(x-y), x*y) embedded in 3D.
                G[0][0] = std::cos(x + y);
                G[0][1] = std::cos(x + y);
                G[1][0] = -std::sin(x - y);
                G[1][1] = std::sin(x - y);
                G[2][0] = y;
                G[2][1] = x;
                G[0][1] -= gamma(x);
                U.v[U.g.idx(it, ix, iy)] = G;
            }
    MatField3 C = curl_rowwise(U);
    double err = 0.0, val_err = 0.0;
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 2; ix < g.nx - 2; ++ix)
            for (int iy = 2; iy < g.ny - 2; ++iy) {
                const Mat3& c = C.v[g.idx(it, ix, iy)];
                for (int m = 0; m < 3; ++m)
                    for (int n = 0; n < 3; ++n) {
                        if (m == 0 && n == 2) {
                            val_err = std::max(
                                val_err, std::abs(c[m][n] + gamma_x(g.x(ix))));
                        } else {
                            err = std::max(err, std::abs(c[m][n]));
                        }
                    }
            }
    CHECK(err < 1e-3);      // curl of a gradient, O(h^2) FD error
    CHECK(val_err < 2.5e-3); // (1,3) entry carries -gamma_x, O(h^2) FD error
}

TEST_CASE("plastic-ansatz residual vanishes and improves under refinement") {
    PlasticityInput in = test_plasticity_input();
    double r1 = plasticity_lemma_residual(in, test_grid(1));
    double r2 = plasticity_lemma_residual(in, test_grid(2));
    CHECK(std::isfinite(r1));
    CHECK(r2 < r1 / 2.0);
    CHECK(plasticity_vd_mismatch(in, test_grid(1)) < 1e-10);
}

TEST_CASE("defect velocity is undefined when the slip gradient vanishes") {
    PlasticityInput in = test_plasticity_input();
    in.gamma = [](double t, double) { return std::exp(t); };
    in.gamma_t = [](double t, double) { return std::exp(t); };
    in.gamma_x = [](double, double) { return 0.0; };
    in.gamma_xx = [](double, double) { return 0.0; };
    in.T = [](double, double, double) {
        Mat3 T{};
        T[0][0] = T[1][1] = T[2][2] = 1.0;
        T[0][1] = T[1][0] = 1.0;
        return T;
    };
    CHECK_THROWS_AS(plasticity_lemma_residual(in, test_grid(1)),
                    std::domain_error);
}

TEST_CASE("curl needs at least three points per direction") {
    MatField3 U;
    U.g = Grid3{2, 2, 2, 0, 1, 0, 1, 0, 1};
    U.v.resize(8);
    CHECK_THROWS(curl_rowwise(U));
}

} // TEST_SUITE
