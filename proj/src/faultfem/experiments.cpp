#include "faultfem/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "faultfem/analysis_checks.hpp"
#include "faultfem/quadrature.hpp"

namespace ffem {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6e", v);
    return buf;
}

BodyForce manufactured_body() {
    return [](double x, double y, int s) { return manufactured_f(x, y, s); };
}
BodyForce manufactured_bc() {
    return [](double x, double y, int s) { return exact_u0(x, y, s); };
}
BodyForce manufactured_traction() {
    return [](double x, double y, int s) {
        return manufactured_side_traction(x, y, s);
    };
}
BodyForce dislocation_bc() {
    return [](double x, double y, int s) { return dislocation_u(x, y, s); };
}
BodyForce dislocation_traction() {
    return [](double x, double y, int s) {
        return dislocation_side_traction(x, y, s);
    };
}
BodyForce zero_body() {
    return [](double, double, int) { return std::array<double, 2>{0.0, 0.0}; };
}

StationaryResult solve_problem(const std::string& problem, int n, double eps,
                               double tol) {
    const Material mat;
    const BodyForce f = manufactured_body();
    const BodyForce bc = manufactured_bc();
    const BodyForce tr = manufactured_traction();
    const LineFunc g0 = [](double x) { return exact_gamma0(x); };
    const LineFunc f0 = [](double x) { return manufactured_f0(x); };
    if (problem == "limit-uncoupled")
        return solve_limit_uncoupled(n, mat, g0, f, &bc, &tr, tol);
    if (problem == "limit-coupled")
        return solve_limit_coupled(n, mat, f, f0, &bc, &tr, tol);
    if (problem == "eps-uncoupled")
        return solve_eps_stationary(n, eps, mat, f, nullptr, false, &g0, &bc, &tr, tol);
    if (problem == "eps-coupled")
        return solve_eps_stationary(n, eps, mat, f, &f0, true, nullptr, &bc, &tr, tol);
    if (problem == "dislocation") {
        const BodyForce fz = zero_body();
        const BodyForce dbc = dislocation_bc();
        const BodyForce dtr = dislocation_traction();
        const LineFunc df0 = [](double x) { return dislocation_f0(x); };
        return solve_limit_coupled(n, mat, fz, df0, &dbc, &dtr, tol);
    }
    throw std::invalid_argument("unknown problem: " + problem);
}

// Norms of the closed-form solution by fine quadrature (7x7 points per
// element on an n=64 sharp mesh).
void reference_norms(double& l2, double& h1, double& gnorm) {
    const StructuredMesh mesh = build_mesh(64, FaultGeometry{0.0});
    const GaussRule g = gauss_rule(7);
    double L2 = 0, H1s = 0;
    for (int ey = 0; ey < mesh.nrows(); ++ey) {
        const auto& row = mesh.rows[ey];
        const int side = 0.5 * (row.y0 + row.y1) < 0.0 ? -1 : 1;
        for (int ex = 0; ex < mesh.ncols(); ++ex) {
            const double x0 = mesh.xs[2 * ex], x1 = mesh.xs[2 * ex + 2];
            for (size_t qa = 0; qa < g.pts.size(); ++qa)
                for (size_t qb = 0; qb < g.pts.size(); ++qb) {
                    const double x = 0.5 * (x0 + x1) + 0.5 * g.pts[qa] * (x1 - x0);
                    const double y = 0.5 * (row.y0 + row.y1) +
                                     0.5 * g.pts[qb] * (row.y1 - row.y0);
                    const double jac = (x1 - x0) * (row.y1 - row.y0) / 4.0 *
                                       g.wts[qa] * g.wts[qb];
                    const auto u = exact_u0(x, y, side);
                    const Grad2 gr = exact_grad_u0(x, y, side);
                    L2 += jac * (u[0] * u[0] + u[1] * u[1]);
                    H1s += jac * (gr[0][0] * gr[0][0] + gr[0][1] * gr[0][1] +
                                  gr[1][0] * gr[1][0] + gr[1][1] * gr[1][1]);
                }
        }
    }
    l2 = std::sqrt(L2);
    h1 = std::sqrt(L2 + H1s);
    double G = 0;
    const int np = 256;
    for (int i = 0; i < np; ++i) {
        const double a = -1.0 + 2.0 * i / np, b = -1.0 + 2.0 * (i + 1) / np;
        for (size_t q = 0; q < g.pts.size(); ++q) {
            const double x = 0.5 * (a + b) + 0.5 * g.pts[q] * (b - a);
            const double gv = exact_gamma0(x);
            G += 0.5 * (b - a) * g.wts[q] * gv * gv;
        }
    }
    gnorm = std::sqrt(G);
}

} // namespace

ConvergeTable run_convergence(const std::string& problem, int label_min,
                              int label_max, double eps, double tol) {
    if (label_min < 4 || label_min % 2 != 0)
        throw std::invalid_argument("run_convergence: label must be an even number >= 4");
    ConvergeTable t;
    t.problem = problem;
    t.has_gamma = problem == "limit-coupled" || problem == "eps-coupled" ||
                  problem == "dislocation";
    const bool dislocation = problem == "dislocation";
    const ExactSolution exact =
        dislocation ? dislocation_exact() : manufactured_exact();
    for (int label = label_min; label <= label_max; label *= 2) {
        const int n = label / 2;
        const StationaryResult res = solve_problem(problem, n, eps, tol);
        ErrorReport er = error_norms(res.mesh, res.dofs, res.z, exact);
        ConvergeRow row;
        row.h = er.h;
        row.l2_u = er.l2_u;
        row.h1_u = er.h1_u;
        row.l2_gamma = dislocation && res.dofs.with_gamma
                           ? gamma_field_norm(res.mesh, res.dofs, res.z)
                           : er.l2_gamma;
        row.ndofs = er.ndofs;
        if (!t.rows.empty()) {
            const ConvergeRow& p = t.rows.back();
            row.has_rates = true;
            row.rate_l2 = std::log2(p.l2_u / row.l2_u);
            row.rate_h1 = std::log2(p.h1_u / row.h1_u);
            if (t.has_gamma && row.l2_gamma > 0.0 && p.l2_gamma > 0.0)
                row.rate_gamma = std::log2(p.l2_gamma / row.l2_gamma);
        }
        t.rows.push_back(row);
    }
    if (problem == "limit-uncoupled" || problem == "limit-coupled") {
        t.has_norms = true;
        reference_norms(t.norm_l2, t.norm_h1, t.norm_gamma);
    }
    return t;
}

void write_convergence_csv(const ConvergeTable& t, std::ostream& out) {
    out << "h,l2_u,h1_u,l2_gamma,ndofs,rate_l2_u,rate_h1_u,rate_l2_gamma\n";
    for (const auto& r : t.rows) {
        out << fmt(r.h) << ',' << fmt(r.l2_u) << ',' << fmt(r.h1_u) << ','
            << fmt(r.l2_gamma) << ',' << r.ndofs << ',';
        if (r.has_rates)
            out << fmt(r.rate_l2) << ',' << fmt(r.rate_h1) << ','
                << fmt(r.rate_gamma);
        else
            out << ",,";
        out << '\n';
    }
    if (t.has_norms) {
        out << "norms," << fmt(t.norm_l2) << ',' << fmt(t.norm_h1) << ','
            << fmt(t.norm_gamma) << ",,,,\n";
    }
}

SolveDump run_solve(const std::string& problem, int label, double eps, double tol) {
    SolveDump d{solve_problem(problem, label / 2, eps, tol)};
    return d;
}

void write_grid_csv(const StationaryResult& r, std::ostream& out) {
    out << "x,y,u1,u2,side\n";
    const auto& mesh = r.mesh;
    const auto& dofs = r.dofs;
    for (int iy = 0; iy < dofs.nyn; ++iy) {
        const double y = mesh.ynodes[iy];
        const bool iface = dofs.sharp && iy == dofs.interface_node_row;
        for (int ix = 0; ix < dofs.nxn; ++ix) {
            const double x = mesh.xs[ix];
            if (iface) {
                out << fmt(x) << ',' << fmt(y) << ','
                    << fmt(r.z[dofs.u1(ix, iy, true)]) << ','
                    << fmt(r.z[dofs.u2(ix, iy)]) << ",-1\n";
            }
            const int side = y > 0.0 ? 1 : (y < 0.0 ? -1 : 1);
            out << fmt(x) << ',' << fmt(y) << ','
                << fmt(r.z[dofs.u1(ix, iy, false)]) << ','
                << fmt(r.z[dofs.u2(ix, iy)]) << ',' << side << '\n';
        }
    }
}

void write_interface_csv(const StationaryResult& r, std::ostream& out) {
    out << "x,jump_u1,gamma\n";
    const auto& mesh = r.mesh;
    const auto& dofs = r.dofs;
    for (int ix = 0; ix < dofs.nxn; ++ix) {
        const double x = mesh.xs[ix];
        double jump = 0.0;
        if (dofs.sharp) {
            jump = r.z[dofs.u1(ix, dofs.interface_node_row, false)] -
                   r.z[dofs.u1(ix, dofs.interface_node_row, true)];
        }
        const double g = dofs.with_gamma ? r.z[dofs.gdof(ix)] : 0.0;
        out << fmt(x) << ',' << fmt(jump) << ',' << fmt(g) << '\n';
    }
}

EvolveResult run_evolve_problem(const std::string& problem, int label, double eps,
                                double dt, double tfinal) {
    const Material mat;
    TimeConfig cfg;
    cfg.dt = dt;
    cfg.T = tfinal;
    const BodyForce f = [](double x, double y, int) -> std::array<double, 2> {
        return {0.0, std::sin(kPi * x) * std::cos(kPi * y / 2.0)};
    };
    const LineFunc f0 = [](double) { return 0.0; };
    double e = 0.0;
    bool coupled = true;
    if (problem == "limit-coupled")
        e = 0.0;
    else if (problem == "eps-coupled")
        e = eps;
    else if (problem == "limit-uncoupled")
        coupled = false; // slip-frozen dynamics on the sharp mesh
    else if (problem == "eps-uncoupled") {
        e = eps;
        coupled = false;
    } else
        throw std::invalid_argument("run_evolve_problem: unknown problem " + problem);
    return run_evolution(label / 2, e, mat, coupled, &f, &f0, nullptr, nullptr,
                         nullptr, cfg);
}

void write_trajectory_csv(const EvolveResult& r, std::ostream& out) {
    out << "t,kinetic,potential,dissipation,work,balance,probe_u1,probe_u2,probe_gamma\n";
    for (const auto& row : r.rows) {
        out << fmt(row.t) << ',' << fmt(row.kinetic) << ',' << fmt(row.potential)
            << ',' << fmt(row.dissipation) << ',' << fmt(row.work) << ','
            << fmt(row.balance) << ',' << fmt(row.probe_u1) << ','
            << fmt(row.probe_u2) << ',' << fmt(row.probe_gamma) << '\n';
    }
}

namespace {

bool verify_poincare(unsigned seed, std::ostream& out) {
    out << "check,eps,case,lhs,rhs,pass\n";
    std::mt19937 rng(seed);
    bool ok = true;
    const std::vector<double> eps_list = {0.2, 0.1, 0.05, 0.01};
    for (double eps : eps_list) {
        for (int c = 0; c < 100; ++c) {
            const ScalarField f = random_vanishing_field(rng);
            const PoincareResult r = poincare_check(f, eps);
            ok = ok && r.pass;
            out << "poincare," << fmt(eps) << ',' << c << ',' << fmt(r.lhs)
                << ',' << fmt(r.rhs) << ',' << (r.pass ? 1 : 0) << '\n';
        }
    }
    return ok;
}

bool verify_coercivity(unsigned seed, std::ostream& out) {
    out << "check,quantity,value,bound,pass\n";
    const Material mat;
    const double C = coercivity_frozen_constant();
    const CoercivitySuite s =
        coercivity_suite(seed, 50, {0.2, 0.1, 0.05}, mat);
    bool ok = true;
    const double ratios[3] = {s.max_ratio1, s.max_ratio2, s.max_ratio3};
    for (int i = 0; i < 3; ++i) {
        const bool p = ratios[i] <= C;
        ok = ok && p;
        out << "coercivity,max_ratio" << (i + 1) << ',' << fmt(ratios[i]) << ','
            << fmt(C) << ',' << (p ? 1 : 0) << '\n';
    }
    return ok;
}

SidedVectorField manufactured_sided() {
    SidedVectorField u;
    u.value = [](double x, double y, int s) { return exact_u0(x, y, s); };
    u.grad = [](double x, double y, int s) { return exact_grad_u0(x, y, s); };
    return u;
}

bool verify_gamma(std::ostream& out) {
    out << "check,eps,energy_eps,energy_limit,gap,pass\n";
    const Material mat;
    const SidedVectorField u = manufactured_sided();
    const LineFunc g = [](double x) { return exact_gamma0(x); };
    const LineFunc gx = [](double x) { return exact_gamma0_x(x); };
    const auto rows = gamma_limit_audit(u, g, gx, mat, {0.2, 0.1, 0.05, 0.025});
    bool ok = true;
    for (size_t i = 0; i < rows.size(); ++i) {
        const bool dec = i == 0 || rows[i].gap < rows[i - 1].gap;
        ok = ok && dec;
        out << "gamma," << fmt(rows[i].eps) << ',' << fmt(rows[i].energy_eps)
            << ',' << fmt(rows[i].energy_limit) << ',' << fmt(rows[i].gap)
            << ',' << (dec ? 1 : 0) << '\n';
    }
    ok = ok && rows.back().gap < rows.front().gap / 4.0;
    return ok;
}

PlasticityInput default_plasticity_input() {
    PlasticityInput in;
    in.beta = 0.7;
    in.nu = 0.3;
    in.eta_prime = [](double g) { return 2.0 * g; };
    in.gamma = [](double t, double x) { return std::exp(t) * std::sin(x) + 2.0; };
    in.gamma_t = [](double t, double x) { return std::exp(t) * std::sin(x); };
    in.gamma_x = [](double t, double x) { return std::exp(t) * std::cos(x); };
    in.gamma_xx = [](double t, double x) { return -std::exp(t) * std::sin(x); };
    in.u = [](double t, double x, double y) -> Vec3 {
        return {std::exp(0.2 * t) * std::sin(x + 0.5 * y),
                std::cos(0.3 * t) * std::cos(x) * std::sin(y), 0.0};
    };
    const double beta = in.beta, nu = in.nu;
    auto gamma = in.gamma;
    auto gamma_t = in.gamma_t;
    auto gamma_x = in.gamma_x;
    auto gamma_xx = in.gamma_xx;
    auto etap = in.eta_prime;
    in.T = [=](double t, double x, double y) -> Mat3 {
        const double gx = gamma_x(t, x);
        // Shear component consistent with the slip law
        //   gamma_t + beta gx^2 (eta' - nu gamma_xx - T12) = 0.
        const double T12 = etap(gamma(t, x)) - nu * gamma_xx(t, x) +
                           gamma_t(t, x) / (beta * gx * gx);
        Mat3 T{};
        T[0][0] = 2.0 + std::cos(0.2 * x * t);
        T[1][1] = 1.5 + 0.1 * std::sin(x + y);
        T[2][2] = 1.0;
        T[0][1] = T[1][0] = T12;
        T[0][2] = T[2][0] = 0.1 * std::sin(0.5 * x + y);
        T[1][2] = T[2][1] = 0.05 * std::cos(x - 0.3 * y);
        return T;
    };
    return in;
}

Grid3 plasticity_grid(int level) {
    Grid3 g;
    const int m = 1 << level;
    g.nt = 8 * m + 1;
    g.nx = 16 * m + 1;
    g.ny = 8 * m + 1;
    g.t0 = 0.0;
    g.t1 = 0.5;
    g.x0 = 0.2;
    g.x1 = 1.2;
    g.y0 = 0.0;
    g.y1 = 0.4;
    return g;
}

bool verify_plasticity(std::ostream& out) {
    out << "check,level,residual,ratio,pass\n";
    const PlasticityInput in = default_plasticity_input();
    std::vector<double> res;
    bool ok = true;
    for (int lvl = 0; lvl < 4; ++lvl)
        res.push_back(plasticity_lemma_residual(in, plasticity_grid(lvl)));
    for (size_t i = 0; i < res.size(); ++i) {
        double ratio = i == 0 ? 0.0 : res[i - 1] / res[i];
        const bool p = i == 0 || (ratio > 3.5 && ratio < 4.5);
        ok = ok && p;
        out << "plasticity," << i << ',' << fmt(res[i]) << ',' << fmt(ratio)
            << ',' << (p ? 1 : 0) << '\n';
    }
    const double vd = plasticity_vd_mismatch(in, plasticity_grid(1));
    const bool vp = vd < 1e-10;
    ok = ok && vp;
    out << "plasticity,vd_closed_form," << fmt(vd) << ",1.000000e-10,"
        << (vp ? 1 : 0) << '\n';
    return ok;
}

bool verify_energy(std::ostream& out) {
    out << "check,quantity,value,bound,pass\n";
    const Material mat;
    bool ok = true;
    // Conservation with the slip frozen and no forcing.
    {
        TimeConfig cfg;
        cfg.dt = 0.05;
        cfg.T = 5.0;
        Evolver ev(4, 0.0, mat, false, nullptr, nullptr, cfg);
        const BodyForce u0 = [](double x, double y, int) -> std::array<double, 2> {
            return {0.0, 0.1 * std::sin(kPi * x) * std::sin(kPi * (y + 1.0) / 2.0)};
        };
        EvolutionState s = ev.init_state(&u0, nullptr, nullptr);
        const double e0 = ev.kinetic_energy(s) + ev.potential_energy(s);
        double maxdrift = 0.0;
        for (int k = 0; k < 100; ++k) {
            ev.step(s);
            maxdrift = std::max(
                maxdrift,
                std::abs(ev.kinetic_energy(s) + ev.potential_energy(s) - e0));
        }
        const bool p = maxdrift / e0 < 1e-10;
        ok = ok && p;
        out << "energy,conservation_drift," << fmt(maxdrift / e0)
            << ",1.000000e-10," << (p ? 1 : 0) << '\n';
    }
    // Nonnegative dissipation increments on a forced coupled run.
    {
        const EvolveResult r = run_evolve_problem("limit-coupled", 8, 0.0, 0.05, 2.0);
        double mind = 0.0;
        for (size_t i = 1; i < r.rows.size(); ++i)
            mind = std::min(mind, r.rows[i].dissipation - r.rows[i - 1].dissipation);
        const bool p = mind >= -1e-14;
        ok = ok && p;
        out << "energy,min_dissipation_increment," << fmt(mind)
            << ",-1.000000e-14," << (p ? 1 : 0) << '\n';
    }
    return ok;
}

} // namespace

bool verify_suite(const std::string& suite, unsigned seed, std::ostream& out) {
    if (suite == "poincare") return verify_poincare(seed, out);
    if (suite == "coercivity") return verify_coercivity(seed + 1, out);
    if (suite == "gamma") return verify_gamma(out);
    if (suite == "plasticity") return verify_plasticity(out);
    if (suite == "energy") return verify_energy(out);
    throw std::invalid_argument("unknown verify suite: " + suite);
}

const std::vector<double>& ReferenceTables::uncoupled_l2() {
    static const std::vector<double> v = {1.684735e-05, 2.098734e-06,
                                          2.617986e-07, 3.268957e-08,
                                          4.084190e-09, 5.154866e-10};
    return v;
}
const std::vector<double>& ReferenceTables::uncoupled_h1() {
    static const std::vector<double> v = {4.402589e-04, 1.091350e-04,
                                          2.718018e-05, 6.783206e-06,
                                          1.694404e-06, 4.234319e-07};
    return v;
}
const std::vector<double>& ReferenceTables::coupled_l2() {
    static const std::vector<double> v = {1.683317e-05, 2.098047e-06,
                                          2.617686e-07, 3.268836e-08,
                                          4.084169e-09, 5.161811e-10};
    return v;
}
const std::vector<double>& ReferenceTables::coupled_h1() {
    static const std::vector<double> v = {4.403035e-04, 1.091376e-04,
                                          2.718031e-05, 6.783211e-06,
                                          1.694404e-06, 4.234319e-07};
    return v;
}
const std::vector<double>& ReferenceTables::coupled_gamma() {
    static const std::vector<double> v = {1.597969e-05, 2.077018e-06,
                                          2.646097e-07, 3.338419e-08,
                                          4.191933e-09, 5.258066e-10};
    return v;
}
const std::vector<double>& ReferenceTables::dislocation_l2() {
    static const std::vector<double> v = {1.226581e-02, 6.141691e-03,
                                          3.073164e-03, 1.537180e-03,
                                          7.687419e-04, 3.844092e-04};
    return v;
}
const std::vector<double>& ReferenceTables::dislocation_gamma_norm() {
    static const std::vector<double> v = {7.005017, 9.835010, 13.85832,
                                          19.56296, 27.64101, 39.07248};
    return v;
}

} // namespace ffem
