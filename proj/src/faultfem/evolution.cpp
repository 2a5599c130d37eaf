#include "faultfem/evolution.hpp"

#include <cmath>
#include <stdexcept>

namespace ffem {

namespace {

// Lift a side-aware displacement callable onto a strip mesh node: affine
// pullback of each bulk band, linear interpolation across the strip.
std::array<double, 2> lifted_node_value(const BodyForce& u, double eps,
                                        double x, double y) {
    if (eps <= 0.0) {
        return u(x, y, y >= 0.0 ? 1 : -1);
    }
    const double h = eps / 2.0;
    if (y >= h) {
        const double Y = (y - h) / (1.0 - h);
        return u(x, Y, 1);
    }
    if (y <= -h) {
        const double Y = (y + h) / (1.0 - h);
        return u(x, Y, -1);
    }
    const auto up = u(x, 0.0, 1);
    const auto um = u(x, 0.0, -1);
    const double wp = 0.5 + y / eps;
    const double wm = 0.5 - y / eps;
    return {wp * up[0] + wm * um[0], up[1]};
}

} // namespace

Evolver::Evolver(int n, double eps, const Material& mat, bool coupled_gamma,
                 const BodyForce* f, const LineFunc* f0, TimeConfig cfg)
    : mat_(mat), coupled_(coupled_gamma), cfg_(cfg) {
    mesh_ = build_mesh(n, FaultGeometry{eps});
    dofs_ = build_dof_map(mesh_, coupled_gamma);

    SparseSystem ksys(dofs_.ndof);
    assemble_bulk_elasticity(mesh_, dofs_, mat_, !mesh_.sharp(), ksys);
    if (mesh_.sharp())
        assemble_interface_coupling(mesh_, dofs_, mat_, nullptr, ksys);
    else
        assemble_eps_fault_coupling(mesh_, dofs_, mat_, nullptr, ksys);
    assemble_load(mesh_, dofs_, mat_, f, coupled_gamma ? f0 : nullptr, ksys);
    const Eigen::VectorXd zero_bc = Eigen::VectorXd::Zero(dofs_.ndof);
    red_ = apply_dirichlet(ksys, dofs_.dirichlet, zero_bc);

    SparseSystem msys(dofs_.ndof);
    assemble_mass(mesh_, dofs_, mat_, msys);
    M_ = apply_dirichlet(msys, dofs_.dirichlet, zero_bc).K;

    SparseSystem dsys(dofs_.ndof);
    if (coupled_gamma)
        assemble_gamma_mass(mesh_, dofs_, 1.0 / mat_.beta, dsys);
    D_ = apply_dirichlet(dsys, dofs_.dirichlet, zero_bc).K;

    const int nf = static_cast<int>(red_.free2global.size());
    is_gamma_ = Eigen::VectorXd::Zero(nf);
    for (int i = 0; i < nf; ++i)
        if (red_.free2global[i] >= dofs_.gamma_offset && dofs_.with_gamma)
            is_gamma_[i] = 1.0;

    // Mass factorization for the initial acceleration: pad the slip diagonal
    // so the factor exists; slip rows carry zero right-hand side.
    Eigen::SparseMatrix<double> mfact = M_;
    if (dofs_.with_gamma) {
        Eigen::SparseMatrix<double> pad(nf, nf);
        std::vector<Eigen::Triplet<double>> tp;
        for (int i = 0; i < nf; ++i)
            if (is_gamma_[i] > 0.0) tp.emplace_back(i, i, 1.0);
        pad.setFromTriplets(tp.begin(), tp.end());
        mfact = M_ + pad;
    }
    mass_llt_.compute(mfact);
    if (mass_llt_.info() != Eigen::Success)
        throw std::runtime_error("Evolver: mass factorization failed");
}

EvolutionState Evolver::init_state(const BodyForce* u0, const BodyForce* v0,
                                   const LineFunc* gamma0) {
    const int nf = static_cast<int>(red_.free2global.size());
    EvolutionState s;
    s.t = 0.0;
    s.z = Eigen::VectorXd::Zero(nf);
    s.v = Eigen::VectorXd::Zero(nf);
    s.a = Eigen::VectorXd::Zero(nf);

    for (int i = 0; i < nf; ++i) {
        const int gd = red_.free2global[i];
        if (dofs_.with_gamma && gd >= dofs_.gamma_offset) {
            if (gamma0) s.z[i] = (*gamma0)(mesh_.xs[gd - dofs_.gamma_offset]);
            continue;
        }
        int comp, ix, iy;
        bool below = false;
        if (gd >= dofs_.u2_offset) {
            comp = 1;
            ix = (gd - dofs_.u2_offset) % dofs_.nxn;
            iy = (gd - dofs_.u2_offset) / dofs_.nxn;
        } else if (dofs_.sharp && gd >= dofs_.ngrid) {
            comp = 0;
            ix = gd - dofs_.ngrid;
            iy = dofs_.interface_node_row;
            below = true;
        } else {
            comp = 0;
            ix = gd % dofs_.nxn;
            iy = gd / dofs_.nxn;
        }
        const double x = mesh_.xs[ix];
        const double y = mesh_.ynodes[iy];
        if (u0) {
            if (mesh_.sharp()) {
                int side = y > 0.0 ? 1 : (y < 0.0 ? -1 : (below ? -1 : 1));
                s.z[i] = (*u0)(x, y, side)[comp];
            } else {
                s.z[i] = lifted_node_value(*u0, mesh_.eps, x, y)[comp];
            }
        }
        if (v0) {
            if (mesh_.sharp()) {
                int side = y > 0.0 ? 1 : (y < 0.0 ? -1 : (below ? -1 : 1));
                s.v[i] = (*v0)(x, y, side)[comp];
            } else {
                s.v[i] = lifted_node_value(*v0, mesh_.eps, x, y)[comp];
            }
        }
    }

    // Initial acceleration from the displacement rows of the momentum balance.
    Eigen::VectorXd rhs =
        (red_.F - red_.K * s.z).cwiseProduct(Eigen::VectorXd::Ones(nf) - is_gamma_);
    s.a = mass_llt_.solve(rhs).cwiseProduct(Eigen::VectorXd::Ones(nf) - is_gamma_);
    return s;
}

void Evolver::refactor(double dt) {
    const double b = cfg_.newmark_beta;
    const double c0 = 1.0 / (b * dt * dt);
    Eigen::SparseMatrix<double> lhs = red_.K + c0 * M_;
    if (dofs_.with_gamma) lhs = lhs + (2.0 / dt) * D_;
    lhs_.compute(lhs);
    if (lhs_.info() != Eigen::Success)
        throw std::runtime_error("Evolver: step factorization failed");
    lhs_dt_ = dt;
}

void Evolver::step(EvolutionState& s, double dt_override) {
    const double dt = dt_override != 0.0 ? dt_override : cfg_.dt;
    if (dt != lhs_dt_) refactor(dt);
    const double b = cfg_.newmark_beta;
    const double d = cfg_.newmark_delta;
    const double c0 = 1.0 / (b * dt * dt);
    const double c1 = 1.0 / (b * dt);
    const double c2 = 1.0 / (2.0 * b) - 1.0;
    const int nf = static_cast<int>(s.z.size());
    const Eigen::VectorXd mu = Eigen::VectorXd::Ones(nf) - is_gamma_;

    Eigen::VectorXd rhs =
        (red_.F + M_ * (c0 * s.z + c1 * s.v + c2 * s.a)).cwiseProduct(mu);
    if (dofs_.with_gamma) {
        Eigen::VectorXd grhs = 2.0 * red_.F + (2.0 / dt) * (D_ * s.z) - red_.K * s.z;
        rhs += grhs.cwiseProduct(is_gamma_);
    }
    Eigen::VectorXd znew = lhs_.solve(rhs);
    Eigen::VectorXd anew =
        (c0 * (znew - s.z) - c1 * s.v - c2 * s.a).cwiseProduct(mu);
    s.v = (s.v + dt * ((1.0 - d) * s.a + d * anew)).cwiseProduct(mu);
    s.a = anew;
    s.z = znew;
    s.t += dt;
}

double Evolver::kinetic_energy(const EvolutionState& s) const {
    return 0.5 * s.v.dot(M_ * s.v);
}

double Evolver::potential_energy(const EvolutionState& s) const {
    return 0.5 * s.z.dot(red_.K * s.z);
}

EnergyAudit Evolver::audit(const EvolutionState& before,
                           const EvolutionState& after) const {
    EnergyAudit a;
    a.kinetic = kinetic_energy(after);
    a.potential = potential_energy(after);
    const double dt = after.t - before.t;
    const Eigen::VectorXd dz = after.z - before.z;
    if (dofs_.with_gamma && dt != 0.0) {
        const Eigen::VectorXd dg = dz.cwiseProduct(is_gamma_);
        a.diss_increment = dg.dot(D_ * dg) / dt;
    }
    a.work_increment = red_.F.dot(dz);
    const double e0 = 0.5 * before.v.dot(M_ * before.v) +
                      0.5 * before.z.dot(red_.K * before.z);
    a.balance_residual = (a.kinetic + a.potential - e0) + a.diss_increment -
                         a.work_increment;
    return a;
}

EvolveResult run_evolution(int n, double eps, const Material& mat,
                           bool coupled_gamma, const BodyForce* f,
                           const LineFunc* f0, const BodyForce* u0,
                           const BodyForce* v0, const LineFunc* gamma0,
                           TimeConfig cfg) {
    Evolver ev(n, eps, mat, coupled_gamma, f, f0, cfg);
    EvolutionState s = ev.init_state(u0, v0, gamma0);
    EvolveResult out;
    const int nsteps = static_cast<int>(std::lround(cfg.T / cfg.dt));
    double diss = 0.0, work = 0.0;
    auto record = [&](const EnergyAudit* a) {
        TrajectoryRow r{};
        r.t = s.t;
        r.kinetic = ev.kinetic_energy(s);
        r.potential = ev.potential_energy(s);
        r.dissipation = diss;
        r.work = work;
        r.balance = a ? a->balance_residual : 0.0;
        const Eigen::VectorXd full = ev.full_vector(s);
        const auto up = eval_displacement(ev.mesh(), ev.dofs(), full, 0.5, 0.5, 1);
        r.probe_u1 = up[0];
        r.probe_u2 = up[1];
        r.probe_gamma = ev.dofs().with_gamma
                            ? eval_gamma(ev.mesh(), ev.dofs(), full, 0.5)
                            : 0.0;
        out.rows.push_back(r);
    };
    record(nullptr);
    for (int k = 0; k < nsteps; ++k) {
        EvolutionState prev = s;
        ev.step(s);
        const EnergyAudit a = ev.audit(prev, s);
        diss += a.diss_increment;
        work += a.work_increment;
        record(&a);
    }
    out.final_state = s;
    return out;
}

} // namespace ffem
