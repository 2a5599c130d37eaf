#pragma once

#include <memory>
#include <vector>

#include <Eigen/SparseCholesky>

#include "faultfem/fem_core.hpp"
#include "faultfem/solvers.hpp"

namespace ffem {

struct TimeConfig {
    double dt = 0.01;
    double T = 1.0;
    // Newmark parameters for the displacement; the slip uses the trapezoidal
    // rule.  delta > 1/2 with beta = (delta + 1/2)^2 / 4 gives numerical
    // damping (used for relaxation to the stationary state).
    double newmark_beta = 0.25;
    double newmark_delta = 0.5;
    double tol = 1e-12;
};

struct EvolutionState {
    double t = 0.0;
    Eigen::VectorXd z; // free DOFs: displacement and slip entries combined
    Eigen::VectorXd v; // velocity (displacement entries only)
    Eigen::VectorXd a; // acceleration (displacement entries only)
};

struct EnergyAudit {
    double kinetic = 0.0;
    double potential = 0.0;
    double diss_increment = 0.0; // >= 0
    double work_increment = 0.0;
    double balance_residual = 0.0;
};

// Monolithic time integrator for the coupled (or slip-frozen) dynamics on
// either the sharp-interface mesh (eps = 0) or a strip mesh (eps > 0), with
// homogeneous Dirichlet data at y = +-1 and traction-free sides.
class Evolver {
public:
    Evolver(int n, double eps, const Material& mat, bool coupled_gamma,
            const BodyForce* f, const LineFunc* f0, TimeConfig cfg);

    // Nodal initialization.  u0/v0 may be null (zero).  gamma0 initializes
    // slip DOFs (coupled runs) or provides frozen slip data.  On strip
    // meshes a side-aware u0 is lifted across the strip (affine pullback
    // outside, linear interpolation in y inside).
    EvolutionState init_state(const BodyForce* u0, const BodyForce* v0,
                              const LineFunc* gamma0);

    // One Newmark / trapezoidal step; dt_override != 0 replaces cfg.dt
    // (negative values step backward; slip-frozen runs only).
    void step(EvolutionState& s, double dt_override = 0.0);

    EnergyAudit audit(const EvolutionState& before, const EvolutionState& after) const;
    double kinetic_energy(const EvolutionState& s) const;
    double potential_energy(const EvolutionState& s) const;

    const StructuredMesh& mesh() const { return mesh_; }
    const DofMap& dofs() const { return dofs_; }
    Eigen::VectorXd full_vector(const EvolutionState& s) const { return red_.expand(s.z); }

private:
    void refactor(double dt);

    StructuredMesh mesh_;
    DofMap dofs_;
    Material mat_;
    bool coupled_ = false;
    TimeConfig cfg_;
    ReducedSystem red_;         // stiffness K and static load F on free DOFs
    Eigen::SparseMatrix<double> M_; // displacement mass (free)
    Eigen::SparseMatrix<double> D_; // slip damping (1/beta) mass (free)
    Eigen::VectorXd is_gamma_;  // 1 on slip DOFs, 0 on displacement DOFs
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> lhs_;
    double lhs_dt_ = 0.0;
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> mass_llt_;
};

struct TrajectoryRow {
    double t, kinetic, potential, dissipation, work, balance;
    double probe_u1, probe_u2, probe_gamma;
};

struct EvolveResult {
    std::vector<TrajectoryRow> rows;
    EvolutionState final_state;
};

// Drive an evolution run and collect the per-step energy audit.  The probe
// samples u at (0.5, 0.5) and the slip at x = 0.5.
EvolveResult run_evolution(int n, double eps, const Material& mat,
                           bool coupled_gamma, const BodyForce* f,
                           const LineFunc* f0, const BodyForce* u0,
                           const BodyForce* v0, const LineFunc* gamma0,
                           TimeConfig cfg);

} // namespace ffem
