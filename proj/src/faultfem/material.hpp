#pragma once

namespace ffem {

// Isotropic elastic moduli plus the fault-rheology coefficients.
// Defaults are the parameter set used throughout the convergence studies.
struct Material {
    double mu = 1.0;       // shear modulus
    double lambda = 2.0;   // bulk (Lame) modulus
    double rho = 1.0;      // density
    double beta = 1.0;     // slip mobility
    double eta_hat = 2.0;  // slip stiffness
    double nu = 0.0;       // slip-gradient coefficient
};

} // namespace ffem
