#pragma once

#include <vector>

namespace ffem {

// 1D Gauss-Legendre rule on [-1,1]; tensorize for area integrals.
struct GaussRule {
    std::vector<double> pts;
    std::vector<double> wts;
};

// order = points per direction, supported range 1..7.
// Throws std::invalid_argument otherwise.
GaussRule gauss_rule(int order);

// 1D quadratic Lagrange basis on [-1,1] with nodes {-1,0,1}.
void shape1d(double t, double N[3], double dN[3]);

// 9-node biquadratic basis on the reference square [-1,1]^2.
// Node ordering is row-major: index 3*j+i for x-node i, y-node j.
void q2_shape(double xi, double eta, double N[9], double dNx[9], double dNy[9]);

} // namespace ffem
