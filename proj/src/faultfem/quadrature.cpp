#include "faultfem/quadrature.hpp"

#include <stdexcept>

namespace ffem {

GaussRule gauss_rule(int order) {
    GaussRule r;
    switch (order) {
    case 1:
        r.pts = {0.0};
        r.wts = {2.0};
        break;
    case 2:
        r.pts = {-0.5773502691896257645, 0.5773502691896257645};
        r.wts = {1.0, 1.0};
        break;
    case 3:
        r.pts = {-0.7745966692414833770, 0.0, 0.7745966692414833770};
        r.wts = {0.5555555555555555556, 0.8888888888888888889,
                 0.5555555555555555556};
        break;
    case 4:
        r.pts = {-0.8611363115940525752, -0.3399810435848562648,
                 0.3399810435848562648, 0.8611363115940525752};
        r.wts = {0.3478548451374538574, 0.6521451548625461426,
                 0.6521451548625461426, 0.3478548451374538574};
        break;
    case 5:
        r.pts = {-0.9061798459386639928, -0.5384693101056830910, 0.0,
                 0.5384693101056830910, 0.9061798459386639928};
        r.wts = {0.2369268850561890875, 0.4786286704993664680,
                 0.5688888888888888889, 0.4786286704993664680,
                 0.2369268850561890875};
        break;
    case 6:
        r.pts = {-0.9324695142031520278, -0.6612093864662645137,
                 -0.2386191860831969086, 0.2386191860831969086,
                 0.6612093864662645137, 0.9324695142031520278};
        r.wts = {0.1713244923791703450, 0.3607615730481386076,
                 0.4679139345726910474, 0.4679139345726910474,
                 0.3607615730481386076, 0.1713244923791703450};
        break;
    case 7:
        r.pts = {-0.9491079123427585245, -0.7415311855993944399,
                 -0.4058451513773971669, 0.0, 0.4058451513773971669,
                 0.7415311855993944399, 0.9491079123427585245};
        r.wts = {0.1294849661688696933, 0.2797053914892766679,
                 0.3818300505051189449, 0.4179591836734693878,
                 0.3818300505051189449, 0.2797053914892766679,
                 0.1294849661688696933};
        break;
    default:
        throw std::invalid_argument("gauss_rule: order must be in 1..7");
    }
    return r;
}

void shape1d(double t, double N[3], double dN[3]) {
    N[0] = 0.5 * t * (t - 1.0);
    N[1] = 1.0 - t * t;
    N[2] = 0.5 * t * (t + 1.0);
    dN[0] = t - 0.5;
    dN[1] = -2.0 * t;
    dN[2] = t + 0.5;
}

void q2_shape(double xi, double eta, double N[9], double dNx[9], double dNy[9]) {
    double Nx[3], dNxi[3], Ny[3], dNeta[3];
    shape1d(xi, Nx, dNxi);
    shape1d(eta, Ny, dNeta);
    for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < 3; ++i) {
            N[3 * j + i] = Ny[j] * Nx[i];
            dNx[3 * j + i] = Ny[j] * dNxi[i];
            dNy[3 * j + i] = dNeta[j] * Nx[i];
        }
    }
}

} // namespace ffem
