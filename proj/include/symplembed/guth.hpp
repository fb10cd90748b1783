#pragma once

#include "symplembed/maps.hpp"
#include "symplembed/smoothstep.hpp"

namespace symplembed {

// Slice parameter: unique t in (0,1) with t R^2 / sqrt(2t^2 - 2t + 1) = 1/9.
// The auxiliary map t -> t/sqrt(2t^2-2t+1) is strictly increasing on (0,1),
// so bisection + Newton polish is exact to ~1e-15. R must exceed 1/3.
double solveT(double R);
double solveTResidual(double R, double t);

// Closed-form frame data for the plane V_R and the linear symplectomorphism
// ell_R . L_R of Step 1.
struct GuthFrame {
    double R = 0, t = 0, lambda = 0, mu = 0;
    double shadowRadius = 0;  // radius S(R) of the (x2,y2)-projection disk
    double rho = 0;           // 1 + sum of half-axes of the (x1,y1)-shadow
    Mat M;                    // the (redefined) L_R = ell_R . L_R, 4x4 symplectic
    Mat Minv;
    Vec f1, f2;      // orthonormal basis of V_R
    Vec f1p, f2p;    // symplectic basis of the omega-complement
    double centralSliceRadius = 0;  // radius of the central horizontal slice disk
};

GuthFrame buildGuthFrame(double R);
MapPtr buildLR(double R);  // the linear map as a SmoothMap

// 1-periodic spike f_R: f(k)=0, f'(k)=100 rho, f' >= -0.1, |f| <= 1e-4,
// jointly smooth in (rho, x).
struct SpikeFunction {
    double rho = 1, w = 0, D = 0;
    explicit SpikeFunction(double rho_);
    double value(double x) const;
    double d1(double x) const;
    double d2(double x) const;
};

// Psi_R(x, y) = (x + f(x), y / (1 + f'(x))): the fiberwise-linear lift of the
// circle diffeomorphism Phi_R(x) = x + f_R(x); det J = 1 exactly.
MapPtr liftShear(const SpikeFunction& s);

// measured projection radius of the (x2,y2)-shadow disk; guaranteed <= sqrt(72) R^2
double projectionRadiusBound(double R);

// i_R : B^{2(n-1)}(R) -> Sigma x B^{2(n-2)}(10 R^2), n >= 3.
// n = 3 core: torus_quotient( (Psi_R (x) Id) . (ell_R . L_R) ); larger n padded
// through B^{2(n-1)}(R) in B^{2(n-3)}(R) x B^4(R).
MapPtr buildGuthFamily(int n, double R);

// smooth family over R in (1/3, inf)
EmbeddingFamily guthFamily(int n, double Rlo, double Rhi);

}  // namespace symplembed
