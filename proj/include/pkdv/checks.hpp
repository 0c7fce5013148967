#pragma once

// Measured quantities behind the verification suites and the acceptance
// report. Each returns the number that gets compared with a tolerance.

#include <string>
#include <vector>

#include "pkdv/kdv.hpp"

namespace pkdv::checks {

// Largest error of (kappa, c) for rho = 1 and rho = 5 against the exact values.
double spectral_constants();
// sup ||T|^2 + |R|^2 - 1| over 2001 points in [-10, 10], also for the
// epsilon family at eps = 0.1 and 0.5.
double unitarity();
// |circle residue of T at i kappa - i c| for rho = 1.
double residue_T();
// max |Res(R_eps, i kappa_+-) -+ Res(T_eps, i kappa_+-)| at eps = 0.5.
double residue_plus_minus();
// T = ik/m and R = -(conj m + m)/(2m) on a real grid avoiding +-1.
double m_function_defect();
// max |-f'' + Q f - k^2 f| for f_+ over [0, 10], k in {0.7, 1.3}.
double jost_residual();
// <kp_n, k_{z_m}> - delta_nm for the eps = 0.5 Blaschke triple.
double biorthogonality();
// H(1/(. - z)) f = i f(z) k_{-conj z} on the real line.
double rank_one_identity();

// |log det(I + H(phi_{x,0}))| on the production contour.
double logdet_vanishing(double x);
// Rank-one operators against 1 + (c/2 kappa) exp(-2 kappa x + 8 kappa^3 t),
// as a single column and through a full contour discretisation.
double rank_one_closed_form();
// Node halving and contour height change of log det at (-3, 0.5).
double logdet_stability();
// Determinant soliton against -2 sech^2(x - 4t) on [-5, 5] x {0, 0.5}.
double soliton_error();

struct ReconstructionReport {
    double right = 0.0;     // sup |u(x,0) - Q(x)| over x > 0 samples
    double left = 0.0;      // same over x < 0 samples
    double evenness = 0.0;  // max |u(-x,0) - u(x,0)| at 0.5, 1, 2, 5
};
// Samples at spacing `step` on [0.25, 10] and its mirror.
ReconstructionReport reconstruction(double step, const Options& o = {});

struct EpsReport {
    double err_02 = 0.0, err_01 = 0.0, ratio = 0.0;
    double two_path = 0.0;  // pure rank-3 vs contour log det at x = 1
    double block = 0.0;     // relative block-determinant defect
};
EpsReport eps_family();

// Oracle soliton at T = 1 (L = 30, N = 2^12, dt = 1e-4).
double oracle_soliton();
struct OracleReport {
    double max_err = 0.0, rms_err = 0.0;
    std::size_t count = 0;
};
// Determinant solution against the oracle at t = 0.25 over |x| <= window,
// oracle on [-L, L] with N points.
OracleReport oracle_formula(double window, double step, double L = 400.0, int N = 1 << 15);

struct BoundednessReport {
    double min_tau = 0.0, max_abs_u = 0.0;
    std::size_t samples = 0;
};
BoundednessReport boundedness(double x_step, double t_step);

}  // namespace pkdv::checks
