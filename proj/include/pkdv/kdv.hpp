#pragma once

#include <limits>
#include <string>
#include <vector>

#include "pkdv/hankel.hpp"
#include "pkdv/scattering.hpp"

namespace pkdv {

// xi_{x,t}(k) = exp(i(8k^3 t + 2kx)).
cplx xi(cplx k, double x, double t);

// phi_{x,t} = R xi - Res(R xi, i kappa)/(k - i kappa), analytic in C+.
// Evaluated as -ic(k + 2i kappa)/q(k) xi + ic (xi(k) - xi(i kappa))/(k - i kappa)
// with q(k) = k^2 + i kappa k - (1 + kappa^2), so nothing cancels near i kappa.
struct SymbolXT {
    Params params;
    double x = 0.0, t = 0.0;
    double kappa = 0.0, c = 0.0;

    cplx phi(cplx k) const;
    cplx phi_x(cplx k) const;
    cplx phi_xx(cplx k) const;
    // R xi alone: what the contour carries.
    cplx contour_symbol(cplx k) const;
    double xi_kappa() const;  // xi(i kappa) = exp(8 kappa^3 t - 2 kappa x)
};

SymbolXT symbol_xt(const Params& p, double x, double t);

// Q(x) = -2 d^2/dx^2 log tau0(|x|).
double Q_closed(double x, const Params& p);

struct Options {
    double h = 0.0;         // contour height, 0 picks automatically
    double dx_scale = 1.0;  // multiplies the automatic node spacing
    int nodes = 0;          // if > 0, spacing chosen to give about this many nodes
    bool fd_u1 = false;     // u1 by finite differences of log tau instead of analytically
    double c_shift = 0.0;   // added to the norming constant; sensitivity checks only
    bool error_estimate = true;
};

struct QuadPlan {
    double h, dx, s1, s2, stretch;  // stretch 0 = uniform nodes
    int sinh_nodes = 0;             // > 0: sinh-mapped line instead of the window
    double c_shift = 0.0;
};

QuadPlan plan_quadrature(const Params& p, double x, double t, const Options& o = {});

// Contour carries R xi; the subtracted pole becomes a rank column when the
// line passes below i kappa.
HankelData hankel_data(const Params& p, double x, double t, const QuadPlan& plan);

struct Sample {
    double x, t;
    double u, u0, u1, tau, logdet, est_error;
    double imag_defect;  // largest |Im| dropped from logdet and its x-derivative
};

Sample evaluate(const Params& p, double x, double t, const Options& o = {});
double u_total(const Params& p, double x, double t, const Options& o = {});

// Row-major over t then x. Worker count from POSITON_KDV_THREADS, else the
// hardware count; the output order never depends on it.
std::vector<Sample> evaluate_grid(const Params& p, const std::vector<double>& xs,
                                  const std::vector<double>& ts, const Options& o = {});
unsigned worker_count();

// Potentials of the epsilon family. Q_eps uses the exact rank-3 operator at |x|.
double Q_eps(const Params& p, double eps, double x);
// log det of the pure rank-3 operator at x > 0, t = 0.
double logdet_eps_rank3(const Params& p, double eps, double x);
// Contour realisation of the epsilon symbol (any x, t >= 0).
HankelData hankel_data_eps(const Params& p, double eps, double x, double t);
double u_eps(const Params& p, double eps, double x, double t);

double tau_positon(double x, double t);
double positon(double x, double t);
double positon_root(double t);
double soliton(double x, double t);
// Soliton through the determinant machinery: rank-one operator, R = 0.
HankelData hankel_data_soliton(double x, double t, double kappa = 1.0, double c = 2.0);
double soliton_hankel(double x, double t);

struct EmbeddedReport {
    double lambda;
    double sup_xy;          // sup over [10, 200] of |x y(x)|
    double sup_xy_first;    // same over [10, 100]
    double tail_l2;         // int_10^200 y^2
    double tail_l2_far;     // int_100^200 y^2
    bool bounded;
};

EmbeddedReport embedded_state_check(const Params& p, double lambda = 1.0, double step = 1e-4,
                                    double x_end = 200.0);

}  // namespace pkdv
