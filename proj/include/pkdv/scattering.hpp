#pragma once

#include <array>
#include <vector>

#include "pkdv/types.hpp"

namespace pkdv {

struct Params {
    double rho = 1.0;
    void validate() const;
};

struct BoundState {
    double kappa;
    double c;
};

// Epsilon-regularised scattering data. Zeros z = {-mu, i nu, conj(mu)}
// are the Blaschke zeros; kappa_plus > kappa_minus are the two bound states.
struct ApproxFamily {
    double rho, eps, a;
    cplx mu;
    double nu;
    std::array<cplx, 3> z;
    double kappa_plus, kappa_minus;
    double c_plus, c_minus;
};

inline cplx P(cplx k) { return k * k * k - k; }

// Unique real root of k^3 + k = r (r > 0); bisection then Newton polish.
double solve_cubic_plus(double r);

BoundState solve_kappa(const Params& p);

cplx transmission(cplx k, const Params& p);
cplx reflection(cplx k, const Params& p);

// Residue of R (equivalently T) at i*kappa, closed form: i*c.
cplx reflection_residue(const Params& p);

// Herglotz function m(lambda) = i sqrt(lambda) + 2 rho/(1 - lambda).
cplx m_function(cplx lambda, const Params& p);
// Boundary values m(k^2 + i0 sign k) written in the momentum variable;
// this is the form in which T = ik/m and R = -(conj m + m)/(2m) hold
// on the whole real k line.
cplx m_of_k(double k, const Params& p);

// Half-line potential q0(y) for y >= 0 and its analytic continuation.
double tau0(double y, const Params& p);
double q0(double y, const Params& p);

enum class JostSide { plus, minus };
// Explicit Jost solutions. f_+ is meant for x >= 0 and f_- for x <= 0, but
// both formulas are analytic in x, so they can be sampled across 0 when a
// stencil needs it.
cplx jost(double x, cplx k, const Params& p, JostSide side = JostSide::plus);

ApproxFamily approx_family(const Params& p, double eps);

cplx blaschke_eps(cplx k, const ApproxFamily& f);
cplx transmission_eps(cplx k, const ApproxFamily& f);
cplx reflection_eps(cplx k, const ApproxFamily& f);

// Closed-form residues. which = +1 / -1 selects i*kappa_plus / i*kappa_minus.
cplx reflection_eps_residue_kappa(const ApproxFamily& f, int which);
cplx transmission_eps_residue_kappa(const ApproxFamily& f, int which);
// Residue of R_eps at the Blaschke zero z[n], n in {0,1,2}.
cplx reflection_eps_residue_zero(const ApproxFamily& f, int n);

// Small-circle residue: mean of f(pole + r e^{i theta}) r e^{i theta}.
// Cross-checks radius r against r/2 and throws DomainError when they
// disagree, which is how a higher-order pole shows up.
cplx residue(const ComplexFn& f, cplx pole, double radius = 1e-3, int nodes = 64);

// Winding number of f around 0 along the boundary of the axis-parallel
// rectangle [x0,x1] x [y0,y1] (counter-clockwise). Equals #zeros - #poles.
int winding_number(const ComplexFn& f, double x0, double x1, double y0, double y1,
                   int samples_per_side = 4000);

}  // namespace pkdv
