#pragma once

#include <string>
#include <vector>

#include "pkdv/types.hpp"

namespace pkdv {

// Trapezoid nodes on the horizontal line R + ih. Two constructions:
//  * sinh: z = ih + L sinh(u), u uniform. Good for plain rational integrands.
//  * windowed: z = ih + s(u) with s(u) = c sinh(u/c) (uniform when c is
//    infinite), weights multiplied by a C-infinity cutoff that is 1 for
//    |s| <= s1 and 0 for |s| >= s2. This is what the KdV symbols need:
//    fine uniform spacing near the real poles, geometric growth in the tails.
struct ContourGrid {
    double h = 1.0;
    std::vector<cplx> nodes;
    std::vector<double> weights;
    std::string kind;
    double du = 0.0;     // spacing in the parameter u
    double scale = 0.0;  // L for sinh grids, c for windowed grids (0 = uniform)
    double s1 = 0.0, s2 = 0.0;

    size_t size() const { return nodes.size(); }
    // Integral of f along the line (left to right).
    cplx integrate(const ComplexFn& f) const;
};

// h = 0 gives the real line itself (for inner products of H^2 functions).
ContourGrid sinh_grid(double h, int count, double L = 1.0, double umax = 0.0);
// u-range chosen so that |f(z)| L cosh(u) stays below tol for the last
// stretch of nodes on both sides (capped where L sinh(u) = 1e12).
ContourGrid sinh_grid_adaptive(const ComplexFn& f, double h, int count, double L = 1.0, double tol = 1e-14);
ContourGrid windowed_grid(double h, double du, double s1, double s2, double stretch = 0.0);

// Same construction at twice the spacing (for node-halving error estimates).
ContourGrid coarsen(const ContourGrid& g);

// Smooth step from 1 (t <= 0) to 0 (t >= 1) built from exp(-1/t).
double smooth_cutoff(double t);

}  // namespace pkdv
