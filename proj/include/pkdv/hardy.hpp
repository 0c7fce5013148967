#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "pkdv/quadrature.hpp"
#include "pkdv/types.hpp"

namespace pkdv {

// Inner product on H^2 is (1/2pi) int f conj(g) dx, so k_lambda reproduces
// values: <f, k_lambda> = f(lambda).
struct Kernel {
    cplx lambda;
    cplx operator()(cplx z) const { return I / (z - std::conj(lambda)); }
    double norm() const;
};

cplx kernel_inner(const Kernel& a, const Kernel& b);

// (1/2pi) sum w f conj(g) over a grid on the real line (h = 0).
cplx inner_numeric(const ComplexFn& f, const ComplexFn& g, const ContourGrid& line);

class Blaschke {
public:
    explicit Blaschke(std::vector<cplx> zeros);
    const std::vector<cplx>& zeros() const { return zeros_; }
    size_t size() const { return zeros_.size(); }
    cplx operator()(cplx z) const;
    // B_n = B / b_n, the product with the n-th factor removed.
    cplx partial(size_t n, cplx z) const;

private:
    std::vector<cplx> zeros_;
};

// Duals of the kernels k_{z_n} inside the model space K_B:
//   kp_n(z) = (2 Im z_n / B_n(z_n)) B_n(z) k_{z_n}(z),  <kp_n, k_{z_m}> = delta_nm.
// The same functions are also stored as combinations of the kernels, which
// gives inner products <f, kp_n> from the values f(z_l) alone.
class BiorthBasis {
public:
    explicit BiorthBasis(const Blaschke& b);
    const Blaschke& blaschke() const { return b_; }
    size_t size() const { return b_.size(); }
    cplx operator()(size_t n, cplx z) const;
    // Same value through the kernel expansion (independent route).
    cplx via_kernels(size_t n, cplx z) const;
    // <f, kp_n> for f in H^2.
    cplx inner(const ComplexFn& f, size_t n) const;
    const Eigen::MatrixXcd& coefficients() const { return coef_; }

private:
    Blaschke b_;
    Eigen::MatrixXcd coef_;  // kp_n = sum_l coef_(n, l) k_{z_l}
};

// Orthogonal projection onto K_B: P_B f = sum_n <f, k_{z_n}> kp_n.
ComplexFn model_projection(const BiorthBasis& basis, ComplexFn f);

// Operator on H^2 given as a map of evaluators.
using Operator = std::function<ComplexFn(const ComplexFn&)>;

// Entries <A k_{z_n}, kp_m> at (m, n).
Eigen::MatrixXcd model_projection_matrix(const BiorthBasis& basis, const Operator& A);

// Meromorphic symbol with the upper half-plane poles declared by the caller.
struct Symbol {
    ComplexFn phi;
    std::vector<cplx> upper_poles;
};

// (H(phi) f)(s) = (i/2pi) int phi f /(s + z) dz along the grid line. Exact on
// the real line; on R + ih only when phi f has no singularity in between.
cplx hankel_apply_line(const ComplexFn& phi, const ComplexFn& f, cplx s, const ContourGrid& g);

// Anti-analytic part of a symbol, split into a rational piece
// sum Res(phi, z_n)/(x - z_n) and a piece analytic below R + ih:
//   Phi(w) = -(1/2pi i) int_{R+ih} phi(s)/(s - w) ds.
struct SymbolSplit {
    std::vector<std::pair<cplx, cplx>> poles;  // (z_n, Res(phi, z_n))
    ContourGrid grid;
    std::vector<cplx> samples;  // phi at grid nodes

    double h() const { return grid.h; }
    cplx rational(cplx x) const;
    cplx entire(cplx w) const;
    cplx minus_part(cplx x) const { return rational(x) + entire(x); }
};

// Checks phi(-conj z) = conj phi(z) at probe points (relative 1e-10), then
// computes residues by circle quadrature and samples phi on the grid.
// The default grid is 512 sinh nodes over an adaptive range, fine for
// symbols that do not oscillate.
SymbolSplit split_symbol(const Symbol& s, double h);
SymbolSplit split_symbol(const Symbol& s, const ContourGrid& grid);

// Largest relative symmetry defect over the fixed probe set.
double symmetry_defect(const ComplexFn& phi);

}  // namespace pkdv
