#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "pkdv/hardy.hpp"
#include "pkdv/quadrature.hpp"
#include "pkdv/types.hpp"

namespace pkdv {

// A Hankel operator with analytic symbol is stored as a list of columns:
//   (H f)(s) = sum_c sigma_c f(e_c) / (s + e_c).
// A contour node z with weight w contributes e = z, sigma = (i/2pi) w psi(z);
// a pole p of the rational part with residue r contributes e = p, sigma = -r.
// dlog and d2 are d/dx log sigma and (d2/dx2 sigma)/sigma for x-families.
struct RankTerm {
    cplx pole;
    cplx sigma;
    cplx dlog = 0.0;
    cplx d2 = 0.0;
};

struct HankelData {
    ContourGrid grid;
    ComplexFn psi;         // symbol carried by the contour (may be empty with no nodes)
    ComplexFn dlog, d2;    // optional x-derivative factors of psi
    std::vector<RankTerm> rank;
    double x = std::numeric_limits<double>::quiet_NaN();  // labels for error reports
    double t = std::numeric_limits<double>::quiet_NaN();
};

struct LogDet {
    cplx value;              // log det(I + H), imaginary part wrapped to (-pi, pi]
    size_t node_count = 0;
    double est_error = std::numeric_limits<double>::quiet_NaN();
    double min_pivot = 0.0;
};

// Value with first and second x-derivatives.
struct Jet {
    cplx v, d1, d2;
};

class DiscretizedHankel {
public:
    explicit DiscretizedHankel(const HankelData& data);
    // Contour samples of an already split symbol, poles become rank columns.
    explicit DiscretizedHankel(const SymbolSplit& split);

    size_t size() const { return static_cast<size_t>(e_.size()); }
    size_t contour_count() const { return contour_count_; }
    const Eigen::VectorXcd& points() const { return e_; }
    const Eigen::VectorXcd& sigma() const { return sigma_; }
    bool has_derivatives() const { return has_derivs_; }

    LogDet logdet() const;
    // ((I + H)^{-1} g)(p).
    cplx resolvent_apply(const ComplexFn& g, cplx p) const;
    // ((I + H) g)(p), the discrete forward operator.
    cplx apply(const ComplexFn& g, cplx p) const;
    // (H g)(p).
    cplx hankel_apply(const ComplexFn& g, cplx p) const;
    // K_m(s) = (H k_m)(s) with k_m(z) = i/(z - m), m real.
    cplx smooth_element(double m, cplx s) const;
    // ((I + H)^{-1} H g)(p) from the values of g at the column points, with
    // x-derivatives when g carries them (g0, g1, g2 are g, g_x, g_xx).
    Jet resolvent_image(const Eigen::VectorXcd& g0, const Eigen::VectorXcd& g1,
                        const Eigen::VectorXcd& g2, cplx p) const;
    // d/dx and d2/dx2 of log det(I + H).
    cplx logdet_dx() const;
    cplx logdet_dx2() const;
    // The dense matrix I + N (unscaled), for diagnostics.
    Eigen::MatrixXcd dense() const;

private:
    void factor(double x, double t);
    Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const { return lu_.solve(rhs); }
    // C' diag(mu) and C' diag(nu): x-derivatives of the scaled matrix.
    Eigen::MatrixXcd dM(int order) const;

    Eigen::VectorXcd e_, sigma_, dlog_, d2_;
    Eigen::Array<bool, Eigen::Dynamic, 1> large_;
    Eigen::VectorXcd sp_;  // sigma on ordinary columns, 1 on large ones
    size_t contour_count_ = 0;
    bool has_derivs_ = false;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
    cplx log_scale_ = 0.0;
    double min_pivot_ = 0.0;
};

// logdet with est_error from a second build at twice the node spacing.
LogDet logdet_estimate(const HankelData& data);

struct BlockReport {
    cplx lhs, rhs;  // det(I + N) and det(I + N_perp) det(I_r + F (I + N_perp)^{-1} E)
    double rel_diff;
    bool ok;
};

// Splits the columns of N into their projection onto the model space K_B
// (expanded in the bi-orthogonal basis) and the remainder, then compares
// the full determinant with the block formula.
BlockReport block_determinant_check(const DiscretizedHankel& H, const BiorthBasis& basis, double tol = 1e-6);

}  // namespace pkdv
