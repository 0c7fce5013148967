#include "pkdv/hankel.hpp"

#include <algorithm>
#include <cmath>

namespace pkdv {

namespace {

void require_finite(cplx v, const char* what) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw DomainError(std::string("DiscretizedHankel: non-finite ") + what);
}

cplx wrap_phase(cplx v) {
    double ph = std::remainder(v.imag(), 2.0 * pi);
    if (ph <= -pi) ph += 2.0 * pi;
    return {v.real(), ph};
}

}  // namespace

DiscretizedHankel::DiscretizedHankel(const HankelData& data) {
    const auto& g = data.grid;
    const Eigen::Index n = static_cast<Eigen::Index>(g.size() + data.rank.size());
    e_.resize(n);
    sigma_.resize(n);
    dlog_ = Eigen::VectorXcd::Zero(n);
    d2_ = Eigen::VectorXcd::Zero(n);
    contour_count_ = g.size();
    // Rank terms always carry their own factors; only contour nodes need the functions.
    has_derivs_ = g.size() == 0 || (static_cast<bool>(data.dlog) && static_cast<bool>(data.d2));
    if (g.size() > 0 && !data.psi) throw DomainError("DiscretizedHankel: contour nodes without a symbol");
    if (g.size() > 0 && !(g.h > 0.0)) throw DomainError("DiscretizedHankel: contour must lie in the upper half-plane");
    for (const auto& r : data.rank)
        if (!(r.pole.imag() > 0.0)) throw DomainError("DiscretizedHankel: rank pole must lie in the upper half-plane");
    Eigen::Index c = 0;
    for (size_t j = 0; j < g.size(); ++j, ++c) {
        cplx z = g.nodes[j];
        e_(c) = z;
        sigma_(c) = I / (2.0 * pi) * g.weights[j] * data.psi(z);
        require_finite(sigma_(c), "symbol sample");
        if (has_derivs_) {
            dlog_(c) = data.dlog(z);
            d2_(c) = data.d2(z);
        }
    }
    for (const auto& r : data.rank) {
        e_(c) = r.pole;
        sigma_(c) = r.sigma;
        require_finite(r.sigma, "rank weight");
        dlog_(c) = r.dlog;
        d2_(c) = r.d2;
        ++c;
    }
    factor(data.x, data.t);
}

DiscretizedHankel::DiscretizedHankel(const SymbolSplit& split) {
    const auto& g = split.grid;
    const Eigen::Index n = static_cast<Eigen::Index>(g.size() + split.poles.size());
    e_.resize(n);
    sigma_.resize(n);
    dlog_ = Eigen::VectorXcd::Zero(n);
    d2_ = Eigen::VectorXcd::Zero(n);
    contour_count_ = g.size();
    has_derivs_ = g.size() == 0;
    Eigen::Index c = 0;
    for (size_t j = 0; j < g.size(); ++j, ++c) {
        e_(c) = g.nodes[j];
        sigma_(c) = I / (2.0 * pi) * g.weights[j] * split.samples[j];
    }
    for (const auto& [zn, r] : split.poles) {
        e_(c) = zn;
        sigma_(c) = -r;
        ++c;
    }
    factor(std::nan(""), std::nan(""));
}

// Columns with |sigma| >= 1 are divided by sigma before factoring:
//   I + N = M' S,  M' = D' + K Sigma',  S = diag(sigma on large, 1 elsewhere),
// so exponentially large rank weights (e^{2 kappa |x|}) never meet O(1) terms
// in the elimination. log det(I + N) = sum_large log sigma + log det M'.
void DiscretizedHankel::factor(double x, double t) {
    const Eigen::Index n = e_.size();
    large_.resize(n);
    sp_.resize(n);
    log_scale_ = 0.0;
    for (Eigen::Index c = 0; c < n; ++c) {
        large_(c) = std::abs(sigma_(c)) >= 1.0;
        sp_(c) = large_(c) ? cplx(1.0) : sigma_(c);
        if (large_(c)) log_scale_ += std::log(sigma_(c));
    }
    Eigen::MatrixXcd M(n, n);
    for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index j = 0; j < n; ++j) M(j, c) = sp_(c) / (e_(j) + e_(c));
    for (Eigen::Index c = 0; c < n; ++c) M(c, c) += large_(c) ? 1.0 / sigma_(c) : cplx(1.0);
    min_pivot_ = std::numeric_limits<double>::infinity();
    if (n == 0) return;
    lu_.compute(M);
    for (Eigen::Index j = 0; j < n; ++j) min_pivot_ = std::min(min_pivot_, std::abs(lu_.matrixLU()(j, j)));
    if (!(min_pivot_ > 1e-13)) throw SingularityError("determinant vanishes (solution singularity)", x, t);
}

LogDet DiscretizedHankel::logdet() const {
    LogDet out;
    out.node_count = contour_count_;
    out.min_pivot = min_pivot_;
    cplx acc = log_scale_;
    const Eigen::Index n = e_.size();
    for (Eigen::Index j = 0; j < n; ++j) acc += std::log(lu_.matrixLU()(j, j));
    if (n > 0 && lu_.permutationP().determinant() < 0) acc += I * pi;
    out.value = wrap_phase(acc);
    return out;
}

cplx DiscretizedHankel::hankel_apply(const ComplexFn& g, cplx p) const {
    cplx acc = 0.0;
    for (Eigen::Index c = 0; c < e_.size(); ++c) acc += sigma_(c) * g(e_(c)) / (p + e_(c));
    return acc;
}

cplx DiscretizedHankel::apply(const ComplexFn& g, cplx p) const { return g(p) + hankel_apply(g, p); }

cplx DiscretizedHankel::resolvent_apply(const ComplexFn& g, cplx p) const {
    if (e_.size() == 0) return g(p);
    Eigen::VectorXcd gv(e_.size());
    for (Eigen::Index c = 0; c < e_.size(); ++c) gv(c) = g(e_(c));
    // (I + N) v = g(e) with sigma_c v_c = sp_c y_c, y = M'^{-1} g(e).
    Eigen::VectorXcd y = solve(gv);
    cplx acc = 0.0;
    for (Eigen::Index c = 0; c < e_.size(); ++c) acc += sp_(c) * y(c) / (p + e_(c));
    return g(p) - acc;
}

cplx DiscretizedHankel::smooth_element(double m, cplx s) const {
    cplx acc = 0.0;
    for (Eigen::Index c = 0; c < e_.size(); ++c) acc += sigma_(c) * I / ((e_(c) - m) * (s + e_(c)));
    return acc;
}

namespace {

// Column factors of dM'/dx and d2M'/dx2. Ordinary columns scale with sigma;
// large columns only carry 1/sigma on the diagonal.
cplx mu_of(bool large, cplx dl) { return large ? -dl : dl; }
cplx nu_of(bool large, cplx dl, cplx d2) { return large ? 2.0 * dl * dl - d2 : d2; }

}  // namespace

Eigen::MatrixXcd DiscretizedHankel::dM(int order) const {
    const Eigen::Index n = e_.size();
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        cplx w = order == 1 ? mu_of(large_(c), dlog_(c)) : nu_of(large_(c), dlog_(c), d2_(c));
        if (large_(c)) {
            D(c, c) = w / sigma_(c);
        } else {
            for (Eigen::Index j = 0; j < n; ++j) D(j, c) = w * sp_(c) / (e_(j) + e_(c));
        }
    }
    return D;
}

Jet DiscretizedHankel::resolvent_image(const Eigen::VectorXcd& g0, const Eigen::VectorXcd& g1,
                                       const Eigen::VectorXcd& g2, cplx p) const {
    const Eigen::Index n = e_.size();
    if (n == 0) return {0.0, 0.0, 0.0};
    if (!has_derivs_) throw DomainError("resolvent_image: x-derivatives were not supplied");
    // M' y = g differentiated twice: y' = M'^{-1}(g' - M'_x y), and so on.
    // The products M'_x y are formed column by column without dense matrices.
    auto apply_d = [&](const Eigen::VectorXcd& v, int order) {
        Eigen::VectorXcd w(n);
        for (Eigen::Index c = 0; c < n; ++c)
            w(c) = (order == 1 ? mu_of(large_(c), dlog_(c)) : nu_of(large_(c), dlog_(c), d2_(c))) * v(c);
        Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
        for (Eigen::Index c = 0; c < n; ++c) {
            if (large_(c)) {
                out(c) += w(c) / sigma_(c);
            } else {
                cplx wc = w(c) * sp_(c);
                for (Eigen::Index j = 0; j < n; ++j) out(j) += wc / (e_(j) + e_(c));
            }
        }
        return out;
    };
    Eigen::VectorXcd y0 = solve(g0);
    Eigen::VectorXcd y1 = solve(g1 - apply_d(y0, 1));
    Eigen::VectorXcd y2 = solve(g2 - apply_d(y0, 2) - 2.0 * apply_d(y1, 1));
    Jet out{0.0, 0.0, 0.0};
    for (Eigen::Index c = 0; c < n; ++c) {
        cplx l = sp_(c) / (p + e_(c));
        cplx l1 = large_(c) ? cplx(0.0) : dlog_(c) * l;
        cplx l2 = large_(c) ? cplx(0.0) : d2_(c) * l;
        out.v += l * y0(c);
        out.d1 += l1 * y0(c) + l * y1(c);
        out.d2 += l2 * y0(c) + 2.0 * l1 * y1(c) + l * y2(c);
    }
    return out;
}

cplx DiscretizedHankel::logdet_dx() const {
    if (!has_derivs_) throw DomainError("logdet_dx: x-derivatives were not supplied");
    const Eigen::Index n = e_.size();
    if (n == 0) return 0.0;
    Eigen::MatrixXcd X = lu_.solve(dM(1));
    cplx acc = X.trace();
    for (Eigen::Index c = 0; c < n; ++c)
        if (large_(c)) acc += dlog_(c);
    return acc;
}

// d2 log det M' = tr(M'^{-1} M'_xx) - tr((M'^{-1} M'_x)^2). Both derivative
// matrices share the columns of C', so one solve with C' serves both.
cplx DiscretizedHankel::logdet_dx2() const {
    if (!has_derivs_) throw DomainError("logdet_dx2: x-derivatives were not supplied");
    const Eigen::Index n = e_.size();
    if (n == 0) return 0.0;
    Eigen::MatrixXcd Cp = Eigen::MatrixXcd::Zero(n, n);
    Eigen::VectorXcd mu(n), nu(n);
    for (Eigen::Index c = 0; c < n; ++c) {
        mu(c) = mu_of(large_(c), dlog_(c));
        nu(c) = nu_of(large_(c), dlog_(c), d2_(c));
        if (large_(c)) {
            Cp(c, c) = 1.0 / sigma_(c);
        } else {
            for (Eigen::Index j = 0; j < n; ++j) Cp(j, c) = sp_(c) / (e_(j) + e_(c));
        }
    }
    Eigen::MatrixXcd Y = lu_.solve(Cp);
    cplx acc = 0.0;
    for (Eigen::Index c = 0; c < n; ++c) acc += nu(c) * Y(c, c);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) acc -= Y(i, j) * mu(j) * Y(j, i) * mu(i);
    for (Eigen::Index c = 0; c < n; ++c)
        if (large_(c)) acc += d2_(c) - dlog_(c) * dlog_(c);
    return acc;
}

Eigen::MatrixXcd DiscretizedHankel::dense() const {
    const Eigen::Index n = e_.size();
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(n, n);
    for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index j = 0; j < n; ++j) A(j, c) += sigma_(c) / (e_(j) + e_(c));
    return A;
}

LogDet logdet_estimate(const HankelData& data) {
    LogDet out = DiscretizedHankel(data).logdet();
    if (data.grid.size() == 0) {
        out.est_error = 0.0;
        return out;
    }
    HankelData coarse = data;
    coarse.grid = coarsen(data.grid);
    try {
        out.est_error = std::abs(wrap_phase(DiscretizedHankel(coarse).logdet().value - out.value));
    } catch (const SingularityError&) {
        out.est_error = std::numeric_limits<double>::infinity();
    }
    return out;
}

BlockReport block_determinant_check(const DiscretizedHankel& H, const BiorthBasis& basis, double tol) {
    const Eigen::Index n = static_cast<Eigen::Index>(H.size());
    const Eigen::Index r = static_cast<Eigen::Index>(basis.size());
    const auto& e = H.points();
    const auto& sg = H.sigma();
    const auto& z = basis.blaschke().zeros();
    // Column c of N is the function s -> sigma_c/(s + e_c); its K_B component
    // is sum_n sigma_c/(z_n + e_c) kp_n(s), i.e. E F with the matrices below.
    Eigen::MatrixXcd E(n, r), F(r, n);
    for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index k = 0; k < r; ++k) {
            E(c, k) = basis(static_cast<size_t>(k), e(c));
            F(k, c) = sg(c) / (z[static_cast<size_t>(k)] + e(c));
        }
    Eigen::MatrixXcd A = H.dense();
    Eigen::MatrixXcd Aperp = A - E * F;
    BlockReport out{};
    out.lhs = n > 0 ? A.partialPivLu().determinant() : cplx(1.0);
    if (n > 0) {
        Eigen::PartialPivLU<Eigen::MatrixXcd> lp(Aperp);
        Eigen::MatrixXcd small = Eigen::MatrixXcd::Identity(r, r) + F * lp.solve(E);
        out.rhs = lp.determinant() * (r > 0 ? small.determinant() : cplx(1.0));
    } else {
        out.rhs = 1.0;
    }
    out.rel_diff = std::abs(out.lhs - out.rhs) / std::max(std::abs(out.lhs), 1e-300);
    out.ok = out.rel_diff <= tol;
    return out;
}

}  // namespace pkdv
