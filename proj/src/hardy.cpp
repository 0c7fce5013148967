#include "pkdv/hardy.hpp"

#include <algorithm>
#include <cmath>

#include "pkdv/scattering.hpp"

namespace pkdv {

double Kernel::norm() const {
    if (!(lambda.imag() > 0.0)) throw DomainError("Kernel::norm: needs Im lambda > 0");
    return 1.0 / std::sqrt(2.0 * lambda.imag());
}

cplx kernel_inner(const Kernel& a, const Kernel& b) {
    if (!(b.lambda.imag() > 0.0)) throw DomainError("kernel_inner: needs Im b > 0");
    return a(b.lambda);
}

cplx inner_numeric(const ComplexFn& f, const ComplexFn& g, const ContourGrid& line) {
    cplx acc = 0.0;
    for (size_t j = 0; j < line.size(); ++j)
        acc += line.weights[j] * f(line.nodes[j]) * std::conj(g(line.nodes[j]));
    return acc / (2.0 * pi);
}

Blaschke::Blaschke(std::vector<cplx> zeros) : zeros_(std::move(zeros)) {
    for (size_t i = 0; i < zeros_.size(); ++i) {
        if (!(zeros_[i].imag() > 0.0)) throw DomainError("Blaschke: zeros must lie in the upper half-plane");
        for (size_t j = 0; j < i; ++j)
            if (std::abs(zeros_[i] - zeros_[j]) <= 1e-12 * (1.0 + std::abs(zeros_[i])))
                throw DomainError("Blaschke: repeated zero (only simple zeros are supported)");
    }
}

cplx Blaschke::operator()(cplx z) const {
    cplx b = 1.0;
    for (cplx zn : zeros_) {
        cplx d = z - std::conj(zn);
        if (d == cplx(0.0)) throw DomainError("Blaschke: evaluation at a pole");
        b *= (z - zn) / d;
    }
    return b;
}

cplx Blaschke::partial(size_t n, cplx z) const {
    cplx b = 1.0;
    for (size_t j = 0; j < zeros_.size(); ++j) {
        if (j == n) continue;
        cplx d = z - std::conj(zeros_[j]);
        if (d == cplx(0.0)) throw DomainError("Blaschke: evaluation at a pole");
        b *= (z - zeros_[j]) / d;
    }
    return b;
}

BiorthBasis::BiorthBasis(const Blaschke& b) : b_(b) {
    const auto& z = b_.zeros();
    const Eigen::Index n = static_cast<Eigen::Index>(z.size());
    // G(l, j) = k_{z_l}(z_j); coef * G = I.
    Eigen::MatrixXcd G(n, n);
    for (Eigen::Index l = 0; l < n; ++l)
        for (Eigen::Index j = 0; j < n; ++j) G(l, j) = Kernel{z[static_cast<size_t>(l)]}(z[static_cast<size_t>(j)]);
    coef_ = G.partialPivLu().inverse();
}

cplx BiorthBasis::operator()(size_t n, cplx z) const {
    cplx zn = b_.zeros().at(n);
    return 2.0 * zn.imag() / b_.partial(n, zn) * b_.partial(n, z) * Kernel{zn}(z);
}

cplx BiorthBasis::via_kernels(size_t n, cplx z) const {
    cplx acc = 0.0;
    for (size_t l = 0; l < size(); ++l)
        acc += coef_(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(l)) * Kernel{b_.zeros()[l]}(z);
    return acc;
}

cplx BiorthBasis::inner(const ComplexFn& f, size_t n) const {
    cplx acc = 0.0;
    for (size_t l = 0; l < size(); ++l)
        acc += std::conj(coef_(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(l))) * f(b_.zeros()[l]);
    return acc;
}

ComplexFn model_projection(const BiorthBasis& basis, ComplexFn f) {
    std::vector<cplx> vals;
    for (cplx zn : basis.blaschke().zeros()) vals.push_back(f(zn));
    return [basis, vals](cplx z) {
        cplx acc = 0.0;
        for (size_t n = 0; n < vals.size(); ++n) acc += vals[n] * basis(n, z);
        return acc;
    };
}

Eigen::MatrixXcd model_projection_matrix(const BiorthBasis& basis, const Operator& A) {
    const Eigen::Index n = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXcd M(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        ComplexFn image = A(Kernel{basis.blaschke().zeros()[static_cast<size_t>(c)]});
        for (Eigen::Index r = 0; r < n; ++r) M(r, c) = basis.inner(image, static_cast<size_t>(r));
    }
    return M;
}

cplx hankel_apply_line(const ComplexFn& phi, const ComplexFn& f, cplx s, const ContourGrid& g) {
    cplx acc = 0.0;
    for (size_t j = 0; j < g.size(); ++j) {
        cplx z = g.nodes[j];
        acc += g.weights[j] * phi(z) * f(z) / (s + z);
    }
    return I / (2.0 * pi) * acc;
}

cplx SymbolSplit::rational(cplx x) const {
    cplx acc = 0.0;
    for (const auto& [zn, r] : poles) acc += r / (x - zn);
    return acc;
}

cplx SymbolSplit::entire(cplx w) const {
    if (!(w.imag() < grid.h)) throw DomainError("SymbolSplit::entire: point must lie below the contour");
    cplx acc = 0.0;
    for (size_t j = 0; j < grid.size(); ++j) acc += grid.weights[j] * samples[j] / (grid.nodes[j] - w);
    return -acc / (2.0 * pi * I);
}

double symmetry_defect(const ComplexFn& phi) {
    static const cplx probes[] = {{0.3, 0.0}, {-1.7, 0.0}, {2.9, 0.0}, {0.45, 0.6}, {-1.1, 1.3}};
    double worst = 0.0;
    for (cplx z : probes) {
        cplx a = phi(-std::conj(z)), b = std::conj(phi(z));
        worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b)));
    }
    return worst;
}

SymbolSplit split_symbol(const Symbol& s, double h) { return split_symbol(s, sinh_grid_adaptive(s.phi, h, 512)); }

SymbolSplit split_symbol(const Symbol& s, const ContourGrid& grid) {
    double defect = symmetry_defect(s.phi);
    if (!(defect <= 1e-10))
        throw DomainError("split_symbol: symbol violates phi(-conj z) = conj phi(z) (defect " +
                          std::to_string(defect) + ")");
    SymbolSplit out;
    for (cplx zn : s.upper_poles) {
        if (!(zn.imag() > 0.0)) throw DomainError("split_symbol: declared pole not in the upper half-plane");
        if (!(zn.imag() < grid.h)) throw DomainError("split_symbol: contour must lie above every pole");
        // Keep the circle clear of the other poles.
        double r = 0.25 * std::min(grid.h - zn.imag(), zn.imag());
        for (cplx zm : s.upper_poles)
            if (zm != zn) r = std::min(r, 0.25 * std::abs(zm - zn));
        out.poles.emplace_back(zn, residue(s.phi, zn, std::min(r, 1e-2)));
    }
    out.grid = grid;
    out.samples.reserve(grid.size());
    for (cplx z : grid.nodes) {
        cplx v = s.phi(z);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw DomainError("split_symbol: non-finite symbol sample on the contour");
        out.samples.push_back(v);
    }
    return out;
}

}  // namespace pkdv
