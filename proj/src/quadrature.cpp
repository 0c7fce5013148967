#include "pkdv/quadrature.hpp"

#include <cmath>

namespace pkdv {

cplx ContourGrid::integrate(const ComplexFn& f) const {
    cplx acc = 0.0;
    for (size_t j = 0; j < nodes.size(); ++j) acc += weights[j] * f(nodes[j]);
    return acc;
}

double smooth_cutoff(double t) {
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
    return b / (a + b);
}

ContourGrid sinh_grid(double h, int count, double L, double umax) {
    if (count < 3 || !(h >= 0.0) || !(L > 0.0)) throw DomainError("sinh_grid: bad parameters");
    // Default range: until L cosh(u) reaches ~1e12, far past any O(1/s^2) tail
    // that matters at double precision for the symbols we integrate.
    if (umax <= 0.0) umax = std::asinh(1e12 / L);
    ContourGrid g;
    g.h = h;
    g.kind = "sinh";
    g.scale = L;
    g.du = 2.0 * umax / (count - 1);
    g.nodes.resize(static_cast<size_t>(count));
    g.weights.resize(static_cast<size_t>(count));
    for (int j = 0; j < count; ++j) {
        double u = -umax + j * g.du;
        g.nodes[static_cast<size_t>(j)] = cplx(L * std::sinh(u), h);
        g.weights[static_cast<size_t>(j)] = L * std::cosh(u) * g.du;
    }
    return g;
}

ContourGrid sinh_grid_adaptive(const ComplexFn& f, double h, int count, double L, double tol) {
    const double cap = std::asinh(1e12 / L);
    double u = 0.0;
    int quiet = 0;
    // Three consecutive small samples, so an oscillation zero does not stop the scan.
    while (u < cap && quiet < 3) {
        u += 0.25;
        double s = L * std::sinh(u), w = L * std::cosh(u);
        double m = std::max(std::abs(f(cplx(s, h))), std::abs(f(cplx(-s, h)))) * w;
        quiet = m < tol ? quiet + 1 : 0;
    }
    return sinh_grid(h, count, L, std::min(u, cap));
}

ContourGrid windowed_grid(double h, double du, double s1, double s2, double stretch) {
    if (!(h > 0.0) || !(du > 0.0) || !(s2 > s1) || s1 < 0.0)
        throw DomainError("windowed_grid: bad parameters");
    ContourGrid g;
    g.h = h;
    g.kind = "windowed";
    g.du = du;
    g.scale = stretch;
    g.s1 = s1;
    g.s2 = s2;
    const bool uniform = !(stretch > 0.0);
    const double umax = uniform ? s2 : stretch * std::asinh(s2 / stretch);
    const long m = static_cast<long>(std::ceil(umax / du));
    for (long j = -m; j <= m; ++j) {
        double u = j * du;
        double s = uniform ? u : stretch * std::sinh(u / stretch);
        double jac = uniform ? 1.0 : std::cosh(u / stretch);
        double w = smooth_cutoff((std::abs(s) - s1) / (s2 - s1));
        if (w <= 0.0) continue;
        g.nodes.emplace_back(s, h);
        g.weights.push_back(du * jac * w);
    }
    return g;
}

ContourGrid coarsen(const ContourGrid& g) {
    if (g.kind == "sinh") {
        double umax = 0.5 * g.du * static_cast<double>(g.size() - 1);
        return sinh_grid(g.h, static_cast<int>((g.size() + 1) / 2), g.scale, umax);
    }
    if (g.kind == "windowed") return windowed_grid(g.h, 2.0 * g.du, g.s1, g.s2, g.scale);
    throw DomainError("coarsen: unknown grid kind");
}

}  // namespace pkdv
