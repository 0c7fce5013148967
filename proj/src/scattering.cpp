#include "pkdv/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pkdv {

void Params::validate() const {
    if (!(rho > 0.0) || !std::isfinite(rho))
        throw DomainError("rho must be a positive finite number");
}

double solve_cubic_plus(double r) {
    if (!(r > 0.0)) throw DomainError("solve_cubic_plus: r must be positive");
    // g(k) = k^3 + k - r is increasing; g(0) < 0 and g(hi) > 0.
    double lo = 0.0, hi = std::max(1.0, std::cbrt(r)) + 1.0;
    for (int i = 0; i < 60; ++i) {
        double mid = 0.5 * (lo + hi);
        (mid * mid * mid + mid - r < 0.0 ? lo : hi) = mid;
    }
    double k = 0.5 * (lo + hi);
    for (int i = 0; i < 8; ++i) {
        double dk = (k * k * k + k - r) / (3.0 * k * k + 1.0);
        k -= dk;
        if (std::abs(dk) <= 1e-17 * std::max(1.0, k)) break;
    }
    return k;
}

BoundState solve_kappa(const Params& p) {
    p.validate();
    double kappa = solve_cubic_plus(2.0 * p.rho);
    return {kappa, 2.0 * p.rho / (3.0 * kappa * kappa + 1.0)};
}

namespace {

void check_pole(cplx denom, const char* what) {
    if (denom == cplx(0.0)) throw DomainError(std::string(what) + ": evaluation at a pole");
}

}  // namespace

cplx transmission(cplx k, const Params& p) {
    cplx d = P(k) + 2.0 * I * p.rho;
    check_pole(d, "transmission");
    return P(k) / d;
}

cplx reflection(cplx k, const Params& p) {
    cplx d = P(k) + 2.0 * I * p.rho;
    check_pole(d, "reflection");
    return -2.0 * I * p.rho / d;
}

cplx reflection_residue(const Params& p) {
    return I * solve_kappa(p).c;
}

cplx m_function(cplx lambda, const Params& p) {
    if (lambda == cplx(1.0)) throw DomainError("m_function: pole at lambda = 1 (embedded eigenvalue)");
    cplx s = std::sqrt(lambda);
    if (s.imag() < 0.0) s = -s;  // closed upper half-plane into itself
    return I * s + 2.0 * p.rho / (1.0 - lambda);
}

cplx m_of_k(double k, const Params& p) {
    if (std::abs(k) == 1.0) throw DomainError("m_of_k: pole at k = +-1");
    return I * k + 2.0 * p.rho / (1.0 - k * k);
}

double tau0(double y, const Params& p) {
    return 1.0 + p.rho * y - 0.5 * p.rho * std::sin(2.0 * y);
}

double q0(double y, const Params& p) {
    double t = tau0(y, p);
    double s = std::sin(y);
    double t1 = 2.0 * p.rho * s * s;
    double t2 = 2.0 * p.rho * std::sin(2.0 * y);
    return -2.0 * (t2 * t - t1 * t1) / (t * t);
}

cplx jost(double x, cplx k, const Params& p, JostSide side) {
    if (k == cplx(1.0) || k == cplx(-1.0)) throw DomainError("jost: indeterminate at k = +-1");
    double sg = side == JostSide::plus ? 1.0 : -1.0;
    // tau0 is evaluated at sg*x, the branch's own |x|, continued analytically.
    cplx ep = std::exp(I * (sg * x)), em = std::exp(-I * (sg * x));
    cplx bracket = ep / (k + 1.0) - em / (k - 1.0);
    cplx f = 1.0 + sg * bracket * (p.rho * std::sin(x) / tau0(sg * x, p));
    return f * std::exp(I * (sg * k * x));
}

namespace {

cplx newton_cubic(cplx k, double eps) {
    for (int i = 0; i < 100; ++i) {
        cplx dk = (k * k * k - k + I * eps) / (3.0 * k * k - 1.0);
        k -= dk;
        if (std::abs(dk) <= 1e-16 * std::max(1.0, std::abs(k))) break;
    }
    return k;
}

// Derivative of P + i rho (1 +- a) is 3k^2 - 1 whatever the shift.
cplx dP(cplx k) { return 3.0 * k * k - 1.0; }

}  // namespace

ApproxFamily approx_family(const Params& p, double eps) {
    p.validate();
    if (!(eps > 0.0) || !(eps < p.rho))
        throw DomainError("approx_family: need 0 < eps < rho");
    ApproxFamily f{};
    f.rho = p.rho;
    f.eps = eps;
    f.a = std::sqrt(1.0 - (eps / p.rho) * (eps / p.rho));
    f.mu = newton_cubic(cplx(1.0, -0.5 * eps), eps);
    if (f.mu.real() < 0.0) f.mu = -std::conj(f.mu);
    f.nu = solve_cubic_plus(eps);  // (i nu)^3 - i nu + i eps = 0  <=>  nu^3 + nu = eps
    f.z = {-f.mu, cplx(0.0, f.nu), std::conj(f.mu)};
    for (cplx z : f.z)
        if (!(z.imag() > 0.0)) throw DomainError("approx_family: Blaschke zero left the upper half-plane");
    f.kappa_plus = solve_cubic_plus(p.rho * (1.0 + f.a));
    f.kappa_minus = solve_cubic_plus(p.rho * (1.0 - f.a));
    f.c_plus = (-I * transmission_eps_residue_kappa(f, +1)).real();
    f.c_minus = (I * transmission_eps_residue_kappa(f, -1)).real();
    return f;
}

cplx blaschke_eps(cplx k, const ApproxFamily& f) {
    cplx b = 1.0;
    for (cplx z : f.z) b *= (k - z) / (k - std::conj(z));
    return b;
}

cplx transmission_eps(cplx k, const ApproxFamily& f) {
    // (P + i eps)^2 / b0^2 with the (k - i nu)^2 factor cancelled by hand.
    cplx num = (k - f.mu) * (k + std::conj(f.mu)) * (k + I * f.nu);
    num *= num;
    cplx d1 = P(k) + I * f.rho * (1.0 + f.a);
    cplx d2 = P(k) + I * f.rho * (1.0 - f.a);
    check_pole(d1 * d2, "transmission_eps");
    return num / (d1 * d2);
}

cplx reflection_eps(cplx k, const ApproxFamily& f) {
    cplx d1 = P(k) + I * f.rho * (1.0 + f.a);
    cplx d2 = P(k) + I * f.rho * (1.0 - f.a);
    cplx b = blaschke_eps(k, f);
    check_pole(d1 * d2 * b, "reflection_eps");
    return -2.0 * I * f.a * f.rho / d1 * P(k) / d2 / b;
}

cplx reflection_eps_residue_kappa(const ApproxFamily& f, int which) {
    if (which == +1) {
        cplx k(0.0, f.kappa_plus);
        return I * f.rho * (1.0 + f.a) / ((3.0 * f.kappa_plus * f.kappa_plus + 1.0) * blaschke_eps(k, f));
    }
    cplx k(0.0, f.kappa_minus);
    return -I * f.rho * (1.0 - f.a) / ((3.0 * f.kappa_minus * f.kappa_minus + 1.0) * blaschke_eps(k, f));
}

cplx transmission_eps_residue_kappa(const ApproxFamily& f, int which) {
    double kap = which == +1 ? f.kappa_plus : f.kappa_minus;
    cplx k(0.0, kap);
    cplx num = (k - f.mu) * (k + std::conj(f.mu)) * (k + I * f.nu);
    num *= num;
    // The other factor at this root equals -+2 i a rho.
    cplx other = (which == +1 ? -2.0 : 2.0) * I * f.a * f.rho;
    return num / (dP(k) * other);
}

cplx reflection_eps_residue_zero(const ApproxFamily& f, int n) {
    cplx z = f.z.at(static_cast<size_t>(n));
    cplx bn = 1.0;
    for (int j = 0; j < 3; ++j)
        if (j != n) bn *= (z - f.z[static_cast<size_t>(j)]) / (z - std::conj(f.z[static_cast<size_t>(j)]));
    cplx d1 = P(z) + I * f.rho * (1.0 + f.a);
    cplx d2 = P(z) + I * f.rho * (1.0 - f.a);
    cplx rest = -2.0 * I * f.a * f.rho / d1 * P(z) / d2;
    return rest * 2.0 * I * z.imag() / bn;
}

namespace {

// Mean of f(pole + e) e^power over the circle |e| = r.
cplx circle_moment(const ComplexFn& f, cplx pole, double r, int n, int power) {
    cplx acc = 0.0;
    for (int j = 0; j < n; ++j) {
        cplx e = r * std::exp(I * (2.0 * pi * j / n));
        acc += f(pole + e) * std::pow(e, power);
    }
    return acc / static_cast<double>(n);
}

}  // namespace

cplx residue(const ComplexFn& f, cplx pole, double radius, int nodes) {
    cplx r1 = circle_moment(f, pole, radius, nodes, 1);
    cplx r2 = circle_moment(f, pole, 0.5 * radius, nodes, 1);
    // The second moment picks out the coefficient of (k - pole)^-2, which is
    // zero for a simple pole. Radius drift catches nearby singularities.
    cplx m2 = circle_moment(f, pole, radius, nodes, 2);
    double scale = std::max(std::abs(r1), 1e-300);
    if (std::abs(m2) > 1e-6 * scale * radius + 1e-14 || std::abs(r1 - r2) > 1e-6 * scale + 1e-12)
        throw DomainError("residue: pole is not simple (circle quadrature unstable)");
    return r1;
}

int winding_number(const ComplexFn& f, double x0, double x1, double y0, double y1,
                   int samples_per_side) {
    const cplx corners[5] = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}};
    double total = 0.0;
    cplx prev = f(corners[0]);
    for (int side = 0; side < 4; ++side) {
        for (int j = 1; j <= samples_per_side; ++j) {
            double s = static_cast<double>(j) / samples_per_side;
            cplx cur = f(corners[side] + s * (corners[side + 1] - corners[side]));
            total += std::arg(cur / prev);
            prev = cur;
        }
    }
    return static_cast<int>(std::lround(total / (2.0 * pi)));
}

}  // namespace pkdv
