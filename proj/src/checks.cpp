#include "pkdv/checks.hpp"

#include <algorithm>
#include <cmath>

#include "pkdv/hardy.hpp"
#include "pkdv/pde_oracle.hpp"

namespace pkdv::checks {

namespace {

const Params rho1{1.0};

template <class F>
double sup_real_grid(F&& f) {
    double worst = 0.0;
    for (int j = 0; j <= 2000; ++j) worst = std::max(worst, f(-10.0 + 20.0 * j / 2000.0));
    return worst;
}

}  // namespace

double spectral_constants() {
    BoundState a = solve_kappa(Params{1.0}), b = solve_kappa(Params{5.0});
    return std::max({std::abs(a.kappa - 1.0), std::abs(a.c - 0.5), std::abs(b.kappa - 2.0),
                     std::abs(b.c - 10.0 / 13.0)});
}

double unitarity() {
    double worst = sup_real_grid(
        [](double k) { return std::abs(std::norm(transmission(k, rho1)) + std::norm(reflection(k, rho1)) - 1.0); });
    for (double eps : {0.1, 0.5}) {
        ApproxFamily f = approx_family(rho1, eps);
        worst = std::max(worst, sup_real_grid([&](double k) {
                             return std::abs(std::norm(transmission_eps(k, f)) + std::norm(reflection_eps(k, f)) - 1.0);
                         }));
    }
    return worst;
}

double residue_T() {
    BoundState b = solve_kappa(rho1);
    cplx r = residue([](cplx k) { return transmission(k, rho1); }, cplx(0.0, b.kappa));
    return std::abs(r - I * b.c);
}

double residue_plus_minus() {
    ApproxFamily f = approx_family(rho1, 0.5);
    auto R = [&](cplx k) { return reflection_eps(k, f); };
    auto T = [&](cplx k) { return transmission_eps(k, f); };
    double worst = 0.0;
    for (int w : {+1, -1}) {
        cplx k0(0.0, w == 1 ? f.kappa_plus : f.kappa_minus);
        worst = std::max(worst, std::abs(residue(R, k0, 1e-4) - static_cast<double>(w) * residue(T, k0, 1e-4)));
    }
    return worst;
}

double m_function_defect() {
    double worst = 0.0;
    for (int j = 0; j <= 2000; ++j) {
        double k = -10.0 + 20.0 * j / 2000.0 + 1e-7;
        if (std::abs(std::abs(k) - 1.0) < 1e-6) continue;
        cplx m = m_of_k(k, rho1);
        worst = std::max(worst, std::abs(transmission(k, rho1) - I * k / m));
        worst = std::max(worst, std::abs(reflection(k, rho1) + (std::conj(m) + m) / (2.0 * m)));
    }
    return worst;
}

double jost_residual() {
    const double d = 1e-3;
    double worst = 0.0;
    for (double k : {0.7, 1.3})
        for (int j = 0; j <= 1000; ++j) {
            double x = 10.0 * j / 1000.0;
            auto f = [&](double y) { return jost(y, k, rho1); };
            cplx f2 = (-f(x + 2 * d) + 16.0 * f(x + d) - 30.0 * f(x) + 16.0 * f(x - d) - f(x - 2 * d)) / (12 * d * d);
            worst = std::max(worst, std::abs(-f2 + q0(x, rho1) * f(x) - k * k * f(x)));
        }
    return worst;
}

double biorthogonality() {
    ApproxFamily f = approx_family(rho1, 0.5);
    BiorthBasis basis(Blaschke({f.z.begin(), f.z.end()}));
    double worst = 0.0;
    for (size_t n = 0; n < 3; ++n)
        for (size_t m = 0; m < 3; ++m) {
            double delta = n == m ? 1.0 : 0.0;
            // Closed form evaluated at z_m, and the Gram route sum_l coef <k_l, k_m>.
            worst = std::max(worst, std::abs(basis(n, f.z[m]) - delta));
            cplx gram = 0.0;
            for (size_t l = 0; l < 3; ++l)
                gram += basis.coefficients()(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(l)) *
                        kernel_inner(Kernel{f.z[l]}, Kernel{f.z[m]});
            worst = std::max(worst, std::abs(gram - delta));
        }
    return worst;
}

double rank_one_identity() {
    ContourGrid line = sinh_grid(0.0, 8001);
    const cplx z(0.6, 0.8);
    auto phi = [z](cplx x) { return 1.0 / (x - z); };
    Kernel ka{cplx(-0.4, 1.1)};
    double worst = 0.0;
    for (cplx s : {cplx(0.3, 0.5), cplx(-2.0, 1.0), cplx(1.5, 2.5), cplx(0.0, 0.4), cplx(3.0, 1.2)}) {
        cplx lhs = hankel_apply_line(phi, ka, s, line);
        cplx rhs = I * ka(z) * Kernel{-std::conj(z)}(s);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

double logdet_vanishing(double x) {
    return std::abs(DiscretizedHankel(hankel_data(rho1, x, 0.0, plan_quadrature(rho1, x, 0.0))).logdet().value);
}

double rank_one_closed_form() {
    double worst = 0.0;
    const double kappa = 1.0, c = 2.0;
    for (double x : {-3.0, 0.0, 1.5})
        for (double t : {0.0, 0.3}) {
            double expect = std::log1p(c / (2.0 * kappa) * std::exp(-2.0 * kappa * x + 8.0 * kappa * kappa * kappa * t));
            double got = DiscretizedHankel(hankel_data_soliton(x, t, kappa, c)).logdet().value.real();
            worst = std::max(worst, std::abs(got - expect));
        }
    // phi = -ic/(k - i beta) g^3 with g(i beta) = 1 and g analytic above:
    // the contour sits below the pole and the matrix is full, the operator rank one.
    const double beta = 1.3, cc = 0.9, b = 1.0;
    HankelData d;
    d.psi = [=](cplx k) {
        cplx g = (beta + b) / (b - I * k);
        return -I * cc / (k - I * beta) * g * g * g;
    };
    d.grid = sinh_grid_adaptive(d.psi, 0.5 * beta, 1025);
    double got = DiscretizedHankel(d).logdet().value.real();
    return std::max(worst, std::abs(got - std::log1p(cc / (2.0 * beta))));
}

double logdet_stability() {
    const double x = -3.0, t = 0.5;
    auto ld = [&](const Options& o) {
        return DiscretizedHankel(hankel_data(rho1, x, t, plan_quadrature(rho1, x, t, o))).logdet().value.real();
    };
    Options base, fine, h1, h2;
    fine.dx_scale = 0.5;
    h1.h = 0.3;
    h2.h = 0.6;
    return std::max(std::abs(ld(base) - ld(fine)), std::abs(ld(h1) - ld(h2)));
}

double soliton_error() {
    double worst = 0.0;
    for (double t : {0.0, 0.5})
        for (double x = -5.0; x <= 5.0 + 1e-12; x += 0.125)
            worst = std::max(worst, std::abs(soliton_hankel(x, t) - soliton(x, t)));
    return worst;
}

ReconstructionReport reconstruction(double step, const Options& o) {
    std::vector<double> xs;
    for (double x = 0.25; x <= 10.0 + 1e-12; x += step) xs.push_back(x);
    for (double x : {0.5, 1.0, 2.0, 5.0})
        if (std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
    std::sort(xs.begin(), xs.end());
    std::vector<double> all;
    for (double x : xs) all.push_back(-x);
    all.insert(all.end(), xs.begin(), xs.end());
    std::vector<Sample> s = evaluate_grid(rho1, all, {0.0}, o);
    const size_t n = xs.size();
    ReconstructionReport r;
    for (size_t i = 0; i < n; ++i) {
        double x = xs[i], q = Q_closed(x, rho1);
        double ul = s[i].u, ur = s[n + i].u;
        r.left = std::max(r.left, std::abs(ul - q));
        r.right = std::max(r.right, std::abs(ur - q));
        if (x == 0.5 || x == 1.0 || x == 2.0 || x == 5.0) r.evenness = std::max(r.evenness, std::abs(ul - ur));
    }
    return r;
}

EpsReport eps_family() {
    EpsReport r;
    const double q = Q_closed(1.0, rho1);
    r.err_02 = std::abs(Q_eps(rho1, 0.2, 1.0) - q);
    r.err_01 = std::abs(Q_eps(rho1, 0.1, 1.0) - q);
    r.ratio = r.err_02 / r.err_01;
    DiscretizedHankel contour(hankel_data_eps(rho1, 0.5, 1.0, 0.0));
    r.two_path = std::abs(contour.logdet().value.real() - logdet_eps_rank3(rho1, 0.5, 1.0));
    ApproxFamily f = approx_family(rho1, 0.5);
    BiorthBasis basis(Blaschke({f.z.begin(), f.z.end()}));
    r.block = block_determinant_check(DiscretizedHankel(hankel_data_eps(rho1, 0.5, 1.0, 0.1)), basis).rel_diff;
    return r;
}

double oracle_soliton() {
    PeriodicGrid g(30.0, 1 << 12);
    std::vector<double> u0 = g.xs(), exact = g.xs();
    for (double& v : u0) v = soliton(v, 0.0);
    for (double& v : exact) v = soliton(v, 1.0);
    std::vector<double> u = evolve(u0, g, {1e-4, false}, {1.0})[0].u;
    double worst = 0.0;
    for (size_t i = 0; i < u.size(); ++i) worst = std::max(worst, std::abs(u[i] - exact[i]));
    return worst;
}

OracleReport oracle_formula(double window, double step, double L, int N) {
    PeriodicGrid g(L, N);
    std::vector<double> u0 = sample_tapered([](double x) { return Q_closed(x, rho1); }, g);
    std::vector<double> field = evolve(u0, g, {1e-4, false}, {0.25})[0].u;
    std::vector<double> xs;
    for (double x = -window; x <= window + 1e-12; x += step) xs.push_back(x);
    std::vector<Sample> s = evaluate_grid(rho1, xs, {0.25});
    std::vector<double> vals;
    for (const Sample& v : s) vals.push_back(v.u);
    CompareReport c = compare_window(xs, vals, g, field, -window, window, 5e-3);
    return {c.max_err, c.rms_err, c.count};
}

BoundednessReport boundedness(double x_step, double t_step) {
    std::vector<double> xs, ts;
    for (double x = -15.0; x <= 15.0 + 1e-12; x += x_step) xs.push_back(x);
    for (double t = 0.0; t <= 1.0 + 1e-12; t += t_step) ts.push_back(t);
    std::vector<Sample> s = evaluate_grid(rho1, xs, ts);
    BoundednessReport r;
    r.min_tau = s.front().tau;
    for (const Sample& v : s) {
        r.min_tau = std::min(r.min_tau, v.tau);
        r.max_abs_u = std::max(r.max_abs_u, std::abs(v.u));
    }
    r.samples = s.size();
    return r;
}

}  // namespace pkdv::checks
