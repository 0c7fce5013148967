#include "doctest.h"

#include <cmath>

#include "pkdv/hankel.hpp"
#include "pkdv/kdv.hpp"

using namespace pkdv;

namespace {

HankelData zero_symbol() {
    HankelData d;
    d.grid = sinh_grid(1.0, 129);
    d.psi = [](cplx) { return cplx(0.0); };
    d.dlog = [](cplx) { return cplx(0.0); };
    d.d2 = [](cplx) { return cplx(0.0); };
    return d;
}

// Rank-one operator gamma <., k_{i beta}> type, via a single column.
HankelData rank_one(double beta, cplx sigma) {
    HankelData d;
    d.rank.push_back({cplx(0.0, beta), sigma});
    return d;
}

}  // namespace

TEST_CASE("zero symbol") {
    DiscretizedHankel H(zero_symbol());
    CHECK((H.dense() - Eigen::MatrixXcd::Identity(129, 129)).norm() == 0.0);
    CHECK(std::abs(H.logdet().value) == 0.0);
    CHECK(std::abs(H.logdet_dx2()) == 0.0);
    auto g = [](cplx z) { return I / (z + 2.0 * I); };
    for (cplx p : {cplx(1.0), cplx(-0.3, 0.4)}) CHECK(std::abs(H.resolvent_apply(g, p) - g(p)) == 0.0);
    // No columns at all.
    DiscretizedHankel E(HankelData{});
    CHECK(E.size() == 0);
    CHECK(std::abs(E.logdet().value) == 0.0);
}

TEST_CASE("operator vanishes for phi_{x,0}, x > 0") {
    // Analytic, uniformly decaying symbol: H = 0, det = 1.
    SymbolXT s = symbol_xt(Params{1.0}, 1.0, 0.0);
    HankelData d;
    d.psi = [s](cplx k) { return s.contour_symbol(k); };
    d.grid = sinh_grid_adaptive(d.psi, 2.0, 256);
    DiscretizedHankel H(d);
    CHECK(std::abs(H.logdet().value) <= 1e-6);
    for (double m : {1.0, -1.0})
        for (double sv : {-2.0, 0.0, 1.0, 3.0}) CHECK(std::abs(H.smooth_element(m, sv)) <= 1e-8);
}

TEST_CASE("realness for symmetric symbols") {
    Params p{1.0};
    for (auto [x, t] : {std::pair{-3.0, 0.5}, std::pair{-10.0, 0.0}, std::pair{2.0, 0.3}}) {
        DiscretizedHankel H(hankel_data(p, x, t, plan_quadrature(p, x, t)));
        CHECK(std::abs(H.logdet().value.imag()) <= 1e-9);
        CHECK(std::abs(H.logdet_dx2().imag()) <= 1e-9);
    }
}

TEST_CASE("rank-one closed forms") {
    SUBCASE("det = 1 + c/(2 kappa)") {
        // residue -i c e^{-2 kappa x} at i kappa, kappa = 1, c = 2, x = 0
        DiscretizedHankel H(rank_one(1.0, I * 2.0));
        CHECK(std::abs(H.logdet().value - std::log(2.0)) <= 1e-15);
    }
    SUBCASE("contour path vs closed form (det(I+AB) = det(I+BA))") {
        // phi = -ic/(k - i beta) g(k) with g analytic and bounded above, g(i beta) = 1.
        // P_- phi = -ic/(k - i beta), so H(phi) is rank one with det 1 + c/(2 beta),
        // while the discrete matrix on a line below the pole is full.
        const double beta = 1.3, c = 0.9, b = 1.0;
        HankelData d;
        d.psi = [=](cplx k) {
            cplx g = (beta + b) / (b - I * k);
            return -I * c / (k - I * beta) * g * g * g;
        };
        d.grid = sinh_grid_adaptive(d.psi, 0.5 * beta, 1025);
        DiscretizedHankel H(d);
        CHECK(std::abs(H.logdet().value - std::log(1.0 + c / (2.0 * beta))) <= 1e-9);
    }
    SUBCASE("Sherman-Morrison resolvent") {
        const double beta = 0.8;
        const cplx sigma = I * 0.7;
        DiscretizedHankel H(rank_one(beta, sigma));
        auto g = [](cplx z) { return I / (z + cplx(0.5, 1.0)); };
        cplx p(0.0, beta);
        cplx v = g(p) / (1.0 + sigma / (2.0 * p));
        for (cplx q : {cplx(1.0), cplx(-0.4, 0.3), cplx(2.0, 1.0)})
            CHECK(std::abs(H.resolvent_apply(g, q) - (g(q) - sigma * v / (q + p))) <= 1e-10);
    }
    SUBCASE("huge weights are factored out exactly") {
        // sigma = i c e^{-2 kappa x} at x = -15: det = 1 + e^{30} (c = 2 kappa)
        DiscretizedHankel H(rank_one(1.0, I * 2.0 * std::exp(30.0)));
        CHECK(H.logdet().value.real() == doctest::Approx(30.0 + std::log1p(std::exp(-30.0))).epsilon(1e-15));
    }
}

TEST_CASE("resolvent round trip") {
    Params p{1.0};
    for (auto [x, t] : {std::pair{-3.0, 0.5}, std::pair{-3.0, 0.0}, std::pair{-8.0, 0.0}}) {
        DiscretizedHankel H(hankel_data(p, x, t, plan_quadrature(p, x, t)));
        // The forward operator multiplies f(e_c) by sigma_c, so rounding in f
        // is amplified by the largest weight (e^{2 kappa |x|} for x << 0).
        double smax = H.sigma().cwiseAbs().maxCoeff();
        double tol = std::max(1e-8, 1e-14 * smax);
        auto g = [](cplx z) { return I / (z + cplx(0.3, 0.6)); };
        auto f = [&](cplx z) { return H.resolvent_apply(g, z); };
        for (int j = 0; j < 10; ++j) {
            cplx q(-2.0 + 0.45 * j, 0.1 * (j % 3));
            CHECK(std::abs(H.apply(f, q) - g(q)) <= tol);
        }
    }
}

TEST_CASE("smooth elements are independent of the contour height") {
    Params p{1.0};
    const double x = -2.0, t = 0.3;
    // Both lines above i kappa. Higher lines are useless at this t: the
    // samples grow like exp(8 t h^3 + 2 h |x|) and the integral cancels.
    Options a, b;
    a.h = 1.2;
    b.h = 1.5;
    DiscretizedHankel Ha(hankel_data(p, x, t, plan_quadrature(p, x, t, a)));
    DiscretizedHankel Hb(hankel_data(p, x, t, plan_quadrature(p, x, t, b)));
    CHECK(std::abs(Ha.smooth_element(1.0, 1.0) - Hb.smooth_element(1.0, 1.0)) <= 1e-8);
    // Below i kappa the subtracted pole turns into a rank column.
    DiscretizedHankel Hc(hankel_data(p, x, t, plan_quadrature(p, x, t)));
    REQUIRE(Hc.size() > Hc.contour_count());
    for (double s : {-1.0, 0.0, 1.0, 2.5})
        CHECK(std::abs(Ha.smooth_element(-1.0, s) - Hc.smooth_element(-1.0, s)) <= 1e-8);
}

TEST_CASE("second x-derivative of log det") {
    SUBCASE("soliton family") {
        // log(1 + e^{-2x}) has second derivative 1 at x = 0.
        DiscretizedHankel H(hankel_data_soliton(0.0, 0.0));
        CHECK(std::abs(H.logdet_dx2() - 1.0) <= 1e-14);
        CHECK(std::abs(H.logdet_dx() + 1.0) <= 1e-14);
    }
    SUBCASE("finite-difference oracle") {
        Params p{1.0};
        const double x = -3.0, t = 0.5, d = 1e-2;
        QuadPlan plan = plan_quadrature(p, x, t);
        auto L = [&](double y) { return DiscretizedHankel(hankel_data(p, y, t, plan)).logdet().value.real(); };
        double fd = (-L(x + 2 * d) + 16 * L(x + d) - 30 * L(x) + 16 * L(x - d) - L(x - 2 * d)) / (12 * d * d);
        double fd1 = (-L(x + 2 * d) + 8 * L(x + d) - 8 * L(x - d) + L(x - 2 * d)) / (12 * d);
        DiscretizedHankel H(hankel_data(p, x, t, plan));
        CHECK(std::abs(H.logdet_dx2().real() - fd) <= 1e-6);
        CHECK(std::abs(H.logdet_dx().real() - fd1) <= 1e-6);
    }
    SUBCASE("resolvent image derivatives vs finite differences") {
        Params p{1.0};
        const double x = -1.5, t = 0.2, d = 1e-3;
        QuadPlan plan = plan_quadrature(p, x, t);
        auto image = [&](double y) {
            DiscretizedHankel H(hankel_data(p, y, t, plan));
            const auto& e = H.points();
            Eigen::VectorXcd g0(e.size()), g1(e.size()), g2(e.size());
            cplx x1 = xi(1.0, y, t);
            for (Eigen::Index c = 0; c < e.size(); ++c) {
                g0(c) = I / (e(c) - 1.0) - x1 * I / (e(c) + 1.0);
                g1(c) = -2.0 * I * x1 * I / (e(c) + 1.0);
                g2(c) = 4.0 * x1 * I / (e(c) + 1.0);
            }
            return H.resolvent_image(g0, g1, g2, 1.0);
        };
        Jet j = image(x);
        Jet p1 = image(x + d), m1 = image(x - d), p2 = image(x + 2 * d), m2 = image(x - 2 * d);
        cplx fd1 = (-p2.v + 8.0 * p1.v - 8.0 * m1.v + m2.v) / (12 * d);
        cplx fd2 = (-p2.v + 16.0 * p1.v - 30.0 * j.v + 16.0 * m1.v - m2.v) / (12 * d * d);
        CHECK(std::abs(j.d1 - fd1) <= 1e-7);
        CHECK(std::abs(j.d2 - fd2) <= 1e-5);
    }
    SUBCASE("missing derivative factors are an error") {
        HankelData d;
        d.grid = sinh_grid(1.0, 33);
        d.psi = [](cplx) { return cplx(0.0); };
        CHECK_THROWS_AS(DiscretizedHankel(d).logdet_dx2(), DomainError);
    }
}

TEST_CASE("convergence and contour independence") {
    Params p{1.0};
    for (auto [x, t] : {std::pair{-3.0, 0.5}, std::pair{-12.0, 0.25}, std::pair{5.0, 1.0}, std::pair{-3.0, 0.0}}) {
        double base = DiscretizedHankel(hankel_data(p, x, t, plan_quadrature(p, x, t))).logdet().value.real();
        Options fine;
        fine.dx_scale = 0.5;
        double ref = DiscretizedHankel(hankel_data(p, x, t, plan_quadrature(p, x, t, fine))).logdet().value.real();
        CHECK(std::abs(base - ref) <= 1e-7);
        LogDet est = logdet_estimate(hankel_data(p, x, t, plan_quadrature(p, x, t)));
        CHECK(est.est_error >= 0.0);
        CHECK(est.est_error <= 1e-5);
        CHECK(est.node_count > 0);
    }
    Options h1, h2;
    h1.h = 0.3;
    h2.h = 0.6;
    auto ld = [&](const Options& o) {
        return DiscretizedHankel(hankel_data(p, -3.0, 0.5, plan_quadrature(p, -3.0, 0.5, o))).logdet().value.real();
    };
    CHECK(std::abs(ld(h1) - ld(h2)) <= 1e-7);
}

TEST_CASE("epsilon operator: two paths and block determinant") {
    Params p{1.0};
    ApproxFamily f = approx_family(p, 0.5);
    DiscretizedHankel contour(hankel_data_eps(p, 0.5, 1.0, 0.0));
    CHECK(std::abs(contour.logdet().value.real() - logdet_eps_rank3(p, 0.5, 1.0)) <= 1e-8);

    BiorthBasis basis(Blaschke({f.z.begin(), f.z.end()}));
    BlockReport r = block_determinant_check(DiscretizedHankel(hankel_data_eps(p, 0.5, 1.0, 0.1)), basis);
    CHECK(r.ok);
    CHECK(r.rel_diff <= 1e-6);

    // t = 0, x > 0: only the three rank columns.
    HankelData pure;
    for (int n = 0; n < 3; ++n) {
        cplx z = f.z[static_cast<size_t>(n)];
        pure.rank.push_back({z, -reflection_eps_residue_zero(f, n) * xi(z, 1.0, 0.0)});
    }
    BlockReport r3 = block_determinant_check(DiscretizedHankel(pure), basis);
    CHECK(r3.rel_diff <= 1e-10);

    BlockReport r0 = block_determinant_check(DiscretizedHankel(zero_symbol()), basis);
    CHECK(std::abs(r0.lhs - 1.0) <= 1e-15);
    CHECK(std::abs(r0.rhs - 1.0) <= 1e-12);
}

TEST_CASE("split symbol build") {
    // gamma g(k)/(k - i), g = ((1 + b)/(b - ik))^3 analytic above with g(i) = 1:
    // the entire part vanishes and the pole column alone gives det = 1 - gamma/(2i).
    const cplx gamma = 0.7 * I;
    const double b = 1.0;
    Symbol s{[=](cplx k) {
                 cplx g = (1.0 + b) / (b - I * k);
                 return gamma / (k - I) * g * g * g;
             },
             {I}};
    SymbolSplit sp = split_symbol(s, 2.0);
    CHECK(std::abs(sp.poles[0].second - gamma) <= 1e-10);
    DiscretizedHankel H(sp);
    CHECK(H.size() == sp.grid.size() + 1);
    CHECK(std::abs(H.logdet().value - std::log(1.0 - gamma / (2.0 * I))) <= 1e-10);
}

TEST_CASE("singular determinant is reported") {
    // 1 + sigma/(2i beta) = 0 for sigma = -2i beta.
    const double beta = 0.7;
    HankelData d = rank_one(beta, -2.0 * I * beta);
    d.x = 1.25;
    d.t = 0.5;
    try {
        DiscretizedHankel H(d);
        FAIL("expected a singularity");
    } catch (const SingularityError& e) {
        CHECK(e.x == 1.25);
        CHECK(e.t == 0.5);
    }
}
