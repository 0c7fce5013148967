#include "doctest.h"

#include <cmath>

#include "pkdv/kdv.hpp"
#include "pkdv/pde_oracle.hpp"

using namespace pkdv;

namespace {

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(PeriodicGrid(10.0, 1000), DomainError);
    CHECK_THROWS_AS(PeriodicGrid(-1.0, 64), DomainError);
    PeriodicGrid g(10.0, 64);
    CHECK(g.dx() == doctest::Approx(20.0 / 64));
    CHECK(g.xs().front() == -10.0);
}

TEST_CASE("zero data stays zero") {
    PeriodicGrid g(20.0, 256);
    auto snaps = evolve(std::vector<double>(256, 0.0), g, {}, {0.1, 0.5});
    REQUIRE(snaps.size() == 2);
    for (const auto& s : snaps)
        for (double v : s.u) CHECK(v == 0.0);
}

TEST_CASE("soliton propagation and conservation") {
    PeriodicGrid g(30.0, 1 << 12);
    auto u0 = g.xs();
    for (double& v : u0) v = soliton(v, 0.0);
    auto snaps = evolve(u0, g, {1e-4, false}, {0.0, 1.0});
    REQUIRE(snaps.size() == 2);
    std::vector<double> exact = g.xs();
    for (double& v : exact) v = soliton(v, 1.0);
    double err = max_diff(snaps[1].u, exact);
    MESSAGE("soliton error at T=1: " << err);
    CHECK(err <= 1e-6);
    CHECK(std::abs(snaps[1].mass - snaps[0].mass) <= 1e-8);
    CHECK(snaps[0].mass == doctest::Approx(-4.0).epsilon(1e-12));
    CHECK(std::abs(snaps[1].energy - snaps[0].energy) <= 1e-8);
}

TEST_CASE("fourth-order time stepping") {
    PeriodicGrid g(30.0, 1 << 10);
    auto u0 = g.xs();
    for (double& v : u0) v = soliton(v + 2.0, 0.0);
    auto run = [&](double dt) { return evolve(u0, g, {dt, false}, {0.25})[0].u; };
    auto a = run(4e-3), b = run(2e-3), c = run(1e-3);
    double order = std::log2(max_diff(a, b) / max_diff(b, c));
    MESSAGE("observed order " << order);
    CHECK(order >= 3.5);
    CHECK(order <= 4.5);
    CHECK(max_diff(run(1e-4), run(5e-5)) <= 1e-8);
}

TEST_CASE("dealiasing leaves a well-resolved field alone") {
    PeriodicGrid g(30.0, 1 << 10);
    auto u0 = g.xs();
    for (double& v : u0) v = soliton(v, 0.0);
    auto plain = evolve(u0, g, {1e-3, false}, {0.2})[0].u;
    auto dealiased = evolve(u0, g, {1e-3, true}, {0.2})[0].u;
    CHECK(max_diff(plain, dealiased) <= 1e-10);
}

TEST_CASE("stability guard and blow-up reporting") {
    PeriodicGrid g(30.0, 1 << 12);
    auto u0 = g.xs();
    for (double& v : u0) v = soliton(v, 0.0);
    CHECK_THROWS_AS(evolve(u0, g, {1e-2, false}, {0.1}), DomainError);
    u0[5] = std::nan("");
    CHECK_THROWS_AS(evolve(u0, g, {1e-4, false}, {0.1}), DomainError);
}

TEST_CASE("band-limited interpolation and comparison") {
    PeriodicGrid g(5.0, 64);
    std::vector<double> u(64);
    auto f = [&](double x) { return std::cos(3 * pi * x / g.L) + 0.5 * std::sin(7 * pi * x / g.L) + 0.25; };
    for (int j = 0; j < 64; ++j) u[static_cast<size_t>(j)] = f(g.x(j));
    for (double x : {-4.31, -0.05, 0.0, 1.777, 4.9}) CHECK(std::abs(interpolate(u, g, x) - f(x)) <= 1e-12);

    auto xs = g.xs();
    CompareReport same = compare_window(xs, u, g, u, -3.0, 3.0, 1e-12);
    CHECK(same.max_err == 0.0);
    CHECK(same.pass);
    std::vector<double> off{-2.5, 0.3, 2.2}, vals{f(-2.5), f(0.3), f(2.2) + 1e-3};
    CompareReport r = compare_window(off, vals, g, u, -3.0, 3.0, 1e-4);
    CHECK(r.count == 3);
    CHECK(r.max_err == doctest::Approx(1e-3).epsilon(1e-6));
    CHECK_FALSE(r.pass);
    CHECK_THROWS_AS(compare_window(off, vals, g, u, -6.0, 3.0, 1e-4), DomainError);
}

TEST_CASE("taper") {
    PeriodicGrid g(100.0, 1 << 12);
    auto u = sample_tapered([](double x) { return Q_closed(x, Params{1.0}); }, g);
    CHECK(std::abs(u.front()) <= 1e-6);
    CHECK(std::abs(u.back() - u.front()) <= 1e-6);
    CHECK(u[2048 + 100] == Q_closed(g.x(2048 + 100), Params{1.0}));
}

TEST_CASE("Hankel soliton against the oracle") {
    PeriodicGrid g(40.0, 1 << 12);
    auto u0 = g.xs();
    for (double& v : u0) v = soliton(v, 0.0);
    auto field = evolve(u0, g, {1e-4, false}, {0.5})[0].u;
    std::vector<double> xs, vals;
    for (double x = -10.0; x <= 10.0; x += 0.25) {
        xs.push_back(x);
        vals.push_back(soliton_hankel(x, 0.5));
    }
    CompareReport r = compare_window(xs, vals, g, field, -10.0, 10.0, 1e-5);
    MESSAGE("hankel soliton vs oracle: " << r.max_err);
    CHECK(r.pass);
}

TEST_CASE("determinant formula against the oracle at (0.5, 0.25)") {
    const Params p{1.0};
    PeriodicGrid g(400.0, 1 << 15);
    auto u0 = sample_tapered([&](double x) { return Q_closed(x, p); }, g);
    auto field = evolve(u0, g, {1e-4, false}, {0.25})[0].u;
    std::vector<double> xs{0.5, -2.0, 3.0}, vals;
    for (double x : xs) vals.push_back(u_total(p, x, 0.25));
    CompareReport r = compare_window(xs, vals, g, field, -8.0, 8.0, 5e-3);
    MESSAGE("formula vs oracle: max " << r.max_err);
    CHECK(r.pass);
}
