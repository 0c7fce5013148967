#pragma once

// Pseudospectral integrator for u_t = 6 u u_x - u_xxx on a periodic box,
// used only as an independent check of the determinant formula.

#include <functional>
#include <stdexcept>
#include <vector>

namespace pkdv {

struct PeriodicGrid {
    double L = 0.0;  // box is [-L, L)
    int N = 0;       // power of two

    PeriodicGrid() = default;
    PeriodicGrid(double L_, int N_);
    double dx() const { return 2.0 * L / N; }
    double x(int j) const { return -L + j * dx(); }
    std::vector<double> xs() const;
};

struct IntegratorConfig {
    double dt = 1e-4;
    bool dealias = false;  // two-thirds rule on the nonlinear term
};

struct Snapshot {
    double t = 0.0;
    std::vector<double> u;
    double mass = 0.0;    // integral of u
    double energy = 0.0;  // integral of u^2
};

// Non-finite values during a run. last_stable_t is the last time at which
// the field was finite.
struct BlowUpError : std::runtime_error {
    double last_stable_t;
    BlowUpError(const std::string& what, double t) : std::runtime_error(what), last_stable_t(t) {}
};

// Snapshots at each requested time (ascending, >= 0). Throws DomainError when
// dt exceeds the explicit stability budget of the nonlinear term.
std::vector<Snapshot> evolve(const std::vector<double>& u0, const PeriodicGrid& grid,
                             const IntegratorConfig& config, const std::vector<double>& times);

// Samples f on the grid and multiplies by a smooth bump that is 1 inside
// (1 - fraction) L and reaches 0 at the box edge.
std::vector<double> sample_tapered(const std::function<double(double)>& f, const PeriodicGrid& grid,
                                   double fraction = 0.1);

// Trigonometric interpolant of periodic samples at an arbitrary x.
double interpolate(const std::vector<double>& u, const PeriodicGrid& grid, double x);

struct CompareReport {
    double max_err = 0.0;
    double rms_err = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    std::size_t count = 0;
    bool pass = false;
};

// Formula values at xs against the oracle field, restricted to
// window_lo <= x <= window_hi. Off-grid points are interpolated.
CompareReport compare_window(const std::vector<double>& xs, const std::vector<double>& formula,
                             const PeriodicGrid& grid, const std::vector<double>& oracle, double window_lo,
                             double window_hi, double tol);

}  // namespace pkdv
