#include "pkdv/pde_oracle.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include "pkdv/quadrature.hpp"
#include "pkdv/types.hpp"

namespace pkdv {

PeriodicGrid::PeriodicGrid(double L_, int N_) : L(L_), N(N_) {
    if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("PeriodicGrid: L must be positive");
    if (N < 4 || (N & (N - 1)) != 0) throw DomainError("PeriodicGrid: N must be a power of two >= 4");
}

std::vector<double> PeriodicGrid::xs() const {
    std::vector<double> v(static_cast<size_t>(N));
    for (int j = 0; j < N; ++j) v[static_cast<size_t>(j)] = x(j);
    return v;
}

namespace {

// Plan creation is not thread-safe in FFTW; execution is.
std::mutex plan_mutex;

class RealFFT {
public:
    explicit RealFFT(int n) : n_(n), m_(n / 2 + 1) {
        in_ = fftw_alloc_real(static_cast<size_t>(n_));
        out_ = fftw_alloc_complex(static_cast<size_t>(m_));
        std::lock_guard<std::mutex> lock(plan_mutex);
        fwd_ = fftw_plan_dft_r2c_1d(n_, in_, out_, FFTW_ESTIMATE);
        inv_ = fftw_plan_dft_c2r_1d(n_, out_, in_, FFTW_ESTIMATE);
    }
    ~RealFFT() {
        std::lock_guard<std::mutex> lock(plan_mutex);
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(inv_);
        fftw_free(in_);
        fftw_free(out_);
    }
    RealFFT(const RealFFT&) = delete;
    RealFFT& operator=(const RealFFT&) = delete;

    void forward(const std::vector<double>& u, std::vector<cplx>& uh) {
        std::copy(u.begin(), u.end(), in_);
        fftw_execute(fwd_);
        uh.resize(static_cast<size_t>(m_));
        for (int k = 0; k < m_; ++k) uh[static_cast<size_t>(k)] = {out_[k][0], out_[k][1]};
    }
    // Normalised inverse.
    void inverse(const std::vector<cplx>& uh, std::vector<double>& u) {
        for (int k = 0; k < m_; ++k) {
            out_[k][0] = uh[static_cast<size_t>(k)].real();
            out_[k][1] = uh[static_cast<size_t>(k)].imag();
        }
        fftw_execute(inv_);
        u.resize(static_cast<size_t>(n_));
        for (int j = 0; j < n_; ++j) u[static_cast<size_t>(j)] = in_[j] / n_;
    }

private:
    int n_, m_;
    double* in_;
    fftw_complex* out_;
    fftw_plan fwd_, inv_;
};

Snapshot snapshot(double t, const std::vector<double>& u, double dx) {
    Snapshot s;
    s.t = t;
    s.u = u;
    for (double v : u) {
        s.mass += v * dx;
        s.energy += v * v * dx;
    }
    return s;
}

}  // namespace

std::vector<Snapshot> evolve(const std::vector<double>& u0, const PeriodicGrid& grid,
                             const IntegratorConfig& config, const std::vector<double>& times) {
    const int N = grid.N, M = N / 2 + 1;
    if (u0.size() != static_cast<size_t>(N)) throw DomainError("evolve: sample count does not match the grid");
    if (!(config.dt > 0.0)) throw DomainError("evolve: dt must be positive");
    for (size_t i = 0; i < times.size(); ++i)
        if (!(times[i] >= 0.0) || (i > 0 && times[i] < times[i - 1]))
            throw DomainError("evolve: times must be ascending and non-negative");
    double umax = 0.0;
    for (double v : u0) {
        if (!std::isfinite(v)) throw DomainError("evolve: initial data not finite");
        umax = std::max(umax, std::abs(v));
    }

    // Wavenumbers; the Nyquist mode carries no odd derivative.
    const double k0 = pi / grid.L;
    const double kmax = k0 * (N / 2);
    std::vector<double> k(static_cast<size_t>(M));
    for (int j = 0; j < M; ++j) k[static_cast<size_t>(j)] = j == N / 2 ? 0.0 : k0 * j;
    // RK4 covers |z| <= 2.8 on the imaginary axis; the linear part is exact.
    if (config.dt * 6.0 * std::max(umax, 1.0) * kmax > 2.8)
        throw DomainError("evolve: dt exceeds the stability budget of the nonlinear term");
    std::vector<char> keep(static_cast<size_t>(M), 1);
    if (config.dealias)
        for (int j = 0; j < M; ++j) keep[static_cast<size_t>(j)] = 3 * j < N ? 1 : 0;  // |k| < (2/3) kmax

    RealFFT fft(N);
    std::vector<double> work;
    // N(w) = 3 i k FFT(u^2), u = IFFT(w)
    auto nonlinear = [&](const std::vector<cplx>& w, std::vector<cplx>& out) {
        fft.inverse(w, work);
        for (double& v : work) v *= v;
        fft.forward(work, out);
        for (int j = 0; j < M; ++j) {
            size_t s = static_cast<size_t>(j);
            out[s] = keep[s] ? 3.0 * I * k[s] * out[s] : 0.0;
        }
    };

    std::vector<cplx> uh, E, E2, a(M), b(M), c(M), d(M), tmp(M);
    fft.forward(u0, uh);
    double cached_dt = -1.0;
    auto set_step = [&](double h) {
        if (h == cached_dt) return;
        cached_dt = h;
        E.resize(static_cast<size_t>(M));
        E2.resize(static_cast<size_t>(M));
        for (int j = 0; j < M; ++j) {
            double kk = k[static_cast<size_t>(j)];
            E[static_cast<size_t>(j)] = std::exp(I * (kk * kk * kk * h / 2.0));
            E2[static_cast<size_t>(j)] = E[static_cast<size_t>(j)] * E[static_cast<size_t>(j)];
        }
    };

    std::vector<Snapshot> out;
    double t = 0.0;
    std::vector<double> u = u0;
    for (double target : times) {
        long steps = static_cast<long>(std::ceil((target - t) / config.dt - 1e-9));
        if (steps > 0) set_step((target - t) / static_cast<double>(steps));
        for (long n = 0; n < steps; ++n) {
            const double h = cached_dt;
            nonlinear(uh, a);
            for (int j = 0; j < M; ++j) tmp[j] = E[j] * (uh[j] + 0.5 * h * a[j]);
            nonlinear(tmp, b);
            for (int j = 0; j < M; ++j) tmp[j] = E[j] * uh[j] + 0.5 * h * b[j];
            nonlinear(tmp, c);
            for (int j = 0; j < M; ++j) tmp[j] = E2[j] * uh[j] + h * E[j] * c[j];
            nonlinear(tmp, d);
            bool finite = true;
            for (int j = 0; j < M; ++j) {
                uh[j] = E2[j] * uh[j] + h / 6.0 * (E2[j] * a[j] + 2.0 * E[j] * (b[j] + c[j]) + d[j]);
                finite = finite && std::isfinite(uh[j].real()) && std::isfinite(uh[j].imag());
            }
            if (!finite) throw BlowUpError("evolve: field is no longer finite", t + n * h);
        }
        t = target;
        fft.inverse(uh, u);
        out.push_back(snapshot(t, u, grid.dx()));
    }
    return out;
}

std::vector<double> sample_tapered(const std::function<double(double)>& f, const PeriodicGrid& grid,
                                   double fraction) {
    if (!(fraction > 0.0) || !(fraction < 1.0)) throw DomainError("sample_tapered: fraction must be in (0, 1)");
    std::vector<double> u(static_cast<size_t>(grid.N));
    const double inner = (1.0 - fraction) * grid.L, width = fraction * grid.L;
    for (int j = 0; j < grid.N; ++j) {
        double x = grid.x(j);
        double w = smooth_cutoff((std::abs(x) - inner) / width);
        u[static_cast<size_t>(j)] = w > 0.0 ? w * f(x) : 0.0;
    }
    return u;
}

double interpolate(const std::vector<double>& u, const PeriodicGrid& grid, double x) {
    const int N = grid.N;
    if (u.size() != static_cast<size_t>(N)) throw DomainError("interpolate: sample count does not match the grid");
    // sum_j u_j D(x - x_j) with the periodic sinc kernel
    // D = sin(N y) cot(y) / N, y = pi (x - x_j) / 2L.
    double acc = 0.0;
    for (int j = 0; j < N; ++j) {
        double y = pi * (x - grid.x(j)) / (2.0 * grid.L);  // half the phase over the box
        double s = std::sin(y);
        double kernel = std::abs(s) < 1e-14 ? 1.0 : std::sin(N * y) * std::cos(y) / (N * s);
        acc += u[static_cast<size_t>(j)] * kernel;
    }
    return acc;
}

CompareReport compare_window(const std::vector<double>& xs, const std::vector<double>& formula,
                             const PeriodicGrid& grid, const std::vector<double>& oracle, double window_lo,
                             double window_hi, double tol) {
    if (xs.size() != formula.size()) throw DomainError("compare_window: xs and values differ in length");
    if (!(window_lo < window_hi) || window_lo <= -grid.L || window_hi >= grid.L)
        throw DomainError("compare_window: window must lie strictly inside the box");
    CompareReport r;
    r.window_lo = window_lo;
    r.window_hi = window_hi;
    double sq = 0.0;
    const double h = grid.dx();
    for (size_t i = 0; i < xs.size(); ++i) {
        double x = xs[i];
        if (x < window_lo || x > window_hi) continue;
        double jr = (x + grid.L) / h;
        long j = std::lround(jr);
        double ov = std::abs(jr - static_cast<double>(j)) < 1e-9 ? oracle.at(static_cast<size_t>(j))
                                                                 : interpolate(oracle, grid, x);
        double e = std::abs(formula[i] - ov);
        r.max_err = std::max(r.max_err, e);
        sq += e * e;
        ++r.count;
    }
    if (r.count == 0) throw DomainError("compare_window: no sample inside the window");
    r.rms_err = std::sqrt(sq / static_cast<double>(r.count));
    r.pass = r.max_err <= tol;
    return r;
}

}  // namespace pkdv
