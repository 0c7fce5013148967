#pragma once

#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pkdv {

using cplx = std::complex<double>;
using ComplexFn = std::function<cplx(cplx)>;

inline constexpr cplx I{0.0, 1.0};
inline constexpr double pi = std::numbers::pi;

// Raised for inputs outside the mathematical domain of an operation
// (eps >= rho, evaluation exactly at a pole, ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// A vanishing Fredholm determinant or a non-positive tau. These mark a
// genuine singularity of the solution, so callers get the location.
struct SingularityError : std::runtime_error {
    double x, t;
    SingularityError(const std::string& what, double x_, double t_)
        : std::runtime_error(what), x(x_), t(t_) {}
};

}  // namespace pkdv
