#pragma once

#include <array>
#include <complex>
#include <stdexcept>

#include "pencil/problem.hpp"

namespace pencil {

// Quasi-derivative 4-vector (y, y', y'', y''' - g y') of one solution at a point.
struct QuasiState {
    std::array<Complex, 4> u{};
};

// Canonical fundamental system in quasi-derivative form: column j (0-based)
// is the solution with u_m(0) = delta_{m,j}.  m[row][col].  Each column may
// have been rescaled by 2^{-log2_scale[col]} during integration; the true
// value of entry (m,j) is m[m][j] * 2^{log2_scale[j]}.
struct FundamentalMatrix {
    std::array<std::array<Complex, 4>, 4> m{};
    std::array<int, 4> log2_scale{0, 0, 0, 0};
    double x = 0.0;
    Complex lambda{};
};

// Normalized characteristic determinant: value * scale = det M(lambda),
// scale > 0, so the zero sets (with multiplicities) coincide.
struct CharValue {
    Complex value{};
    double scale = 1.0;
};

struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Right-hand side of the first-order quasi-derivative system (needs g, not g').
QuasiState flow_rhs(double x, const QuasiState& s, Complex lambda, double g_at_x);

// Exact fundamental matrix for g = 0 via derivatives of (sinh - sin)/(2 mu^3);
// the mu -> 0 limit is taken by series.  lambda = mu^2.
FundamentalMatrix closed_form_fundamental(Complex mu, double x);

// One adaptive embedded Runge-Kutta sweep 0 -> a of the four canonical
// columns.  Local error per unit step <= tol * column sup-norm; columns are
// rescaled by powers of two when they grow, with exponents recorded.
FundamentalMatrix integrate_fundamental(const ProblemSpec& spec, Complex lambda,
                                        double tol = 1e-10);

enum class FundPath { Auto, Closed, Ode };

// det of the 4x4 boundary-form matrix M(lambda), normalized by the product of
// row sup-norms.  Accurate only while |mu| a is moderate (cancellation grows
// like e^{2|Re mu| a}); use char_det_stable for root finding.
CharValue char_det(const ProblemSpec& spec, Complex lambda, double tol = 1e-10,
                   FundPath path = FundPath::Auto);

// Cancellation-free evaluation of the same determinant: exponential-sum
// closed form when g is identically zero, otherwise the second-compound
// (wedge) system of the quasi-derivative flow.  Usable at any |mu| that the
// exponent range of double admits.
CharValue char_det_stable(const ProblemSpec& spec, Complex lambda, double tol = 1e-10);

}  // namespace pencil
