#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pencil/problem.hpp"

namespace pencil {

struct UnsupportedCase : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Coefficients of mu_k = k pi/a + tau0 + tau1/k + tau2/k^2 for a classified
// case, by literal substitution into the printed tables (known misprints are
// NOT corrected here -- the fit diagnostic in the CLI surfaces them).
struct AsymptoticCoeffs {
    Complex tau0{}, tau1{}, tau2{};
    CaseLabel provenance;
};

// g = 0 zero structure of the leading determinant part phi0 for one case.
struct ZeroTable {
    // zero of phi0 at the origin (mu-multiplicity)
    int origin_multiplicity = 0;
    // zeros come in quadruples mu, -mu, i mu, -i mu
    bool four_axis_symmetry = true;

    // exact arithmetic progression mu_k = (c1 k + c0) pi / a for k >= kmin
    struct Progression {
        double c1, c0;
        int kmin;
    };
    std::optional<Progression> exact;

    // one simple zero per bracket interval, approaching
    // center_k = (4k + c0) pi / (4a)
    struct Brackets {
        double center_c0;
        int kmin;
    };
    std::optional<Brackets> brackets;
    // the bracket interval containing the k-th zero (only when brackets set)
    std::function<std::pair<double, double>(int k, double a)> bracket_for;

    // normalized phi0: same zeros on (0, inf) as the printed phi0 listing but
    // with the mu-power prefactor dropped and the transcendental part scaled
    // to O(1), so it is evaluable at large mu
    std::function<Complex(Complex mu, double a)> phi0;
};

// integral of g over [0, x] (adaptive Simpson, abs tol 1e-12, depth <= 40)
double G_of(const ProblemSpec& spec, double x);
inline double G_of(const ProblemSpec& spec) { return G_of(spec, spec.a); }

AsymptoticCoeffs tau_coeffs(const CaseLabel& label, const ProblemSpec& spec);

Complex seed_mu(int k, const AsymptoticCoeffs& coeffs, double a);

ZeroTable phi0_zero_table(const CaseLabel& label);

// Least-squares fit of tau1, tau2 from computed mu_k (given tau0): residuals
// mu_k - k pi/a - tau0 regressed on [1/k, 1/k^2].
struct FittedTau {
    Complex tau1{}, tau2{};
};
FittedTau fit_tau(const std::vector<std::pair<int, Complex>>& mus, double a, Complex tau0);

}  // namespace pencil
