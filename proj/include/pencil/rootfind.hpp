#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pencil/asymptotics.hpp"
#include "pencil/problem.hpp"

namespace pencil {

using CharFn = std::function<Complex(Complex)>;

// Axis-aligned rectangle in the lambda plane.
struct Contour {
    Complex lo, hi;  // lower-left and upper-right corners
};

struct Eigenvalue {
    Complex lambda{};
    Complex mu{};  // principal square root, Re >= 0 (tie: Im >= 0)
    std::optional<int> k;
    int multiplicity = 1;
    double residual = 0.0;
    std::optional<Complex> seed;     // the asymptotic seed mu_hat, if seeded
    std::optional<int> partner;      // index in the report of the -conj(lambda) mate
};

struct SpectrumReport {
    std::vector<Eigenvalue> eigs;   // sorted by Re mu
    Contour window{};
    int window_winding = 0;
    bool complete = false;          // window winding == sum of multiplicities
    int imag_axis_count = 0;        // sum of multiplicities with |Re| <= 1e-6 |lambda|
    bool parity_even = true;
    double max_symmetry_defect = 0.0;
    std::vector<Contour> unresolved;  // cells where winding did not converge
};

struct ZeroOnContour : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonConvergent : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IncompleteSpectrum : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotRegular : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Zeros of f inside c by the argument principle.  Edges are subdivided until
// consecutive phase jumps are below pi/2; throws ZeroOnContour when a sample
// magnitude falls under the guard, NonConvergent when refinement is exhausted
// or the total is not near an integer.
int winding_count(const CharFn& f, const Contour& c, double guard = 1e-11);

struct PolishResult {
    Complex z{};
    double residual = 0.0;
    bool converged = false;
    int iterations = 0;
};

// Damped Newton with complex central finite differences.  Diverges (converged
// = false) when maxit is exhausted or the iterate leaves the guard disk of
// radius `guard_radius` around the seed (guard_radius <= 0: no disk guard).
PolishResult newton_polish(const CharFn& f, Complex seed, double tol = 1e-10, int maxit = 60,
                           double guard_radius = 0.0);

// All eigenvalues with |lambda| <= radius: adaptive quadtree winding
// subdivision of the half-region Re lambda >= -delta, mirrored across
// lambda -> -conj(lambda).
std::vector<Eigenvalue> locate_low_index(const ProblemSpec& spec, double radius,
                                         double tol = 1e-10, int threads = 1,
                                         std::vector<Contour>* unresolved = nullptr);

// Seeded tail (k <= kmax) + low-index quadtree + completeness winding.
SpectrumReport solve_spectrum(const ProblemSpec& spec, int kmax, double tol = 1e-10,
                              double radius = 0.0 /* 0 = auto */, int threads = 1);

}  // namespace pencil
