#include "pencil/asymptotics.hpp"

#include <cmath>

namespace pencil {

namespace {

constexpr double PI = 3.14159265358979323846;
const Complex I(0.0, 1.0);

double simpson(const std::function<double(double)>& f, double lo, double hi, double flo,
               double fmid, double fhi, double whole, double tol, int depth) {
    double mid = 0.5 * (lo + hi);
    double lmid = f(0.5 * (lo + mid)), rmid = f(0.5 * (mid + hi));
    double left = (mid - lo) / 6.0 * (flo + 4.0 * lmid + fmid);
    double right = (hi - mid) / 6.0 * (fmid + 4.0 * rmid + fhi);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, lo, mid, flo, lmid, fmid, left, tol / 2.0, depth - 1) +
           simpson(f, mid, hi, fmid, rmid, fhi, right, tol / 2.0, depth - 1);
}

// sin, cos scaled by e^{-|Im z|}; sinh, cosh scaled by e^{-|Re z|}.  Keeps
// every product of one circular and one hyperbolic factor O(1) at any mu.
struct ScaledTrig {
    Complex S, C, Sh, Ch;
    double log_drop;  // log of the factor divided out of circular*hyperbolic products
};

ScaledTrig scaled_trig(Complex z) {
    ScaledTrig t;
    double ay = std::abs(z.imag()), ax = std::abs(z.real());
    // sin z = (e^{iz} - e^{-iz}) / 2i; scale both exponentials by e^{-|Im z|}
    Complex eiz = std::exp(Complex(-z.imag() - ay, z.real()));
    Complex eniz = std::exp(Complex(z.imag() - ay, -z.real()));
    t.S = (eiz - eniz) / (2.0 * I);
    t.C = (eiz + eniz) / 2.0;
    Complex ez = std::exp(Complex(z.real() - ax, z.imag()));
    Complex enz = std::exp(Complex(-z.real() - ax, -z.imag()));
    t.Sh = (ez - enz) / 2.0;
    t.Ch = (ez + enz) / 2.0;
    t.log_drop = ax + ay;
    return t;
}

double g_at(const ProblemSpec& spec, double x) {
    double v = spec.g.eval(x);
    if (!std::isfinite(v)) throw UnsupportedCase("NonFiniteCoefficient: g not finite at x");
    return v;
}

}  // namespace


namespace {
// bracket of half-period radius around the asymptotic center (4k + c0) pi/(4a);
// consecutive zeros are pi/a apart, so each bracket holds exactly one
auto centered_bracket(double c0) {
    return [c0](int k, double a) {
        double center = (4.0 * k + c0) * PI / (4.0 * a);
        return std::make_pair(center - 0.5 * PI / a, center + 0.5 * PI / a);
    };
}
}  // namespace

double G_of(const ProblemSpec& spec, double x) {
    auto f = [&](double t) { return g_at(spec, t); };
    if (x == 0.0) return 0.0;
    double flo = f(0.0), fhi = f(x), fmid = f(0.5 * x);
    double whole = x / 6.0 * (flo + 4.0 * fmid + fhi);
    return simpson(f, 0.0, x, flo, fmid, fhi, whole, 1e-12, 40);
}

AsymptoticCoeffs tau_coeffs(const CaseLabel& label, const ProblemSpec& spec) {
    AsymptoticCoeffs out;
    out.provenance = label;
    const double a = spec.a;
    const double G = G_of(spec);
    const double g0 = g_at(spec, 0.0);
    const double ga = g_at(spec, a);
    const int c = label.left_case;

    if (label.right_class == RightClass::FlexibleMissile) {
        out.tau0 = -5.0 * PI / (2.0 * a);
        out.tau1 = G / (4.0 * PI);
        out.tau2 = (5.0 / 8.0) * G / (PI * PI) + a / (4.0 * PI * PI) * (5.0 * g0 + 3.0 * ga);
        return out;
    }
    if (c < 1 || c > 6)
        throw UnsupportedCase("no asymptotic table covers left case 'other'");

    const Complex b3 = spec.right(0).beta;
    const Complex b4 = spec.right(1).beta;
    if (b3 == 0.0 || b4 == 0.0)
        throw UnsupportedCase("asymptotic tables require beta3, beta4 != 0");

    if (label.right_class == RightClass::CaseA1) {
        const Complex ib = 0.5 * I / PI * (1.0 / b3 + 1.0 / b4);
        const Complex sq = 1.0 / (b3 * b3) + 1.0 / (b4 * b4) - 2.0 / (b3 * b4);
        const Complex sq_plus = 1.0 / (b3 * b3) + 1.0 / (b4 * b4) + 2.0 / (b3 * b4);
        out.tau1 = G / (4.0 * PI) + ib;
        switch (c) {
            case 1:  // (p1,p2) = (0,1)
                out.tau0 = -3.0 * PI / (4.0 * a);
                out.tau2 = 3.0 / 16.0 * G / PI - 0.25 * g0 / (PI * PI) -
                           0.25 * a / (PI * PI) * sq + 0.75 * ib;
                break;
            case 2:  // (0,2)
                out.tau0 = -PI / a;
                out.tau2 = 0.25 * G / PI - 0.25 * a / (PI * PI) * sq_plus + ib;
                break;
            case 3:  // (0,3)
            case 4:  // (1,2) -- table identical to (0,3)
                out.tau0 = -5.0 * PI / (4.0 * a);
                out.tau2 = 5.0 / 16.0 * G / PI - 0.25 * a * g0 / (PI * PI) -
                           0.25 * a / (PI * PI) * sq + 1.25 * ib;
                break;
            case 5:  // (1,3)
                out.tau0 = -PI / (2.0 * a);
                out.tau2 = G / (8.0 * PI) + 0.5 * ib - 0.25 * a / (PI * PI) * sq;
                break;
            case 6:  // (2,3)
                out.tau0 = -7.0 * PI / (4.0 * a);
                out.tau2 = 7.0 / 16.0 * G / PI + 0.75 * a * g0 / PI + 1.75 * ib -
                           0.25 * a / (PI * PI) * sq;
                break;
        }
        return out;
    }

    if (label.right_class == RightClass::CaseA2) {
        const Complex ib = 0.5 * I / PI * (1.0 - b3 * b4) / b3;
        const Complex sq_plus =
            a * (b3 * b3 * b4 * b4 + 2.0 * b3 * b4 + 1.0) / (PI * PI * b3 * b3);
        const Complex sq_minus =
            a * (b3 * b3 * b4 * b4 - 2.0 * b3 * b4 + 1.0) / (PI * PI * b3 * b3);
        switch (c) {
            case 1:  // (0,1)
                out.tau0 = -PI / (4.0 * a);
                out.tau1 = G / (4.0 * PI) + ib;
                out.tau2 = G / (16.0 * PI) - 0.25 * a * g0 / (PI * PI) - 0.25 * sq_plus +
                           0.25 * ib;
                break;
            case 2:  // (0,2)
                out.tau0 = -PI / (2.0 * a);
                out.tau1 = G / (4.0 * PI) + ib;
                out.tau2 = G / (8.0 * PI) - 0.25 * sq_plus + 0.5 * ib;
                break;
            case 3:  // (0,3)
            case 4:  // (1,2) -- table identical to (0,3)
                out.tau0 = -5.0 * PI / (4.0 * a);
                out.tau1 = 0.5 * (b3 * b4 - 1.0) / (PI * b3) - 0.25 * I * G / PI;
                out.tau2 = -G * G * a / (16.0 * PI * PI) +
                           0.25 * a * G / (PI * PI) * (b3 * b4 - 1.0) / b3 +
                           5.0 / 8.0 * (b3 * b4 - 1.0) / (PI * b3) - 0.25 * sq_minus -
                           5.0 * I / 16.0 * G / PI;
                break;
            case 5:  // (1,3)
                out.tau0 = -PI / a;
                out.tau1 = G / (4.0 * PI) + ib;
                out.tau2 = 0.25 * G / PI - 0.25 * sq_plus - 0.5 * ib;
                break;
            case 6: {  // (2,3); the extra 1/pi inside the ib-like factor is as printed
                const Complex ibp = 0.5 * I / PI * (1.0 - b3 * b4) / (PI * b3);
                out.tau0 = -5.0 * PI / (4.0 * a);
                out.tau1 = G / (4.0 * PI) + ibp;
                out.tau2 = 5.0 / 16.0 * G / PI + 0.75 * a * g0 / (PI * PI) - 0.25 * sq_plus +
                           1.25 * ibp;
                break;
            }
        }
        return out;
    }

    throw UnsupportedCase("no asymptotic table covers this right class");
}

Complex seed_mu(int k, const AsymptoticCoeffs& coeffs, double a) {
    double kd = k;
    return kd * PI / a + coeffs.tau0 + coeffs.tau1 / kd + coeffs.tau2 / (kd * kd);
}

ZeroTable phi0_zero_table(const CaseLabel& label) {
    ZeroTable t;
    const int c = label.left_case;

    if (label.right_class == RightClass::FlexibleMissile) {
        t.origin_multiplicity = 8;
        // one simple zero in [2m pi/a, (2m+1/2) pi/a] and [(2m+3/2) pi/a,
        // (2m+2) pi/a] for m >= 1; tends to (2k-5) pi / (2a)
        t.brackets = ZeroTable::Brackets{-10.0, 4};  // centers (4k-10) pi/(4a)
        t.bracket_for = [](int k, double a) {
            // zeros alternate between [2m pi, (2m+1/2) pi] (k odd) and
            // [(2m+3/2) pi, (2m+2) pi] (k even), scaled by 1/a
            if (k % 2 == 1) {
                double m = (k - 3) / 2;
                return std::make_pair(2.0 * m * PI / a, (2.0 * m + 0.5) * PI / a);
            }
            double m = (k - 4) / 2;
            return std::make_pair((2.0 * m + 1.5) * PI / a, (2.0 * m + 2.0) * PI / a);
        };
        t.phi0 = [](Complex mu, double a) {
            auto s = scaled_trig(mu * a);
            // 2 mu^4 (1 - cos cosh), mu-power and constant dropped
            return std::exp(-s.log_drop) - s.C * s.Ch;
        };
        return t;
    }
    if (c < 1 || c > 6) throw UnsupportedCase("no phi0 listing for left case 'other'");

    if (label.right_class == RightClass::CaseA1) {
        t.origin_multiplicity = (c == 6) ? 8 : 4;
        switch (c) {
            case 1:
                t.brackets = ZeroTable::Brackets{-3.0, 2};
                t.bracket_for = centered_bracket(-3.0);
                t.phi0 = [](Complex mu, double a) {
                    auto s = scaled_trig(mu * a);
                    return s.C * s.Sh - s.S * s.Ch;  // from mu (cos sinh - sin cosh)
                };
                break;
            case 2:
                t.exact = ZeroTable::Progression{1.0, -1.0, 2};  // (k-1) pi / a
                t.phi0 = [](Complex mu, double a) {
                    auto s = scaled_trig(mu * a);
                    return -s.S * s.Sh;  // from -mu^2 sin sinh
                };
                break;
            case 3:
            case 4:
                t.brackets = ZeroTable::Brackets{-5.0, 2};
                t.bracket_for = centered_bracket(-5.0);
                t.phi0 = [](Complex mu, double a) {
                    auto s = scaled_trig(mu * a);
                    return -(s.S * s.Ch + s.C * s.Sh);  // from -mu^3 (sin cosh + cos sinh)
                };
                break;
            case 5:
                t.exact = ZeroTable::Progression{1.0, -0.5, 2};  // (2k-1) pi / (2a)
                t.phi0 = [](Complex mu, double a) {
                    auto s = scaled_trig(mu * a);
                    return -2.0 * s.C * s.Ch;  // from -2 mu^4 cos cosh
                };
                break;
            case 6:
                t.brackets = ZeroTable::Brackets{-7.0, 3};
                t.bracket_for = centered_bracket(-7.0);
                t.phi0 = [](Complex mu, double a) {
                    auto s = scaled_trig(mu * a);
                    return s.S * s.Ch - s.C * s.Sh;  // from mu^5 (sin cosh - cos sinh)
                };
                break;
        }
        return t;
    }

    if (label.right_class == RightClass::CaseA2) {
        t.origin_multiplicity = (c <= 2) ? 2 : 6;
        switch (c) {
            case 1:
                t.brackets = ZeroTable::Brackets{-1.0, 1};
                t.bracket_for = centered_bracket(-1.0);
                t.phi0 = [](Complex mu, double a) {
                    auto s = scaled_trig(mu * a);
                    return s.C * s.Sh + s.S * s.Ch;  // from mu (cos sinh + sin cosh)
                };
                break;
            case 2:
                t.exact = ZeroTable::Progression{1.0, -0.5, 1};  // (2k-1) pi / (2a)
                t.phi0 = [](Complex mu, double a) {
                    auto s = scaled_trig(mu * a);
                    return s.C * s.Ch;  // from mu^2 cos cosh
                };
                break;
            case 3:
            case 4:
                t.brackets = ZeroTable::Brackets{-3.0, 2};
                t.bracket_for = centered_bracket(-3.0);
                t.phi0 = [](Complex mu, double a) {
                    auto s = scaled_trig(mu * a);
                    return s.C * s.Sh - s.S * s.Ch;  // from mu^3 (cos sinh - sin cosh)
                };
                break;
            case 5:
                t.exact = ZeroTable::Progression{1.0, -1.0, 2};  // (k-1) pi / a
                t.phi0 = [](Complex mu, double a) {
                    auto s = scaled_trig(mu * a);
                    return -2.0 * s.S * s.Sh;  // from -2 mu^4 sin sinh
                };
                break;
            case 6:
                t.brackets = ZeroTable::Brackets{-5.0, 2};
                t.bracket_for = centered_bracket(-5.0);
                t.phi0 = [](Complex mu, double a) {
                    auto s = scaled_trig(mu * a);
                    return -(s.S * s.Ch + s.C * s.Sh);  // from -mu^5 (sin cosh + cos sinh)
                };
                break;
        }
        return t;
    }

    throw UnsupportedCase("no phi0 listing for this right class");
}

FittedTau fit_tau(const std::vector<std::pair<int, Complex>>& mus, double a, Complex tau0) {
    // normal equations for residual ~ tau1/k + tau2/k^2
    double s11 = 0, s12 = 0, s22 = 0;
    Complex r1 = 0, r2 = 0;
    for (const auto& [k, mu] : mus) {
        double x1 = 1.0 / k, x2 = x1 * x1;
        Complex res = mu - double(k) * PI / a - tau0;
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        r1 += x1 * res;
        r2 += x2 * res;
    }
    double det = s11 * s22 - s12 * s12;
    FittedTau f;
    if (det != 0.0) {
        f.tau1 = (s22 * r1 - s12 * r2) / det;
        f.tau2 = (s11 * r2 - s12 * r1) / det;
    }
    return f;
}

}  // namespace pencil
