// Acceptance gate: one PASS/FAIL line per criterion, exit 0 only if all pass.
// Tolerances are pinned here; do not loosen them to make a run green.

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "pencil/asymptotics.hpp"
#include "pencil/charfn.hpp"
#include "pencil/rootfind.hpp"
#include "testutil.hpp"

using namespace pencil;
using namespace pencil::testutil;

static const double PI = 3.14159265358979323846;

namespace {

int g_threads = 4;

struct Instance {
    std::string name;
    ProblemSpec spec;
    int kmax;
    bool is_a1 = false, is_a2 = false;
    bool fit_only = false;  // suspected-typo case: fit diagnostic, no gap gate
};

struct Solved {
    Instance inst;
    SpectrumReport rep;
    AsymptoticCoeffs coeffs;
};

std::vector<Solved> g_solved;  // shared across criteria 2, 4, 5, 6

const Solved& solve_cached(const Instance& inst) {
    for (const auto& s : g_solved)
        if (s.inst.name == inst.name) return s;
    Solved s{inst, solve_spectrum(inst.spec, inst.kmax, 1e-10, 0.0, g_threads),
             tau_coeffs(classify_case(inst.spec), inst.spec)};
    g_solved.push_back(std::move(s));
    return g_solved.back();
}

// scaled gaps |mu_k - mu_hat_k| k^2 for the seeded, indexed eigenvalues
std::map<int, double> scaled_gaps(const Solved& s) {
    std::map<int, double> out;
    for (const auto& e : s.rep.eigs)
        if (e.k && *e.k >= 1 && e.seed)
            out[*e.k] = std::abs(e.mu - *e.seed) * double(*e.k) * double(*e.k);
    return out;
}

bool gaps_decreasing(const std::map<int, double>& g, int klo, int khi, std::string& why) {
    double prev = -1.0;
    for (int k = klo; k <= khi; ++k) {
        auto it = g.find(k);
        if (it == g.end()) {
            why = "missing index k=" + std::to_string(k);
            return false;
        }
        if (prev >= 0.0 && it->second > prev + 1e-9) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "gap rises at k=%d (%.6f -> %.6f)", k, prev,
                          it->second);
            why = buf;
            return false;
        }
        prev = it->second;
    }
    return true;
}

double bisect_oracle(double lo, double hi) {
    auto h = [](double x) { return 1.0 - std::cos(x) * std::cosh(x); };
    double flo = h(lo);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (h(mid) * flo > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct Gate {
    bool all_ok = true;
    void line(int n, bool ok, const std::string& detail) {
        std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", n, detail.c_str());
        if (!ok) all_ok = false;
    }
    void note(const std::string& s) { std::printf("       %s\n", s.c_str()); }
};

std::string fmtg(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------------------

void criterion1(Gate& gate) {
    Instance inst{"missile g=0", make_missile("0"), 12};
    const Solved& s = solve_cached(inst);

    bool ok = true;
    std::string detail;
    for (int k = 4; k <= 7; ++k) {
        double center = (2.0 * k - 5.0) * PI / 2.0;
        double oracle = bisect_oracle(center - 0.3, center + 0.3);
        bool found = false;
        for (const auto& e : s.rep.eigs)
            if (e.k && *e.k == k && std::abs(e.mu.real() - oracle) < 1e-8 &&
                std::abs(e.mu.imag()) < 1e-8)
                found = true;
        if (!found) {
            ok = false;
            detail = "mu_" + std::to_string(k) + " does not match the bisection oracle " +
                     fmtg(oracle) + " to 1e-8";
        }
    }

    std::map<int, double> gap;
    for (const auto& e : s.rep.eigs)
        if (e.k && *e.k >= 4) gap[*e.k] = std::abs(e.mu.real() - (2.0 * *e.k - 5.0) * PI / 2.0);
    for (int k = 5; k <= 12 && ok; ++k) {
        if (!gap.count(k) || !gap.count(k - 1)) {
            ok = false;
            detail = "missing index in the gap ladder";
            break;
        }
        if (gap[k] >= gap[k - 1]) {
            ok = false;
            detail = "gap not monotone at k=" + std::to_string(k);
        }
        if (k >= 6 && gap[k] >= 1e-3) {
            ok = false;
            detail = "gap " + fmtg(gap[k]) + " >= 1e-3 at k=" + std::to_string(k);
        }
    }
    gate.line(1, ok, ok ? "missile g=0 matches the 1-cos*cosh oracle; gaps shrink under 1e-3"
                        : detail);
}

void criterion2(Gate& gate) {
    bool ok = true;
    std::string detail;
    for (const char* g : {"1", "x"}) {
        Instance inst{std::string("missile g=") + g, make_missile(g), 40};
        const Solved& s = solve_cached(inst);
        for (const auto& e : s.rep.eigs)
            if (std::abs(e.lambda.imag()) >= 1e-7 * (1.0 + std::abs(e.lambda))) {
                ok = false;
                detail = inst.name + ": eigenvalue off the real axis, Im = " +
                         fmtg(e.lambda.imag());
            }
        std::map<int, double> gaps = scaled_gaps(s);
        std::string why;
        if (!gaps_decreasing(gaps, 10, 40, why)) {
            ok = false;
            detail = inst.name + ": " + why;
        }
        double last = gaps.count(40) ? gaps[40] : 1e9;
        gate.note(inst.name + ": scaled gap at k=40 is " + fmtg(last) + " (gate: < 0.05)");
        if (last >= 0.05) {
            ok = false;
            if (detail.empty())
                detail = inst.name + ": final scaled gap " + fmtg(last) + " >= 0.05";
        }
    }
    gate.line(2, ok, ok ? "missile g=1 and g=x: real spectra, o(k^-2) gap trend under 0.05"
                        : detail);
}

void criterion3(Gate& gate) {
    struct Pick {
        ProblemSpec spec;
        const char* name;
    };
    Pick picks[] = {{make_caseA1(2, 1.0, 1.0), "A1 case 2"},
                    {make_caseA1(5, 1.0, 1.0), "A1 case 5"},
                    {make_caseA2(2, 1.0, -1.0), "A2 case 2"},
                    {make_caseA2(5, 1.0, -1.0), "A2 case 5"}};
    bool ok = true;
    std::string detail;
    for (const auto& p : picks) {
        ZeroTable zt = phi0_zero_table(classify_case(p.spec));
        if (!zt.exact) {
            ok = false;
            detail = std::string(p.name) + ": no exact progression in the table";
            continue;
        }
        for (int k = 2; k <= 30; ++k) {
            double mu = (zt.exact->c1 * k + zt.exact->c0) * PI / p.spec.a;
            double v = std::abs(zt.phi0(Complex(mu), p.spec.a));
            if (v >= 1e-10) {
                ok = false;
                detail = std::string(p.name) + ": |phi0| = " + fmtg(v) + " at k=" +
                         std::to_string(k);
            }
        }
    }
    gate.line(3, ok, ok ? "exact g=0 progressions annihilate the closed-form phi0 to 1e-10"
                        : detail);
}

void criterion4(Gate& gate) {
    bool ok = true;
    std::vector<std::string> fails;
    for (int a1 = 1; a1 >= 0; --a1) {
        for (int lc = 1; lc <= 6; ++lc) {
            for (const char* g : {"0", "1"}) {
                Instance inst;
                inst.kmax = 40;
                if (a1) {
                    inst.name = "A1 case " + std::to_string(lc) + " g=" + g;
                    inst.spec = make_caseA1(lc, 1.0, 1.0, g);
                    inst.is_a1 = true;
                } else {
                    inst.name = "A2 case " + std::to_string(lc) + " g=" + g;
                    inst.spec = make_caseA2(lc, 1.0, -1.0, g);
                    inst.is_a2 = true;
                    inst.fit_only = (lc == 3 || lc == 4 || lc == 6);
                }
                const Solved& s = solve_cached(inst);
                std::map<int, double> gaps = scaled_gaps(s);
                if (inst.fit_only) {
                    // suspected misprints: emit the fit diagnostic, do not gate
                    std::vector<std::pair<int, Complex>> mus;
                    for (const auto& e : s.rep.eigs)
                        if (e.k && *e.k >= 20) mus.push_back({*e.k, e.mu});
                    FittedTau ft = fit_tau(mus, inst.spec.a, s.coeffs.tau0);
                    double rel = std::abs(ft.tau1 - s.coeffs.tau1) /
                                 std::max(1e-300, std::abs(s.coeffs.tau1));
                    char buf[256];
                    std::snprintf(buf, sizeof buf,
                                  "%s: fitted tau1 = %.6g%+.6gi vs printed %.6g%+.6gi%s",
                                  inst.name.c_str(), ft.tau1.real(), ft.tau1.imag(),
                                  s.coeffs.tau1.real(), s.coeffs.tau1.imag(),
                                  rel > 0.10 ? "  [>10% disagreement: suspected misprint]"
                                             : "");
                    gate.note(buf);
                    continue;
                }
                std::string why;
                if (!gaps_decreasing(gaps, 15, 40, why)) {
                    ok = false;
                    fails.push_back(inst.name + ": " + why);
                }
            }
        }
    }
    std::string detail;
    for (const auto& f : fails) detail += (detail.empty() ? "" : "; ") + f;
    gate.line(4, ok,
              ok ? "four-term asymptotics: scaled gaps decreasing over k in [15,40]" : detail);
}

void criterion5(Gate& gate) {
    bool ok = true;
    std::string detail;
    for (const auto& s : g_solved) {
        int found = 0;
        for (const auto& e : s.rep.eigs) {
            bool inside = e.lambda.real() >= s.rep.window.lo.real() &&
                          e.lambda.real() <= s.rep.window.hi.real() &&
                          e.lambda.imag() >= s.rep.window.lo.imag() &&
                          e.lambda.imag() <= s.rep.window.hi.imag();
            if (inside) found += e.multiplicity;
        }
        if (found != s.rep.window_winding || !s.rep.unresolved.empty()) {
            ok = false;
            detail = s.inst.name + ": winding " + std::to_string(s.rep.window_winding) +
                     " vs found " + std::to_string(found);
        }
    }
    gate.line(5, ok,
              ok ? "window winding equals found multiplicity total on all " +
                       std::to_string(g_solved.size()) + " instances"
                 : detail);
}

void criterion6(Gate& gate) {
    bool ok = true;
    std::string detail;
    for (const auto& s : g_solved) {
        for (const auto& e : s.rep.eigs) {
            if (std::abs(e.lambda.real()) <= 1e-6) continue;
            double best = 1e308;
            for (const auto& o : s.rep.eigs)
                best = std::min(best, std::abs(o.lambda + std::conj(e.lambda)));
            if (best >= 1e-8 * (1.0 + std::abs(e.lambda))) {
                ok = false;
                detail = s.inst.name + ": no -conj partner for lambda = " +
                         fmtg(e.lambda.real()) + (e.lambda.imag() < 0 ? "-" : "+") +
                         fmtg(std::abs(e.lambda.imag())) + "i";
            }
        }
        if (s.inst.is_a1 && !s.rep.parity_even) {
            ok = false;
            detail = s.inst.name + ": imaginary-axis count " +
                     std::to_string(s.rep.imag_axis_count) + " is odd (expected even)";
        }
        if (s.inst.is_a2 && s.rep.parity_even) {
            ok = false;
            detail = s.inst.name + ": imaginary-axis count " +
                     std::to_string(s.rep.imag_axis_count) + " is even (expected odd)";
        }
    }
    gate.line(6, ok, ok ? "spectra closed under -conj; axis parity even (A1) / odd (A2)"
                        : detail);
}

void criterion7(Gate& gate) {
    bool ok = true;
    std::string detail;

    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    ProblemSpec specs[] = {make_missile("0"), make_caseA1(5, 1.0, 1.0),
                           make_caseA2(2, 1.0, -1.0)};
    for (int trial = 0; trial < 200; ++trial) {
        double r = 900.0 * std::sqrt(0.5 * (U(rng) + 1.0));
        double th = PI * U(rng);
        Complex lam = std::polar(r, th);
        const ProblemSpec& spec = specs[trial % 3];
        Complex d1 = char_det(spec, lam, 1e-11, FundPath::Closed).value;
        Complex d2 = char_det(spec, lam, 1e-11, FundPath::Ode).value;
        // both values share the same O(1) row-sup normalization; compare
        // against it (the raw determinant can be exponentially small off the
        // spectrum, where no finite-precision path retains relative digits)
        double ref = std::max(1.0, std::max(std::abs(d1), std::abs(d2)));
        if (std::abs(d1 - d2) >= 1e-8 * ref) {
            ok = false;
            detail = "closed vs ODE determinant mismatch at |lambda| = " + fmtg(r);
        }
    }

    std::mt19937 rng2(987654321);
    for (int trial = 0; trial < 100 && ok; ++trial) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%.6f + %.6f*x + %.6f*x^2 + %.6f*x^3", U(rng2), U(rng2),
                      U(rng2), U(rng2));
        ProblemSpec spec = validate(1.0, Expr::parse(buf), buf,
                                    {bc(Endpoint::Left, 2), bc(Endpoint::Left, 3),
                                     bc(Endpoint::Right, 2), bc(Endpoint::Right, 3)});
        // |lambda| capped at the radius where the e^{2 Re mu a} determinant
        // conditioning still admits the 1e-8 gate in double precision
        Complex lam(30.0 * U(rng2), 30.0 * U(rng2));
        FundamentalMatrix F = integrate_fundamental(spec, lam, 1e-11);
        Complex a[4][4];
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) a[i][j] = F.m[i][j] * std::ldexp(1.0, F.log2_scale[j]);
        auto d3 = [&](int r0, int r1, int r2, int c0, int c1, int c2) {
            return a[r0][c0] * (a[r1][c1] * a[r2][c2] - a[r1][c2] * a[r2][c1]) -
                   a[r0][c1] * (a[r1][c0] * a[r2][c2] - a[r1][c2] * a[r2][c0]) +
                   a[r0][c2] * (a[r1][c0] * a[r2][c1] - a[r1][c1] * a[r2][c0]);
        };
        Complex det = a[0][0] * d3(1, 2, 3, 1, 2, 3) - a[0][1] * d3(1, 2, 3, 0, 2, 3) +
                      a[0][2] * d3(1, 2, 3, 0, 1, 3) - a[0][3] * d3(1, 2, 3, 0, 1, 2);
        if (std::abs(det - 1.0) >= 1e-8) {
            ok = false;
            detail = "Liouville determinant off by " + fmtg(std::abs(det - 1.0));
        }
    }
    gate.line(7, ok,
              ok ? "closed-form/ODE agreement (200 draws) and Liouville det = 1 (100 draws)"
                 : detail);
}

void criterion8(Gate& gate) {
    auto holds = [](const RegularityReport& r, int cr, int u, bool prime = false) {
        for (const auto& h : r.holds)
            if (h.r == cr && h.u == u && h.prime == prime) return true;
        return false;
    };
    bool ok = true;
    std::string detail;
    for (int lc = 1; lc <= 6; ++lc) {
        RegularityReport a1 = classify_regularity(make_caseA1(lc, 1.0, 1.0));
        if (!a1.birkhoff_regular || !holds(a1, 1, 0) || !holds(a1, 4, 1)) {
            ok = false;
            detail = "A1 case " + std::to_string(lc) + ": expected C(1,0) with C(4,1)";
        }
        RegularityReport a2 = classify_regularity(make_caseA2(lc, 1.0, -1.0));
        if (!a2.birkhoff_regular || !holds(a2, 2, 1, true)) {
            ok = false;
            detail = "A2 case " + std::to_string(lc) + ": expected C'(2,1)";
        }
    }
    RegularityReport fm = classify_regularity(make_missile());
    if (!fm.birkhoff_regular || !holds(fm, 1, 1)) {
        ok = false;
        detail = "missile: expected C(1,1)";
    }
    ProblemSpec bad = validate(1.0, Expr::parse("0"), "0",
                               {bc(Endpoint::Left, 0), bc(Endpoint::Left, 1),
                                bc(Endpoint::Right, 3), bc(Endpoint::Right, 2, 0, 1.0)});
    if (classify_regularity(bad).birkhoff_regular) {
        ok = false;
        detail = "y'''(a)=0 with y''(a)+i*lambda*y(a)=0 must be non-regular";
    }
    gate.line(8, ok,
              ok ? "13 regular instances carry the named conditions; the derived pair is "
                   "non-regular"
                 : detail);
}

}  // namespace

int main() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw > 1) g_threads = static_cast<int>(hw);

    Gate gate;
    criterion1(gate);
    criterion2(gate);
    criterion3(gate);
    criterion4(gate);
    criterion5(gate);
    criterion6(gate);
    criterion7(gate);
    criterion8(gate);
    return gate.all_ok ? 0 : 1;
}
