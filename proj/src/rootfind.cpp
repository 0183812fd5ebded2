#include "pencil/rootfind.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "pencil/charfn.hpp"

namespace pencil {

namespace {

constexpr double PI = 3.14159265358979323846;

Complex principal_mu(Complex lambda) {
    if (lambda.imag() == 0.0 && lambda.real() < 0.0)
        return Complex(0.0, std::sqrt(-lambda.real()));
    Complex mu = std::sqrt(lambda);
    if (mu.real() < 0.0) mu = -mu;
    return mu;
}

template <class F>
void parallel_for(std::size_t n, int threads, F&& body) {
    threads = std::max(1, std::min<int>(threads, static_cast<int>(n)));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr err;
    std::mutex err_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n && !failed.load(); i = next.fetch_add(1)) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!err) err = std::current_exception();
                    failed.store(true);
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

// ---------------------------------------------------------------------------
// Winding count
// ---------------------------------------------------------------------------

struct BoundarySample {
    double t;  // parameter in [0,4), one unit per edge, counterclockwise
    Complex f;
};

Complex boundary_point(const Contour& c, double t) {
    double xr = c.hi.real() - c.lo.real(), yr = c.hi.imag() - c.lo.imag();
    t = std::fmod(t, 4.0);
    if (t < 1.0) return {c.lo.real() + t * xr, c.lo.imag()};
    if (t < 2.0) return {c.hi.real(), c.lo.imag() + (t - 1.0) * yr};
    if (t < 3.0) return {c.hi.real() - (t - 2.0) * xr, c.hi.imag()};
    return {c.lo.real(), c.hi.imag() - (t - 3.0) * yr};
}

int winding_count_threaded(const CharFn& f, const Contour& c, double guard_rel, int threads,
                           double phase_scale = 1.0) {
    // The determinant phase along an edge advances like 2 a Im(mu) ~
    // 2 a sqrt(|lambda|), so sample densely enough up front that adjacent
    // samples never alias a near-2pi jump to a small one the refinement
    // below (which only reacts to jumps >= pi/2) would miss.
    std::vector<BoundarySample> samples;
    Complex corner[4] = {c.lo, {c.hi.real(), c.lo.imag()}, c.hi, {c.lo.real(), c.hi.imag()}};
    for (int e = 0; e < 4; ++e) {
        double budget = 2.0 * phase_scale *
                        (std::sqrt(std::abs(corner[e])) + std::sqrt(std::abs(corner[(e + 1) % 4])));
        int per_edge = std::clamp(static_cast<int>(std::ceil(budget)), 8, 1024);
        for (int i = 0; i < per_edge; ++i)
            samples.push_back({e + double(i) / per_edge, Complex()});
    }
    parallel_for(samples.size(), threads,
                 [&](std::size_t i) { samples[i].f = f(boundary_point(c, samples[i].t)); });

    const double min_dt = 1e-11;
    auto add_samples = [&](const std::vector<double>& want) {
        std::vector<BoundarySample> fresh(want.size());
        parallel_for(want.size(), threads, [&](std::size_t i) {
            fresh[i] = {want[i], f(boundary_point(c, want[i]))};
        });
        samples.insert(samples.end(), fresh.begin(), fresh.end());
        std::sort(samples.begin(), samples.end(),
                  [](const BoundarySample& a, const BoundarySample& b) { return a.t < b.t; });
    };
    auto gap_dt = [&](std::size_t i) {
        std::size_t n = samples.size();
        return (i + 1 == n) ? (4.0 - samples[i].t + samples[0].t)
                            : (samples[i + 1].t - samples[i].t);
    };
    auto refine_to_phase = [&] {
        for (int round = 0; round < 64; ++round) {
            double fmax = 0.0, fmin = 1e308;
            for (const auto& s : samples) {
                double m = std::abs(s.f);
                fmax = std::max(fmax, m);
                fmin = std::min(fmin, m);
            }
            if (!(fmax > 0.0) || fmin < guard_rel * fmax)
                throw ZeroOnContour("contour sample magnitude under guard");

            std::vector<double> want;
            const std::size_t n = samples.size();
            for (std::size_t i = 0; i < n; ++i) {
                double dphi = std::arg(samples[(i + 1) % n].f / samples[i].f);
                if (std::abs(dphi) >= 0.5 * PI) {
                    double dt = gap_dt(i);
                    if (dt < min_dt) throw NonConvergent("winding refinement exhausted");
                    want.push_back(samples[i].t + 0.5 * dt);
                }
            }
            if (want.empty()) return;
            if (round == 63) throw NonConvergent("winding refinement exhausted");
            add_samples(want);
        }
    };
    auto total_winding = [&] {
        double total = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i)
            total += std::arg(samples[(i + 1) % samples.size()].f / samples[i].f);
        double w = total / (2.0 * PI);
        int n = static_cast<int>(std::lround(w));
        if (std::abs(w - n) > 0.25) throw NonConvergent("winding total not near an integer");
        return n;
    };

    // The phase criterion alone can be fooled: a gap whose true phase change is
    // near a multiple of 2 pi wraps to a small jump and never refines (it
    // happens near a zero just inside the contour, where the phase swings fast
    // while the evaluator's self-normalization keeps the magnitude flat).
    // Validate by doubling every gap and recomputing: each doubling halves the
    // turns hidden in a gap, so an alias surfaces within a couple of rounds.  A
    // gap in front of a multiple zero can hide several turns and survive one
    // doubling (4 pi - eps halves into two invisible 2 pi - eps/2 gaps), so
    // accept only a winding stable across two consecutive doublings.
    refine_to_phase();
    int w = total_winding();
    int agree = 0;
    for (int cycle = 0; cycle < 10; ++cycle) {
        std::vector<double> want;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            double dt = gap_dt(i);
            if (dt > 4.0 * min_dt) want.push_back(samples[i].t + 0.5 * dt);
        }
        add_samples(want);
        refine_to_phase();
        int w2 = total_winding();
        if (w2 == w) {
            if (++agree == 2) return w;
        } else {
            agree = 0;
            w = w2;
        }
    }
    throw NonConvergent("winding did not stabilize under refinement");
}

// Newton with multiplicity-aware step m f/f' (quadratic near an m-fold zero).
PolishResult newton_mult(const CharFn& f, Complex seed, int mult, double tol, int maxit,
                         double guard_radius) {
    PolishResult res;
    Complex z = seed;
    for (int it = 0; it < maxit; ++it) {
        res.iterations = it + 1;
        Complex fz = f(z);
        double h = 1e-6 * std::max(1.0, std::abs(z));
        Complex df = (f(z + h) - f(z - h)) / (2.0 * h);
        if (df == 0.0) break;
        Complex step = double(mult) * fz / df;
        // never evaluate outside the guard disk: the evaluator may not be
        // meaningful (or finite) at whatever a wild step asks about
        Complex z1 = z - step;
        for (int d = 0; d < 60 && guard_radius > 0.0 && std::abs(z1 - seed) > guard_radius; ++d) {
            step *= 0.5;
            z1 = z - step;
        }
        // damping: halve while the step makes things worse
        for (int d = 0; d < 6 && std::abs(f(z1)) > std::abs(fz) &&
                        std::abs(step) > 1e-12 * std::max(1.0, std::abs(z));
             ++d) {
            step *= 0.5;
            z1 = z - step;
        }
        z = z1;
        if (guard_radius > 0.0 && std::abs(z - seed) > guard_radius) {
            res.z = z;
            res.residual = std::abs(f(z));
            return res;  // left the guard disk: diverged
        }
        if (std::abs(step) < 1e-12 * std::max(1.0, std::abs(z))) {
            double r = std::abs(f(z));
            // the evaluator's normalization is arbitrary up to polynomial
            // factors, so judge the residual against the local derivative
            // scale rather than as an absolute number
            double local = std::abs(df) * std::max(1.0, std::abs(z));
            if (r <= tol * std::max(1.0, local)) {
                res.z = z;
                res.residual = r;
                res.converged = true;
                return res;
            }
        }
    }
    res.z = z;
    res.residual = std::abs(f(z));
    return res;
}

// ---------------------------------------------------------------------------
// Quadtree search
// ---------------------------------------------------------------------------

struct QuadtreeCtx {
    const CharFn* f;
    double min_size;
    double tol;
    int threads;
    double phase_scale;  // interval length a, sets the contour sample density
    std::vector<Eigenvalue>* out;
    std::vector<Contour>* unresolved;
};

int cell_winding(const QuadtreeCtx& ctx, const Contour& cell) {
    return winding_count_threaded(*ctx.f, cell, 1e3 * 2.220446049250313e-16, ctx.threads,
                                  ctx.phase_scale);
}

void subdivide(const QuadtreeCtx& ctx, const Contour& cell, int count) {
    if (count <= 0) return;
    double w = cell.hi.real() - cell.lo.real();
    double h = cell.hi.imag() - cell.lo.imag();
    Complex center = 0.5 * (cell.lo + cell.hi);
    double diag = std::abs(cell.hi - cell.lo);

    if (count == 1) {
        // keep the rescue on a short leash: a generous guard lets Newton walk
        // to a neighbouring cell's root and record a duplicate, silently
        // dropping this cell's true occupant once the duplicates merge
        PolishResult pr = newton_mult(*ctx.f, center, 1, ctx.tol, 80, 0.75 * diag);
        bool inside = pr.converged && pr.z.real() > cell.lo.real() - 0.05 * w &&
                      pr.z.real() < cell.hi.real() + 0.05 * w &&
                      pr.z.imag() > cell.lo.imag() - 0.05 * h &&
                      pr.z.imag() < cell.hi.imag() + 0.05 * h;
        if (inside) {
            Eigenvalue ev;
            ev.lambda = pr.z;
            ev.mu = principal_mu(pr.z);
            ev.multiplicity = 1;
            ev.residual = pr.residual;
            ctx.out->push_back(ev);
            return;
        }
    }
    if (std::max(w, h) <= ctx.min_size) {
        PolishResult pr = newton_mult(*ctx.f, center, count, ctx.tol, 80, 4.0 * diag);
        Eigenvalue ev;
        ev.lambda = pr.converged ? pr.z : center;
        ev.mu = principal_mu(ev.lambda);
        ev.multiplicity = count;
        ev.residual = pr.converged ? pr.residual : std::abs((*ctx.f)(center));
        ctx.out->push_back(ev);
        return;
    }

    for (int attempt = 0; attempt < 5; ++attempt) {
        // always jiggle: the search region is symmetric, so an exact halving
        // would run the first split line straight through a zero at the origin
        // (common in this family), poisoning every descendant's outer edge
        double jig = 0.007 * (attempt + 1) * (attempt % 2 ? 1.0 : -1.0);
        double fx = 0.5 + jig, fy = 0.5 - jig;
        double xm = cell.lo.real() + fx * w;
        double ym = cell.lo.imag() + fy * h;
        Contour kids[4] = {
            {cell.lo, {xm, ym}},
            {{xm, cell.lo.imag()}, {cell.hi.real(), ym}},
            {{cell.lo.real(), ym}, {xm, cell.hi.imag()}},
            {{xm, ym}, cell.hi},
        };
        int counts[4];
        bool ok = true;
        int sum = 0;
        for (int i = 0; i < 4 && ok; ++i) {
            try {
                counts[i] = cell_winding(ctx, kids[i]);
                sum += counts[i];
            } catch (const ZeroOnContour&) {
                ok = false;
            } catch (const NonConvergent&) {
                ok = false;
            }
        }
        if (ok && sum == count) {
            for (int i = 0; i < 4; ++i) subdivide(ctx, kids[i], counts[i]);
            return;
        }
    }
    if (ctx.unresolved) ctx.unresolved->push_back(cell);
}

// A multiplicity-m polish only lands within ~residual^(1/m) of the root, so
// closeness tests near multiple roots need this flatness floor.
double polish_flat(const Eigenvalue& e) {
    return 10.0 * std::pow(std::max(e.residual, 1e-30), 1.0 / std::max(1, e.multiplicity));
}

bool lambda_on_axis(const Eigenvalue& e) {
    return std::abs(e.lambda.real()) <=
           std::max(1e-6 * std::abs(e.lambda), polish_flat(e));
}

double local_seed_spacing(const AsymptoticCoeffs& coeffs, double a, int k) {
    Complex lam1 = seed_mu(std::max(1, k - 1), coeffs, a);
    Complex lam2 = seed_mu(k + 1, coeffs, a);
    return 0.5 * std::abs(lam2 * lam2 - lam1 * lam1);
}

}  // namespace

int winding_count(const CharFn& f, const Contour& c, double guard) {
    return winding_count_threaded(f, c, guard, 1);
}

PolishResult newton_polish(const CharFn& f, Complex seed, double tol, int maxit,
                           double guard_radius) {
    return newton_mult(f, seed, 1, tol, maxit, guard_radius);
}

std::vector<Eigenvalue> locate_low_index(const ProblemSpec& spec, double radius, double tol,
                                         int threads, std::vector<Contour>* unresolved) {
    CharFn f = [&spec, tol](Complex lambda) { return char_det_stable(spec, lambda, tol).value; };

    // half-region with a sliver across the imaginary axis; the other half is
    // recovered by the lambda -> -conj(lambda) mirror
    const double delta = 0.02 * radius;
    Contour region{{-delta, -radius}, {radius, radius}};

    std::vector<Eigenvalue> found;
    QuadtreeCtx ctx{&f,     std::max(1e-9, 1e-5 * radius), tol, threads, spec.a,
                    &found, unresolved};

    int total = -1;
    for (int attempt = 0; attempt < 5 && total < 0; ++attempt) {
        try {
            total = cell_winding(ctx, region);
        } catch (const std::runtime_error&) {
            region.lo *= 1.01;  // nudge: expand by 1%
            region.hi *= 1.01;
        }
    }
    if (total < 0) throw NonConvergent("low-index region winding did not converge");
    subdivide(ctx, region, total);

    // drop anything the sliver caught on the far side of the axis
    std::erase_if(found, [&](const Eigenvalue& e) {
        return e.lambda.real() < -1e-7 * (1.0 + std::abs(e.lambda));
    });

    // Merge coincident polishes and re-measure every multiplicity on a tiny
    // contour around the root.  Sibling cells can mis-allocate winding when a
    // multiple zero sits on their shared edge (the per-cell sums still match,
    // so the subdivision cross-check cannot see it), and a cluster polish
    // lands only within ~residual^(1/m) of an m-fold root, which defeats
    // fixed dedup thresholds.  The tiny contour encloses one root and nothing
    // else, so its winding is the authoritative multiplicity.
    {
        std::vector<Eigenvalue> merged;
        for (const Eigenvalue& e : found) {
            bool dup = false;
            for (Eigenvalue& m : merged) {
                if (std::abs(m.lambda - e.lambda) < 1e-3 * (1.0 + std::abs(m.lambda))) {
                    dup = true;
                    if (e.residual < m.residual) {
                        m.lambda = e.lambda;
                        m.mu = e.mu;
                        m.residual = e.residual;
                    }
                    break;
                }
            }
            if (!dup) merged.push_back(e);
        }
        for (Eigenvalue& m : merged) {
            double r = 2e-3 * (1.0 + std::abs(m.lambda));
            for (int att = 0; att < 4; ++att) {
                try {
                    Contour tiny{{m.lambda.real() - r, m.lambda.imag() - r},
                                 {m.lambda.real() + r, m.lambda.imag() + r}};
                    m.multiplicity = winding_count_threaded(f, tiny, 1e3 * 2.220446049250313e-16,
                                                            threads, spec.a);
                    break;
                } catch (const std::runtime_error&) {
                    r *= 1.7;
                }
            }
        }
        // an entry whose tiny contour winds zero was a stray Newton rescue
        std::erase_if(merged, [](const Eigenvalue& e) { return e.multiplicity <= 0; });
        found = std::move(merged);
    }

    // mirror across the imaginary axis
    std::size_t n = found.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Eigenvalue& e = found[i];
        if (lambda_on_axis(e)) continue;
        Complex target = -std::conj(e.lambda);
        bool present = false;
        for (const Eigenvalue& have : found)
            if (std::abs(have.lambda - target) < 1e-3 * (1.0 + std::abs(target))) present = true;
        if (present) continue;
        PolishResult pr = newton_mult(f, target, e.multiplicity, tol, 80,
                                      0.1 * (1.0 + std::abs(target)));
        Eigenvalue m;
        m.lambda = pr.converged ? pr.z : target;
        m.mu = principal_mu(m.lambda);
        m.multiplicity = e.multiplicity;
        m.residual = pr.converged ? pr.residual : std::abs(f(target));
        found.push_back(m);
    }
    return found;
}

SpectrumReport solve_spectrum(const ProblemSpec& spec, int kmax, double tol, double radius,
                              int threads) {
    RegularityReport reg = classify_regularity(spec);
    if (!reg.birkhoff_regular)
        throw NotRegular("problem is not Birkhoff regular; seeded solve unavailable");
    CaseLabel label = classify_case(spec);
    AsymptoticCoeffs coeffs = tau_coeffs(label, spec);  // may throw UnsupportedCase
    const double a = spec.a;

    CharFn f = [&spec, tol](Complex lambda) { return char_det_stable(spec, lambda, tol).value; };

    if (radius <= 0.0) {
        int kl = std::min(6, kmax);
        double m1 = seed_mu(kl, coeffs, a).real(), m2 = seed_mu(kl + 1, coeffs, a).real();
        double mid = 0.5 * (m1 + m2);
        radius = std::max(10.0, mid * mid);
    }

    SpectrumReport report;

    // seeded tail
    // seeds too close to the origin aim at the clustered low-index zeros the
    // quadtree owns (e.g. the multiplicity-8 mu-zero at 0), not a simple root
    std::vector<int> ks;
    for (int k = 1; k <= kmax; ++k)
        if (seed_mu(k, coeffs, a).real() > 0.8 * PI / a) ks.push_back(k);
    std::vector<Eigenvalue> seeded(ks.size());
    parallel_for(ks.size(), threads, [&](std::size_t i) {
        int k = ks[i];
        Complex mu_hat = seed_mu(k, coeffs, a);
        Complex lam_hat = mu_hat * mu_hat;
        double spacing = local_seed_spacing(coeffs, a, k);
        PolishResult pr = newton_mult(f, lam_hat, 1, tol, 80, 2.0 * spacing);
        Eigenvalue ev;
        ev.lambda = pr.z;
        ev.mu = principal_mu(pr.z);
        ev.k = k;
        ev.multiplicity = 1;
        ev.residual = pr.residual;
        ev.seed = mu_hat;
        if (!pr.converged) ev.k = std::nullopt;  // low-index search owns this root
        seeded[i] = ev;
    });

    // low-index region
    std::vector<Eigenvalue> low = locate_low_index(spec, radius, tol, threads,
                                                   &report.unresolved);

    // merge with dedup: seeded entries win (they carry k and the seed link)
    std::vector<Eigenvalue> all;
    auto near = [&](const Eigenvalue& x, const Eigenvalue& y) {
        double d = std::abs(x.lambda - y.lambda);
        double tol_d = 1e-9 * (1.0 + std::abs(x.lambda));
        if (x.k) tol_d = std::max(tol_d, 1e-6 * local_seed_spacing(coeffs, a, *x.k));
        return d < tol_d;
    };
    for (const auto& e : seeded) {
        if (!e.k) continue;  // diverged polish; the quadtree and ladder repair own it
        bool dup = false;
        for (auto& have : all)
            if (near(e, have)) dup = true;
        if (!dup) all.push_back(e);
    }
    for (const auto& e : low) {
        bool dup = false;
        for (auto& have : all) {
            if (near(have, e) || near(e, have)) {
                dup = true;
                break;
            }
        }
        if (!dup) all.push_back(e);
    }

    // ladder repair: beyond the low-index disk the spectrum follows the
    // asymptotic ladder with one root per pi/a in Re mu.  When a seed sits
    // midway between two roots (printed tau tables are off in a few cases; the
    // fit diagnostic reports them) two seeds can collapse onto one root and
    // leave its neighbour unfound.  Refill gaps from the midpoints.
    {
        const double rung = PI / a;
        const double mu_lo = 0.9 * std::sqrt(radius);
        const double mu_hi = seed_mu(kmax, coeffs, a).real() + 0.6 * rung;
        for (int pass = 0; pass < 6; ++pass) {
            std::sort(all.begin(), all.end(), [](const Eigenvalue& x, const Eigenvalue& y) {
                return x.mu.real() < y.mu.real();
            });
            bool added = false;
            std::vector<Eigenvalue> fresh;
            for (std::size_t i = 0; i + 1 < all.size(); ++i) {
                const Eigenvalue& e1 = all[i];
                const Eigenvalue& e2 = all[i + 1];
                if (e1.mu.real() < mu_lo || e2.mu.real() > mu_hi) continue;
                if (e2.mu.real() - e1.mu.real() < 1.45 * rung) continue;
                // polish one candidate per missing rung, each with a guard
                // confined to its own rung so Newton cannot slide down the
                // ladder to a root that is already recorded
                int nr = static_cast<int>(std::lround((e2.mu.real() - e1.mu.real()) / rung));
                for (int j = 1; j < nr; ++j) {
                    Complex mu_t = e1.mu + (double(j) / nr) * (e2.mu - e1.mu);
                    Complex target = mu_t * mu_t;
                    double guard = 1.2 * rung * std::abs(mu_t);
                    PolishResult pr = newton_mult(f, target, 1, tol, 80, guard);
                    if (!pr.converged) continue;
                    bool dup = false;
                    for (const auto& have : all)
                        if (std::abs(have.lambda - pr.z) < 1e-6 * (1.0 + std::abs(pr.z)))
                            dup = true;
                    for (const auto& have : fresh)
                        if (std::abs(have.lambda - pr.z) < 1e-6 * (1.0 + std::abs(pr.z)))
                            dup = true;
                    if (dup) continue;
                    Eigenvalue ev;
                    ev.lambda = pr.z;
                    ev.mu = principal_mu(pr.z);
                    ev.multiplicity = 1;
                    ev.residual = pr.residual;
                    fresh.push_back(ev);
                    added = true;
                }
            }
            // the printed tau tables can mislabel the tail by a whole index,
            // leaving the final rung before the window edge with no seed and
            // no right-hand neighbour to expose it as a gap
            const double mu_edge = 0.5 * (seed_mu(kmax, coeffs, a).real() +
                                          seed_mu(kmax + 1, coeffs, a).real());
            const Eigenvalue* last = nullptr;
            for (const auto& e : all)
                if (e.mu.real() >= mu_lo && e.mu.real() <= mu_edge &&
                    (!last || e.mu.real() > last->mu.real()))
                    last = &e;
            if (last) {
                for (int j = 1; j <= 4; ++j) {
                    Complex mu_t = last->mu + Complex(j * rung, 0.0);
                    if (mu_t.real() >= mu_edge + 0.45 * rung) break;
                    Complex target = mu_t * mu_t;
                    PolishResult pr = newton_mult(f, target, 1, tol, 80,
                                                  1.2 * rung * std::abs(mu_t));
                    if (!pr.converged) continue;
                    bool dup = false;
                    for (const auto& have : all)
                        if (std::abs(have.lambda - pr.z) < 1e-6 * (1.0 + std::abs(pr.z)))
                            dup = true;
                    for (const auto& have : fresh)
                        if (std::abs(have.lambda - pr.z) < 1e-6 * (1.0 + std::abs(pr.z)))
                            dup = true;
                    if (dup) continue;
                    Eigenvalue ev;
                    ev.lambda = pr.z;
                    ev.mu = principal_mu(pr.z);
                    ev.multiplicity = 1;
                    ev.residual = pr.residual;
                    fresh.push_back(ev);
                    added = true;
                }
            }
            all.insert(all.end(), fresh.begin(), fresh.end());
            if (!added) break;
        }
    }

    // mirror partners for the seeded tail (quadtree already mirrored its own)
    std::size_t n0 = all.size();
    const auto on_axis = [](const Eigenvalue& e) { return lambda_on_axis(e); };
    for (std::size_t i = 0; i < n0; ++i) {
        if (on_axis(all[i])) continue;
        Complex target = -std::conj(all[i].lambda);
        bool present = false;
        for (const auto& e : all)
            if (std::abs(e.lambda - target) < 1e-6 * (1.0 + std::abs(target))) present = true;
        if (present) continue;
        PolishResult pr = newton_mult(f, target, all[i].multiplicity, tol, 80,
                                      0.1 * (1.0 + std::abs(target)));
        Eigenvalue m;
        m.lambda = pr.converged ? pr.z : target;
        m.mu = principal_mu(m.lambda);
        m.multiplicity = all[i].multiplicity;
        m.residual = pr.converged ? pr.residual : std::abs(f(target));
        if (all[i].k) m.k = -*all[i].k;
        all.push_back(m);
    }

    // completeness window: right edge at the squared mu-midpoint between the
    // last seeded eigenvalue and the next one; symmetric on the left
    double mu_mid =
        0.5 * (seed_mu(kmax, coeffs, a).real() + seed_mu(kmax + 1, coeffs, a).real());
    double W = mu_mid * mu_mid;
    double H = std::max(1.1 * radius, 10.0 * (1.0 + std::abs(2.0 * PI * coeffs.tau1.imag())));
    report.window = {{-W, -H}, {W, H}};

    // partner links + symmetry defect (among in-window eigenvalues)
    auto in_window = [&](const Eigenvalue& e) {
        return e.lambda.real() >= -W && e.lambda.real() <= W && e.lambda.imag() >= -H &&
               e.lambda.imag() <= H;
    };
    std::sort(all.begin(), all.end(), [](const Eigenvalue& x, const Eigenvalue& y) {
        if (x.mu.real() != y.mu.real()) return x.mu.real() < y.mu.real();
        return x.mu.imag() < y.mu.imag();
    });
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (on_axis(all[i]) || !in_window(all[i])) continue;
        double best = 1e308;
        int best_j = -1;
        for (std::size_t j = 0; j < all.size(); ++j) {
            double d = std::abs(all[j].lambda + std::conj(all[i].lambda));
            if (d < best) {
                best = d;
                best_j = static_cast<int>(j);
            }
        }
        all[i].partner = best_j;
        report.max_symmetry_defect = std::max(report.max_symmetry_defect, best);
    }

    report.eigs = std::move(all);

    Contour win = report.window;
    int winding = -1;
    for (int attempt = 0; attempt < 5 && winding < 0; ++attempt) {
        try {
            winding = winding_count_threaded(f, win, 1e3 * 2.220446049250313e-16, threads, a);
        } catch (const std::runtime_error&) {
            win.lo *= 1.01;
            win.hi *= 1.01;
        }
    }
    report.window = win;  // count against the contour that actually converged
    int found_total = 0;
    for (const auto& e : report.eigs) {
        bool inside = e.lambda.real() >= win.lo.real() && e.lambda.real() <= win.hi.real() &&
                      e.lambda.imag() >= win.lo.imag() && e.lambda.imag() <= win.hi.imag();
        if (inside) {
            found_total += e.multiplicity;
            if (on_axis(e)) report.imag_axis_count += e.multiplicity;
        }
    }
    report.parity_even = report.imag_axis_count % 2 == 0;
    report.window_winding = winding;
    report.complete = winding == found_total && report.unresolved.empty();
    return report;
}

}  // namespace pencil
