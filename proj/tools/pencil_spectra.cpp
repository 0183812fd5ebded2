// pencil-spectra: batch front-end for the pencil spectral engine.
//
//   pencil-spectra classify problem.json
//   pencil-spectra asym     problem.json --kmax 40
//   pencil-spectra solve    problem.json --kmax 12 --tol 1e-10
//   pencil-spectra compare  problem.json --kmax 40 --fit
//
// Exit codes: 0 success, 1 soft failure (non-regular / incomplete spectrum),
// 2 input error, 3 unsupported case.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "pencil/asymptotics.hpp"
#include "pencil/charfn.hpp"
#include "pencil/problem.hpp"
#include "pencil/rootfind.hpp"

using json = nlohmann::json;
using namespace pencil;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

std::string fmt(Complex z) { return fmt(z.real()) + (z.imag() < 0 ? "-" : "+") + fmt(std::abs(z.imag())) + "i"; }

ProblemSpec load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open problem file: " + path);
    json j = json::parse(in);

    double a = j.at("a").get<double>();
    std::string g_text = j.at("g").get<std::string>();
    Expr g = Expr::parse(g_text);

    std::vector<BoundaryCondition> bcs;
    for (const auto& rec : j.at("bcs")) {
        BoundaryCondition bc;
        std::string ep = rec.at("endpoint").get<std::string>();
        if (ep == "left") bc.endpoint = Endpoint::Left;
        else if (ep == "right") bc.endpoint = Endpoint::Right;
        else throw std::runtime_error("endpoint must be \"left\" or \"right\"");
        bc.p = rec.at("p").get<int>();
        if (!rec.at("q").is_null()) bc.q = rec.at("q").get<int>();
        auto beta = rec.at("beta");
        bc.beta = Complex(beta.at(0).get<double>(), beta.at(1).get<double>());
        bcs.push_back(bc);
    }
    return validate(a, std::move(g), g_text, bcs);
}

int default_threads() {
    if (const char* env = std::getenv("PENCIL_SPECTRA_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

int cmd_classify(const ProblemSpec& spec, bool as_json) {
    CaseLabel label = classify_case(spec);
    RegularityReport reg = classify_regularity(spec);
    if (as_json) {
        json out;
        out["left_case"] = left_case_name(label.left_case);
        out["right_class"] = right_class_name(label.right_class);
        out["birkhoff_regular"] = reg.birkhoff_regular;
        json conds = json::array();
        for (const auto& h : reg.holds) conds.push_back(h.name());
        out["conditions"] = conds;
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "left case:   " << left_case_name(label.left_case) << "\n";
        std::cout << "right class: " << right_class_name(label.right_class) << "\n";
        std::cout << "conditions:  ";
        bool first = true;
        for (const auto& h : reg.holds) {
            if (!first) std::cout << ", ";
            std::cout << h.name();
            first = false;
        }
        if (reg.holds.empty()) std::cout << "(none)";
        std::cout << "\n";
        std::cout << "regular:     " << (reg.birkhoff_regular ? "yes" : "no") << "\n";
    }
    return reg.birkhoff_regular ? 0 : 1;
}

int cmd_asym(const ProblemSpec& spec, int kmax, bool as_json) {
    CaseLabel label = classify_case(spec);
    AsymptoticCoeffs coeffs = tau_coeffs(label, spec);
    if (as_json) {
        json out;
        out["tau0"] = {coeffs.tau0.real(), coeffs.tau0.imag()};
        out["tau1"] = {coeffs.tau1.real(), coeffs.tau1.imag()};
        out["tau2"] = {coeffs.tau2.real(), coeffs.tau2.imag()};
        json rows = json::array();
        for (int k = 1; k <= kmax; ++k) {
            Complex mu = seed_mu(k, coeffs, spec.a);
            rows.push_back({k, mu.real(), mu.imag()});
        }
        out["mu_hat"] = rows;
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "# tau0=" << fmt(coeffs.tau0) << " tau1=" << fmt(coeffs.tau1)
                  << " tau2=" << fmt(coeffs.tau2) << "\n";
        std::cout << "k,re_mu_hat,im_mu_hat\n";
        for (int k = 1; k <= kmax; ++k) {
            Complex mu = seed_mu(k, coeffs, spec.a);
            std::cout << k << "," << fmt(mu.real()) << "," << fmt(mu.imag()) << "\n";
        }
    }
    return 0;
}

json report_to_json(const SpectrumReport& rep) {
    json out;
    json rows = json::array();
    for (const auto& e : rep.eigs) {
        json r;
        r["lambda"] = {e.lambda.real(), e.lambda.imag()};
        r["mu"] = {e.mu.real(), e.mu.imag()};
        if (e.k) r["k"] = *e.k;
        r["multiplicity"] = e.multiplicity;
        r["residual"] = e.residual;
        if (e.seed) r["seed_mu"] = {e.seed->real(), e.seed->imag()};
        rows.push_back(r);
    }
    out["eigenvalues"] = rows;
    out["window_winding"] = rep.window_winding;
    out["complete"] = rep.complete;
    out["imag_axis_count"] = rep.imag_axis_count;
    out["parity"] = rep.parity_even ? "even" : "odd";
    out["max_symmetry_defect"] = rep.max_symmetry_defect;
    return out;
}

int cmd_solve(const ProblemSpec& spec, int kmax, double tol, double radius, int threads,
              bool as_json) {
    SpectrumReport rep = solve_spectrum(spec, kmax, tol, radius, threads);
    if (as_json) {
        std::cout << report_to_json(rep).dump(2) << "\n";
    } else {
        std::cout << "k,re_lambda,im_lambda,re_mu,im_mu,multiplicity,residual\n";
        for (const auto& e : rep.eigs) {
            std::cout << (e.k ? std::to_string(*e.k) : "") << "," << fmt(e.lambda.real()) << ","
                      << fmt(e.lambda.imag()) << "," << fmt(e.mu.real()) << ","
                      << fmt(e.mu.imag()) << "," << e.multiplicity << "," << fmt(e.residual)
                      << "\n";
        }
        std::cout << "# window_winding=" << rep.window_winding
                  << " complete=" << (rep.complete ? "yes" : "no")
                  << " imag_axis_count=" << rep.imag_axis_count
                  << " parity=" << (rep.parity_even ? "even" : "odd")
                  << " max_symmetry_defect=" << fmt(rep.max_symmetry_defect) << "\n";
    }
    return rep.complete ? 0 : 1;
}

int cmd_compare(const ProblemSpec& spec, int kmax, double tol, double radius, int threads,
                bool fit, bool as_json) {
    CaseLabel label = classify_case(spec);
    AsymptoticCoeffs coeffs = tau_coeffs(label, spec);
    SpectrumReport rep = solve_spectrum(spec, kmax, tol, radius, threads);

    struct Row {
        int k;
        Complex lambda, mu, seed;
        double residual, gap;
    };
    std::vector<Row> rows;
    for (const auto& e : rep.eigs) {
        if (!e.k || *e.k < 1 || !e.seed) continue;
        double gap = std::abs(e.mu - *e.seed) * (*e.k) * (*e.k);
        rows.push_back({*e.k, e.lambda, e.mu, *e.seed, e.residual, gap});
    }
    std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) { return x.k < y.k; });

    // trend over the top half of the k range
    int khalf = kmax / 2;
    double max_gap = 0.0;
    bool decreasing = true;
    double prev = -1.0;
    for (const auto& r : rows) {
        if (r.k < khalf) continue;
        max_gap = std::max(max_gap, r.gap);
        if (prev >= 0.0 && r.gap > prev + 1e-12) decreasing = false;
        prev = r.gap;
    }

    FittedTau fitted;
    if (fit) {
        std::vector<std::pair<int, Complex>> mus;
        for (const auto& r : rows)
            if (r.k >= khalf) mus.push_back({r.k, r.mu});
        fitted = fit_tau(mus, spec.a, coeffs.tau0);
    }

    if (as_json) {
        json out = report_to_json(rep);
        json cmp = json::array();
        for (const auto& r : rows)
            cmp.push_back({r.k, r.mu.real(), r.mu.imag(), r.seed.real(), r.seed.imag(), r.gap});
        out["comparison"] = cmp;
        out["max_scaled_gap_top_half"] = max_gap;
        out["scaled_gap_decreasing"] = decreasing;
        if (fit) {
            out["fitted_tau1"] = {fitted.tau1.real(), fitted.tau1.imag()};
            out["fitted_tau2"] = {fitted.tau2.real(), fitted.tau2.imag()};
            out["printed_tau1"] = {coeffs.tau1.real(), coeffs.tau1.imag()};
            out["printed_tau2"] = {coeffs.tau2.real(), coeffs.tau2.imag()};
        }
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "k,re_lambda,im_lambda,re_mu,im_mu,re_seed_mu,im_seed_mu,residual,"
                     "scaled_gap\n";
        for (const auto& r : rows) {
            std::cout << r.k << "," << fmt(r.lambda.real()) << "," << fmt(r.lambda.imag()) << ","
                      << fmt(r.mu.real()) << "," << fmt(r.mu.imag()) << "," << fmt(r.seed.real())
                      << "," << fmt(r.seed.imag()) << "," << fmt(r.residual) << "," << fmt(r.gap)
                      << "\n";
        }
        std::cout << "# max_scaled_gap_top_half=" << fmt(max_gap)
                  << " scaled_gap_decreasing=" << (decreasing ? "yes" : "no") << "\n";
        if (fit) {
            std::cout << "# fitted tau1=" << fmt(fitted.tau1) << " printed tau1="
                      << fmt(coeffs.tau1) << "\n";
            std::cout << "# fitted tau2=" << fmt(fitted.tau2) << " printed tau2="
                      << fmt(coeffs.tau2) << "\n";
            double rel1 = std::abs(fitted.tau1 - coeffs.tau1) /
                          std::max(1e-300, std::abs(coeffs.tau1));
            if (rel1 > 0.10)
                std::cout << "# WARNING: fitted tau1 deviates from the printed value by "
                          << fmt(100.0 * rel1) << "% (suspected table misprint)\n";
        }
    }
    return rep.complete ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral engine for fourth-order quadratic eigenvalue pencils"};
    app.require_subcommand(1);

    std::string file;
    int kmax = 12;
    double tol = 1e-10;
    double radius = 0.0;
    int threads = default_threads();
    bool as_json = false, fit = false;

    auto add_common = [&](CLI::App* sub, bool solver) {
        sub->add_option("file", file, "problem JSON file")->required();
        sub->add_flag("--json", as_json, "JSON output instead of text/CSV");
        if (solver) {
            sub->add_option("--kmax", kmax, "largest seeded index");
            sub->add_option("--tol", tol, "residual / integrator tolerance");
            sub->add_option("--radius", radius, "low-index search radius (0 = auto)");
            sub->add_option("--threads", threads, "worker threads");
        }
    };

    CLI::App* c_classify = app.add_subcommand("classify", "case label and Birkhoff regularity");
    add_common(c_classify, false);
    CLI::App* c_asym = app.add_subcommand("asym", "asymptotic seeds mu_hat_k");
    add_common(c_asym, false);
    c_asym->add_option("--kmax", kmax, "largest index");
    CLI::App* c_solve = app.add_subcommand("solve", "compute the spectrum");
    add_common(c_solve, true);
    CLI::App* c_compare = app.add_subcommand("compare", "computed vs asymptotic eigenvalues");
    add_common(c_compare, true);
    c_compare->add_flag("--fit", fit, "least-squares tau1/tau2 fit from computed spectrum");

    CLI11_PARSE(app, argc, argv);

    try {
        ProblemSpec spec = load_problem(file);
        if (c_classify->parsed()) return cmd_classify(spec, as_json);
        if (c_asym->parsed()) return cmd_asym(spec, kmax, as_json);
        if (c_solve->parsed()) return cmd_solve(spec, kmax, tol, radius, threads, as_json);
        if (c_compare->parsed())
            return cmd_compare(spec, kmax, tol, radius, threads, fit, as_json);
    } catch (const UnsupportedCase& e) {
        std::cerr << "unsupported case: " << e.what() << "\n";
        return 3;
    } catch (const NotRegular& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "invalid problem: " << e.what() << "\n";
        return 2;
    } catch (const ExprError& e) {
        std::cerr << "invalid expression: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "invalid problem file: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
