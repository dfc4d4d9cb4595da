#include "ampere/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <set>

#include "ampere/error.hpp"
#include "ampere/experiments.hpp"
#include "ampere/parallel.hpp"
#include "ampere/report_io.hpp"

namespace ampere {

namespace {

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void within_budget(CriterionResult& r, const Stopwatch& sw, double budget) {
    if (sw.seconds() > budget) {
        r.passed = false;
        r.detail += "; exceeded the " + std::to_string(static_cast<int>(budget)) + " s budget";
    }
}

std::string failed_checks(const ConvergenceReport& rep) {
    std::string out;
    for (const auto& c : rep.checks)
        if (!c.passed) out += (out.empty() ? "" : "; ") + c.name + " (" + c.detail + ")";
    return out;
}

// Any exception becomes a failed criterion with the message as detail.
template <class F>
CriterionResult guarded(int id, std::string title, F&& body) {
    CriterionResult r{id, std::move(title), false, {}};
    try {
        body(r);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("error: ") + e.what();
    }
    return r;
}

}  // namespace

const std::vector<Vector3>& default_maxwell_points() {
    static const std::vector<Vector3> pts = {{0.5, 0.5, 1.0}, {1.5, -0.3, 0.8}, {0.2, 0.7, -1.2}};
    return pts;
}

const std::vector<Vector3>& default_curl_points() {
    static const std::vector<Vector3> pts = {{0.0, 0.0, 1.5}, {0.3, 0.2, 1.5}, {2.0, 0.5, -1.0}};
    return pts;
}

std::vector<CriterionResult> run_core_criteria(std::string* transcript) {
    std::vector<CriterionResult> out;
    auto log = [&](const std::string& name, const std::string& csv) {
        if (transcript) *transcript += "## " + name + "\n" + csv;
    };

    out.push_back(guarded(1, "rectangular loop limit", [&](CriterionResult& r) {
        Stopwatch sw;
        const auto rep = lemma53_convergence({2, 4, 8, 16, 32});
        log("lemma53", to_csv(rep.table));
        const double gap = rep.rows.back().abs_error;
        r.passed = rep.passed;
        r.detail = "|A(C_32,L) - 1| = " + sci(gap) + ", tail order " + sci(rep.fitted_order) +
                   (rep.passed ? ", Lk = 1 for every n" : "; failed: " + failed_checks(rep));
        within_budget(r, sw, 30.0);
    }));

    CatalogReport catalog;
    Stopwatch catalog_clock;
    std::string catalog_error;
    try {
        catalog = ampere_catalog(default_catalog());
        log("ampere_catalog", to_csv(catalog.table));
    } catch (const std::exception& e) {
        catalog_error = e.what();
    }
    const double catalog_seconds = catalog_clock.seconds();

    out.push_back(guarded(2, "ampere catalog A = Lk", [&](CriterionResult& r) {
        if (!catalog_error.empty()) throw Error(ErrorKind::InvalidArgument, catalog_error);
        std::set<std::int64_t> lks;
        double worst = 0.0;
        std::string bad;
        for (const auto& row : catalog.rows) {
            lks.insert(row.lk);
            if (!row.error.empty() || !row.passed) bad += " " + row.id;
            if (row.error.empty()) worst = std::max(worst, row.gap);
        }
        const bool coverage = lks.count(-1) && lks.count(0) && lks.count(1) && lks.count(2);
        r.passed = catalog.rows.size() >= 6 && coverage && bad.empty();
        r.detail = std::to_string(catalog.rows.size()) + " scenes, max |A - Lk| = " + sci(worst) +
                   (coverage ? ", Lk covers {-1,0,1,2}" : ", Lk coverage incomplete") +
                   (bad.empty() ? "" : "; failing:" + bad);
        if (catalog_seconds > 60.0) {
            r.passed = false;
            r.detail += "; exceeded the 60 s budget";
        }
    }));

    out.push_back(guarded(3, "linking integral symmetry", [&](CriterionResult& r) {
        if (!catalog_error.empty()) throw Error(ErrorKind::InvalidArgument, catalog_error);
        double worst = 0.0;
        std::string bad;
        for (const auto& row : catalog.rows) {
            if (!row.error.empty() || !row.symmetric) bad += " " + row.id;
            if (row.error.empty()) worst = std::max(worst, row.symmetry_gap);
        }
        r.passed = !catalog.rows.empty() && bad.empty();
        r.detail = "max |A(C,L) - A(L,C)| = " + sci(worst) + (bad.empty() ? "" : "; failing:" + bad);
    }));

    out.push_back(guarded(4, "infinitesimal similitude", [&](CriterionResult& r) {
        const std::vector<double> eps = {0.2, 0.1, 0.05, 0.025};
        const auto normal = similitude_infinitesimal({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 2}, eps, 1e-4);
        const auto oblique = similitude_infinitesimal({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1.5, -1.0, 1.2}, eps, 1e-4);
        log("similitude_infinitesimal_normal", to_csv(normal.table));
        log("similitude_infinitesimal_oblique", to_csv(oblique.table));
        r.passed = normal.passed && oblique.passed;
        r.detail = "order " + sci(normal.fitted_order) + " on the normal, " + sci(oblique.fitted_order) + " oblique";
        if (!r.passed) r.detail += "; failed: " + failed_checks(normal) + " " + failed_checks(oblique);
    }));

    out.push_back(guarded(5, "general similitude on the unit square", [&](CriterionResult& r) {
        Stopwatch sw;
        const auto rep = similitude_general(SurfacePatch::planar_rect({0, 0, 0}, {1, 0, 0}, {0, 1, 0}),
                                            {0.5, 0.5, 2.0}, 1e-4, {8, 16, 32, 64});
        log("similitude_general_square", to_csv(rep.table));
        r.passed = rep.passed;
        r.detail = "relative error " + sci(rep.rows.back().rel_error) + " at M=64, order " + sci(rep.fitted_order);
        if (!r.passed) r.detail += "; failed: " + failed_checks(rep);
        within_budget(r, sw, 120.0);
    }));

    out.push_back(guarded(6, "curl of the loop field vanishes", [&](CriterionResult& r) {
        const auto rep = curl_vanishing(Curve::circle({0, 0, 0}, 1.0, {0, 0, 1}), default_curl_points(),
                                        {4e-3, 2e-3, 1e-3});
        log("curl_vanishing", to_csv(rep.table));
        double worst = 0.0;
        for (const auto& row : rep.rows)
            if (std::abs(row.scale - 1e-3) < 1e-15) worst = std::max(worst, row.abs_error);
        r.passed = rep.passed;
        r.detail = "max |curl B| = " + sci(worst) + " at step 1e-3";
        for (const auto& c : rep.checks)
            if (c.name == "halving_ratio") r.detail += ", " + c.detail;
        if (!r.passed) r.detail += "; failed: " + failed_checks(rep);
    }));

    out.push_back(guarded(7, "off-support Maxwell equations", [&](CriterionResult& r) {
        const auto patch = SurfacePatch::planar_rect({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
        const auto plain = maxwell_probe(patch, 1.0, std::nullopt, default_maxwell_points(), {1e-3});
        const auto dipole = maxwell_probe(patch, 1.0, 1e-3, default_maxwell_points(), {1e-3});
        log("maxwell_sheet", to_csv(plain.table));
        log("maxwell_dipole_sheet", to_csv(dipole.table));
        double worst = 0.0;
        for (const auto* rep : {&plain, &dipole})
            for (const auto& row : rep->rows) worst = std::max({worst, row.abs_error, row.rel_error});
        r.passed = plain.passed && dipole.passed;
        r.detail = "max(|div E|, |curl E|) = " + sci(worst) + " over " +
                   std::to_string(default_maxwell_points().size()) + " points, both sheets";
        if (!r.passed) r.detail += "; failed: " + failed_checks(plain) + " " + failed_checks(dipole);
    }));

    out.push_back(guarded(8, "cross-projection identity", [&](CriterionResult& r) {
        std::mt19937_64 rng(20240611);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::normal_distribution<double> g(0.0, 1.0);
        int failures = 0;
        double worst = 0.0;
        constexpr int kTrials = 10000;
        for (int i = 0; i < kTrials; ++i) {
            const double sa = std::pow(10.0, 3.0 * u(rng)), sb = std::pow(10.0, 3.0 * u(rng));
            const Vector3 a{sa * u(rng), sa * u(rng), sa * u(rng)};
            const Vector3 b{sb * u(rng), sb * u(rng), sb * u(rng)};
            Vector3 rh{g(rng), g(rng), g(rng)};
            rh = rh / norm(rh);
            const auto sides = cross_projection_identity(a, b, rh);
            const double rel = norm(sides.lhs - sides.rhs) / (norm(a) * norm(b));
            worst = std::max(worst, rel);
            if (!(rel <= 1e-12)) ++failures;
        }
        r.passed = failures == 0;
        r.detail = std::to_string(kTrials) + " random triples, " + std::to_string(failures) +
                   " failures, max relative gap " + sci(worst);
    }));

    out.push_back(guarded(9, "first-order Taylor remainder", [&](CriterionResult& r) {
        const std::vector<double> eps = {1e-2, 5e-3, 2.5e-3, 1.25e-3};
        double lo = 1e300, hi = 0.0;
        for (const auto& [x, a] : std::vector<std::pair<Vector3, Vector3>>{{{1, 0, 0}, {1, 0, 0}},
                                                                           {{1, 0.5, -0.3}, {0.2, -1, 0.4}},
                                                                           {{-0.4, 2, 1}, {1, 1, 1}}}) {
            const auto probe = taylor_probe(x, a, eps);
            for (std::size_t k = 0; k + 1 < eps.size(); ++k) {
                const double ratio =
                    std::abs(probe.fd_slopes[k] - probe.analytic) / std::abs(probe.fd_slopes[k + 1] - probe.analytic);
                lo = std::min(lo, ratio);
                hi = std::max(hi, ratio);
            }
        }
        r.passed = lo >= 1.8 && hi <= 2.2;
        r.detail = "halving ratios in [" + sci(lo) + ", " + sci(hi) + "]";
    }));

    out.push_back(guarded(10, "quadrature and crossing engines agree", [&](CriterionResult& r) {
        if (!catalog_error.empty()) throw Error(ErrorKind::InvalidArgument, catalog_error);
        // Rescaling k_B moves the integral but can not move a crossing count.
        const LinkScene hopf = hopf_scene();
        FieldConstants tripled;
        tripled.k_B *= 3.0;
        const double a1 = gauss_linking(hopf).value;
        const double a3 = gauss_linking(hopf, tripled).value;
        const int lk = combinatorial_lk(hopf.curve_c, *hopf.spanning_mesh);
        bool agree = !catalog.rows.empty();
        for (const auto& row : catalog.rows) agree = agree && row.error.empty() && row.passed;
        const bool scaling = std::abs(a3 - 3.0 * a1) <= 1e-9 && lk == 1;
        r.passed = agree && scaling;
        r.detail = std::string(agree ? "every catalog scene agrees" : "catalog disagreement") +
                   ", A scales with k_B (" + sci(a3 / a1) + "x) while Lk stays " + std::to_string(lk);
    }));
    return out;
}

std::vector<CriterionResult> run_acceptance() {
    std::string transcript;
    auto results = run_core_criteria(&transcript);
    results.push_back(guarded(11, "thread-count determinism", [&](CriterionResult& r) {
        const int saved = max_thread_count();
        std::string t1, t4;
        set_thread_count(1);
        run_core_criteria(&t1);
        set_thread_count(4);
        run_core_criteria(&t4);
        set_thread_count(saved);
        r.passed = t1 == t4 && t1 == transcript;
        r.detail = "reports with 1 and 4 threads are " + std::string(r.passed ? "byte-identical" : "different") +
                   " (" + std::to_string(t1.size()) + " bytes)";
    }));
    return results;
}

std::string format_results(const std::vector<CriterionResult>& results) {
    std::string out;
    for (const auto& r : results)
        out += "criterion " + std::to_string(r.id) + " " + (r.passed ? "PASS" : "FAIL") + " " + r.title + ": " +
               r.detail + "\n";
    return out;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    return !results.empty() &&
           std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.passed; });
}

}  // namespace ampere
