#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "ampere/experiments.hpp"
#include "ampere/report_io.hpp"

using namespace ampere;

namespace {

const Check* find_check(const ConvergenceReport& rep, const std::string& name) {
    for (const auto& c : rep.checks)
        if (c.name == name) return &c;
    return nullptr;
}

double cell_real(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return *d;
    return static_cast<double>(std::get<std::int64_t>(c));
}

}  // namespace

TEST_CASE("fitted log slope") {
    std::vector<double> s, e;
    for (double h : {0.4, 0.2, 0.1, 0.05}) {
        s.push_back(h);
        e.push_back(3.0 * h * h);
    }
    CHECK(fitted_log_slope(s, e) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::isnan(fitted_log_slope({0.1, 0.05}, {1.0, 0.5})));
    // zero and non-finite errors are skipped
    CHECK(fitted_log_slope({0.4, 0.2, 0.1, 0.05, 0.025}, {0.4, 0.2, 0.0, 0.05, NAN}) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("infinitesimal similitude converges at first order") {
    const std::vector<double> eps = {0.2, 0.1, 0.05, 0.025};
    for (const Vector3 r : {Vector3{0, 0, 2}, Vector3{1.5, -1.0, 1.2}}) {
        const auto rep = similitude_infinitesimal({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, r, eps, 1e-4);
        CHECK(rep.passed);
        REQUIRE(rep.rows.size() == 4);
        CHECK(rep.fitted_order >= 0.9);
        CHECK(rep.fitted_order <= 1.2);
        for (std::size_t i = 1; i < rep.rows.size(); ++i) CHECK(rep.rows[i].rel_error < rep.rows[i - 1].rel_error);
        CHECK(rep.table.rows.size() == 4);
    }
    CHECK_THROWS_AS(similitude_infinitesimal({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 0.5}, {1.0, 0.5, 0.25}, 1e-4),
                    Error);
}

TEST_CASE("general similitude: cell anchors give second order on flat and curved sheets") {
    const std::vector<int> sizes = {8, 16, 32, 64};
    const auto square = similitude_general(SurfacePatch::planar_rect({0, 0, 0}, {1, 0, 0}, {0, 1, 0}),
                                           {0.5, 0.5, 2.0}, 1e-4, sizes);
    CHECK(square.passed);
    CHECK(square.rows.back().rel_error <= 1e-3);
    CHECK(square.fitted_order >= 1.8);

    const auto disk = similitude_general(SurfacePatch::disk({0, 0, 0}, 1.0, {0, 0, 1}), {0, 0, 3}, 1e-4, sizes);
    CHECK(disk.passed);
    CHECK(disk.fitted_order >= 1.8);

    const auto dome =
        similitude_general(SurfacePatch::dome({0, 0, 0}, 1.0, {0, 0, 1}, 0.5), {0.3, 0.1, 3}, 1e-4, sizes);
    CHECK(dome.passed);
    CHECK(dome.fitted_order >= 1.8);

    // the closed-form corner anchor is only first order
    const auto corner = similitude_general(SurfacePatch::planar_rect({0, 0, 0}, {1, 0, 0}, {0, 1, 0}),
                                           {0.5, 0.5, 2.0}, 1e-4, sizes, kSimilitudeConstants, {}, DipoleAnchor::corner);
    CHECK(corner.fitted_order == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("rectangular loop study") {
    const auto rep = lemma53_convergence({2, 4, 8, 16, 32});
    CHECK(rep.passed);
    REQUIRE(rep.table.rows.size() == 5);
    const std::vector<std::string> cols = {"n", "A_total", "A_c1", "A_c2", "abs_err", "A_c1_closed_form", "Lk"};
    CHECK(rep.table.columns == cols);
    for (const auto& row : rep.table.rows) {
        const double n = cell_real(row[0]);
        const double total = cell_real(row[1]), c1 = cell_real(row[2]), c2 = cell_real(row[3]);
        CHECK(std::abs(total - 1.0) <= 1e-8);
        CHECK(c1 == doctest::Approx(n / std::sqrt(1 + n * n)).epsilon(1e-10));
        CHECK(total == doctest::Approx(c1 + c2).epsilon(1e-12));
        CHECK(std::get<std::int64_t>(row[6]) == 1);
    }
    // the far legs contribute 1 - n / sqrt(1 + n^2), about 1 / (2 n^2)
    CHECK(rep.fitted_order == doctest::Approx(2.0).epsilon(0.05));
    for (const char* name : {"limit", "tail_monotone", "leg_to_one", "line_integral", "lk_is_one"}) {
        const Check* c = find_check(rep, name);
        REQUIRE(c);
        CHECK(c->passed);
    }
    CHECK(rep.rows.front().scale == doctest::Approx(0.5));
    CHECK_THROWS_AS(lemma53_convergence({}), Error);
    CHECK_THROWS_AS(lemma53_convergence({1, 2}), Error);
}

TEST_CASE("curl study") {
    const Curve loop = Curve::circle({0, 0, 0}, 1.0, {0, 0, 1});
    const auto rep = curl_vanishing(loop, {{0, 0, 1.5}, {2, 0.5, -1}}, {4e-3, 2e-3, 1e-3});
    CHECK(rep.passed);
    CHECK(rep.rows.size() == 6);
    for (const auto& row : rep.rows) {
        CHECK(row.abs_error <= 1e-5);
        CHECK(row.rel_error <= 1e-5);
    }
    // every probe must sit well clear of the wire for the stencil
    CHECK_THROWS_AS(curl_vanishing(loop, {{0, 0, 1.5}, {1.05, 0, 0}}, {1e-3}), Error);
}

TEST_CASE("Maxwell probes") {
    const auto patch = SurfacePatch::planar_rect({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
    const std::vector<Vector3> pts = {{0.5, 0.5, 1.0}, {1.5, -0.3, 0.8}, {0.2, 0.7, -1.2}};
    CHECK(maxwell_probe(patch, 1.0, std::nullopt, pts, {1e-3}).passed);
    CHECK(maxwell_probe(patch, 1.0, 1e-3, pts, {1e-3}).passed);
    const auto on_sheet = maxwell_probe(patch, 1.0, std::nullopt, {{0.5, 0.5, 0.0}}, {1e-3});
    CHECK_FALSE(on_sheet.passed);
    CHECK_FALSE(on_sheet.rows.at(0).error.empty());
}

TEST_CASE("catalog") {
    const auto catalog = default_catalog();
    CHECK(catalog.size() >= 6);
    const auto rep = ampere_catalog(catalog);
    CHECK(rep.passed);
    std::set<std::int64_t> lks;
    for (const auto& row : rep.rows) {
        CAPTURE(row.id);
        lks.insert(row.lk);
        CHECK(row.passed);
        CHECK(row.symmetric);
        CHECK(row.error.empty());
        CHECK(std::abs(row.a - row.lk) <= 1e-4 + row.error_estimate);
    }
    CHECK(lks == std::set<std::int64_t>{-1, 0, 1, 2});

    // a broken scene is reported in its row and the batch carries on
    std::vector<CatalogEntry> mixed = {catalog.front(),
                                       {"touching",
                                        {Curve::circle({1, 0, 0}, 0.5, {0, 0, 1}),
                                         Curve::circle({0, 0, 0}, 1.0, {0, 0, 1}),
                                         mesh_surface(SurfacePatch::disk({0, 0, 0}, 1.0, {0, 0, 1}), 9, 9)}}};
    const auto broken = ampere_catalog(mixed);
    CHECK_FALSE(broken.passed);
    REQUIRE(broken.rows.size() == 2);
    CHECK(broken.rows[0].passed);
    CHECK_FALSE(broken.rows[1].passed);
    CHECK(broken.rows[1].error.find("CurvesTooClose") != std::string::npos);
}

TEST_CASE("CSV and JSON serialization") {
    Table t;
    t.columns = {"name", "value", "count"};
    t.rows.push_back({std::string("plain"), 0.1, std::int64_t{3}});
    t.rows.push_back({std::string("a,b"), 1.0 / 3.0, std::int64_t{-2}});
    t.rows.push_back({std::string("say \"hi\""), NAN, std::int64_t{0}});
    const std::string csv = to_csv(t);
    CHECK(csv ==
          "name,value,count\n"
          "plain,0.10000000000000001,3\n"
          "\"a,b\",0.33333333333333331,-2\n"
          "\"say \"\"hi\"\"\",nan,0\n");
    CHECK(csv.find('\r') == std::string::npos);
    CHECK(format_real(1e-20) == "9.9999999999999995e-21");
    CHECK(format_real(2.0) == "2");

    const auto j = to_json(t);
    CHECK(j["columns"].size() == 3);
    CHECK(j["rows"][2]["value"].is_null());
    CHECK(j["rows"][0]["count"] == 3);
    CHECK(j["rows"][1]["name"] == "a,b");

    const auto rep = to_json(lemma53_convergence({2, 4, 8}));
    CHECK(rep["name"] == "lemma53");
    CHECK(rep["checks"].is_array());
    CHECK(json_sibling("out/report.csv") == std::filesystem::path("out/report.json"));
}
