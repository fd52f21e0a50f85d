#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "pacchi2/csv.hpp"
#include "pacchi2/dataset.hpp"
#include "pacchi2/ensemble.hpp"
#include "pacchi2/errors.hpp"

using namespace pacchi2;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("pacchi2_test_ensemble_" + name);
    fs::create_directories(p);
    return p;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

}  // namespace

TEST_CASE("lambda grid") {
    auto g = lambda_grid();
    CHECK(g.size() == 158);
    CHECK(std::is_sorted(g.begin(), g.end()));
    CHECK(std::adjacent_find(g.begin(), g.end()) == g.end());
    CHECK(g.front() >= 1e-10);
    CHECK(g.back() == doctest::Approx(5.0).epsilon(1e-15));
    std::size_t arithmetic = std::count_if(g.begin(), g.end(), [](double x) { return x >= 0.1 - 1e-15; });
    CHECK(arithmetic == 99);
    CHECK(std::count(g.begin(), g.end(), 0.1) == 1);
    for (double r : {2.0, 3.0, 5.0}) {
        double smallest = 0.1;
        while (smallest / r >= 1e-10) smallest /= r;
        CHECK(std::find_if(g.begin(), g.end(), [&](double x) { return std::abs(x - smallest) <= 1e-12 * smallest; }) != g.end());
    }
    auto g50 = lambda_grid(50);
    REQUIRE(g50.size() == 50);
    CHECK(std::equal(g50.begin(), g50.end(), g.begin()));
    CHECK(lambda_grid(1).front() == g.front());
    CHECK_THROWS(lambda_grid(159));
}

TEST_CASE("split sizes and disjointness") {
    auto d = oracle::blobs(306, 2, 1.0, 1.0, 3, "h");
    auto p = split_dataset(d, 1);
    CHECK(p.train_idx.size() == 122);
    CHECK(p.valid_idx.size() == 122);
    CHECK(p.test_idx.size() == 62);
    std::set<std::size_t> all;
    for (auto* v : {&p.train_idx, &p.valid_idx, &p.test_idx}) all.insert(v->begin(), v->end());
    CHECK(all.size() == 306);
    CHECK(*all.rbegin() == 305);

    auto small = oracle::blobs(10, 2, 2.0, 0.5, 4, "s");
    auto ps = split_dataset(small, 3);
    CHECK(ps.train_idx.size() == 4);
    CHECK(ps.valid_idx.size() == 4);
    CHECK(ps.test_idx.size() == 2);

    auto again = split_dataset(d, 1);
    CHECK(again.train_idx == p.train_idx);
    CHECK(again.test_idx == p.test_idx);
    CHECK(split_dataset(d, 2).train_idx != p.train_idx);

    auto nine = oracle::blobs(9, 2, 2.0, 0.5, 4, "n");
    CHECK_THROWS_AS(split_dataset(nine, 1), InputError);
}

TEST_CASE("split rejects a composite with one class") {
    // Only the test slice could hold the lone positive, so most seeds fail.
    std::vector<double> x(20);
    std::vector<int> y(20, -1);
    for (std::size_t i = 0; i < 20; ++i) x[i] = static_cast<double>(i);
    y[0] = 1;
    auto d = make_dataset("lopsided", 1, x, y);
    int rejected = 0;
    for (std::uint64_t s = 0; s < 40; ++s) {
        try {
            auto p = split_dataset(d, s);
            auto c = p.composite();
            CHECK(std::find(c.begin(), c.end(), 0u) != c.end());
        } catch (const InputError&) {
            ++rejected;
        }
    }
    CHECK(rejected > 0);
    CHECK(rejected < 40);
}

TEST_CASE("kernel width") {
    CHECK(estimate_gamma(std::vector<std::vector<double>>{{0.0, 0.0}, {2.0, 0.0}}, 1) == doctest::Approx(0.25).epsilon(1e-15));
    auto d = oracle::blobs(120, 3, 1.0, 1.0, 9, "g");
    std::vector<std::size_t> rows(120);
    for (std::size_t i = 0; i < 120; ++i) rows[i] = i;
    const double g = estimate_gamma(d, rows, 5);
    auto scaled = d;
    for (double& v : scaled.features) v *= 3.0;
    CHECK(estimate_gamma(scaled, rows, 5) == doctest::Approx(g / 9.0).epsilon(1e-12));
    CHECK(estimate_gamma(d, rows, 5) == g);

    auto big = oracle::blobs(400, 2, 1.0, 1.0, 10, "b");
    std::vector<std::size_t> all(400);
    for (std::size_t i = 0; i < 400; ++i) all[i] = i;
    CHECK(estimate_gamma(big, all, 1) == estimate_gamma(big, all, 1));
    CHECK(estimate_gamma(big, all, 1) > 0.0);

    CHECK_THROWS_WITH_AS(estimate_gamma(std::vector<std::vector<double>>{{1.0}, {1.0}, {1.0}}, 1),
                         doctest::Contains("degenerate geometry"), InputError);
    CHECK_THROWS(estimate_gamma(std::vector<std::vector<double>>{{1.0}}, 1));
}

TEST_CASE("base classifiers") {
    auto d = oracle::separable_blobs();
    auto plan = split_dataset(d, 7);
    std::vector<std::size_t> comp = plan.composite();
    standardize(d, comp);
    const double gamma = pipeline_gamma(d, plan, 7);
    auto small = train_base(d, plan, 1e-4, gamma, 3);
    auto heavy = train_base(d, plan, 5.0, gamma, 3);
    CHECK(small.valid_risk <= 0.02);
    CHECK(heavy.train_risk >= small.train_risk);

    // Subsample and validation partition the composite; the test set is apart.
    std::set<std::size_t> sub(small.subsample.begin(), small.subsample.end());
    std::set<std::size_t> val(small.validation.begin(), small.validation.end());
    CHECK(sub.size() == plan.train_idx.size());
    CHECK(sub.size() + val.size() == comp.size());
    for (std::size_t r : val) CHECK(sub.count(r) == 0);
    for (std::size_t r : plan.test_idx) {
        CHECK(sub.count(r) == 0);
        CHECK(val.count(r) == 0);
    }
    for (const auto* b : {&small, &heavy}) {
        const double v = static_cast<double>(b->validation.size());
        CHECK(std::abs(b->valid_risk * v - std::round(b->valid_risk * v)) < 1e-9);
        CHECK(b->test_risk >= 0.0);
        CHECK(b->test_risk <= 1.0);
    }
    auto same = train_base(d, plan, 1e-4, gamma, 3);
    CHECK(same.valid_risk == small.valid_risk);
    CHECK(same.svm.dual_coeffs == small.svm.dual_coeffs);
    CHECK_THROWS(train_base(d, plan, 0.0, gamma, 3));
}

TEST_CASE("risk profiles on the two toy regimes") {
    auto lambdas = lambda_grid(50);
    auto sep = oracle::separable_blobs();
    auto sp = split_dataset(sep, 11);
    standardize(sep, sp.composite());
    auto es = build_risk_profile(sep, sp, lambdas, 11);
    CHECK(es.profile.size() == 50);
    CHECK(es.profile.m() == static_cast<int>(sp.valid_idx.size()));
    CHECK(es.profile.risks().back() <= 0.02);

    auto ov = oracle::overlapping_blobs();
    auto op = split_dataset(ov, 11);
    standardize(ov, op.composite());
    auto eo = build_risk_profile(ov, op, lambdas, 11);
    const auto& r = eo.profile.risks();
    CHECK(r.back() - r.front() > 0.0);
    CHECK(r.front() > 0.05);
    REQUIRE(eo.sorted_test_risks.size() == 50);
    for (std::size_t i = 0; i < 50; ++i)
        CHECK(eo.sorted_test_risks[i] == eo.classifiers[eo.profile.perm()[i]].test_risk);

    auto again = build_risk_profile(ov, op, lambdas, 11);
    CHECK(again.profile.risks() == eo.profile.risks());
    CHECK(again.sorted_test_risks == eo.sorted_test_risks);

    auto one = build_risk_profile(ov, op, {0.5}, 11);
    CHECK(one.profile.size() == 1);
}

TEST_CASE("profile csv round trip") {
    auto d = oracle::overlapping_blobs();
    auto plan = split_dataset(d, 2);
    standardize(d, plan.composite());
    auto e = build_risk_profile(d, plan, lambda_grid(6), 2);
    auto dir = scratch("roundtrip");
    write_profile_csv((dir / "profile.csv").string(), e);
    auto rows = read_profile_csv((dir / "profile.csv").string());
    REQUIRE(rows.lambdas.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(rows.lambdas[i] == e.classifiers[i].lambda);
        CHECK(rows.valid[i] == e.classifiers[i].valid_risk);
        CHECK(rows.test[i] == e.classifiers[i].test_risk);
        CHECK(rows.train[i] == e.classifiers[i].train_risk);
    }
    write_file(dir / "bad.csv", "lambda,train_risk,valid_risk,test_risk\n0.1,0.2,1.5,0.1\n");
    CHECK_THROWS_AS(read_profile_csv((dir / "bad.csv").string()), InputError);
    write_file(dir / "hdr.csv", "lambda,valid\n0.1,0.2\n");
    CHECK_THROWS_AS(read_profile_csv((dir / "hdr.csv").string()), InputError);
    CHECK_THROWS_AS(read_profile_csv((dir / "missing.csv").string()), InputError);
}

TEST_CASE("dataset ingestion") {
    auto dir = scratch("ingest");
    write_file(dir / "mixed.csv",
               "x,color,label\n"
               "1.0,red,yes\n"
               "2.0,blue,no\n"
               ",red,yes\n"
               "4.0,green,no\n"
               "5.0,\"blue\",yes\n");
    auto d = load_dataset((dir / "mixed.csv").string(), "label", "yes");
    CHECK(d.rows() == 4);
    CHECK(d.dropped_rows == 1);
    REQUIRE(d.cols == 4);  // x + blue/green/red indicators
    CHECK(d.numeric_column == std::vector<bool>{true, false, false, false});
    CHECK(d.labels == std::vector<int>{1, -1, -1, 1});
    CHECK(std::vector<double>(d.row(0), d.row(0) + 4) == std::vector<double>{1.0, 0.0, 0.0, 1.0});
    CHECK(std::vector<double>(d.row(3), d.row(3) + 4) == std::vector<double>{5.0, 1.0, 0.0, 0.0});

    CHECK_THROWS_AS(load_dataset((dir / "mixed.csv").string(), "target", "yes"), InputError);
    CHECK_THROWS_AS(load_dataset((dir / "mixed.csv").string(), "label", "maybe"), InputError);
    write_file(dir / "ragged.csv", "a,label\n1,2,3\n");
    CHECK_THROWS_AS(load_dataset((dir / "ragged.csv").string(), "label", "1"), InputError);

    auto s = d;
    std::vector<std::size_t> rows{0, 1, 2, 3};
    standardize(s, rows);
    double mean = 0, var = 0;
    for (std::size_t i = 0; i < 4; ++i) mean += s.row(i)[0];
    mean /= 4;
    for (std::size_t i = 0; i < 4; ++i) var += (s.row(i)[0] - mean) * (s.row(i)[0] - mean);
    CHECK(std::abs(mean) < 1e-15);
    CHECK(var / 4 == doctest::Approx(1.0).epsilon(1e-12));  // population scale
    CHECK(s.row(1)[1] == 1.0);
}

TEST_CASE("csv helpers") {
    std::istringstream in("a, b ,c\n1,\"x,y\",3\n\n4,5,6\n");
    auto t = parse_csv(in);
    CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][1] == "x,y");
    double v = 0;
    CHECK(parse_double("0.25", v));
    CHECK(v == 0.25);
    CHECK_FALSE(parse_double("abc", v));
    CHECK_FALSE(parse_double("", v));
    double x = 0.1 + 0.2, back = 0;
    REQUIRE(parse_double(format_real(x), back));
    CHECK(back == x);
}
