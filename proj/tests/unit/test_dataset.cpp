#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <vector>

#include "effortrank/config.hpp"
#include "effortrank/dataset.hpp"
#include "effortrank/random.hpp"
#include "temp_dir.hpp"

using namespace effortrank;
using Catch::Approx;

namespace {

Dataset make_dataset(const std::vector<double>& efforts) {
    std::vector<ModuleRecord> recs;
    for (std::size_t i = 0; i < efforts.size(); ++i)
        recs.push_back({std::to_string(i), {static_cast<double>(i), 2.0 * static_cast<double>(i)}, efforts[i], i % 2 == 0});
    return Dataset("d", {"a", "b"}, recs);
}

} // namespace

TEST_CASE("load_dataset maps effort, label and features", "[dataset]") {
    TempDir dir("dataset");
    const auto path = dir.write("three.csv", "loc,churn,bug\n10,3,0\n20,5,1\n5,1,2\n");
    const auto d = load_dataset(path, DatasetSchema{});
    REQUIRE(d.size() == 3);
    REQUIRE(d.feature_count() == 2);
    CHECK(d.feature_names() == std::vector<std::string>{"loc", "churn"});
    CHECK(d.efforts() == std::vector<double>{10, 20, 5});
    CHECK(d.labels() == std::vector<bool>{false, true, true});
    CHECK(d.name() == "three");
    CHECK(d[1].id == "1");
}

TEST_CASE("label rule accepts numbers and truthy words", "[dataset]") {
    TempDir dir("labels");
    const auto path = dir.write("l.csv", "loc,x,bug\n1,1,1\n2,1,TRUE\n3,1,no\n4,1,Buggy\n5,1,0\n");
    const auto d = load_dataset(path, DatasetSchema{});
    CHECK(d.labels() == std::vector<bool>{true, true, false, true, false});

    const auto bad = dir.write("bad.csv", "loc,x,bug\n1,1,maybe\n2,1,0\n");
    CHECK_THROWS_AS(load_dataset(bad, DatasetSchema{}), ParseError);
}

TEST_CASE("load_dataset errors name the column or the row", "[dataset]") {
    TempDir dir("errors");
    SECTION("missing column") {
        const auto path = dir.write("m.csv", "size,x,bug\n1,2,0\n3,4,1\n");
        try {
            load_dataset(path, DatasetSchema{});
            FAIL("expected a schema error");
        } catch (const SchemaError& e) {
            CHECK(std::string(e.what()).find("'loc'") != std::string::npos);
        }
    }
    SECTION("non-numeric feature at row 7") {
        std::string body = "loc,x,bug\n";
        for (int i = 1; i <= 9; ++i) body += std::to_string(i) + "," + (i == 7 ? "NA" : "1") + ",0\n";
        const auto path = dir.write("na.csv", body);
        try {
            load_dataset(path, DatasetSchema{});
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.row() == 7);
            CHECK(std::string(e.what()).find("row 7") != std::string::npos);
        }
    }
    SECTION("empty file") {
        const auto path = dir.write("empty.csv", "");
        CHECK_THROWS_AS(load_dataset(path, DatasetSchema{}), ParseError);
    }
    SECTION("missing file") {
        CHECK_THROWS_AS(load_dataset(dir.file("nope.csv"), DatasetSchema{}), ConfigError);
    }
}

TEST_CASE("summed effort columns, ids and ignored columns", "[dataset]") {
    TempDir dir("schema");
    const auto path = dir.write("c.csv", "commit,la,ld,ns,bug\nc1,3,2,1,1\nc2,0,0,1,0\nc3,10,1,2,0\n");
    DatasetSchema s;
    s.effort = "la+ld";
    s.id = "commit";
    const auto d = load_dataset(path, s);
    CHECK(d.efforts() == std::vector<double>{5, 0, 11});
    CHECK(d[2].id == "c3");
    CHECK(d.feature_names() == std::vector<std::string>{"la", "ld", "ns"});

    s.ignore = {"ld", "not_there"};
    CHECK(load_dataset(path, s).feature_names() == std::vector<std::string>{"la", "ns"});
}

TEST_CASE("write_dataset round-trips count, labels and efforts", "[dataset]") {
    TempDir dir("roundtrip");
    Rng rng(11);
    std::vector<ModuleRecord> recs;
    for (int i = 0; i < 40; ++i)
        recs.push_back({"m" + std::to_string(i), {rng.normal(), rng.uniform() * 1e6, 1.0 / 3.0},
                        std::ceil(rng.uniform() * 500.0), rng.bernoulli(0.3)});
    const Dataset d("rt", {"f0", "f1", "f2"}, recs, "X");
    const auto path = dir.file("rt.csv");
    write_dataset(d, path);
    const auto back = load_dataset(path, serialized_schema("X"));
    REQUIRE(back.size() == d.size());
    CHECK(back.labels() == d.labels());
    CHECK(back.efforts() == d.efforts());
    CHECK(back.feature_names() == d.feature_names());
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(back[i].id == d[i].id);
        CHECK(back[i].features == d[i].features);
    }
}

TEST_CASE("preprocess drops zero effort and log-transforms features only", "[dataset]") {
    const auto d = make_dataset({0, 5, 12});
    const auto kept = preprocess(d, {.log_transform = false, .drop_zero_effort = true});
    CHECK(kept.size() == 2);
    CHECK(kept.efforts() == std::vector<double>{5, 12});
    CHECK(d.size() == 3);

    const auto twice = preprocess(kept, {.log_transform = false, .drop_zero_effort = true});
    CHECK(twice.efforts() == kept.efforts());
    CHECK(twice.labels() == kept.labels());

    std::vector<ModuleRecord> recs = {{"a", {0.0, std::exp(1.0) - 1.0}, 7.0, true},
                                      {"b", {3.0, 1.0}, 9.0, false}};
    const Dataset e("e", {"x", "y"}, recs);
    const auto logged = preprocess(e, {.log_transform = true, .drop_zero_effort = true});
    CHECK(logged[0].features[0] == 0.0);
    CHECK(logged[0].features[1] == Approx(1.0).epsilon(1e-12));
    CHECK(logged[0].effort == 7.0);
    CHECK(logged[1].features[0] == Approx(std::log(4.0)));

    std::vector<ModuleRecord> neg = {{"a", {-1.0}, 1.0, true}, {"b", {1.0}, 1.0, false}};
    CHECK_THROWS_AS(preprocess(Dataset("n", {"x"}, neg), {.log_transform = true, .drop_zero_effort = true}),
                    DomainError);
}

TEST_CASE("skewness uses the population moments", "[dataset]") {
    const std::vector<double> sym = {1, 2, 3};
    CHECK(skewness(sym) == Approx(0.0).margin(1e-12));
    const std::vector<double> v = {1, 1, 1, 9};
    CHECK(skewness(v) == Approx(48.0 / std::pow(12.0, 1.5)).epsilon(1e-12));
    CHECK(skewness(v) == Approx(1.1547).margin(1e-4));

    const std::vector<double> constant = {4, 4, 4, 4};
    CHECK_THROWS_WITH(skewness(constant), Catch::Matchers::ContainsSubstring("zero variance"));
    const std::vector<double> short_v = {1, 2};
    CHECK_THROWS_AS(skewness(short_v), DomainError);
}

TEST_CASE("skewness is invariant to shift and positive scale", "[dataset][property]") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(3 + rng.index(30));
        for (double& v : x) v = std::exp(rng.normal() * 1.5);
        const double a = 0.1 + rng.uniform() * 10.0, b = rng.normal() * 100.0;
        std::vector<double> y;
        for (double v : x) y.push_back(a * v + b);
        CHECK(skewness(y) == Approx(skewness(x)).margin(1e-9));
    }
}

TEST_CASE("skewness of ant-1.4 efforts", "[dataset][corpus]") {
    const char* root = std::getenv("EFFORTRANK_DATA_DIR");
    const auto path = std::filesystem::path(root ? root : "data") / "PROMISE" / "ant-1.4.csv";
    if (!std::filesystem::exists(path)) SKIP("public PROMISE file not installed at " << path.string());
    const auto d = load_dataset(path.string(), default_source_profiles().at("PROMISE").schema);
    const auto e = d.efforts();
    CHECK(skewness(e) == Approx(2.08).margin(0.01));
}

TEST_CASE("load_manifest reads pairs in order and rejects bad rows", "[dataset]") {
    TempDir dir("manifest");
    const auto good = dir.write("m.csv", "# pairs\nsource,train,test\n\nPROMISE,ant-1.3,ant-1.4\nKamei,columba,bugzilla\n");
    const auto m = load_manifest(good);
    REQUIRE(m.pairs.size() == 2);
    CHECK(m.pairs[0].source == "PROMISE");
    CHECK(m.pairs[0].train == "ant-1.3");
    CHECK(m.pairs[0].test == "ant-1.4");
    CHECK(m.pairs[0].tag() == "ant-1.3->ant-1.4");

    CHECK_THROWS_AS(load_manifest(dir.write("e.csv", "")), ConfigError);
    CHECK_THROWS_AS(load_manifest(dir.write("s.csv", "K,a,a\n")), ConfigError);
    CHECK_THROWS_AS(load_manifest(dir.write("d.csv", "K,a,b\nK,a,b\n")), ConfigError);
    CHECK_THROWS_AS(load_manifest(dir.write("c.csv", "K,a\n")), ParseError);
}

TEST_CASE("shipped manifest lists the 61 pairs", "[dataset]") {
    const char* root = std::getenv("EFFORTRANK_DATA_DIR");
    const auto m = load_manifest((std::filesystem::path(root ? root : "data") / "table2_manifest.csv").string());
    REQUIRE(m.pairs.size() == 61);
    CHECK(m.pairs.front().source == "PROMISE");
    CHECK(m.pairs.front().train == "ant-1.3");
    CHECK(m.pairs.front().test == "ant-1.4");
    CHECK(m.pairs.back().train == "pdf.js");
    CHECK(m.pairs.back().test == "meteor");
    std::map<std::string, int> per_source;
    for (const auto& p : m.pairs) ++per_source[p.source];
    CHECK(per_source["PROMISE"] == 30);
    CHECK(per_source["AEEEM"] == 5);
    CHECK(per_source["Kamei"] == 6);
    CHECK(per_source["JavaScript"] == 20);
}

TEST_CASE("Dataset rejects malformed records", "[dataset]") {
    CHECK_THROWS_AS(Dataset("x", {"a"}, {{"0", {1.0}, 1.0, true}}), DomainError);
    CHECK_THROWS_AS(Dataset("x", {"a"}, {{"0", {1.0}, 1.0, true}, {"1", {1.0, 2.0}, 1.0, false}}), DomainError);
    CHECK_THROWS_AS(Dataset("x", {}, {{"0", {}, 1.0, true}, {"1", {}, 1.0, false}}), DomainError);
}
