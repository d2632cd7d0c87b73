#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <set>

#include "bstac/dataset.hpp"
#include "bstac/error.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace bstac;

TEST_CASE("load_csv: basic three-row file") {
    const auto d = parse_csv("a,b,class\n1,2,0\n3,4,1\n5,6,0\n");
    CHECK(d.rows() == 3);
    CHECK(d.cols() == 2);
    CHECK(d.class_names() == std::vector<std::string>{"0", "1"});
    CHECK(d.class_counts() == std::vector<std::size_t>{2, 1});
    CHECK(d.at(1, 0) == 3.0);
    CHECK(d.at(2, 1) == 6.0);
    CHECK(d.label(1) == 1);
}

TEST_CASE("load_csv: label column by name or index, anywhere in the row") {
    const auto by_name = parse_csv("y,a,b\npos,1,2\nneg,3,4\n", {"y"});
    CHECK(by_name.cols() == 2);
    CHECK(by_name.attribute_names() == std::vector<std::string>{"a", "b"});
    CHECK(by_name.class_names() == std::vector<std::string>{"pos", "neg"});
    const auto by_index = parse_csv("y,a,b\npos,1,2\nneg,3,4\n", {"0"});
    CHECK(by_index.values().size() == 4);
    CHECK(std::equal(by_name.values().begin(), by_name.values().end(), by_index.values().begin()));
}

TEST_CASE("load_csv: a single distinct label is accepted") {
    const auto d = parse_csv("a,class\n1,x\n2,x\n");
    CHECK(d.num_classes() == 1);
}

TEST_CASE("load_csv: error contract") {
    SUBCASE("non-numeric cell names row and column") {
        try {
            parse_csv("a,b,class\n1,2,0\n3,abc,1\n");
            FAIL("expected DataError");
        } catch (const DataError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("row 3") != std::string::npos);
            CHECK(msg.find("'b'") != std::string::npos);
        }
    }
    CHECK_THROWS_AS(parse_csv("a,b,class\n1,nan,0\n"), DataError);
    CHECK_THROWS_AS(parse_csv("a,b,class\n1,inf,0\n"), DataError);
    CHECK_THROWS_AS(parse_csv("a,b,class\n"), DataError);
    CHECK_THROWS_AS(parse_csv(""), DataError);
    CHECK_THROWS_AS(parse_csv("a,b,class\n1,2\n"), DataError);
    CHECK_THROWS_AS(parse_csv("a,b,c\n1,2,0\n", {"label"}), DataError);
    CHECK_THROWS_AS(parse_csv("y,a,y\n1,2,0\n", {"y"}), DataError);
    CHECK_THROWS_AS(load_csv("/nonexistent/file.csv"), DataError);
}

TEST_CASE("load_csv: CRLF, quoting and surrounding blanks") {
    const auto d = parse_csv("a, \"b,c\" ,class\r\n 1 ,2,\"x y\"\r\n\r\n");
    CHECK(d.rows() == 1);
    CHECK(d.attribute_names()[1] == "b,c");
    CHECK(d.class_names()[0] == "x y");
}

TEST_CASE("stratified_split: per-class rounding") {
    SUBCASE("5/5 at 0.7 rounds 3.5 up to 4 per class") {
        std::vector<std::vector<double>> rows;
        std::vector<ClassId> labels;
        for (int i = 0; i < 10; ++i) {
            rows.push_back({double(i)});
            labels.push_back(i % 2);
        }
        const auto s = stratified_split(testutil::make_dataset(rows, labels), {0.7, true, 1});
        CHECK(s.train.rows() == 8);
        CHECK(s.test.rows() == 2);
        CHECK(s.train.class_counts() == std::vector<std::size_t>{4, 4});
        CHECK(s.test.class_counts() == std::vector<std::size_t>{1, 1});
    }
    SUBCASE("70/30 at 0.7 gives 49 + 21") {
        std::vector<std::vector<double>> rows;
        std::vector<ClassId> labels;
        for (int i = 0; i < 100; ++i) {
            rows.push_back({double(i)});
            labels.push_back(i < 70 ? 0 : 1);
        }
        const auto s = stratified_split(testutil::make_dataset(rows, labels), {0.7, true, 9});
        CHECK(s.train.rows() == 70);
        CHECK(s.test.rows() == 30);
        CHECK(s.train.class_counts() == std::vector<std::size_t>{49, 21});
    }
}

TEST_CASE("stratified_split: deterministic, disjoint, covering, order-preserving") {
    RngStream gen(3, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto n = 4 + gen.below(60);
        auto data = testutil::random_dataset(gen, n, 1 + gen.below(3), 2 + gen.below(2));
        // Tag each row with its index so partitions can be traced back.
        std::vector<double> values(data.values().begin(), data.values().end());
        for (std::size_t r = 0; r < n; ++r) values[r * data.cols()] = static_cast<double>(r);
        const LabeledDataset tagged(data.attribute_names(), values,
                                    std::vector<ClassId>(data.labels().begin(), data.labels().end()), data.class_names());
        bool stratifiable = true;
        for (auto c : tagged.class_counts()) stratifiable &= c >= 2;
        if (!stratifiable) {
            CHECK_THROWS_AS(stratified_split(tagged, {0.7, true, 5}), DataError);
            continue;
        }
        const SplitSpec spec{0.1 + 0.8 * gen.uniform01(), true, gen.next_u64()};
        const auto a = stratified_split(tagged, spec);
        const auto b = stratified_split(tagged, spec);
        CHECK(std::equal(a.train.values().begin(), a.train.values().end(), b.train.values().begin(), b.train.values().end()));

        std::vector<std::size_t> seen;
        for (auto* part : {&a.train, &a.test}) {
            double prev = -1;
            for (std::size_t r = 0; r < part->rows(); ++r) {
                const double id = part->at(r, 0);
                CHECK(id > prev);
                prev = id;
                seen.push_back(static_cast<std::size_t>(id));
                CHECK(part->label(r) == tagged.label(static_cast<std::size_t>(id)));
            }
        }
        std::sort(seen.begin(), seen.end());
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), std::size_t{0});
        CHECK(seen == all);

        for (std::size_t c = 0; c < tagged.num_classes(); ++c) {
            const double expected = spec.train_fraction * static_cast<double>(tagged.class_counts()[c]);
            CHECK(std::abs(static_cast<double>(a.train.class_counts()[c]) - expected) <= 1.0);
        }
    }
}

TEST_CASE("stratified_split: rejects singleton classes and bad fractions") {
    const auto d = testutil::make_dataset({{1}, {2}, {3}}, {0, 0, 1});
    CHECK_THROWS_AS(stratified_split(d, {0.7, true, 0}), DataError);
    const auto ok = testutil::make_dataset({{1}, {2}, {3}, {4}}, {0, 0, 1, 1});
    CHECK_THROWS_AS(stratified_split(ok, {1.0, true, 0}), DataError);
    CHECK_THROWS_AS(stratified_split(ok, {0.0, true, 0}), DataError);
}

TEST_CASE("remove_records: examples") {
    const auto d = testutil::make_dataset({{0}, {1}, {2}, {3}, {4}}, {0, 1, 0, 1, 0});
    const std::vector<std::size_t> ends{0, 4};
    const auto r = remove_records(d, ends);
    REQUIRE(r.rows() == 3);
    CHECK(r.at(0, 0) == 1.0);
    CHECK(r.at(1, 0) == 2.0);
    CHECK(r.at(2, 0) == 3.0);
    CHECK(r.class_counts() == std::vector<std::size_t>{1, 2});

    const auto same = remove_records(d, {});
    CHECK(std::equal(same.values().begin(), same.values().end(), d.values().begin(), d.values().end()));

    const std::vector<std::size_t> all{0, 1, 2, 3, 4};
    const auto none = remove_records(d, all);
    CHECK(none.empty());
    CHECK(none.class_counts() == std::vector<std::size_t>{0, 0});

    const std::vector<std::size_t> bad{5};
    CHECK_THROWS_AS(remove_records(d, bad), DataError);
}

TEST_CASE("remove_records: two removals equal one removal of the union") {
    RngStream gen(11, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = 1 + gen.below(12);
        auto d = testutil::random_dataset(gen, n, 2);
        std::vector<std::size_t> a, b_orig;
        for (std::size_t r = 0; r < n; ++r) {
            const auto pick = gen.below(3);
            if (pick == 0) a.push_back(r);
            if (pick == 1) b_orig.push_back(r);
        }
        // Reindex B into the rows that survive A.
        std::vector<std::size_t> b_re;
        for (auto r : b_orig) b_re.push_back(r - static_cast<std::size_t>(std::count_if(a.begin(), a.end(), [r](auto x) { return x < r; })));
        const auto twice = remove_records(remove_records(d, a), b_re);
        std::vector<std::size_t> u = a;
        u.insert(u.end(), b_orig.begin(), b_orig.end());
        const auto once = remove_records(d, u);
        CHECK(std::equal(twice.values().begin(), twice.values().end(), once.values().begin(), once.values().end()));
        CHECK(std::equal(twice.labels().begin(), twice.labels().end(), once.labels().begin(), once.labels().end()));
        CHECK(twice.class_counts() == once.class_counts());
    }
}

TEST_CASE("csv: load -> write -> load round-trips exactly") {
    RngStream gen(5, 0);
    for (int trial = 0; trial < 30; ++trial) {
        const auto n = 1 + gen.below(20);
        const auto d = 1 + gen.below(4);
        std::vector<double> values;
        for (std::size_t i = 0; i < n * d; ++i) values.push_back((gen.uniform01() - 0.5) * std::pow(10.0, double(gen.below(20)) - 10));
        std::vector<ClassId> labels;
        for (std::size_t i = 0; i < n; ++i) labels.push_back(static_cast<ClassId>(gen.below(2)));
        std::vector<std::string> names;
        for (std::size_t j = 0; j < d; ++j) names.push_back("f" + std::to_string(j));
        const LabeledDataset src(names, values, labels, {"neg", "pos,x"}, "target", gen.below(d + 1));
        const auto text = format_csv(src);
        const auto back = parse_csv(text, {"target"});
        CHECK(std::equal(back.values().begin(), back.values().end(), src.values().begin(), src.values().end()));
        CHECK(format_csv(back) == text);
    }
    const auto path = std::filesystem::temp_directory_path() / "bstac_roundtrip.csv";
    const auto d = parse_csv("a,class\n0.1,x\n1e-300,y\n");
    write_csv(d, path);
    CHECK(format_csv(load_csv(path)) == format_csv(d));
    std::filesystem::remove(path);
}

TEST_CASE("with_class_table remaps by name and appends unknown classes") {
    const auto d = parse_csv("a,class\n1,b\n2,a\n3,z\n");
    const auto m = d.with_class_table({"a", "b"});
    CHECK(m.class_names() == std::vector<std::string>{"a", "b", "z"});
    CHECK(m.label(0) == 1);
    CHECK(m.label(1) == 0);
    CHECK(m.label(2) == 2);
}
