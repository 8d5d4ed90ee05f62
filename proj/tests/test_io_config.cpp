#include <doctest.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "mmgenre/config.hpp"
#include "mmgenre/errors.hpp"
#include "mmgenre/io.hpp"
#include "mmgenre/rng.hpp"

using namespace mmgenre;

namespace {

std::string temp_file(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string write_temp(const std::string& name, const std::string& content) {
    auto path = temp_file(name);
    std::ofstream out(path);
    out << content;
    return path;
}

} // namespace

TEST_CASE("format_double round trips exactly") {
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        double v = (2.0 * rng.next_double() - 1.0) * std::pow(10.0, (int)rng.next_below(20) - 10);
        const std::string s = format_double(v);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == v);
    }
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(1.5) == "1.5");
}

TEST_CASE("csv matrix save/load round trip with descriptor") {
    CsvMatrix csv;
    csv.descriptor = "AUDIO-SSD";
    csv.ids = {"a", "b"};
    csv.values = Matrix(2, 3);
    Rng rng(2);
    for (auto& v : csv.values.data()) v = rng.next_double() * 1e6;
    auto path = temp_file("matrix.csv");
    save_csv_matrix(path, csv);
    auto back = load_csv_matrix(path);
    CHECK(back.descriptor == "AUDIO-SSD");
    CHECK(back.ids == csv.ids);
    CHECK(back.values == csv.values);

    // Re-saving the loaded matrix is byte-identical.
    auto path2 = temp_file("matrix2.csv");
    save_csv_matrix(path2, back);
    std::ifstream f1(path), f2(path2);
    std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(s1 == s2);
}

TEST_CASE("ingest joins by id in manifest order") {
    MultiLabelDataset ds;
    ds.label_space.names = {"A"};
    ds.ids = {"x", "y", "z"};
    ds.labels = LabelMatrix(3, 1);
    for (std::size_t i = 0; i < 3; ++i) ds.labels(i, 0) = 1;

    auto path = write_temp("feat.csv",
                           "# descriptor: DEEP\n"
                           "id,f0,f1\n"
                           "z,5,6\n"
                           "x,1,2\n"
                           "y,3,4\n");
    auto fm = ingest_external_features(path, ds);
    CHECK(fm.descriptor == "DEEP");
    CHECK(fm.values(0, 0) == 1.0);
    CHECK(fm.values(1, 0) == 3.0);
    CHECK(fm.values(2, 1) == 6.0);
}

TEST_CASE("ingest errors name the missing id and reject duplicates") {
    MultiLabelDataset ds;
    ds.label_space.names = {"A"};
    ds.ids = {"x", "y"};
    ds.labels = LabelMatrix(2, 1);
    ds.labels(0, 0) = ds.labels(1, 0) = 1;

    auto missing = write_temp("feat_missing.csv", "id,f0\nx,1\n");
    try {
        ingest_external_features(missing, ds);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("y") != std::string::npos);
    }

    auto dup = write_temp("feat_dup.csv", "id,f0\nx,1\nx,2\ny,3\n");
    CHECK_THROWS_AS(ingest_external_features(dup, ds), DataError);

    auto ragged = write_temp("feat_ragged.csv", "id,f0,f1\nx,1,2\ny,3\n");
    CHECK_THROWS_AS(ingest_external_features(ragged, ds), DataError);
}

TEST_CASE("score matrix round trip") {
    MultiLabelDataset ds;
    ds.label_space.names = {"Drama", "Comedy"};
    ds.ids = {"a", "b"};
    ds.labels = LabelMatrix(2, 2);
    ds.labels(0, 0) = ds.labels(1, 1) = 1;

    ScoreMatrix scores;
    scores.source = "TEST/BR_KNN";
    scores.values = Matrix(2, 2);
    scores.values(0, 0) = 0.25;
    scores.values(1, 1) = 0.75;
    auto path = temp_file("scores.csv");
    save_score_matrix(path, scores, ds.ids, ds.label_space);
    auto back = load_score_matrix(path, ds);
    CHECK(back.values == scores.values);
}

TEST_CASE("atomic_write_text replaces content completely") {
    auto path = temp_file("atomic.txt");
    atomic_write_text(path, "first version, longer text\n");
    atomic_write_text(path, "second\n");
    std::ifstream in(path);
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(s == "second\n");
}

TEST_CASE("config parses sections, types, and lists") {
    auto cfg = Config::parse_string(
        "# comment\n"
        "seed = 42\n"
        "[dataset]\n"
        "manifest = \"toy/manifest.json\"\n"
        "k_folds = 5\n"
        "[feature.AUDIO-MFCC]\n"
        "kind = mfcc\n"
        "[feature.SYN-TFIDF]\n"
        "kind = tfidf\n"
        "ngram = 2\n"
        "rate = 0.25\n"
        "members = a, b, c\n");
    CHECK(cfg.get_int("seed") == 42);
    CHECK(cfg.get_string("dataset.manifest") == "toy/manifest.json");
    CHECK(cfg.get_int("dataset.k_folds") == 5);
    CHECK(cfg.get_double("feature.SYN-TFIDF.rate") == doctest::Approx(0.25));
    CHECK(cfg.get_list("feature.SYN-TFIDF.members") ==
          std::vector<std::string>{"a", "b", "c"});
    auto features = cfg.sections("feature");
    REQUIRE(features.size() == 2);
    CHECK(features[0] == "AUDIO-MFCC");
    CHECK(features[1] == "SYN-TFIDF");
    CHECK(cfg.get_int("missing", 9) == 9);
    CHECK_THROWS_AS(cfg.get_int("missing"), ConfigError);
    CHECK_THROWS_AS(cfg.get_int("dataset.manifest"), ConfigError);
}

TEST_CASE("config rejects duplicate keys") {
    CHECK_THROWS_AS(Config::parse_string("a = 1\na = 2\n"), ConfigError);
}
