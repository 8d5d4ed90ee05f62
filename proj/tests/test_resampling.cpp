#include <doctest.h>

#include <algorithm>

#include "mmgenre/errors.hpp"
#include "mmgenre/resampling.hpp"
#include "mmgenre/rng.hpp"

using namespace mmgenre;

namespace {

MultiLabelDataset make_ds(const std::vector<std::vector<double>>& features,
                          const std::vector<std::vector<int>>& labels,
                          const std::vector<std::string>& space) {
    MultiLabelDataset ds;
    ds.label_space.names = space;
    ds.labels = LabelMatrix(labels.size(), space.size());
    Matrix x(features.size(), features[0].size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        ds.ids.push_back("e" + std::to_string(i));
        for (std::size_t c = 0; c < features[i].size(); ++c) x(i, c) = features[i][c];
        for (int l : labels[i]) ds.labels(i, static_cast<std::size_t>(l)) = 1;
    }
    ds.features = FeatureMatrix{"TEST", std::move(x)};
    return ds;
}

} // namespace

TEST_CASE("mlsmote leaves a balanced dataset untouched") {
    // Every label appears exactly twice: all imbalance ratios equal the mean.
    auto ds = make_ds({{0.0}, {1.0}, {2.0}, {3.0}},
                      {{0}, {1}, {0}, {1}}, {"A", "B"});
    ResampleConfig cfg;
    cfg.seed = 1;
    auto out = mlsmote(ds, cfg);
    CHECK(out.size() == 4);
    CHECK(out.ids == ds.ids);
    CHECK(out.labels == ds.labels);
    CHECK(out.features->values == ds.features->values);
}

TEST_CASE("mlsmote hand trace: one rare label, k=2") {
    // Labels: A frequent (4x), B middling (3x), R rare (2x on the two
    // right-hand points). Mean imbalance ratio (1 + 4/3 + 2)/3 ~ 1.44, so
    // only R qualifies as minority. Cap = ceil(0.25 * 6) = 2 synthetics.
    auto ds = make_ds({{0.0}, {1.0}, {2.0}, {3.0}, {10.0}, {11.0}},
                      {{0}, {0}, {0, 1}, {1}, {2, 0}, {2, 1}},
                      {"A", "B", "R"});
    ResampleConfig cfg;
    cfg.k_neighbors = 2;
    cfg.seed = 42;
    auto out = mlsmote(ds, cfg);
    REQUIRE(out.size() == 8);
    CHECK(out.ids[6] == "synthetic-0");
    CHECK(out.ids[7] == "synthetic-1");
    for (std::size_t s = 6; s < 8; ++s) {
        // Interpolation between the two R-members at x=10 and x=11, and the
        // majority vote over {seed, neighbor} keeps exactly the shared label R.
        const double v = out.features->values(s, 0);
        CHECK(v >= 10.0);
        CHECK(v <= 11.0);
        CHECK(out.labels(s, 0) == 0);
        CHECK(out.labels(s, 1) == 0);
        CHECK(out.labels(s, 2) == 1);
    }
    // Originals are untouched and determinism holds.
    for (std::size_t i = 0; i < 6; ++i) CHECK(out.ids[i] == ds.ids[i]);
    auto again = mlsmote(ds, cfg);
    CHECK(again.features->values == out.features->values);
    CHECK(again.labels == out.labels);
}

TEST_CASE("mlsmote synthetics stay inside the original bounding box") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 8 + rng.next_below(12);
        const std::size_t d = 1 + rng.next_below(4);
        const std::size_t q = 2 + rng.next_below(3);
        std::vector<std::vector<double>> feats(m, std::vector<double>(d));
        std::vector<std::vector<int>> labels(m);
        for (std::size_t i = 0; i < m; ++i) {
            for (auto& v : feats[i]) v = rng.next_double() * 10.0;
            labels[i].push_back(static_cast<int>(rng.next_below(q)));
            if (rng.next_below(3) == 0 && q > 1)
                labels[i].push_back(static_cast<int>((labels[i][0] + 1) % q));
        }
        std::vector<std::string> space;
        for (std::size_t l = 0; l < q; ++l) space.push_back("L" + std::to_string(l));
        auto ds = make_ds(feats, labels, space);

        ResampleConfig cfg;
        cfg.seed = 1000 + static_cast<std::uint64_t>(trial);
        auto out = mlsmote(ds, cfg);
        REQUIRE(out.size() >= m);
        for (std::size_t c = 0; c < d; ++c) {
            double lo = 1e300, hi = -1e300;
            for (std::size_t i = 0; i < m; ++i) {
                lo = std::min(lo, ds.features->values(i, c));
                hi = std::max(hi, ds.features->values(i, c));
            }
            for (std::size_t s = m; s < out.size(); ++s) {
                CHECK(out.features->values(s, c) >= lo - 1e-12);
                CHECK(out.features->values(s, c) <= hi + 1e-12);
            }
        }
        // Synthetic label sets are never empty.
        for (std::size_t s = m; s < out.size(); ++s)
            CHECK(out.labels.row_sum(s) >= 1);
    }
}

TEST_CASE("mlsmote requires features") {
    MultiLabelDataset ds;
    ds.label_space.names = {"A"};
    ds.ids = {"a", "b"};
    ds.labels = LabelMatrix(2, 1);
    ds.labels(0, 0) = ds.labels(1, 0) = 1;
    CHECK_THROWS_AS(mlsmote(ds, ResampleConfig{}), DataError);
}

TEST_CASE("mltl leaves a single-label-set dataset untouched") {
    auto ds = make_ds({{0.0}, {0.1}, {5.0}, {5.1}}, {{0}, {0}, {0}, {0}}, {"A"});
    auto out = mltl(ds, ResampleConfig{});
    CHECK(out.ids == ds.ids);
    CHECK(out.labels == ds.labels);
}

TEST_CASE("mltl removes the frequent-label-set member of a link") {
    // e0 and e1 are mutual 1-NNs with disjoint label sets (similarity 0).
    // {A} occurs three times, {B} once, so the {A} member e0 is dropped.
    auto ds = make_ds({{0.0}, {0.5}, {10.0}, {20.0}}, {{0}, {1}, {0}, {0}}, {"A", "B"});
    auto out = mltl(ds, ResampleConfig{});
    CHECK(out.ids == std::vector<std::string>{"e1", "e2", "e3"});
    CHECK(out.labels(0, 1) == 1);
    CHECK(out.features->values(0, 0) == 0.5);
}

TEST_CASE("mltl removes both members on a frequency tie") {
    auto ds = make_ds({{0.0}, {0.5}, {50.0}, {51.0}},
                      {{0}, {1}, {0, 1}, {0, 1}}, {"A", "B"});
    auto out = mltl(ds, ResampleConfig{});
    // e0/{A} vs e1/{B}: tie, both go. e2/e3 share a label set: similarity 1, kept.
    CHECK(out.ids == std::vector<std::string>{"e2", "e3"});
}

TEST_CASE("mltl output is always a subset with preserved ids") {
    Rng rng(55);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t m = 4 + rng.next_below(15);
        std::vector<std::vector<double>> feats(m, std::vector<double>(2));
        std::vector<std::vector<int>> labels(m);
        for (std::size_t i = 0; i < m; ++i) {
            feats[i] = {rng.next_double(), rng.next_double()};
            labels[i].push_back(static_cast<int>(rng.next_below(3)));
        }
        auto ds = make_ds(feats, labels, {"A", "B", "C"});
        auto out = mltl(ds, ResampleConfig{});
        CHECK(out.size() <= m);
        for (const auto& id : out.ids)
            CHECK(std::find(ds.ids.begin(), ds.ids.end(), id) != ds.ids.end());
    }
}

TEST_CASE("mlsmote_then_mltl equals the manual composition") {
    auto ds = make_ds({{0.0}, {1.0}, {2.0}, {3.0}, {10.0}, {11.0}},
                      {{0}, {0}, {0, 1}, {1}, {2, 0}, {2, 1}},
                      {"A", "B", "R"});
    ResampleConfig cfg;
    cfg.k_neighbors = 2;
    cfg.seed = 9;
    auto composed = mlsmote_then_mltl(ds, cfg);
    auto manual = mltl(mlsmote(ds, cfg), cfg);
    CHECK(composed.ids == manual.ids);
    CHECK(composed.labels == manual.labels);
    CHECK(composed.features->values == manual.features->values);
}

TEST_CASE("balanced well-separated dataset passes through both stages") {
    auto ds = make_ds({{0.0}, {0.2}, {10.0}, {10.2}},
                      {{0}, {0}, {1}, {1}}, {"A", "B"});
    auto out = mlsmote_then_mltl(ds, ResampleConfig{});
    CHECK(out.ids == ds.ids);
    CHECK(out.labels == ds.labels);
    CHECK(out.features->values == ds.features->values);
}
