// Acceptance suite: nine pass/fail checks covering the end-to-end contract
// of the pipeline, each with a wall-clock budget. Prints one line per
// criterion and exits non-zero if any fails.
//
// Environment:
//   MMGENRE_CLI           path to the mmgenre CLI binary (criterion 8)
//   MMGENRE_FIXTURE_DIR   path to the shipped 20-title toy fixture
//   MMGENRE_FULL_MANIFEST optional path to the full dataset manifest; the
//                         reference-indicator check is skipped without it

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mmgenre/dataset.hpp"
#include "mmgenre/evaluation.hpp"
#include "mmgenre/fusion.hpp"
#include "mmgenre/image.hpp"
#include "mmgenre/learners.hpp"
#include "mmgenre/matrix.hpp"
#include "mmgenre/projection.hpp"
#include "mmgenre/resampling.hpp"
#include "mmgenre/rng.hpp"
#include "mmgenre/text.hpp"

namespace fs = std::filesystem;
using namespace mmgenre;

namespace {

int g_failures = 0;

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

template <typename Fn>
void criterion(int number, const std::string& title, double budget_seconds, Fn fn) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        fn(c);
    } catch (const std::exception& e) {
        c.require(false, std::string("exception: ") + e.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.require(elapsed < budget_seconds,
              "over time budget: " + std::to_string(elapsed) + "s >= " +
                  std::to_string(budget_seconds) + "s");
    std::printf("criterion %d [%s]: %s (%.2fs)%s%s\n", number, title.c_str(),
                c.ok ? "PASS" : "FAIL", elapsed, c.ok ? "" : " -- ", c.detail.c_str());
    if (!c.ok) ++g_failures;
}

std::string env_or_empty(const char* name) {
    const char* v = std::getenv(name);
    return v ? v : "";
}

// --------------------------------------------------------------------------
// Criterion 2 oracle: ML-kNN fitted and scored straight from the MAP
// formulas with brute-force sorted neighbor search.

struct MlknnOracle {
    Matrix x;
    LabelMatrix y;
    std::size_t k;
    double s;
    std::vector<double> priors;
    std::vector<std::vector<double>> ct, cf;

    std::vector<std::size_t> neighbors(const double* query, std::ptrdiff_t exclude) const {
        std::vector<std::pair<double, std::size_t>> d;
        for (std::size_t i = 0; i < x.rows(); ++i) {
            if (static_cast<std::ptrdiff_t>(i) == exclude) continue;
            d.emplace_back(squared_distance(query, x.row(i), x.cols()), i);
        }
        std::sort(d.begin(), d.end());
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < k; ++i) out.push_back(d[i].second);
        return out;
    }

    void fit() {
        const std::size_t m = x.rows();
        const std::size_t q = y.cols();
        priors.assign(q, 0.0);
        for (std::size_t l = 0; l < q; ++l) {
            std::size_t cnt = 0;
            for (std::size_t i = 0; i < m; ++i) cnt += y(i, l);
            priors[l] = (s + cnt) / (2.0 * s + m);
        }
        std::vector<std::vector<std::size_t>> c_true(q, std::vector<std::size_t>(k + 1, 0));
        std::vector<std::vector<std::size_t>> c_false(q, std::vector<std::size_t>(k + 1, 0));
        for (std::size_t i = 0; i < m; ++i) {
            const auto nbrs = neighbors(x.row(i), static_cast<std::ptrdiff_t>(i));
            for (std::size_t l = 0; l < q; ++l) {
                std::size_t j = 0;
                for (std::size_t n : nbrs) j += y(n, l);
                (y(i, l) ? c_true : c_false)[l][j]++;
            }
        }
        ct.assign(q, std::vector<double>(k + 1, 0.0));
        cf.assign(q, std::vector<double>(k + 1, 0.0));
        for (std::size_t l = 0; l < q; ++l) {
            std::size_t st = 0, sf = 0;
            for (std::size_t j = 0; j <= k; ++j) { st += c_true[l][j]; sf += c_false[l][j]; }
            for (std::size_t j = 0; j <= k; ++j) {
                ct[l][j] = (s + c_true[l][j]) / (s * (k + 1) + st);
                cf[l][j] = (s + c_false[l][j]) / (s * (k + 1) + sf);
            }
        }
    }

    std::vector<double> score(const double* query) const {
        const auto nbrs = neighbors(query, -1);
        std::vector<double> out(y.cols());
        for (std::size_t l = 0; l < y.cols(); ++l) {
            std::size_t j = 0;
            for (std::size_t n : nbrs) j += y(n, l);
            const double pt = priors[l] * ct[l][j];
            const double pf = (1.0 - priors[l]) * cf[l][j];
            out[l] = pt / (pt + pf);
        }
        return out;
    }
};

// --------------------------------------------------------------------------
// Criterion 4 oracle: per-pixel LBP(8,2) from the textbook definition.

int oracle_uniform_bin(int pattern) {
    int transitions = 0;
    for (int b = 0; b < 8; ++b)
        transitions += ((pattern >> b) & 1) != ((pattern >> ((b + 1) % 8)) & 1);
    if (transitions > 2) return 58;
    int bin = 0;
    for (int p = 0; p < pattern; ++p) {
        int t = 0;
        for (int b = 0; b < 8; ++b) t += ((p >> b) & 1) != ((p >> ((b + 1) % 8)) & 1);
        if (t <= 2) ++bin;
    }
    return bin;
}

std::array<double, 59> oracle_lbp(const GrayImage& img) {
    std::array<double, 59> hist{};
    std::size_t count = 0;
    for (std::size_t y = 2; y + 2 < img.height; ++y) {
        for (std::size_t x = 2; x + 2 < img.width; ++x) {
            const double c = img.at(x, y);
            int pattern = 0;
            for (int p = 0; p < 8; ++p) {
                const double angle = 2.0 * M_PI * p / 8.0;
                const double sx = x + 2.0 * std::cos(angle);
                const double sy = y - 2.0 * std::sin(angle);
                const double x0 = std::floor(sx), y0 = std::floor(sy);
                const double tx = sx - x0, ty = sy - y0;
                auto at = [&](double xx, double yy) {
                    return static_cast<double>(
                        img.at(static_cast<std::size_t>(xx), static_cast<std::size_t>(yy)));
                };
                double v;
                if (std::abs(tx) < 1e-9 && std::abs(ty) < 1e-9)
                    v = at(x0, y0);
                else
                    v = (1 - tx) * (1 - ty) * at(x0, y0) + tx * (1 - ty) * at(x0 + 1, y0) +
                        (1 - tx) * ty * at(x0, y0 + 1) + tx * ty * at(x0 + 1, y0 + 1);
                if (v >= c) pattern |= 1 << p;
            }
            ++hist[oracle_uniform_bin(pattern)];
            ++count;
        }
    }
    for (double& h : hist) h /= static_cast<double>(count);
    return hist;
}

double sparse_distance(const SparseVector& a, const SparseVector& b) {
    double acc = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            acc += a[i].second * a[i].second; ++i;
        } else if (i == a.size() || b[j].first < a[i].first) {
            acc += b[j].second * b[j].second; ++j;
        } else {
            const double d = a[i].second - b[j].second;
            acc += d * d; ++i; ++j;
        }
    }
    return acc;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

MultiLabelDataset small_random_ds(Rng& rng, std::size_t m, std::size_t d, std::size_t q) {
    MultiLabelDataset ds;
    for (std::size_t l = 0; l < q; ++l)
        ds.label_space.names.push_back(std::string(1, static_cast<char>('A' + l)));
    FeatureMatrix fm;
    fm.values = Matrix(m, d);
    for (auto& v : fm.values.data()) v = rng.next_double();
    ds.labels = LabelMatrix(m, q);
    for (std::size_t i = 0; i < m; ++i) {
        bool any = false;
        for (std::size_t l = 0; l < q; ++l) {
            ds.labels(i, l) = static_cast<std::uint8_t>(rng.next_below(2));
            any = any || ds.labels(i, l);
        }
        if (!any) ds.labels(i, rng.next_below(q)) = 1;
        ds.ids.push_back("e" + std::to_string(i));
    }
    ds.features = std::move(fm);
    ds.resources.resize(m);
    return ds;
}

// --------------------------------------------------------------------------

void c1_indicators(Check& c) {
    const std::string fixture = env_or_empty("MMGENRE_FIXTURE_DIR");
    c.require(!fixture.empty(), "MMGENRE_FIXTURE_DIR not set");
    if (!c.ok) return;

    const MultiLabelDataset ds = load_manifest(fixture + "/manifest.json");
    const Indicators ind = indicators(ds);
    // 20 titles carrying 26 labels over 4 genres, 8 distinct label sets.
    c.require(ds.size() == 20, "toy manifest should have 20 examples");
    c.require(ind.lcard == 26.0 / 20.0, "LCard != 26/20");
    c.require(ind.lden == (26.0 / 20.0) / 4.0, "LDen != LCard/4");
    c.require(ind.ldiv == 8, "LDiv != 8");
    c.require(ind.pldiv == 8.0 / 20.0, "PLDiv != 8/20");

    const std::string full = env_or_empty("MMGENRE_FULL_MANIFEST");
    if (full.empty()) {
        c.detail = "(full-manifest indicator check skipped: MMGENRE_FULL_MANIFEST not set)";
        return;
    }
    const MultiLabelDataset fds = load_manifest(full);
    const Indicators fi = indicators(fds);
    c.require(std::abs(fi.lcard - 2.426) < 5e-4, "full LCard != 2.426");
    c.require(std::abs(fi.lden - 0.134) < 5e-4, "full LDen != 0.134");
    c.require(fi.ldiv == 922, "full LDiv != 922");
    c.require(std::abs(fi.pldiv - 0.087) < 5e-4, "full PLDiv != 0.087");
}

void c2_mlknn(Check& c) {
    // Hand-sized 5-point fixture, k=2 s=1.
    Matrix x(5, 2);
    const double pts[5][2] = {{0, 0}, {0.1, 0}, {1, 1}, {1.1, 1}, {0.5, 0.5}};
    for (std::size_t i = 0; i < 5; ++i) { x(i, 0) = pts[i][0]; x(i, 1) = pts[i][1]; }
    LabelMatrix y(5, 2);
    y(0, 0) = 1; y(1, 0) = 1; y(2, 1) = 1; y(3, 1) = 1; y(4, 0) = 1; y(4, 1) = 1;
    LabelSpace space{{"A", "B"}};

    const MlknnModel model = mlknn_train(x, y, space, 2, 1.0);
    MlknnOracle oracle{x, y, 2, 1.0, {}, {}, {}};
    oracle.fit();
    for (std::size_t l = 0; l < 2; ++l) {
        c.require(std::abs(model.priors[l] - oracle.priors[l]) < 1e-12, "toy prior mismatch");
        for (std::size_t j = 0; j <= 2; ++j) {
            c.require(std::abs(model.cond_true[l][j] - oracle.ct[l][j]) < 1e-12,
                      "toy cond_true mismatch");
            c.require(std::abs(model.cond_false[l][j] - oracle.cf[l][j]) < 1e-12,
                      "toy cond_false mismatch");
        }
    }
    const double queries[3][2] = {{0.05, 0.0}, {1.05, 1.0}, {0.5, 0.4}};
    for (const auto& qp : queries) {
        const auto pred = mlknn_predict(model, qp, 2);
        const auto want = oracle.score(qp);
        for (std::size_t l = 0; l < 2; ++l)
            c.require(std::abs(pred.scores[l] - want[l]) < 1e-12, "toy score mismatch");
    }

    // 100 random datasets, every training point and extra queries.
    Rng rng(0xACC2);
    for (int trial = 0; trial < 100 && c.ok; ++trial) {
        const std::size_t m = 5 + rng.next_below(26);  // 5..30
        const std::size_t d = 1 + rng.next_below(5);   // 1..5
        const std::size_t q = 1 + rng.next_below(4);   // 1..4
        const std::size_t k = 1 + rng.next_below(std::min<std::size_t>(5, m - 1));
        MultiLabelDataset ds = small_random_ds(rng, m, d, q);

        const MlknnModel model2 = mlknn_train(ds.features->values, ds.labels, ds.label_space, k);
        MlknnOracle o2{ds.features->values, ds.labels, k, 1.0, {}, {}, {}};
        o2.fit();
        for (std::size_t l = 0; l < q && c.ok; ++l) {
            c.require(std::abs(model2.priors[l] - o2.priors[l]) < 1e-12, "random prior mismatch");
            for (std::size_t j = 0; j <= k; ++j) {
                c.require(std::abs(model2.cond_true[l][j] - o2.ct[l][j]) < 1e-12,
                          "random cond_true mismatch");
                c.require(std::abs(model2.cond_false[l][j] - o2.cf[l][j]) < 1e-12,
                          "random cond_false mismatch");
            }
        }
        for (int probe = 0; probe < 5 && c.ok; ++probe) {
            std::vector<double> query(d);
            for (auto& v : query) v = rng.next_double();
            const auto pred = mlknn_predict(model2, query.data(), d);
            const auto want = o2.score(query.data());
            for (std::size_t l = 0; l < q; ++l)
                c.require(std::abs(pred.scores[l] - want[l]) < 1e-12, "random score mismatch");
        }
    }
}

void c3_mlp(Check& c) {
    // Analytic gradient vs central finite differences over 20 random nets.
    Rng rng(0xACC3);
    for (int trial = 0; trial < 20 && c.ok; ++trial) {
        const std::size_t d = 2 + rng.next_below(3);
        const std::size_t m = 5 + rng.next_below(8);
        Matrix x(m, d);
        for (auto& v : x.data()) v = 2.0 * rng.next_double() - 1.0;
        std::vector<std::uint8_t> y(m);
        for (auto& v : y) v = static_cast<std::uint8_t>(rng.next_below(2));

        MlpBinary net(d, 3 + rng.next_below(4), 0x900D + static_cast<std::uint64_t>(trial));
        const auto params = net.parameters();
        const auto grad = net.gradient(x, y);
        const double eps = 1e-6;
        double max_rel = 0.0;
        for (std::size_t p = 0; p < params.size(); ++p) {
            auto plus = params, minus = params;
            plus[p] += eps;
            minus[p] -= eps;
            net.set_parameters(plus);
            const double lp = net.loss(x, y);
            net.set_parameters(minus);
            const double lm = net.loss(x, y);
            net.set_parameters(params);
            const double fd = (lp - lm) / (2.0 * eps);
            const double denom = std::max({std::abs(fd), std::abs(grad[p]), 1e-8});
            max_rel = std::max(max_rel, std::abs(fd - grad[p]) / denom);
        }
        c.require(max_rel < 1e-4,
                  "gradient check failed: max relative error " + std::to_string(max_rel));
    }

    // XOR with the default training budget.
    Matrix x(4, 2);
    x(1, 1) = 1; x(2, 0) = 1; x(3, 0) = 1; x(3, 1) = 1;
    const std::vector<std::uint8_t> y = {0, 1, 1, 0};
    MlpHyper hyper;
    hyper.hidden_units = 8;
    hyper.seed = 7;
    const auto net = MlpBinary::train(x, y, hyper);
    for (std::size_t i = 0; i < 4; ++i)
        c.require((net->predict(x.row(i), 2) >= 0.5 ? 1 : 0) == y[i], "XOR not learned");
}

void c4_lbp(Check& c) {
    const auto& table = lbp_uniform_bin_table();
    std::vector<int> seen(59, 0);
    int uniform = 0;
    for (int p = 0; p < 256; ++p) {
        const int want = oracle_uniform_bin(p);
        c.require(table[p] == want, "bin table disagrees at pattern " + std::to_string(p));
        if (want < 58) { ++uniform; ++seen[want]; }
    }
    c.require(uniform == 58, "expected exactly 58 uniform patterns");
    for (int b = 0; b < 58; ++b)
        c.require(seen[b] == 1, "uniform bin not hit exactly once");

    Rng rng(0xACC4);
    for (int trial = 0; trial < 100 && c.ok; ++trial) {
        GrayImage img;
        img.width = 8 + rng.next_below(25);
        img.height = 8 + rng.next_below(25);
        img.data.resize(img.width * img.height);
        for (auto& px : img.data) px = static_cast<std::uint8_t>(rng.next_below(256));
        const auto hist = lbp_u2_8_2(img);
        double sum = 0.0;
        for (double h : hist) sum += h;
        c.require(std::abs(sum - 1.0) < 1e-9, "histogram sum not 1");
    }

    // 7x7 fixture: one interior 3x3 block, checked bit-exact.
    GrayImage fixture;
    fixture.width = fixture.height = 7;
    fixture.data.resize(49);
    for (std::size_t i = 0; i < 49; ++i)
        fixture.data[i] = static_cast<std::uint8_t>((i * 37 + 11) % 256);
    const auto got = lbp_u2_8_2(fixture);
    const auto want = oracle_lbp(fixture);
    for (std::size_t b = 0; b < 59; ++b)
        c.require(got[b] == want[b], "7x7 fixture differs from oracle at bin " +
                                         std::to_string(b));
}

void c5_projection(Check& c) {
    const Projector p{128, 0xACC5};

    c.require(project({}, p) == std::vector<double>(128, 0.0), "zero vector not preserved");

    // Linearity: project(a) + project(b) == project(a ++ b) for disjoint keys.
    SparseVector a = {{term_key("alpha"), 1.5}, {term_key("beta"), -2.0}};
    SparseVector b = {{term_key("gamma"), 0.75}};
    SparseVector ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    const auto pa = project(a, p), pb = project(b, p), pab = project(ab, p);
    for (std::size_t i = 0; i < 128; ++i)
        c.require(pa[i] + pb[i] == pab[i], "projection not additive");

    // Distance preservation over 1000 random sparse vectors.
    Rng rng(0xACC5 + 1);
    const std::size_t n = 1000;
    std::vector<SparseVector> vecs(n);
    std::vector<std::vector<double>> proj(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t nnz = 10 + rng.next_below(20);
        for (std::size_t t = 0; t < nnz; ++t)
            vecs[i].emplace_back(rng.next_u64(), 2.0 * rng.next_double() - 1.0);
        std::sort(vecs[i].begin(), vecs[i].end());
        proj[i] = project(vecs[i], p);
    }
    std::size_t within = 0, total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double orig = std::sqrt(sparse_distance(vecs[i], vecs[j]));
            const double got = std::sqrt(squared_distance(proj[i].data(), proj[j].data(), 128));
            ++total;
            if (got >= 0.75 * orig && got <= 1.25 * orig) ++within;
        }
    }
    const double frac = static_cast<double>(within) / static_cast<double>(total);
    c.require(frac >= 0.90, "only " + std::to_string(frac) +
                                " of pairwise distances within +/-25%");
}

void c6_fusion(Check& c) {
    auto row = [](std::initializer_list<double> v) {
        Matrix m(1, v.size());
        std::size_t i = 0;
        for (double x : v) m(0, i++) = x;
        return m;
    };
    FusionPlan plan;
    plan.input_kind = FusionInput::Proba;
    plan.members = {"a", "b"};

    plan.rule = FusionRule::Prod;
    plan.threshold = 0.01;
    auto prod = fuse({row({0.5, 0.2}), row({0.4, 0.3})}, plan);
    c.require(std::abs(prod.fused(0, 0) - 0.20) < 1e-12, "prod 0.5*0.4 != 0.20");
    c.require(std::abs(prod.fused(0, 1) - 0.06) < 1e-12, "prod 0.2*0.3 != 0.06");
    c.require(prod.predictions[0][0] == 1 && prod.predictions[0][1] == 1,
              "prod predictions at threshold 0.01");

    plan.rule = FusionRule::Max;
    plan.threshold = 0.3;
    auto mx = fuse({row({0.5, 0.2}), row({0.4, 0.3})}, plan);
    c.require(mx.fused(0, 0) == 0.5 && mx.fused(0, 1) == 0.3, "max values");
    c.require(mx.predictions[0][1] == 1, "max boundary 0.3 should qualify");

    plan.rule = FusionRule::Mean;
    auto mean = fuse({row({0.5, 0.2}), row({0.4, 0.3})}, plan);
    c.require(std::abs(mean.fused(0, 0) - 0.45) < 1e-15 &&
                  std::abs(mean.fused(0, 1) - 0.25) < 1e-15,
              "mean values");
    c.require(mean.predictions[0][0] == 1 && mean.predictions[0][1] == 0, "mean predictions");

    plan.rule = FusionRule::Sum;
    auto sum = fuse({row({0.5, 0.1}), row({0.4, 0.1})}, plan);
    c.require(std::abs(sum.fused(0, 0) - 0.9) < 1e-15 &&
                  std::abs(sum.fused(0, 1) - 0.2) < 1e-15,
              "sum values");

    c.require(default_fusion_threshold(FusionRule::Prod, FusionInput::Proba, 2) == 0.01 &&
                  default_fusion_threshold(FusionRule::Mean, FusionInput::Proba, 2) == 0.3 &&
                  default_fusion_threshold(FusionRule::Sum, FusionInput::Pred, 5) == 3.0,
              "default thresholds");

    // Member selection from the reference mean F-Score table.
    const std::vector<ClassifierResult> results = {
        {"SYN-LSTM", "synopsis", {0.488}},
        {"TRAILER-C3D/BR_MLP", "trailer-frames", {0.471}},
        {"SUB-LSTM", "subtitle", {0.436}},
        {"POSTER-INCv3/BR_MLP", "poster", {0.409}},
        {"TRAILER-LBP/BR_MLP", "trailer-frames", {0.376}},
        {"AUDIO-SPEC-INCv3/BR_MLP", "trailer-audio", {0.334}},
        {"AUDIO-SSD/BR_MLP", "trailer-audio", {0.318}},
        {"POSTER-RGB/BR_MLP", "poster", {0.302}},
        {"SUB-TFIDF/BR_MLP", "subtitle", {0.295}},
        {"SYN-TFIDF/BR_MLP", "synopsis", {0.441}},
    };
    auto top2 = top_n_select(results, 2);
    std::sort(top2.begin(), top2.end());
    c.require(top2 == std::vector<std::string>{"SYN-LSTM", "TRAILER-C3D/BR_MLP"},
              "top-2 member set");

    auto best = best_on_data_select(results);
    std::sort(best.begin(), best.end());
    c.require(best == std::vector<std::string>{"AUDIO-SPEC-INCv3/BR_MLP", "POSTER-INCv3/BR_MLP",
                                               "SUB-LSTM", "SYN-LSTM", "TRAILER-C3D/BR_MLP"},
              "best-on-data member set");
}

void c7_metrics(Check& c) {
    LabelMatrix y(3, 2), pred(3, 2);
    y(0, 0) = 1; y(1, 0) = 1; y(2, 1) = 1;
    pred(0, 0) = 1; pred(1, 1) = 1; pred(2, 1) = 1;
    c.require(fscore(y, pred, FscoreAveraging::Micro) == 2.0 / 3.0, "micro-F != 2/3");

    const double ap = average_precision({1, 0, 1, 0}, {0.9, 0.8, 0.7, 0.1});
    c.require(std::abs(ap - 5.0 / 6.0) < 1e-12, "AP != 5/6");

    // Monotone invariance: AP depends only on the score ordering.
    Rng rng(0xACC7);
    for (int trial = 0; trial < 50 && c.ok; ++trial) {
        const std::size_t n = 5 + rng.next_below(20);
        std::vector<std::uint8_t> truth(n);
        std::vector<double> scores(n);
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) {
            truth[i] = static_cast<std::uint8_t>(rng.next_below(2));
            any = any || truth[i];
            scores[i] = rng.next_double();
        }
        if (!any) truth[0] = 1;
        const double base = average_precision(truth, scores);
        std::vector<double> squashed(n), affine(n);
        for (std::size_t i = 0; i < n; ++i) {
            squashed[i] = 1.0 / (1.0 + std::exp(-6.0 * scores[i]));
            affine[i] = 0.2 * scores[i] + 3.0;
        }
        c.require(std::abs(average_precision(truth, squashed) - base) < 1e-12,
                  "AP changed under sigmoid rescaling");
        c.require(std::abs(average_precision(truth, affine) - base) < 1e-12,
                  "AP changed under affine rescaling");
    }
}

void c8_determinism(Check& c) {
    const std::string cli = env_or_empty("MMGENRE_CLI");
    const std::string fixture = env_or_empty("MMGENRE_FIXTURE_DIR");
    c.require(!cli.empty() && !fixture.empty(),
              "MMGENRE_CLI / MMGENRE_FIXTURE_DIR not set");
    if (!c.ok) return;

    const fs::path base = fs::temp_directory_path() / "mmgenre-acceptance";
    fs::remove_all(base);
    for (const char* run : {"run1", "run2"}) {
        const fs::path out = base / run;
        fs::create_directories(out);
        const std::string cmd = "MMGENRE_OUT_DIR=" + (out.string()) + " \"" + cli +
                                "\" run --config \"" + fixture + "/config.toml\" > " +
                                (out / "stdout.txt").string() + " 2>&1";
        const int rc = std::system(cmd.c_str());
        c.require(rc == 0, std::string("CLI run failed (") + run + "), see " +
                               (out / "stdout.txt").string());
        if (!c.ok) return;
    }

    // Every produced report and feature/score file must be byte-identical.
    std::vector<fs::path> rel;
    for (const auto& entry : fs::recursive_directory_iterator(base / "run1"))
        if (entry.is_regular_file() && entry.path().filename() != "stdout.txt")
            rel.push_back(fs::relative(entry.path(), base / "run1"));
    c.require(!rel.empty(), "first run produced no files");
    std::sort(rel.begin(), rel.end());
    for (const fs::path& r : rel) {
        const std::string a = read_file(base / "run1" / r);
        const std::string b = read_file(base / "run2" / r);
        c.require(!a.empty(), "empty output file: " + r.string());
        c.require(a == b, "runs differ in " + r.string());
    }
}

void c9_resampling(Check& c) {
    // Interpolated synthetics stay inside the seed/neighbor bounding box.
    Rng rng(0xACC9);
    for (int trial = 0; trial < 100 && c.ok; ++trial) {
        const std::size_t m = 8 + rng.next_below(20);
        const std::size_t d = 1 + rng.next_below(4);
        MultiLabelDataset ds = small_random_ds(rng, m, d, 3);
        // Force one rare label so ML-SMOTE has something to do.
        for (std::size_t i = 0; i < m; ++i) ds.labels(i, 2) = 0;
        ds.labels(0, 2) = ds.labels(1, 2) = 1;

        ResampleConfig cfg;
        cfg.seed = rng.next_u64();
        cfg.k_neighbors = 1 + rng.next_below(4);
        const MultiLabelDataset out = mlsmote(ds, cfg);
        c.require(out.size() >= m, "mlsmote shrank the dataset");

        double lo[4], hi[4];
        for (std::size_t f = 0; f < d; ++f) {
            lo[f] = 1e300; hi[f] = -1e300;
            for (std::size_t i = 0; i < m; ++i) {
                lo[f] = std::min(lo[f], ds.features->values(i, f));
                hi[f] = std::max(hi[f], ds.features->values(i, f));
            }
        }
        for (std::size_t i = m; i < out.size(); ++i) {
            c.require(out.labels.row_sum(i) > 0, "synthetic example with no labels");
            for (std::size_t f = 0; f < d; ++f) {
                const double v = out.features->values(i, f);
                c.require(v >= lo[f] - 1e-12 && v <= hi[f] + 1e-12,
                          "synthetic feature outside the training bounding box");
            }
        }
    }

    // Hand-traced MLTL fixture: e0/e1 are mutual 1-NNs with disjoint label
    // sets; {A} is the more frequent set, so e0 goes.
    MultiLabelDataset ds;
    ds.label_space.names = {"A", "B"};
    ds.ids = {"e0", "e1", "e2", "e3"};
    FeatureMatrix fm;
    fm.values = Matrix(4, 1);
    fm.values(0, 0) = 0.0; fm.values(1, 0) = 0.5;
    fm.values(2, 0) = 10.0; fm.values(3, 0) = 20.0;
    ds.features = fm;
    ds.labels = LabelMatrix(4, 2);
    ds.labels(0, 0) = 1; ds.labels(1, 1) = 1; ds.labels(2, 0) = 1; ds.labels(3, 0) = 1;
    ds.resources.resize(4);
    const MultiLabelDataset trimmed = mltl(ds, ResampleConfig{});
    c.require(trimmed.ids == std::vector<std::string>({"e1", "e2", "e3"}),
              "MLTL removed the wrong member");

    // A balanced, well-separated dataset passes through both stages intact.
    MultiLabelDataset bal;
    bal.label_space.names = {"A", "B"};
    bal.ids = {"b0", "b1", "b2", "b3"};
    FeatureMatrix bfm;
    bfm.values = Matrix(4, 1);
    bfm.values(0, 0) = 0.0; bfm.values(1, 0) = 0.2;
    bfm.values(2, 0) = 10.0; bfm.values(3, 0) = 10.2;
    bal.features = bfm;
    bal.labels = LabelMatrix(4, 2);
    bal.labels(0, 0) = 1; bal.labels(1, 0) = 1; bal.labels(2, 1) = 1; bal.labels(3, 1) = 1;
    bal.resources.resize(4);
    const MultiLabelDataset same = mlsmote_then_mltl(bal, ResampleConfig{});
    c.require(same.ids == bal.ids && same.labels == bal.labels &&
                  same.features->values == bal.features->values,
              "balanced dataset did not pass through unchanged");
}

} // namespace

int main() {
    criterion(1, "dataset indicators", 1.0, c1_indicators);
    criterion(2, "ml-knn vs brute-force oracle", 10.0, c2_mlknn);
    criterion(3, "mlp gradient + xor", 30.0, c3_mlp);
    criterion(4, "uniform lbp", 30.0, c4_lbp);
    criterion(5, "random projection geometry", 60.0, c5_projection);
    criterion(6, "late fusion + member selection", 5.0, c6_fusion);
    criterion(7, "f-score and average precision", 5.0, c7_metrics);
    criterion(8, "end-to-end determinism", 120.0, c8_determinism);
    criterion(9, "multi-label resampling", 30.0, c9_resampling);

    if (g_failures) {
        std::printf("%d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
