#include "mmgenre/learners.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "mmgenre/io.hpp"
#include "mmgenre/rng.hpp"

namespace mmgenre {

namespace {

constexpr int kModelFormatVersion = 1;

std::vector<std::size_t> k_nearest_rows(const Matrix& train, const double* x, std::size_t k,
                                        std::ptrdiff_t exclude = -1) {
    std::vector<std::pair<double, std::size_t>> dists;
    dists.reserve(train.rows());
    for (std::size_t i = 0; i < train.rows(); ++i) {
        if (exclude >= 0 && i == static_cast<std::size_t>(exclude))
            continue;
        dists.emplace_back(squared_distance(train.row(i), x, train.cols()), i);
    }
    const std::size_t take = std::min(k, dists.size());
    // pair ordering breaks distance ties by the lower training index
    std::partial_sort(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(take),
                      dists.end());
    std::vector<std::size_t> out(take);
    for (std::size_t i = 0; i < take; ++i)
        out[i] = dists[i].second;
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// Decision tree

namespace {

double gini(std::size_t pos, std::size_t total) {
    if (total == 0)
        return 0.0;
    const double p = static_cast<double>(pos) / static_cast<double>(total);
    return 2.0 * p * (1.0 - p);
}

struct TreeBuilder {
    const Matrix& x;
    const std::vector<std::uint8_t>& y;
    TreeHyper hyper;
    std::vector<TreeBinary::Node> nodes;

    std::size_t build(std::vector<std::size_t> idx, std::size_t depth) {
        const std::size_t node_id = nodes.size();
        nodes.emplace_back();

        const std::size_t total = idx.size();
        std::size_t pos = 0;
        for (const std::size_t i : idx)
            pos += y[i];
        nodes[node_id].prob = static_cast<double>(pos) / static_cast<double>(total);

        const bool pure = (pos == 0 || pos == total);
        if (pure || depth >= hyper.max_depth || total < 2 * hyper.min_leaf)
            return node_id;

        // Best single-feature split by Gini gain; iteration order (feature
        // ascending, threshold ascending) resolves ties deterministically.
        const double parent_gini = gini(pos, total);
        double best_gain = 0.0;
        std::size_t best_feature = 0;
        double best_threshold = 0.0;
        bool found = false;

        std::vector<std::size_t> sorted(idx);
        for (std::size_t f = 0; f < x.cols(); ++f) {
            std::stable_sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
                return x(a, f) < x(b, f);
            });
            std::size_t left_pos = 0;
            for (std::size_t split = 1; split < total; ++split) {
                left_pos += y[sorted[split - 1]];
                const double lo = x(sorted[split - 1], f);
                const double hi = x(sorted[split], f);
                if (lo == hi)
                    continue;
                if (split < hyper.min_leaf || total - split < hyper.min_leaf)
                    continue;
                const double weighted =
                    (static_cast<double>(split) * gini(left_pos, split) +
                     static_cast<double>(total - split) * gini(pos - left_pos, total - split)) /
                    static_cast<double>(total);
                const double gain = parent_gini - weighted;
                if (gain > best_gain + 1e-15) {
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = 0.5 * (lo + hi);
                    found = true;
                }
            }
        }
        if (!found)
            return node_id;

        std::vector<std::size_t> left_idx, right_idx;
        for (const std::size_t i : idx) {
            if (x(i, best_feature) <= best_threshold)
                left_idx.push_back(i);
            else
                right_idx.push_back(i);
        }

        nodes[node_id].leaf = false;
        nodes[node_id].feature = best_feature;
        nodes[node_id].threshold = best_threshold;
        const std::size_t left = build(std::move(left_idx), depth + 1);
        const std::size_t right = build(std::move(right_idx), depth + 1);
        nodes[node_id].left = left;
        nodes[node_id].right = right;
        return node_id;
    }
};

} // namespace

std::unique_ptr<BinaryLearner> TreeBinary::train(const Matrix& x,
                                                 const std::vector<std::uint8_t>& y,
                                                 const TreeHyper& hyper) {
    if (x.rows() != y.size() || x.rows() == 0)
        throw DataError("tree train: empty or mismatched training set");

    TreeBuilder builder{x, y, hyper, {}};
    std::vector<std::size_t> idx(x.rows());
    std::iota(idx.begin(), idx.end(), 0);
    builder.build(std::move(idx), 0);

    auto tree = std::make_unique<TreeBinary>();
    tree->nodes_ = std::move(builder.nodes);
    return tree;
}

double TreeBinary::predict(const double* x, std::size_t) const {
    std::size_t node = 0;
    while (!nodes_[node].leaf)
        node = (x[nodes_[node].feature] <= nodes_[node].threshold) ? nodes_[node].left
                                                                   : nodes_[node].right;
    return nodes_[node].prob;
}

nlohmann::json TreeBinary::to_json() const {
    auto arr = nlohmann::json::array();
    for (const Node& n : nodes_)
        arr.push_back({{"leaf", n.leaf},
                       {"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"prob", n.prob}});
    return nlohmann::json{{"kind", "tree"}, {"nodes", std::move(arr)}};
}

std::unique_ptr<TreeBinary> TreeBinary::from_json(const nlohmann::json& j) {
    auto tree = std::make_unique<TreeBinary>();
    for (const auto& jn : j.at("nodes")) {
        Node n;
        n.leaf = jn.at("leaf").get<bool>();
        n.feature = jn.at("feature").get<std::size_t>();
        n.threshold = jn.at("threshold").get<double>();
        n.left = jn.at("left").get<std::size_t>();
        n.right = jn.at("right").get<std::size_t>();
        n.prob = jn.at("prob").get<double>();
        tree->nodes_.push_back(n);
    }
    return tree;
}

// ---------------------------------------------------------------------------
// k-NN base learner

std::unique_ptr<BinaryLearner> KnnBinary::train(const Matrix& x,
                                                const std::vector<std::uint8_t>& y,
                                                const KnnHyper& hyper) {
    if (x.rows() != y.size() || x.rows() == 0)
        throw DataError("knn train: empty or mismatched training set");
    auto knn = std::make_unique<KnnBinary>();
    knn->k_ = hyper.k;
    knn->train_x_ = x;
    knn->train_y_ = y;
    return knn;
}

double KnnBinary::predict(const double* x, std::size_t d) const {
    if (d != train_x_.cols())
        throw DataError("knn predict: feature dimension mismatch");
    const auto nearest = k_nearest_rows(train_x_, x, k_);
    std::size_t pos = 0;
    for (const std::size_t i : nearest)
        pos += train_y_[i];
    return static_cast<double>(pos) / static_cast<double>(nearest.size());
}

nlohmann::json KnnBinary::to_json() const {
    return nlohmann::json{{"kind", "knn"},
                          {"k", k_},
                          {"rows", train_x_.rows()},
                          {"cols", train_x_.cols()},
                          {"x", train_x_.data()},
                          {"y", train_y_}};
}

std::unique_ptr<KnnBinary> KnnBinary::from_json(const nlohmann::json& j) {
    auto knn = std::make_unique<KnnBinary>();
    knn->k_ = j.at("k").get<std::size_t>();
    knn->train_x_ = Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    knn->train_x_.data() = j.at("x").get<std::vector<double>>();
    knn->train_y_ = j.at("y").get<std::vector<std::uint8_t>>();
    return knn;
}

nlohmann::json ConstantLearner::to_json() const {
    return nlohmann::json{{"kind", "constant"}, {"score", score_}};
}

std::unique_ptr<BinaryLearner> binary_learner_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "mlp")
        return MlpBinary::from_json(j);
    if (kind == "tree")
        return TreeBinary::from_json(j);
    if (kind == "knn")
        return KnnBinary::from_json(j);
    if (kind == "constant")
        return std::make_unique<ConstantLearner>(j.at("score").get<double>());
    throw ConfigError("unknown base learner kind: " + kind);
}

// ---------------------------------------------------------------------------
// Binary Relevance

BinaryRelevanceModel br_train(const Matrix& x, const LabelMatrix& y, const LabelSpace& space,
                              const BaseLearnerSpec& spec) {
    if (x.rows() != y.rows())
        throw DataError("br_train: feature/label row mismatch");
    if (x.rows() == 0)
        throw DataError("br_train: empty training set");

    BinaryRelevanceModel model;
    model.spec = spec;
    model.label_space = space;
    model.input_dim = x.cols();

    const std::size_t q = space.q();
    for (std::size_t l = 0; l < q; ++l) {
        std::vector<std::uint8_t> col(y.rows());
        for (std::size_t i = 0; i < y.rows(); ++i)
            col[i] = y(i, l);

        const std::size_t pos = static_cast<std::size_t>(std::count(col.begin(), col.end(), 1));
        if (pos == 0 || pos == col.size()) {
            model.learners.push_back(
                std::make_unique<ConstantLearner>(pos == 0 ? 0.0 : 1.0));
            continue;
        }

        switch (spec.kind) {
            case BaseLearnerKind::Mlp: {
                MlpHyper hyper = spec.mlp;
                hyper.seed = mix64(spec.mlp.seed, l); // per-label derived seed
                model.learners.push_back(MlpBinary::train(x, col, hyper));
                break;
            }
            case BaseLearnerKind::DecisionTree:
                model.learners.push_back(TreeBinary::train(x, col, spec.tree));
                break;
            case BaseLearnerKind::Knn:
                model.learners.push_back(KnnBinary::train(x, col, spec.knn));
                break;
        }
    }
    return model;
}

ScoreMatrix br_predict_scores(const BinaryRelevanceModel& model, const Matrix& x) {
    if (x.cols() != model.input_dim)
        throw DataError("br_predict_scores: feature dimension mismatch");

    ScoreMatrix out;
    out.values = Matrix(x.rows(), model.learners.size());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t l = 0; l < model.learners.size(); ++l)
            out.values(i, l) = model.learners[l]->predict(x.row(i), x.cols());
    return out;
}

// ---------------------------------------------------------------------------
// ML-kNN

MlknnModel mlknn_train(const Matrix& x, const LabelMatrix& y, const LabelSpace& space,
                       std::size_t k, double s) {
    const std::size_t m = x.rows();
    if (m != y.rows())
        throw DataError("mlknn_train: feature/label row mismatch");
    if (k < 1 || k >= m)
        throw DataError("mlknn_train requires m > k >= 1");
    const std::size_t q = space.q();

    MlknnModel model;
    model.k = k;
    model.s = s;
    model.label_space = space;
    model.train_x = x;
    model.train_y = y;
    model.priors.resize(q);
    model.cond_true.assign(q, std::vector<double>(k + 1, 0.0));
    model.cond_false.assign(q, std::vector<double>(k + 1, 0.0));

    // Neighbor label counts per training instance, self excluded.
    std::vector<std::vector<std::size_t>> neighbor_counts(m, std::vector<std::size_t>(q, 0));
    for (std::size_t i = 0; i < m; ++i) {
        const auto nn = k_nearest_rows(x, x.row(i), k, static_cast<std::ptrdiff_t>(i));
        for (const std::size_t n : nn)
            for (std::size_t l = 0; l < q; ++l)
                neighbor_counts[i][l] += y(n, l);
    }

    for (std::size_t l = 0; l < q; ++l) {
        std::size_t count = 0;
        std::vector<std::size_t> c_true(k + 1, 0);
        std::vector<std::size_t> c_false(k + 1, 0);
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t j = neighbor_counts[i][l];
            if (y(i, l)) {
                ++count;
                ++c_true[j];
            } else {
                ++c_false[j];
            }
        }
        model.priors[l] =
            (s + static_cast<double>(count)) / (2.0 * s + static_cast<double>(m));

        const double denom_true = s * static_cast<double>(k + 1) +
                                  static_cast<double>(std::accumulate(c_true.begin(), c_true.end(), std::size_t{0}));
        const double denom_false = s * static_cast<double>(k + 1) +
                                   static_cast<double>(std::accumulate(c_false.begin(), c_false.end(), std::size_t{0}));
        for (std::size_t j = 0; j <= k; ++j) {
            model.cond_true[l][j] = (s + static_cast<double>(c_true[j])) / denom_true;
            model.cond_false[l][j] = (s + static_cast<double>(c_false[j])) / denom_false;
        }
    }
    return model;
}

MlknnPrediction mlknn_predict(const MlknnModel& model, const double* x, std::size_t d) {
    if (d != model.train_x.cols())
        throw DataError("mlknn_predict: feature dimension mismatch");
    const std::size_t q = model.label_space.q();

    const auto nn = k_nearest_rows(model.train_x, x, model.k);

    MlknnPrediction pred;
    pred.scores.resize(q);
    pred.predictions.resize(q);
    for (std::size_t l = 0; l < q; ++l) {
        std::size_t j = 0;
        for (const std::size_t n : nn)
            j += model.train_y(n, l);
        const double with = model.priors[l] * model.cond_true[l][j];
        const double without = (1.0 - model.priors[l]) * model.cond_false[l][j];
        pred.scores[l] = with / (with + without);
        pred.predictions[l] = pred.scores[l] >= 0.5 ? 1 : 0;
    }
    return pred;
}

ScoreMatrix mlknn_predict_scores(const MlknnModel& model, const Matrix& x) {
    ScoreMatrix out;
    out.values = Matrix(x.rows(), model.label_space.q());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto pred = mlknn_predict(model, x.row(i), x.cols());
        std::copy(pred.scores.begin(), pred.scores.end(), out.values.row(i));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Unified persistence

const LabelSpace& TrainedClassifier::label_space() const {
    if (const auto* br = std::get_if<BinaryRelevanceModel>(&model))
        return br->label_space;
    return std::get<MlknnModel>(model).label_space;
}

ScoreMatrix TrainedClassifier::predict_scores(const Matrix& x) const {
    if (const auto* br = std::get_if<BinaryRelevanceModel>(&model))
        return br_predict_scores(*br, x);
    return mlknn_predict_scores(std::get<MlknnModel>(model), x);
}

namespace {

nlohmann::json spec_to_json(const BaseLearnerSpec& spec) {
    nlohmann::json j;
    switch (spec.kind) {
        case BaseLearnerKind::Mlp:
            j["kind"] = "mlp";
            j["hidden_units"] = spec.mlp.hidden_units;
            j["learning_rate"] = spec.mlp.learning_rate;
            j["epochs"] = spec.mlp.epochs;
            j["batch_size"] = spec.mlp.batch_size;
            j["seed"] = spec.mlp.seed;
            break;
        case BaseLearnerKind::DecisionTree:
            j["kind"] = "decision_tree";
            j["max_depth"] = spec.tree.max_depth;
            j["min_leaf"] = spec.tree.min_leaf;
            break;
        case BaseLearnerKind::Knn:
            j["kind"] = "knn";
            j["k"] = spec.knn.k;
            break;
    }
    return j;
}

BaseLearnerSpec spec_from_json(const nlohmann::json& j) {
    BaseLearnerSpec spec;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "mlp") {
        spec.kind = BaseLearnerKind::Mlp;
        spec.mlp.hidden_units = j.at("hidden_units").get<std::size_t>();
        spec.mlp.learning_rate = j.at("learning_rate").get<double>();
        spec.mlp.epochs = j.at("epochs").get<std::size_t>();
        spec.mlp.batch_size = j.at("batch_size").get<std::size_t>();
        spec.mlp.seed = j.at("seed").get<std::uint64_t>();
    } else if (kind == "decision_tree") {
        spec.kind = BaseLearnerKind::DecisionTree;
        spec.tree.max_depth = j.at("max_depth").get<std::size_t>();
        spec.tree.min_leaf = j.at("min_leaf").get<std::size_t>();
    } else if (kind == "knn") {
        spec.kind = BaseLearnerKind::Knn;
        spec.knn.k = j.at("k").get<std::size_t>();
    } else {
        throw ConfigError("unknown base learner spec kind: " + kind);
    }
    return spec;
}

} // namespace

void save_model(const std::string& path, const TrainedClassifier& classifier) {
    nlohmann::json j;
    j["format_version"] = kModelFormatVersion;

    if (const auto* br = std::get_if<BinaryRelevanceModel>(&classifier.model)) {
        j["model"] = "binary_relevance";
        j["label_space"] = br->label_space.names;
        j["input_dim"] = br->input_dim;
        j["spec"] = spec_to_json(br->spec);
        auto arr = nlohmann::json::array();
        for (const auto& learner : br->learners)
            arr.push_back(learner->to_json());
        j["learners"] = std::move(arr);
    } else {
        const auto& ml = std::get<MlknnModel>(classifier.model);
        j["model"] = "mlknn";
        j["label_space"] = ml.label_space.names;
        j["k"] = ml.k;
        j["s"] = ml.s;
        j["rows"] = ml.train_x.rows();
        j["cols"] = ml.train_x.cols();
        j["train_x"] = ml.train_x.data();
        std::vector<int> ybits;
        ybits.reserve(ml.train_y.rows() * ml.train_y.cols());
        for (std::size_t i = 0; i < ml.train_y.rows(); ++i)
            for (std::size_t l = 0; l < ml.train_y.cols(); ++l)
                ybits.push_back(ml.train_y(i, l));
        j["train_y"] = std::move(ybits);
        j["priors"] = ml.priors;
        j["cond_true"] = ml.cond_true;
        j["cond_false"] = ml.cond_false;
    }
    atomic_write_text(path, j.dump() + "\n");
}

TrainedClassifier load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open model: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("corrupt model file " + path + ": " + e.what());
    }
    if (j.value("format_version", 0) != kModelFormatVersion)
        throw ConfigError("unsupported model format_version in " + path);

    const std::string kind = j.at("model").get<std::string>();
    if (kind == "binary_relevance") {
        BinaryRelevanceModel br;
        br.label_space.names = j.at("label_space").get<std::vector<std::string>>();
        br.input_dim = j.at("input_dim").get<std::size_t>();
        br.spec = spec_from_json(j.at("spec"));
        for (const auto& jl : j.at("learners"))
            br.learners.push_back(binary_learner_from_json(jl));
        return TrainedClassifier{std::move(br)};
    }
    if (kind == "mlknn") {
        MlknnModel ml;
        ml.label_space.names = j.at("label_space").get<std::vector<std::string>>();
        ml.k = j.at("k").get<std::size_t>();
        ml.s = j.at("s").get<double>();
        const std::size_t rows = j.at("rows").get<std::size_t>();
        const std::size_t cols = j.at("cols").get<std::size_t>();
        ml.train_x = Matrix(rows, cols);
        ml.train_x.data() = j.at("train_x").get<std::vector<double>>();
        const auto ybits = j.at("train_y").get<std::vector<int>>();
        ml.train_y = LabelMatrix(rows, ml.label_space.q());
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t l = 0; l < ml.label_space.q(); ++l)
                ml.train_y(i, l) = static_cast<std::uint8_t>(ybits[i * ml.label_space.q() + l]);
        ml.priors = j.at("priors").get<std::vector<double>>();
        ml.cond_true = j.at("cond_true").get<std::vector<std::vector<double>>>();
        ml.cond_false = j.at("cond_false").get<std::vector<std::vector<double>>>();
        return TrainedClassifier{std::move(ml)};
    }
    throw ConfigError("unknown model kind in " + path + ": " + kind);
}

} // namespace mmgenre
