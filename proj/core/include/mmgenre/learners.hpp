#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "mmgenre/dataset.hpp"
#include "mmgenre/matrix.hpp"

#include <json.hpp>

namespace mmgenre {

// ---------------------------------------------------------------------------
// Base learner specs

struct MlpHyper {
    std::size_t hidden_units = 16;
    double learning_rate = 0.5;
    std::size_t epochs = 400;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
};

struct TreeHyper {
    std::size_t max_depth = 12;
    std::size_t min_leaf = 1;
};

struct KnnHyper {
    std::size_t k = 5;
};

enum class BaseLearnerKind { Mlp, DecisionTree, Knn };

struct BaseLearnerSpec {
    BaseLearnerKind kind = BaseLearnerKind::Knn;
    MlpHyper mlp;
    TreeHyper tree;
    KnnHyper knn;
};

// ---------------------------------------------------------------------------
// Binary base learners

class BinaryLearner {
public:
    virtual ~BinaryLearner() = default;
    virtual double predict(const double* x, std::size_t d) const = 0;
    virtual nlohmann::json to_json() const = 0;
};

std::unique_ptr<BinaryLearner> binary_learner_from_json(const nlohmann::json& j);

// Single hidden layer, tanh hidden activation, sigmoid output, cross-entropy
// loss, seeded mini-batch gradient descent.
class MlpBinary : public BinaryLearner {
public:
    MlpBinary(std::size_t input_dim, std::size_t hidden_units, std::uint64_t seed);

    static std::unique_ptr<BinaryLearner> train(const Matrix& x,
                                                const std::vector<std::uint8_t>& y,
                                                const MlpHyper& hyper);

    double predict(const double* x, std::size_t d) const override;
    nlohmann::json to_json() const override;
    static std::unique_ptr<MlpBinary> from_json(const nlohmann::json& j);

    // Flat parameter access and full-batch loss/gradient, exposed so the
    // analytic gradient can be checked against finite differences.
    std::vector<double> parameters() const;
    void set_parameters(const std::vector<double>& params);
    double loss(const Matrix& x, const std::vector<std::uint8_t>& y) const;
    std::vector<double> gradient(const Matrix& x, const std::vector<std::uint8_t>& y) const;

    std::size_t input_dim() const { return input_dim_; }

private:
    void fit(const Matrix& x, const std::vector<std::uint8_t>& y, const MlpHyper& hyper);
    double forward(const double* x, std::vector<double>* hidden) const;

    std::size_t input_dim_ = 0;
    std::size_t hidden_units_ = 0;
    std::vector<double> w1_; // hidden_units x input_dim
    std::vector<double> b1_; // hidden_units
    std::vector<double> w2_; // hidden_units
    double b2_ = 0.0;
};

// Greedy binary CART on Gini gain; leaf score is the positive fraction.
class TreeBinary : public BinaryLearner {
public:
    struct Node {
        bool leaf = true;
        std::size_t feature = 0;
        double threshold = 0.0;
        std::size_t left = 0;
        std::size_t right = 0;
        double prob = 0.0;
    };

    static std::unique_ptr<BinaryLearner> train(const Matrix& x,
                                                const std::vector<std::uint8_t>& y,
                                                const TreeHyper& hyper);

    double predict(const double* x, std::size_t d) const override;
    nlohmann::json to_json() const override;
    static std::unique_ptr<TreeBinary> from_json(const nlohmann::json& j);

    const std::vector<Node>& nodes() const { return nodes_; }

private:
    std::vector<Node> nodes_;
};

// Memorizing k-NN; score is the positive fraction among the k nearest
// training points (Euclidean, distance ties to the lower index).
class KnnBinary : public BinaryLearner {
public:
    static std::unique_ptr<BinaryLearner> train(const Matrix& x,
                                                const std::vector<std::uint8_t>& y,
                                                const KnnHyper& hyper);

    double predict(const double* x, std::size_t d) const override;
    nlohmann::json to_json() const override;
    static std::unique_ptr<KnnBinary> from_json(const nlohmann::json& j);

private:
    std::size_t k_ = 1;
    Matrix train_x_;
    std::vector<std::uint8_t> train_y_;
};

// Constant-score learner for all-positive/all-negative label columns.
class ConstantLearner : public BinaryLearner {
public:
    explicit ConstantLearner(double score) : score_(score) {}
    double predict(const double*, std::size_t) const override { return score_; }
    nlohmann::json to_json() const override;

private:
    double score_ = 0.0;
};

// ---------------------------------------------------------------------------
// Binary Relevance

struct BinaryRelevanceModel {
    BaseLearnerSpec spec;
    LabelSpace label_space;
    std::size_t input_dim = 0;
    std::vector<std::unique_ptr<BinaryLearner>> learners; // one per label
};

BinaryRelevanceModel br_train(const Matrix& x, const LabelMatrix& y, const LabelSpace& space,
                              const BaseLearnerSpec& spec);
ScoreMatrix br_predict_scores(const BinaryRelevanceModel& model, const Matrix& x);

// ---------------------------------------------------------------------------
// ML-kNN

struct MlknnModel {
    std::size_t k = 10;
    double s = 1.0; // Laplace smoothing
    LabelSpace label_space;
    Matrix train_x;
    LabelMatrix train_y;
    std::vector<double> priors;                    // q
    std::vector<std::vector<double>> cond_true;    // q x (k+1): P(C_j | l)
    std::vector<std::vector<double>> cond_false;   // q x (k+1): P(C_j | ~l)
};

MlknnModel mlknn_train(const Matrix& x, const LabelMatrix& y, const LabelSpace& space,
                       std::size_t k = 10, double s = 1.0);

struct MlknnPrediction {
    std::vector<double> scores;
    std::vector<std::uint8_t> predictions; // MAP, score >= 0.5
};

MlknnPrediction mlknn_predict(const MlknnModel& model, const double* x, std::size_t d);
ScoreMatrix mlknn_predict_scores(const MlknnModel& model, const Matrix& x);

// ---------------------------------------------------------------------------
// Unified trained classifier with versioned JSON persistence

struct TrainedClassifier {
    std::variant<BinaryRelevanceModel, MlknnModel> model;

    const LabelSpace& label_space() const;
    ScoreMatrix predict_scores(const Matrix& x) const;
};

void save_model(const std::string& path, const TrainedClassifier& model);
TrainedClassifier load_model(const std::string& path);

} // namespace mmgenre
