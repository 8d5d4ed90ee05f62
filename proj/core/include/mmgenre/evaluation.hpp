#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mmgenre/dataset.hpp"
#include "mmgenre/learners.hpp"
#include "mmgenre/matrix.hpp"
#include "mmgenre/resampling.hpp"

#include <json.hpp>

namespace mmgenre {

enum class FscoreAveraging { Micro, Macro, Samples };

double fscore(const LabelMatrix& y_true, const LabelMatrix& y_pred, FscoreAveraging averaging);

// Macro-averaged average precision. Labels without positives are skipped;
// their names are appended to *skipped when provided.
double auc_pr(const LabelMatrix& y_true, const Matrix& scores, const LabelSpace& space,
              std::vector<std::string>* skipped = nullptr);

// Average precision for one label: truths/scores per example.
double average_precision(const std::vector<std::uint8_t>& truth, const std::vector<double>& scores);

// Per-label TP/(TP+FN); labels without positives come back as NaN.
std::vector<double> recall_per_label(const LabelMatrix& y_true, const LabelMatrix& y_pred);

struct FoldMetrics {
    double fscore_micro = 0.0;
    double fscore_macro = 0.0;
    double fscore_samples = 0.0;
    double auc_pr_macro = 0.0;
};

struct EvaluationReport {
    double fscore_micro = 0.0;
    double fscore_macro = 0.0;
    double fscore_samples = 0.0;
    double auc_pr_macro = 0.0;
    std::vector<double> recall_per_label; // pooled out-of-fold; NaN when undefined
    std::vector<std::string> skipped_labels;
    std::vector<FoldMetrics> per_fold;
};

nlohmann::json report_to_json(const EvaluationReport& report, const LabelSpace& space);

struct ClassifierSpec {
    enum class Algo { BinaryRelevance, Mlknn };
    Algo algo = Algo::BinaryRelevance;
    BaseLearnerSpec base;   // for BinaryRelevance
    std::size_t mlknn_k = 10;
    double mlknn_s = 1.0;
};

enum class ResampleMode { None, Mlsmote, Mltl, Both };

struct CrossvalConfig {
    ClassifierSpec classifier;
    std::size_t k_folds = 5;
    std::uint64_t seed = 0;
    ResampleMode resample = ResampleMode::None;
    ResampleConfig resample_cfg;
    double br_threshold = 0.5; // binary decision threshold on BR scores
};

struct CrossvalOutcome {
    EvaluationReport report;
    ScoreMatrix oof_scores;   // out-of-fold scores, aligned to ds row order
    LabelMatrix oof_predictions;
};

// Fits on k-1 folds (optionally resampled), scores the held-out fold;
// scalar metrics are averaged over folds. Resampling never touches test
// folds. Fully seeded and deterministic.
CrossvalOutcome crossval_run(const MultiLabelDataset& ds, const CrossvalConfig& cfg);

} // namespace mmgenre
