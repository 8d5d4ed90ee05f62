#pragma once

#include <string>
#include <vector>

#include "mmgenre/matrix.hpp"

namespace mmgenre {

enum class FusionRule { Sum, Mean, Max, Prod };
enum class FusionInput { Proba, Pred };

struct FusionPlan {
    FusionRule rule = FusionRule::Sum;
    FusionInput input_kind = FusionInput::Proba;
    double threshold = 0.3; // see default_fusion_threshold
    std::vector<std::string> members;
};

// Defaults: 0.3 for sum/mean/max over probabilities, 0.01 for prod,
// majority (ceil(N/2)) for fused binary predictions.
double default_fusion_threshold(FusionRule rule, FusionInput input, std::size_t n_members);

struct FusionResult {
    Matrix fused;                              // m x q
    std::vector<std::vector<std::uint8_t>> predictions; // m x q, fused >= threshold
};

FusionResult fuse(const std::vector<Matrix>& members, const FusionPlan& plan);

// (classifier id, per-fold F-Scores); selection is by mean F-Score with
// lexicographic id tie-break.
struct ClassifierResult {
    std::string id;
    std::string data_source; // trailer-frames | trailer-audio | poster | subtitle | synopsis
    std::vector<double> fold_fscores;

    double mean_fscore() const;
};

std::vector<std::string> top_n_select(const std::vector<ClassifierResult>& results, std::size_t n);

// One winner per data source group; all five groups must be present.
std::vector<std::string> best_on_data_select(const std::vector<ClassifierResult>& results);

extern const std::vector<std::string> kDataSourceGroups;

FusionRule fusion_rule_from_string(const std::string& s);
std::string fusion_rule_to_string(FusionRule rule);

} // namespace mmgenre
