#pragma once

#include <cstdint>

#include "mmgenre/dataset.hpp"

namespace mmgenre {

struct ResampleConfig {
    double resize_rate = 0.25;   // fraction of m to add as synthetics
    std::size_t k_neighbors = 5;
    double mltl_threshold = 0.5; // label-set similarity below this marks a link
    std::uint64_t seed = 0;
};

// ML-SMOTE: oversample minority labels (imbalance ratio above the mean) by
// interpolating toward a random one of the k nearest same-label neighbors;
// synthetic label sets by majority vote over seed instance + neighbors.
MultiLabelDataset mlsmote(const MultiLabelDataset& ds, const ResampleConfig& cfg);

// MLTL: remove members of Tomek links (mutual 1-NN pairs whose label-set
// similarity falls below the threshold).
MultiLabelDataset mltl(const MultiLabelDataset& ds, const ResampleConfig& cfg);

MultiLabelDataset mlsmote_then_mltl(const MultiLabelDataset& ds, const ResampleConfig& cfg);

} // namespace mmgenre
