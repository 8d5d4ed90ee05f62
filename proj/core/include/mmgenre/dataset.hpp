#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mmgenre/matrix.hpp"

namespace mmgenre {

struct LabelSpace {
    std::vector<std::string> names;

    std::size_t q() const { return names.size(); }
    // Returns the index of `name`, or throws DataError.
    std::size_t index_of(const std::string& name) const;
};

// Binary label matrix stored as uint8 row-major.
class LabelMatrix {
public:
    LabelMatrix() = default;
    LabelMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::uint8_t& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    std::uint8_t operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    const std::uint8_t* row(std::size_t r) const { return data_.data() + r * cols_; }

    std::size_t row_sum(std::size_t r) const;
    bool operator==(const LabelMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::uint8_t> data_;
};

// Optional per-modality resource paths from the manifest.
struct ExampleResources {
    std::string frames_dir;
    std::string audio_wav;
    std::string poster;
    std::string subtitle_srt;
    std::string synopsis_txt;
};

struct MultiLabelDataset {
    std::vector<std::string> ids;
    std::optional<FeatureMatrix> features;
    LabelMatrix labels;
    LabelSpace label_space;
    std::vector<ExampleResources> resources; // parallel to ids; may be empty

    std::size_t size() const { return ids.size(); }
};

struct Indicators {
    double lcard = 0.0;  // average labels per example
    double lden = 0.0;   // lcard / q
    std::size_t ldiv = 0; // distinct label sets
    double pldiv = 0.0;  // ldiv / m
};

struct FoldAssignment {
    std::size_t k = 0;
    std::vector<std::size_t> fold_of; // fold index in [0,k) per example
    std::uint64_t seed = 0;
};

// Reads the JSON manifest (see README for the schema). The feature matrix
// stays absent until attached from a feature file.
MultiLabelDataset load_manifest(const std::string& path);

Indicators indicators(const MultiLabelDataset& ds);

// Entry (i,j) = number of examples carrying both labels i and j.
std::vector<std::vector<std::int64_t>> cooccurrence(const MultiLabelDataset& ds);

// Seeded uniform partition into k folds whose sizes differ by at most 1.
FoldAssignment kfold_split(std::size_t m, std::size_t k, std::uint64_t seed);

} // namespace mmgenre
