#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mmgenre/dataset.hpp"
#include "mmgenre/matrix.hpp"

namespace mmgenre {

// Writes to a temporary sibling file and renames it into place.
void atomic_write_text(const std::string& path, const std::string& content);

// Feature/score CSV: header `id,f0,f1,...`, first column the example id,
// optionally preceded by a `# descriptor: NAME` comment line.
struct CsvMatrix {
    std::string descriptor; // empty when no descriptor comment present
    std::vector<std::string> ids;
    Matrix values;
};

CsvMatrix load_csv_matrix(const std::string& path);
void save_csv_matrix(const std::string& path, const CsvMatrix& csv);

// Joins a feature CSV to the manifest by id; every manifest id must appear
// exactly once. Rows come back in manifest order regardless of CSV order.
FeatureMatrix ingest_external_features(const std::string& csv_path, const MultiLabelDataset& ds);

// Score matrices share the CSV layout, with label names as columns.
void save_score_matrix(const std::string& path, const ScoreMatrix& scores,
                       const std::vector<std::string>& ids, const LabelSpace& space);
ScoreMatrix load_score_matrix(const std::string& path, const MultiLabelDataset& ds);

// Serializes a double so it parses back bit-exactly.
std::string format_double(double v);

} // namespace mmgenre
