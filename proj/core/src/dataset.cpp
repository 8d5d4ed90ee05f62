#include "mmgenre/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "mmgenre/rng.hpp"

#include <json.hpp>

namespace mmgenre {

std::size_t LabelSpace::index_of(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end())
        throw DataError("unknown label name: " + name);
    return static_cast<std::size_t>(it - names.begin());
}

std::size_t LabelMatrix::row_sum(std::size_t r) const {
    std::size_t acc = 0;
    for (std::size_t c = 0; c < cols_; ++c) acc += (*this)(r, c);
    return acc;
}

MultiLabelDataset load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open manifest: " + path);

    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed manifest " + path + ": " + e.what());
    }

    if (!j.contains("label_space") || !j["label_space"].is_array())
        throw DataError("manifest missing label_space array");
    if (!j.contains("examples") || !j["examples"].is_array())
        throw DataError("manifest missing examples array");

    MultiLabelDataset ds;
    std::unordered_map<std::string, std::size_t> label_index;
    for (const auto& name : j["label_space"]) {
        if (!name.is_string())
            throw DataError("label_space entries must be strings");
        const std::string s = name.get<std::string>();
        if (label_index.count(s))
            throw DataError("duplicate label in label_space: " + s);
        label_index[s] = ds.label_space.names.size();
        ds.label_space.names.push_back(s);
    }
    if (ds.label_space.names.empty())
        throw DataError("label_space is empty");

    const auto& examples = j["examples"];
    const std::size_t m = examples.size();
    ds.labels = LabelMatrix(m, ds.label_space.q());
    ds.resources.resize(m);

    std::unordered_set<std::string> seen_ids;
    for (std::size_t i = 0; i < m; ++i) {
        const auto& ex = examples[i];
        if (!ex.contains("id") || !ex["id"].is_string())
            throw DataError("example without string id");
        const std::string id = ex["id"].get<std::string>();
        if (!seen_ids.insert(id).second)
            throw DataError("duplicate id: " + id);
        ds.ids.push_back(id);

        if (!ex.contains("labels") || !ex["labels"].is_array())
            throw DataError("example " + id + " without labels array");
        if (ex["labels"].empty())
            throw DataError("training example with no labels: " + id);
        for (const auto& lab : ex["labels"]) {
            const std::string s = lab.get<std::string>();
            auto it = label_index.find(s);
            if (it == label_index.end())
                throw DataError("example " + id + " uses unknown label: " + s);
            ds.labels(i, it->second) = 1;
        }

        auto& res = ds.resources[i];
        if (ex.contains("frames_dir")) res.frames_dir = ex["frames_dir"].get<std::string>();
        if (ex.contains("audio_wav")) res.audio_wav = ex["audio_wav"].get<std::string>();
        if (ex.contains("poster")) res.poster = ex["poster"].get<std::string>();
        if (ex.contains("subtitle_srt")) res.subtitle_srt = ex["subtitle_srt"].get<std::string>();
        if (ex.contains("synopsis_txt")) res.synopsis_txt = ex["synopsis_txt"].get<std::string>();
    }
    return ds;
}

Indicators indicators(const MultiLabelDataset& ds) {
    const std::size_t m = ds.size();
    if (m == 0)
        throw DataError("indicators on empty dataset");
    const std::size_t q = ds.label_space.q();

    std::size_t total = 0;
    std::set<std::vector<std::uint8_t>> distinct;
    for (std::size_t i = 0; i < m; ++i) {
        total += ds.labels.row_sum(i);
        distinct.emplace(ds.labels.row(i), ds.labels.row(i) + q);
    }

    Indicators ind;
    ind.lcard = static_cast<double>(total) / static_cast<double>(m);
    ind.lden = ind.lcard / static_cast<double>(q);
    ind.ldiv = distinct.size();
    ind.pldiv = static_cast<double>(ind.ldiv) / static_cast<double>(m);
    return ind;
}

std::vector<std::vector<std::int64_t>> cooccurrence(const MultiLabelDataset& ds) {
    const std::size_t m = ds.size();
    if (m == 0)
        throw DataError("cooccurrence on empty dataset");
    const std::size_t q = ds.label_space.q();

    std::vector<std::vector<std::int64_t>> co(q, std::vector<std::int64_t>(q, 0));
    for (std::size_t e = 0; e < m; ++e) {
        const std::uint8_t* row = ds.labels.row(e);
        for (std::size_t i = 0; i < q; ++i) {
            if (!row[i]) continue;
            for (std::size_t j = 0; j < q; ++j)
                if (row[j]) ++co[i][j];
        }
    }
    return co;
}

FoldAssignment kfold_split(std::size_t m, std::size_t k, std::uint64_t seed) {
    if (k < 2 || k > m)
        throw ConfigError("kfold_split requires 2 <= k <= m");

    // Seeded Fisher-Yates shuffle, then deal indices round the folds so
    // sizes differ by at most one.
    std::vector<std::size_t> perm(m);
    for (std::size_t i = 0; i < m; ++i) perm[i] = i;
    Rng rng(seed);
    for (std::size_t i = m; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(perm[i - 1], perm[j]);
    }

    FoldAssignment fa;
    fa.k = k;
    fa.seed = seed;
    fa.fold_of.resize(m);
    for (std::size_t pos = 0; pos < m; ++pos)
        fa.fold_of[perm[pos]] = pos % k;
    return fa;
}

} // namespace mmgenre
