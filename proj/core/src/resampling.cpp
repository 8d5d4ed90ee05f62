#include "mmgenre/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>

#include "mmgenre/rng.hpp"

namespace mmgenre {

namespace {

std::vector<std::size_t> k_nearest(const Matrix& x, std::size_t query,
                                   const std::vector<std::size_t>& pool, std::size_t k) {
    // pool excludes the query itself; ties break to the lower index.
    std::vector<std::pair<double, std::size_t>> dists;
    dists.reserve(pool.size());
    for (const std::size_t i : pool)
        dists.emplace_back(squared_distance(x.row(query), x.row(i), x.cols()), i);
    const std::size_t take = std::min(k, dists.size());
    std::partial_sort(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(take),
                      dists.end());
    std::vector<std::size_t> out(take);
    for (std::size_t i = 0; i < take; ++i)
        out[i] = dists[i].second;
    return out;
}

std::vector<std::uint8_t> label_row(const MultiLabelDataset& ds, std::size_t i) {
    const std::size_t q = ds.label_space.q();
    return std::vector<std::uint8_t>(ds.labels.row(i), ds.labels.row(i) + q);
}

} // namespace

MultiLabelDataset mlsmote(const MultiLabelDataset& ds, const ResampleConfig& cfg) {
    if (!ds.features)
        throw DataError("mlsmote requires features");
    const std::size_t m = ds.size();
    const std::size_t q = ds.label_space.q();
    const Matrix& x = ds.features->values;

    // Imbalance ratio per label against the most frequent one.
    std::vector<std::size_t> counts(q, 0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t l = 0; l < q; ++l)
            counts[l] += ds.labels(i, l);
    const std::size_t max_count = *std::max_element(counts.begin(), counts.end());

    std::vector<double> ir(q, 0.0);
    double mean_ir = 0.0;
    std::size_t present = 0;
    for (std::size_t l = 0; l < q; ++l) {
        if (counts[l] == 0)
            continue;
        ir[l] = static_cast<double>(max_count) / static_cast<double>(counts[l]);
        mean_ir += ir[l];
        ++present;
    }
    mean_ir /= static_cast<double>(present);

    const std::size_t cap =
        static_cast<std::size_t>(std::ceil(cfg.resize_rate * static_cast<double>(m)));

    MultiLabelDataset out = ds;
    std::vector<std::vector<double>> synth_features;
    std::vector<std::vector<std::uint8_t>> synth_labels;
    Rng rng(cfg.seed);

    for (std::size_t l = 0; l < q && synth_labels.size() < cap; ++l) {
        if (counts[l] == 0 || ir[l] <= mean_ir)
            continue;

        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < m; ++i)
            if (ds.labels(i, l)) members.push_back(i);
        if (members.size() < 2) {
            std::cerr << "mlsmote: minority label '" << ds.label_space.names[l]
                      << "' has a single example, skipped\n";
            continue;
        }

        for (const std::size_t seed_idx : members) {
            if (synth_labels.size() >= cap)
                break;
            std::vector<std::size_t> pool;
            for (const std::size_t i : members)
                if (i != seed_idx) pool.push_back(i);
            const auto neighbors = k_nearest(x, seed_idx, pool, cfg.k_neighbors);
            const std::size_t nbr =
                neighbors[static_cast<std::size_t>(rng.next_below(neighbors.size()))];
            const double u = rng.next_double();

            std::vector<double> feat(x.cols());
            for (std::size_t c = 0; c < x.cols(); ++c)
                feat[c] = x(seed_idx, c) + u * (x(nbr, c) - x(seed_idx, c));

            // Ranking label combination: keep labels present in more than
            // half of {seed} + neighbors.
            const std::size_t group = neighbors.size() + 1;
            std::vector<std::uint8_t> labels(q, 0);
            bool any = false;
            for (std::size_t lab = 0; lab < q; ++lab) {
                std::size_t votes = ds.labels(seed_idx, lab);
                for (const std::size_t n : neighbors)
                    votes += ds.labels(n, lab);
                if (2 * votes > group) {
                    labels[lab] = 1;
                    any = true;
                }
            }
            if (!any)
                labels = label_row(ds, seed_idx); // fallback: seed's own labels

            synth_features.push_back(std::move(feat));
            synth_labels.push_back(std::move(labels));
        }
    }

    const std::size_t added = synth_labels.size();
    if (added == 0)
        return out;

    Matrix new_x(m + added, x.cols());
    std::copy(x.data().begin(), x.data().end(), new_x.data().begin());
    LabelMatrix new_y(m + added, q);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t l = 0; l < q; ++l)
            new_y(i, l) = ds.labels(i, l);

    for (std::size_t s = 0; s < added; ++s) {
        std::copy(synth_features[s].begin(), synth_features[s].end(), new_x.row(m + s));
        for (std::size_t l = 0; l < q; ++l)
            new_y(m + s, l) = synth_labels[s][l];
        out.ids.push_back("synthetic-" + std::to_string(s));
        if (!out.resources.empty())
            out.resources.emplace_back();
    }
    out.features->values = std::move(new_x);
    out.labels = std::move(new_y);
    return out;
}

MultiLabelDataset mltl(const MultiLabelDataset& ds, const ResampleConfig& cfg) {
    if (!ds.features)
        throw DataError("mltl requires features");
    const std::size_t m = ds.size();
    if (m < 2)
        throw DataError("mltl requires at least 2 examples");
    const std::size_t q = ds.label_space.q();
    const Matrix& x = ds.features->values;

    // 1-NN graph, ties broken by lower index.
    std::vector<std::size_t> nn(m);
    for (std::size_t i = 0; i < m; ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            const double d = squared_distance(x.row(i), x.row(j), x.cols());
            if (d < best) {
                best = d;
                best_j = j;
            }
        }
        nn[i] = best_j;
    }

    // Frequency of each exact label set.
    std::map<std::vector<std::uint8_t>, std::size_t> set_freq;
    for (std::size_t i = 0; i < m; ++i)
        ++set_freq[label_row(ds, i)];

    std::vector<bool> removed(m, false);
    for (std::size_t a = 0; a < m; ++a) {
        const std::size_t b = nn[a];
        if (b <= a || nn[b] != a)
            continue; // each mutual pair visited once, with a < b

        std::size_t hamming = 0;
        for (std::size_t l = 0; l < q; ++l)
            hamming += (ds.labels(a, l) != ds.labels(b, l));
        const double similarity = 1.0 - static_cast<double>(hamming) / static_cast<double>(q);
        if (similarity >= cfg.mltl_threshold)
            continue;

        const std::size_t freq_a = set_freq[label_row(ds, a)];
        const std::size_t freq_b = set_freq[label_row(ds, b)];
        if (freq_a > freq_b)
            removed[a] = true;
        else if (freq_b > freq_a)
            removed[b] = true;
        else
            removed[a] = removed[b] = true;
    }

    MultiLabelDataset out;
    out.label_space = ds.label_space;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < m; ++i)
        if (!removed[i]) keep.push_back(i);

    out.ids.reserve(keep.size());
    out.labels = LabelMatrix(keep.size(), q);
    FeatureMatrix fm;
    fm.descriptor = ds.features->descriptor;
    fm.values = Matrix(keep.size(), x.cols());
    for (std::size_t r = 0; r < keep.size(); ++r) {
        const std::size_t i = keep[r];
        out.ids.push_back(ds.ids[i]);
        for (std::size_t l = 0; l < q; ++l)
            out.labels(r, l) = ds.labels(i, l);
        std::copy_n(x.row(i), x.cols(), fm.values.row(r));
        if (!ds.resources.empty())
            out.resources.push_back(ds.resources[i]);
    }
    out.features = std::move(fm);
    return out;
}

MultiLabelDataset mlsmote_then_mltl(const MultiLabelDataset& ds, const ResampleConfig& cfg) {
    return mltl(mlsmote(ds, cfg), cfg);
}

} // namespace mmgenre
