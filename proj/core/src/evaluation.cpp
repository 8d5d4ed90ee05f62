#include "mmgenre/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmgenre/rng.hpp"

namespace mmgenre {

namespace {

double f1(double tp, double fp, double fn) {
    const double denom = 2.0 * tp + fp + fn;
    return (denom > 0.0) ? 2.0 * tp / denom : 0.0;
}

void check_shapes(const LabelMatrix& a, const LabelMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DataError("metric inputs have mismatched shapes");
}

} // namespace

double fscore(const LabelMatrix& y_true, const LabelMatrix& y_pred, FscoreAveraging averaging) {
    check_shapes(y_true, y_pred);
    const std::size_t m = y_true.rows();
    const std::size_t q = y_true.cols();

    switch (averaging) {
        case FscoreAveraging::Micro: {
            double tp = 0, fp = 0, fn = 0;
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t l = 0; l < q; ++l) {
                    tp += (y_true(i, l) && y_pred(i, l));
                    fp += (!y_true(i, l) && y_pred(i, l));
                    fn += (y_true(i, l) && !y_pred(i, l));
                }
            }
            return f1(tp, fp, fn);
        }
        case FscoreAveraging::Macro: {
            double acc = 0.0;
            for (std::size_t l = 0; l < q; ++l) {
                double tp = 0, fp = 0, fn = 0;
                for (std::size_t i = 0; i < m; ++i) {
                    tp += (y_true(i, l) && y_pred(i, l));
                    fp += (!y_true(i, l) && y_pred(i, l));
                    fn += (y_true(i, l) && !y_pred(i, l));
                }
                acc += f1(tp, fp, fn); // 0/0 label F defined as 0
            }
            return acc / static_cast<double>(q);
        }
        case FscoreAveraging::Samples: {
            double acc = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                double tp = 0, fp = 0, fn = 0;
                for (std::size_t l = 0; l < q; ++l) {
                    tp += (y_true(i, l) && y_pred(i, l));
                    fp += (!y_true(i, l) && y_pred(i, l));
                    fn += (y_true(i, l) && !y_pred(i, l));
                }
                acc += f1(tp, fp, fn);
            }
            return acc / static_cast<double>(m);
        }
    }
    return 0.0;
}

double average_precision(const std::vector<std::uint8_t>& truth,
                         const std::vector<double>& scores) {
    const std::size_t m = truth.size();
    if (scores.size() != m)
        throw DataError("average_precision: size mismatch");

    std::size_t positives = 0;
    for (const std::uint8_t t : truth)
        positives += t;
    if (positives == 0)
        throw DataError("average_precision on label without positives");

    // Sweep unique score thresholds descending; AP = sum (R_i - R_{i-1}) P_i.
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];
    });

    double ap = 0.0;
    double prev_recall = 0.0;
    std::size_t tp = 0, predicted = 0;
    std::size_t i = 0;
    while (i < m) {
        // consume all examples sharing this score (one threshold)
        const double threshold = scores[order[i]];
        while (i < m && scores[order[i]] == threshold) {
            tp += truth[order[i]];
            ++predicted;
            ++i;
        }
        const double recall = static_cast<double>(tp) / static_cast<double>(positives);
        const double precision = static_cast<double>(tp) / static_cast<double>(predicted);
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    return ap;
}

double auc_pr(const LabelMatrix& y_true, const Matrix& scores, const LabelSpace& space,
              std::vector<std::string>* skipped) {
    if (y_true.rows() != scores.rows() || y_true.cols() != scores.cols())
        throw DataError("auc_pr: shape mismatch");
    const std::size_t m = y_true.rows();
    const std::size_t q = y_true.cols();

    double acc = 0.0;
    std::size_t evaluable = 0;
    for (std::size_t l = 0; l < q; ++l) {
        std::vector<std::uint8_t> truth(m);
        std::vector<double> col(m);
        std::size_t positives = 0;
        for (std::size_t i = 0; i < m; ++i) {
            truth[i] = y_true(i, l);
            col[i] = scores(i, l);
            positives += truth[i];
            if (!std::isfinite(col[i]))
                throw NumericError("auc_pr: non-finite score");
        }
        if (positives == 0) {
            if (skipped)
                skipped->push_back(space.names[l]);
            continue;
        }
        acc += average_precision(truth, col);
        ++evaluable;
    }
    if (evaluable == 0)
        throw DataError("auc_pr: no evaluable labels");
    return acc / static_cast<double>(evaluable);
}

std::vector<double> recall_per_label(const LabelMatrix& y_true, const LabelMatrix& y_pred) {
    check_shapes(y_true, y_pred);
    const std::size_t q = y_true.cols();
    std::vector<double> out(q);
    for (std::size_t l = 0; l < q; ++l) {
        std::size_t tp = 0, fn = 0;
        for (std::size_t i = 0; i < y_true.rows(); ++i) {
            tp += (y_true(i, l) && y_pred(i, l));
            fn += (y_true(i, l) && !y_pred(i, l));
        }
        out[l] = (tp + fn > 0)
                     ? static_cast<double>(tp) / static_cast<double>(tp + fn)
                     : std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

nlohmann::json report_to_json(const EvaluationReport& report, const LabelSpace& space) {
    nlohmann::json j;
    j["fscore_micro"] = report.fscore_micro;
    j["fscore_macro"] = report.fscore_macro;
    j["fscore_samples"] = report.fscore_samples;
    j["auc_pr_macro"] = report.auc_pr_macro;
    auto recall = nlohmann::json::object();
    for (std::size_t l = 0; l < report.recall_per_label.size(); ++l) {
        if (std::isnan(report.recall_per_label[l]))
            recall[space.names[l]] = nullptr;
        else
            recall[space.names[l]] = report.recall_per_label[l];
    }
    j["recall_per_label"] = std::move(recall);
    j["skipped_labels"] = report.skipped_labels;
    auto folds = nlohmann::json::array();
    for (const auto& fold : report.per_fold)
        folds.push_back({{"fscore_micro", fold.fscore_micro},
                         {"fscore_macro", fold.fscore_macro},
                         {"fscore_samples", fold.fscore_samples},
                         {"auc_pr_macro", fold.auc_pr_macro}});
    j["per_fold"] = std::move(folds);
    return j;
}

CrossvalOutcome crossval_run(const MultiLabelDataset& ds, const CrossvalConfig& cfg) {
    if (!ds.features)
        throw DataError("crossval_run requires a dataset with features");
    const std::size_t m = ds.size();
    const std::size_t q = ds.label_space.q();
    const Matrix& x = ds.features->values;

    const FoldAssignment folds = kfold_split(m, cfg.k_folds, mix64(cfg.seed, 0x666f6c64ULL));

    CrossvalOutcome outcome;
    outcome.oof_scores.source = ds.features->descriptor;
    outcome.oof_scores.values = Matrix(m, q);
    outcome.oof_predictions = LabelMatrix(m, q);
    outcome.report.per_fold.resize(cfg.k_folds);

    for (std::size_t fold = 0; fold < cfg.k_folds; ++fold) {
        std::vector<std::size_t> train_idx, test_idx;
        for (std::size_t i = 0; i < m; ++i)
            (folds.fold_of[i] == fold ? test_idx : train_idx).push_back(i);

        MultiLabelDataset train;
        train.label_space = ds.label_space;
        train.labels = LabelMatrix(train_idx.size(), q);
        FeatureMatrix train_fm;
        train_fm.descriptor = ds.features->descriptor;
        train_fm.values = Matrix(train_idx.size(), x.cols());
        for (std::size_t r = 0; r < train_idx.size(); ++r) {
            const std::size_t i = train_idx[r];
            train.ids.push_back(ds.ids[i]);
            for (std::size_t l = 0; l < q; ++l)
                train.labels(r, l) = ds.labels(i, l);
            std::copy_n(x.row(i), x.cols(), train_fm.values.row(r));
        }
        train.features = std::move(train_fm);

        // Resampling applies to the training folds only.
        if (cfg.resample != ResampleMode::None) {
            ResampleConfig rcfg = cfg.resample_cfg;
            rcfg.seed = mix64(cfg.seed, 0x72730000ULL + fold);
            switch (cfg.resample) {
                case ResampleMode::Mlsmote: train = mlsmote(train, rcfg); break;
                case ResampleMode::Mltl: train = mltl(train, rcfg); break;
                case ResampleMode::Both: train = mlsmote_then_mltl(train, rcfg); break;
                case ResampleMode::None: break;
            }
        }

        Matrix test_x(test_idx.size(), x.cols());
        LabelMatrix test_y(test_idx.size(), q);
        for (std::size_t r = 0; r < test_idx.size(); ++r) {
            std::copy_n(x.row(test_idx[r]), x.cols(), test_x.row(r));
            for (std::size_t l = 0; l < q; ++l)
                test_y(r, l) = ds.labels(test_idx[r], l);
        }

        ScoreMatrix scores;
        LabelMatrix preds(test_idx.size(), q);
        if (cfg.classifier.algo == ClassifierSpec::Algo::BinaryRelevance) {
            BaseLearnerSpec spec = cfg.classifier.base;
            spec.mlp.seed = mix64(cfg.seed, 0x6272000ULL + fold);
            const BinaryRelevanceModel model =
                br_train(train.features->values, train.labels, train.label_space, spec);
            scores = br_predict_scores(model, test_x);
            for (std::size_t r = 0; r < test_idx.size(); ++r)
                for (std::size_t l = 0; l < q; ++l)
                    preds(r, l) = scores.values(r, l) >= cfg.br_threshold ? 1 : 0;
        } else {
            const MlknnModel model =
                mlknn_train(train.features->values, train.labels, train.label_space,
                            cfg.classifier.mlknn_k, cfg.classifier.mlknn_s);
            scores = mlknn_predict_scores(model, test_x);
            for (std::size_t r = 0; r < test_idx.size(); ++r)
                for (std::size_t l = 0; l < q; ++l)
                    preds(r, l) = scores.values(r, l) >= 0.5 ? 1 : 0;
        }

        for (std::size_t r = 0; r < test_idx.size(); ++r) {
            std::copy_n(scores.values.row(r), q, outcome.oof_scores.values.row(test_idx[r]));
            for (std::size_t l = 0; l < q; ++l)
                outcome.oof_predictions(test_idx[r], l) = preds(r, l);
        }

        FoldMetrics& fm = outcome.report.per_fold[fold];
        fm.fscore_micro = fscore(test_y, preds, FscoreAveraging::Micro);
        fm.fscore_macro = fscore(test_y, preds, FscoreAveraging::Macro);
        fm.fscore_samples = fscore(test_y, preds, FscoreAveraging::Samples);
        fm.auc_pr_macro = auc_pr(test_y, scores.values, ds.label_space, nullptr);
    }

    EvaluationReport& rep = outcome.report;
    for (const FoldMetrics& fm : rep.per_fold) {
        rep.fscore_micro += fm.fscore_micro;
        rep.fscore_macro += fm.fscore_macro;
        rep.fscore_samples += fm.fscore_samples;
        rep.auc_pr_macro += fm.auc_pr_macro;
    }
    const double k = static_cast<double>(cfg.k_folds);
    rep.fscore_micro /= k;
    rep.fscore_macro /= k;
    rep.fscore_samples /= k;
    rep.auc_pr_macro /= k;
    rep.recall_per_label = recall_per_label(ds.labels, outcome.oof_predictions);
    for (std::size_t l = 0; l < q; ++l) {
        std::size_t positives = 0;
        for (std::size_t i = 0; i < m; ++i)
            positives += ds.labels(i, l);
        if (positives == 0)
            rep.skipped_labels.push_back(ds.label_space.names[l]);
    }

    return outcome;
}

} // namespace mmgenre
