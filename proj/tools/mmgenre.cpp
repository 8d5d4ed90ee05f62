// Command-line front end: feature extraction, projection, resampling,
// training, prediction, fusion, evaluation, cross-validation, and the
// composite `run` pipeline driven by a config file.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmgenre/audio.hpp"
#include "mmgenre/config.hpp"
#include "mmgenre/dataset.hpp"
#include "mmgenre/errors.hpp"
#include "mmgenre/evaluation.hpp"
#include "mmgenre/frames.hpp"
#include "mmgenre/fusion.hpp"
#include "mmgenre/image.hpp"
#include "mmgenre/io.hpp"
#include "mmgenre/learners.hpp"
#include "mmgenre/projection.hpp"
#include "mmgenre/resampling.hpp"
#include "mmgenre/rng.hpp"
#include "mmgenre/text.hpp"

namespace fs = std::filesystem;
using namespace mmgenre;
using nlohmann::json;

namespace {

std::size_t thread_count() {
    if (const char* env = std::getenv("MMGENRE_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n < 1)
            throw ConfigError("MMGENRE_THREADS must be a positive integer");
        return static_cast<std::size_t>(n);
    }
    return 1;
}

// MMGENRE_OUT_DIR overrides any configured/flagged output directory.
std::string resolve_out_dir(const std::string& configured) {
    if (const char* env = std::getenv("MMGENRE_OUT_DIR"))
        return env;
    return configured;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw DataError("cannot create output directory " + dir + ": " + ec.message());
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open text file: " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// Resource paths in the manifest are relative to the manifest's directory.
std::string resolve_resource(const std::string& manifest_path, const std::string& resource) {
    if (resource.empty() || fs::path(resource).is_absolute())
        return resource;
    return (fs::path(manifest_path).parent_path() / resource).string();
}

void write_feature_csv(const std::string& path, const FeatureMatrix& fm,
                       const std::vector<std::string>& ids) {
    CsvMatrix csv;
    csv.descriptor = fm.descriptor;
    csv.ids = ids;
    csv.values = fm.values;
    save_csv_matrix(path, csv);
}

// ---------------------------------------------------------------------------
// Feature extraction

struct FeatureSettings {
    std::string name;
    std::string kind;
    std::string source;     // data-source group for best-on-data selection
    std::string path;       // external CSV
    std::size_t codebook_k = 8;
    std::size_t ngram = 1;
    std::size_t project_dim = 128;
    std::size_t n_frames = 555;
    std::size_t window = 1024;
    std::size_t hop = 512;
};

std::string default_source(const std::string& kind) {
    if (kind == "trailer-lbp" || kind == "trailer-rgb") return "trailer-frames";
    if (kind == "mfcc" || kind == "ssd" || kind == "spec-lbp") return "trailer-audio";
    if (kind == "poster-lbp" || kind == "poster-rgb") return "poster";
    if (kind == "tfidf-sub") return "subtitle";
    if (kind == "tfidf-syn") return "synopsis";
    return "";
}

FeatureSettings feature_settings(const Config& cfg, const std::string& name) {
    const std::string p = "feature." + name + ".";
    FeatureSettings s;
    s.name = name;
    s.kind = cfg.get_string(p + "kind");
    s.source = cfg.get_string(p + "source", default_source(s.kind));
    s.path = cfg.get_string(p + "path", "");
    s.codebook_k = static_cast<std::size_t>(cfg.get_int(p + "codebook_k", 8));
    s.ngram = static_cast<std::size_t>(cfg.get_int(p + "ngram", 1));
    s.project_dim = static_cast<std::size_t>(cfg.get_int(p + "project_dim", 128));
    s.n_frames = static_cast<std::size_t>(cfg.get_int(p + "n_frames", 555));
    s.window = static_cast<std::size_t>(cfg.get_int(p + "window", 1024));
    s.hop = static_cast<std::size_t>(cfg.get_int(p + "hop", 512));
    if (s.source.empty())
        throw ConfigError("feature " + name + ": unknown kind '" + s.kind +
                          "' and no source given");
    return s;
}

FeatureMatrix extract_trailer_bovf(const MultiLabelDataset& ds, const std::string& manifest_path,
                                   const FeatureSettings& s, std::uint64_t seed) {
    const VisualScheme scheme = (s.kind == "trailer-lbp") ? VisualScheme::Lbp : VisualScheme::Rgb;
    const std::size_t threads = thread_count();

    // Pool per-frame descriptors over all titles to fit one shared codebook.
    std::vector<Matrix> per_title;
    std::size_t total_rows = 0, d = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const std::string dir = resolve_resource(manifest_path, ds.resources[i].frames_dir);
        if (dir.empty())
            throw DataError("feature " + s.name + ": example " + ds.ids[i] + " has no frames_dir");
        per_title.push_back(trailer_frame_descriptors(dir, scheme, s.n_frames, threads));
        total_rows += per_title.back().rows();
        d = per_title.back().cols();
    }
    Matrix pooled(total_rows, d);
    std::size_t row = 0;
    for (const Matrix& m : per_title) {
        std::copy(m.data().begin(), m.data().end(), pooled.row(row));
        row += m.rows();
    }
    const Codebook cb = kmeans_fit(pooled, s.codebook_k, mix64(seed, term_key(s.name)), 100,
                                   s.name);

    FeatureMatrix fm;
    fm.descriptor = s.name;
    fm.values = Matrix(ds.size(), cb.k);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto hist = bovf_encode(per_title[i], cb);
        std::copy(hist.begin(), hist.end(), fm.values.row(i));
    }
    return fm;
}

FeatureMatrix extract_feature(const MultiLabelDataset& ds, const std::string& manifest_path,
                              const FeatureSettings& s, std::uint64_t seed) {
    FeatureMatrix fm;
    fm.descriptor = s.name;

    if (s.kind == "external") {
        if (s.path.empty())
            throw ConfigError("feature " + s.name + ": external kind requires path");
        fm = ingest_external_features(resolve_resource(manifest_path, s.path), ds);
        fm.descriptor = s.name;
        return fm;
    }
    if (s.kind == "trailer-lbp" || s.kind == "trailer-rgb")
        return extract_trailer_bovf(ds, manifest_path, s, seed);

    if (s.kind == "poster-lbp" || s.kind == "poster-rgb") {
        const VisualScheme scheme =
            (s.kind == "poster-lbp") ? VisualScheme::Lbp : VisualScheme::Rgb;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const std::string poster = resolve_resource(manifest_path, ds.resources[i].poster);
            if (poster.empty())
                throw DataError("feature " + s.name + ": example " + ds.ids[i] + " has no poster");
            const auto vec = poster_features(poster, scheme);
            if (fm.values.rows() == 0)
                fm.values = Matrix(ds.size(), vec.size());
            std::copy(vec.begin(), vec.end(), fm.values.row(i));
        }
        return fm;
    }

    if (s.kind == "mfcc" || s.kind == "ssd" || s.kind == "spec-lbp") {
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const std::string wav = resolve_resource(manifest_path, ds.resources[i].audio_wav);
            if (wav.empty())
                throw DataError("feature " + s.name + ": example " + ds.ids[i] + " has no audio");
            const PcmAudio audio = load_wav(wav);
            std::vector<double> vec;
            if (s.kind == "mfcc") {
                const auto c = mfcc(audio, s.window, s.hop);
                vec.assign(c.begin(), c.end());
            } else if (s.kind == "ssd") {
                const auto v = ssd(crop_pad_30s(stft_spectrogram(audio, s.window, s.hop)));
                vec.assign(v.begin(), v.end());
            } else {
                const auto h = audio_spec_lbp(audio, s.window, s.hop);
                vec.assign(h.begin(), h.end());
            }
            if (fm.values.rows() == 0)
                fm.values = Matrix(ds.size(), vec.size());
            std::copy(vec.begin(), vec.end(), fm.values.row(i));
        }
        return fm;
    }

    if (s.kind == "tfidf-sub" || s.kind == "tfidf-syn") {
        std::vector<TokenSequence> corpus(ds.size());
        for (std::size_t i = 0; i < ds.size(); ++i) {
            if (s.kind == "tfidf-sub") {
                const std::string srt =
                    resolve_resource(manifest_path, ds.resources[i].subtitle_srt);
                if (srt.empty())
                    throw DataError("feature " + s.name + ": example " + ds.ids[i] +
                                    " has no subtitle");
                corpus[i] = preprocess(strip_subtitle_markup(read_text_file(srt)));
            } else {
                const std::string txt =
                    resolve_resource(manifest_path, ds.resources[i].synopsis_txt);
                if (txt.empty())
                    throw DataError("feature " + s.name + ": example " + ds.ids[i] +
                                    " has no synopsis");
                corpus[i] = preprocess(read_text_file(txt));
            }
        }
        const TfidfModel model = tfidf_fit(corpus, s.ngram);
        std::vector<SparseVector> rows(ds.size());
        for (std::size_t i = 0; i < ds.size(); ++i)
            rows[i] = tfidf_transform(corpus[i], model);
        Projector projector{s.project_dim, mix64(seed, term_key(s.name))};
        fm = project_matrix(rows, projector, s.name);
        return fm;
    }

    throw ConfigError("feature " + s.name + ": unknown kind '" + s.kind + "'");
}

// ---------------------------------------------------------------------------
// Classifier specs from config/flags

ClassifierSpec classifier_from_strings(const std::string& algo, std::size_t knn_k,
                                       std::size_t mlknn_k, std::size_t hidden,
                                       std::size_t epochs, std::size_t max_depth) {
    ClassifierSpec spec;
    if (algo == "mlknn") {
        spec.algo = ClassifierSpec::Algo::Mlknn;
        spec.mlknn_k = mlknn_k;
        return spec;
    }
    spec.algo = ClassifierSpec::Algo::BinaryRelevance;
    if (algo == "br-mlp") {
        spec.base.kind = BaseLearnerKind::Mlp;
        spec.base.mlp.hidden_units = hidden;
        spec.base.mlp.epochs = epochs;
    } else if (algo == "br-tree") {
        spec.base.kind = BaseLearnerKind::DecisionTree;
        spec.base.tree.max_depth = max_depth;
    } else if (algo == "br-knn") {
        spec.base.kind = BaseLearnerKind::Knn;
        spec.base.knn.k = knn_k;
    } else {
        throw ConfigError("unknown algorithm '" + algo +
                          "' (expected br-mlp, br-tree, br-knn, or mlknn)");
    }
    return spec;
}

ResampleMode resample_mode_from_string(const std::string& s) {
    if (s == "none") return ResampleMode::None;
    if (s == "mlsmote") return ResampleMode::Mlsmote;
    if (s == "mltl") return ResampleMode::Mltl;
    if (s == "both") return ResampleMode::Both;
    throw ConfigError("unknown resample mode '" + s + "'");
}

MultiLabelDataset dataset_with_features(const std::string& manifest,
                                        const std::string& features_csv) {
    MultiLabelDataset ds = load_manifest(manifest);
    ds.features = ingest_external_features(features_csv, ds);
    return ds;
}

json report_json(const EvaluationReport& report, const LabelSpace& space) {
    return report_to_json(report, space);
}

// ---------------------------------------------------------------------------
// Composite run pipeline

struct RunMember {
    std::string name;       // classifier result id: FEATURE/ALGO
    std::string source;     // data-source group
    ScoreMatrix oof_scores;
    EvaluationReport report;
};

int cmd_run(const std::string& config_path) {
    const Config cfg = Config::parse_file(config_path);
    const fs::path config_dir = fs::path(config_path).parent_path();
    const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed"));

    auto resolve = [&](const std::string& p) {
        return fs::path(p).is_absolute() ? p : (config_dir / p).string();
    };
    const std::string manifest_path = resolve(cfg.get_string("dataset.manifest"));
    const std::string out_dir = resolve_out_dir(resolve(cfg.get_string("output.dir", "out")));
    ensure_dir(out_dir);
    ensure_dir(out_dir + "/features");
    ensure_dir(out_dir + "/scores");

    MultiLabelDataset ds = load_manifest(manifest_path);

    // Stage: stats.
    const Indicators ind = indicators(ds);
    json stats;
    stats["stage"] = "stats";
    stats["seed"] = seed;
    stats["m"] = ds.size();
    stats["q"] = ds.label_space.q();
    stats["lcard"] = ind.lcard;
    stats["lden"] = ind.lden;
    stats["ldiv"] = ind.ldiv;
    stats["pldiv"] = ind.pldiv;
    atomic_write_text(out_dir + "/stats.json", stats.dump(2) + "\n");

    // Stage: extract every configured feature.
    std::vector<FeatureSettings> features;
    for (const std::string& name : cfg.sections("feature"))
        features.push_back(feature_settings(cfg, name));
    if (features.empty())
        throw ConfigError("run config declares no [feature.*] sections");

    std::map<std::string, FeatureMatrix> extracted;
    for (const FeatureSettings& s : features) {
        FeatureMatrix fm = extract_feature(ds, manifest_path, s, seed);
        write_feature_csv(out_dir + "/features/" + s.name + ".csv", fm, ds.ids);
        extracted.emplace(s.name, std::move(fm));
    }

    // Stage: cross-validate the configured classifier over every feature set.
    const std::string algo = cfg.get_string("classifier.algo", "br-knn");
    ClassifierSpec spec = classifier_from_strings(
        algo, static_cast<std::size_t>(cfg.get_int("classifier.k", 5)),
        static_cast<std::size_t>(cfg.get_int("classifier.k", 10)),
        static_cast<std::size_t>(cfg.get_int("classifier.hidden_units", 16)),
        static_cast<std::size_t>(cfg.get_int("classifier.epochs", 400)),
        static_cast<std::size_t>(cfg.get_int("classifier.max_depth", 12)));

    CrossvalConfig cv;
    cv.classifier = spec;
    cv.k_folds = static_cast<std::size_t>(cfg.get_int("crossval.k_folds", 5));
    cv.seed = seed;
    cv.resample = resample_mode_from_string(cfg.get_string("crossval.resample", "none"));
    cv.resample_cfg.seed = mix64(seed, 0x7273ULL);
    cv.resample_cfg.resize_rate = cfg.get_double("crossval.resize_rate", 0.25);
    cv.resample_cfg.k_neighbors =
        static_cast<std::size_t>(cfg.get_int("crossval.resample_k", 5));

    std::vector<RunMember> members;
    std::vector<ClassifierResult> results;
    json per_classifier = json::object();
    for (const FeatureSettings& s : features) {
        MultiLabelDataset with_features = ds;
        with_features.features = extracted.at(s.name);
        const CrossvalOutcome outcome = crossval_run(with_features, cv);

        RunMember member;
        member.name = s.name + "/" + algo;
        member.source = s.source;
        member.oof_scores = outcome.oof_scores;
        member.report = outcome.report;
        save_score_matrix(out_dir + "/scores/" + s.name + ".csv", member.oof_scores, ds.ids,
                          ds.label_space);

        ClassifierResult res;
        res.id = member.name;
        res.data_source = s.source;
        for (const FoldMetrics& fm : outcome.report.per_fold)
            res.fold_fscores.push_back(fm.fscore_micro);
        results.push_back(res);
        per_classifier[member.name] = report_json(outcome.report, ds.label_space);
        members.push_back(std::move(member));
    }

    // Stage: fusion plans.
    json fusion_reports = json::object();
    for (const std::string& plan_name : cfg.sections("fusion")) {
        const std::string p = "fusion." + plan_name + ".";
        FusionPlan plan;
        plan.rule = fusion_rule_from_string(cfg.get_string(p + "rule", "mean"));
        plan.input_kind = FusionInput::Proba;

        const std::string select = cfg.get_string(p + "select", "top");
        if (select == "top") {
            const auto n = static_cast<std::size_t>(cfg.get_int(p + "n", 2));
            plan.members = top_n_select(results, n);
        } else if (select == "best-on-data") {
            plan.members = best_on_data_select(results);
        } else {
            throw ConfigError("fusion " + plan_name + ": unknown select '" + select + "'");
        }
        plan.threshold = cfg.get_double(
            p + "threshold",
            default_fusion_threshold(plan.rule, plan.input_kind, plan.members.size()));

        std::vector<Matrix> matrices;
        for (const std::string& id : plan.members) {
            const auto it = std::find_if(members.begin(), members.end(),
                                         [&](const RunMember& m) { return m.name == id; });
            matrices.push_back(it->oof_scores.values);
        }
        const FusionResult fused = fuse(matrices, plan);

        LabelMatrix pred(ds.size(), ds.label_space.q());
        for (std::size_t i = 0; i < ds.size(); ++i)
            for (std::size_t l = 0; l < ds.label_space.q(); ++l)
                pred(i, l) = fused.predictions[i][l];

        json fr;
        fr["rule"] = fusion_rule_to_string(plan.rule);
        fr["threshold"] = plan.threshold;
        fr["members"] = plan.members;
        fr["fscore_micro"] = fscore(ds.labels, pred, FscoreAveraging::Micro);
        fr["fscore_macro"] = fscore(ds.labels, pred, FscoreAveraging::Macro);
        fr["fscore_samples"] = fscore(ds.labels, pred, FscoreAveraging::Samples);
        std::vector<std::string> skipped;
        fr["auc_pr_macro"] = auc_pr(ds.labels, fused.fused, ds.label_space, &skipped);
        fr["skipped_labels"] = skipped;
        fusion_reports[plan_name] = fr;
    }

    json run_report;
    run_report["format_version"] = 1;
    run_report["seed"] = seed;
    run_report["manifest"] = cfg.get_string("dataset.manifest");
    run_report["indicators"] = stats;
    run_report["classifiers"] = per_classifier;
    run_report["fusions"] = fusion_reports;
    atomic_write_text(out_dir + "/run_report.json", run_report.dump(2) + "\n");
    std::cout << "run complete: " << out_dir << "/run_report.json\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multimodal multi-label genre pipeline"};
    app.require_subcommand(1);

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "dataset indicators and label co-occurrence");
    std::string stats_manifest, stats_out;
    stats_cmd->add_option("--manifest", stats_manifest)->required();
    stats_cmd->add_option("--out-dir", stats_out, "directory for stats.json / cooccurrence.csv");

    // extract
    auto* extract_cmd = app.add_subcommand("extract", "extract one feature set to CSV");
    std::string ex_manifest, ex_config, ex_feature, ex_out;
    std::uint64_t ex_seed = 0;
    extract_cmd->add_option("--manifest", ex_manifest)->required();
    extract_cmd->add_option("--config", ex_config, "config file with [feature.NAME] sections")
        ->required();
    extract_cmd->add_option("--feature", ex_feature, "feature section name")->required();
    extract_cmd->add_option("--out", ex_out, "output CSV path")->required();
    extract_cmd->add_option("--seed", ex_seed);

    // project
    auto* project_cmd = app.add_subcommand("project", "sign-hash projection of a feature CSV");
    std::string pr_in, pr_out;
    std::size_t pr_dim = 128;
    std::uint64_t pr_seed = 0;
    project_cmd->add_option("--in", pr_in)->required();
    project_cmd->add_option("--out", pr_out)->required();
    project_cmd->add_option("--dim", pr_dim);
    project_cmd->add_option("--seed", pr_seed);

    // resample
    auto* resample_cmd = app.add_subcommand("resample", "ML-SMOTE / MLTL resampling");
    std::string rs_manifest, rs_features, rs_mode = "both", rs_out;
    std::uint64_t rs_seed = 0;
    double rs_rate = 0.25;
    std::size_t rs_k = 5;
    resample_cmd->add_option("--manifest", rs_manifest)->required();
    resample_cmd->add_option("--features", rs_features)->required();
    resample_cmd->add_option("--mode", rs_mode, "mlsmote | mltl | both");
    resample_cmd->add_option("--out-dir", rs_out)->required();
    resample_cmd->add_option("--seed", rs_seed);
    resample_cmd->add_option("--resize-rate", rs_rate);
    resample_cmd->add_option("--k-neighbors", rs_k);

    // train
    auto* train_cmd = app.add_subcommand("train", "fit a classifier on the full dataset");
    std::string tr_manifest, tr_features, tr_algo = "br-knn", tr_out;
    std::size_t tr_k = 5, tr_hidden = 16, tr_epochs = 400, tr_depth = 12;
    std::uint64_t tr_seed = 0;
    train_cmd->add_option("--manifest", tr_manifest)->required();
    train_cmd->add_option("--features", tr_features)->required();
    train_cmd->add_option("--algo", tr_algo, "br-mlp | br-tree | br-knn | mlknn");
    train_cmd->add_option("--k", tr_k, "k for br-knn / mlknn");
    train_cmd->add_option("--hidden-units", tr_hidden);
    train_cmd->add_option("--epochs", tr_epochs);
    train_cmd->add_option("--max-depth", tr_depth);
    train_cmd->add_option("--seed", tr_seed);
    train_cmd->add_option("--out", tr_out, "model JSON path")->required();

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "score a feature CSV with a saved model");
    std::string pd_manifest, pd_features, pd_model, pd_out;
    predict_cmd->add_option("--manifest", pd_manifest)->required();
    predict_cmd->add_option("--features", pd_features)->required();
    predict_cmd->add_option("--model", pd_model)->required();
    predict_cmd->add_option("--out", pd_out, "score CSV path")->required();

    // fuse
    auto* fuse_cmd = app.add_subcommand("fuse", "late-fuse score matrices");
    std::string fu_manifest, fu_rule = "mean", fu_out;
    double fu_threshold = -1.0;
    std::vector<std::string> fu_scores;
    fuse_cmd->add_option("--manifest", fu_manifest)->required();
    fuse_cmd->add_option("--scores", fu_scores, "two or more score CSVs")->required();
    fuse_cmd->add_option("--rule", fu_rule, "sum | mean | max | prod");
    fuse_cmd->add_option("--threshold", fu_threshold, "default: 0.3 (0.01 for prod)");
    fuse_cmd->add_option("--out", fu_out, "fused score CSV path")->required();

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "metrics for a score matrix");
    std::string ev_manifest, ev_scores, ev_out;
    double ev_threshold = 0.5;
    eval_cmd->add_option("--manifest", ev_manifest)->required();
    eval_cmd->add_option("--scores", ev_scores)->required();
    eval_cmd->add_option("--threshold", ev_threshold, "score-to-prediction threshold");
    eval_cmd->add_option("--out", ev_out, "report JSON path");

    // crossval
    auto* cv_cmd = app.add_subcommand("crossval", "k-fold cross-validation");
    std::string cv_manifest, cv_features, cv_algo = "br-knn", cv_resample = "none", cv_out;
    std::size_t cv_folds = 5, cv_k = 5, cv_hidden = 16, cv_epochs = 400, cv_depth = 12;
    std::uint64_t cv_seed = 0;
    cv_cmd->add_option("--manifest", cv_manifest)->required();
    cv_cmd->add_option("--features", cv_features)->required();
    cv_cmd->add_option("--algo", cv_algo, "br-mlp | br-tree | br-knn | mlknn");
    cv_cmd->add_option("--folds", cv_folds);
    cv_cmd->add_option("--k", cv_k);
    cv_cmd->add_option("--hidden-units", cv_hidden);
    cv_cmd->add_option("--epochs", cv_epochs);
    cv_cmd->add_option("--max-depth", cv_depth);
    cv_cmd->add_option("--seed", cv_seed);
    cv_cmd->add_option("--resample", cv_resample, "none | mlsmote | mltl | both");
    cv_cmd->add_option("--out", cv_out, "report JSON path")->required();

    // run
    auto* run_cmd = app.add_subcommand("run", "full pipeline from a config file");
    std::string run_config;
    run_cmd->add_option("--config", run_config)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*stats_cmd) {
            const MultiLabelDataset ds = load_manifest(stats_manifest);
            const Indicators ind = indicators(ds);
            const auto co = cooccurrence(ds);
            json j;
            j["m"] = ds.size();
            j["q"] = ds.label_space.q();
            j["lcard"] = ind.lcard;
            j["lden"] = ind.lden;
            j["ldiv"] = ind.ldiv;
            j["pldiv"] = ind.pldiv;
            std::cout << j.dump(2) << "\n";
            if (!stats_out.empty()) {
                const std::string dir = resolve_out_dir(stats_out);
                ensure_dir(dir);
                atomic_write_text(dir + "/stats.json", j.dump(2) + "\n");
                std::string csv = "label";
                for (const auto& n : ds.label_space.names) csv += "," + n;
                csv += "\n";
                for (std::size_t i = 0; i < co.size(); ++i) {
                    csv += ds.label_space.names[i];
                    for (std::size_t k = 0; k < co.size(); ++k)
                        csv += "," + std::to_string(co[i][k]);
                    csv += "\n";
                }
                atomic_write_text(dir + "/cooccurrence.csv", csv);
            }
        } else if (*extract_cmd) {
            const MultiLabelDataset ds = load_manifest(ex_manifest);
            const Config cfg = Config::parse_file(ex_config);
            const FeatureSettings s = feature_settings(cfg, ex_feature);
            const FeatureMatrix fm = extract_feature(ds, ex_manifest, s, ex_seed);
            write_feature_csv(ex_out, fm, ds.ids);
            std::cout << "wrote " << ex_out << " (" << fm.values.rows() << "x"
                      << fm.values.cols() << ")\n";
        } else if (*project_cmd) {
            const CsvMatrix in = load_csv_matrix(pr_in);
            // Column identity = hash of the column name, so projection is
            // independent of column order conventions.
            std::vector<SparseVector> rows(in.values.rows());
            for (std::size_t r = 0; r < in.values.rows(); ++r)
                for (std::size_t c = 0; c < in.values.cols(); ++c)
                    if (in.values(r, c) != 0.0)
                        rows[r].emplace_back(term_key("f" + std::to_string(c)),
                                             in.values(r, c));
            const Projector projector{pr_dim, pr_seed};
            const FeatureMatrix fm = project_matrix(
                rows, projector, in.descriptor.empty() ? "FEATURES" : in.descriptor);
            CsvMatrix out;
            out.descriptor = fm.descriptor;
            out.ids = in.ids;
            out.values = fm.values;
            save_csv_matrix(pr_out, out);
            std::cout << "wrote " << pr_out << "\n";
        } else if (*resample_cmd) {
            MultiLabelDataset ds = dataset_with_features(rs_manifest, rs_features);
            ResampleConfig rc;
            rc.seed = rs_seed;
            rc.resize_rate = rs_rate;
            rc.k_neighbors = rs_k;
            MultiLabelDataset out;
            if (rs_mode == "mlsmote") out = mlsmote(ds, rc);
            else if (rs_mode == "mltl") out = mltl(ds, rc);
            else if (rs_mode == "both") out = mlsmote_then_mltl(ds, rc);
            else throw ConfigError("unknown resample mode '" + rs_mode + "'");

            const std::string dir = resolve_out_dir(rs_out);
            ensure_dir(dir);
            write_feature_csv(dir + "/features.csv", *out.features, out.ids);
            json manifest;
            manifest["label_space"] = out.label_space.names;
            json examples = json::array();
            for (std::size_t i = 0; i < out.size(); ++i) {
                json e;
                e["id"] = out.ids[i];
                json labels = json::array();
                for (std::size_t l = 0; l < out.label_space.q(); ++l)
                    if (out.labels(i, l)) labels.push_back(out.label_space.names[l]);
                e["labels"] = labels;
                examples.push_back(e);
            }
            manifest["examples"] = examples;
            atomic_write_text(dir + "/manifest.json", manifest.dump(2) + "\n");
            std::cout << "resampled " << ds.size() << " -> " << out.size() << " examples\n";
        } else if (*train_cmd) {
            const MultiLabelDataset ds = dataset_with_features(tr_manifest, tr_features);
            ClassifierSpec spec =
                classifier_from_strings(tr_algo, tr_k, tr_k, tr_hidden, tr_epochs, tr_depth);
            spec.base.mlp.seed = tr_seed;
            TrainedClassifier tc;
            if (spec.algo == ClassifierSpec::Algo::Mlknn)
                tc.model = mlknn_train(ds.features->values, ds.labels, ds.label_space,
                                       spec.mlknn_k, spec.mlknn_s);
            else
                tc.model = br_train(ds.features->values, ds.labels, ds.label_space, spec.base);
            save_model(tr_out, tc);
            std::cout << "wrote " << tr_out << "\n";
        } else if (*predict_cmd) {
            const MultiLabelDataset ds = dataset_with_features(pd_manifest, pd_features);
            const TrainedClassifier tc = load_model(pd_model);
            ScoreMatrix scores = tc.predict_scores(ds.features->values);
            save_score_matrix(pd_out, scores, ds.ids, tc.label_space());
            std::cout << "wrote " << pd_out << "\n";
        } else if (*fuse_cmd) {
            const MultiLabelDataset ds = load_manifest(fu_manifest);
            std::vector<Matrix> matrices;
            FusionPlan plan;
            plan.rule = fusion_rule_from_string(fu_rule);
            for (const std::string& path : fu_scores) {
                plan.members.push_back(path);
                matrices.push_back(load_score_matrix(path, ds).values);
            }
            plan.threshold =
                fu_threshold > 0.0
                    ? fu_threshold
                    : default_fusion_threshold(plan.rule, plan.input_kind, plan.members.size());
            const FusionResult result = fuse(matrices, plan);
            ScoreMatrix fused;
            fused.source = "fused-" + fu_rule;
            fused.values = result.fused;
            save_score_matrix(fu_out, fused, ds.ids, ds.label_space);
            std::cout << "wrote " << fu_out << "\n";
        } else if (*eval_cmd) {
            const MultiLabelDataset ds = load_manifest(ev_manifest);
            const ScoreMatrix scores = load_score_matrix(ev_scores, ds);
            LabelMatrix pred(ds.size(), ds.label_space.q());
            for (std::size_t i = 0; i < ds.size(); ++i)
                for (std::size_t l = 0; l < ds.label_space.q(); ++l)
                    pred(i, l) = scores.values(i, l) >= ev_threshold ? 1 : 0;
            json j;
            j["fscore_micro"] = fscore(ds.labels, pred, FscoreAveraging::Micro);
            j["fscore_macro"] = fscore(ds.labels, pred, FscoreAveraging::Macro);
            j["fscore_samples"] = fscore(ds.labels, pred, FscoreAveraging::Samples);
            std::vector<std::string> skipped;
            j["auc_pr_macro"] = auc_pr(ds.labels, scores.values, ds.label_space, &skipped);
            j["skipped_labels"] = skipped;
            std::cout << j.dump(2) << "\n";
            if (!ev_out.empty())
                atomic_write_text(ev_out, j.dump(2) + "\n");
        } else if (*cv_cmd) {
            const MultiLabelDataset ds = dataset_with_features(cv_manifest, cv_features);
            CrossvalConfig cv;
            cv.classifier =
                classifier_from_strings(cv_algo, cv_k, cv_k, cv_hidden, cv_epochs, cv_depth);
            cv.k_folds = cv_folds;
            cv.seed = cv_seed;
            cv.resample = resample_mode_from_string(cv_resample);
            cv.resample_cfg.seed = mix64(cv_seed, 0x7273ULL);
            const CrossvalOutcome outcome = crossval_run(ds, cv);
            const json j = report_json(outcome.report, ds.label_space);
            std::cout << j.dump(2) << "\n";
            atomic_write_text(cv_out, j.dump(2) + "\n");
        } else if (*run_cmd) {
            return cmd_run(run_config);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
