#include "mmgenre/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mmgenre/errors.hpp"

namespace mmgenre {

const std::vector<std::string> kDataSourceGroups = {
    "trailer-frames", "trailer-audio", "poster", "subtitle", "synopsis"};

double default_fusion_threshold(FusionRule rule, FusionInput input, std::size_t n_members) {
    if (input == FusionInput::Pred)
        return std::ceil(static_cast<double>(n_members) / 2.0); // majority
    return rule == FusionRule::Prod ? 0.01 : 0.3;
}

FusionResult fuse(const std::vector<Matrix>& members, const FusionPlan& plan) {
    if (members.size() < 2)
        throw ConfigError("fusion requires at least 2 members");
    if (plan.threshold <= 0.0)
        throw ConfigError("fusion threshold must be positive");

    const std::size_t m = members[0].rows();
    const std::size_t q = members[0].cols();
    for (const Matrix& mat : members)
        if (mat.rows() != m || mat.cols() != q)
            throw DataError("fusion members have mismatched shapes");
    if (plan.input_kind == FusionInput::Proba) {
        for (const Matrix& mat : members)
            for (const double v : mat.data())
                if (v < 0.0 || v > 1.0 || !std::isfinite(v))
                    throw DataError("proba fusion member has entries outside [0,1]");
    }

    FusionResult result;
    result.fused = Matrix(m, q);
    result.predictions.assign(m, std::vector<std::uint8_t>(q, 0));

    const double n = static_cast<double>(members.size());
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t l = 0; l < q; ++l) {
            double acc;
            switch (plan.rule) {
                case FusionRule::Sum:
                case FusionRule::Mean: {
                    acc = 0.0;
                    for (const Matrix& mat : members)
                        acc += mat(i, l);
                    if (plan.rule == FusionRule::Mean)
                        acc /= n;
                    break;
                }
                case FusionRule::Max: {
                    acc = members[0](i, l);
                    for (const Matrix& mat : members)
                        acc = std::max(acc, mat(i, l));
                    break;
                }
                case FusionRule::Prod: {
                    acc = 1.0;
                    for (const Matrix& mat : members)
                        acc *= mat(i, l);
                    break;
                }
            }
            result.fused(i, l) = acc;
            result.predictions[i][l] = (acc >= plan.threshold) ? 1 : 0;
        }
    }
    return result;
}

double ClassifierResult::mean_fscore() const {
    if (fold_fscores.empty())
        return 0.0;
    double acc = 0.0;
    for (const double f : fold_fscores)
        acc += f;
    return acc / static_cast<double>(fold_fscores.size());
}

namespace {

bool better(const ClassifierResult& a, const ClassifierResult& b) {
    const double fa = a.mean_fscore();
    const double fb = b.mean_fscore();
    if (fa != fb)
        return fa > fb;
    return a.id < b.id; // lexicographic tie-break
}

} // namespace

std::vector<std::string> top_n_select(const std::vector<ClassifierResult>& results,
                                      std::size_t n) {
    if (n > results.size())
        throw ConfigError("top_n_select: n exceeds available classifiers");
    std::vector<ClassifierResult> sorted(results);
    std::sort(sorted.begin(), sorted.end(), better);
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(sorted[i].id);
    return out;
}

std::vector<std::string> best_on_data_select(const std::vector<ClassifierResult>& results) {
    std::map<std::string, const ClassifierResult*> best;
    for (const auto& r : results) {
        if (std::find(kDataSourceGroups.begin(), kDataSourceGroups.end(), r.data_source) ==
            kDataSourceGroups.end())
            throw ConfigError("unknown data source group: " + r.data_source);
        auto [it, inserted] = best.emplace(r.data_source, &r);
        if (!inserted && better(r, *it->second))
            it->second = &r;
    }

    std::vector<std::string> out;
    for (const auto& group : kDataSourceGroups) {
        const auto it = best.find(group);
        if (it == best.end())
            throw DataError("best_on_data_select: no classifier for data source " + group);
        out.push_back(it->second->id);
    }
    return out;
}

FusionRule fusion_rule_from_string(const std::string& s) {
    if (s == "sum") return FusionRule::Sum;
    if (s == "mean") return FusionRule::Mean;
    if (s == "max") return FusionRule::Max;
    if (s == "prod") return FusionRule::Prod;
    throw ConfigError("unknown fusion rule: " + s);
}

std::string fusion_rule_to_string(FusionRule rule) {
    switch (rule) {
        case FusionRule::Sum: return "sum";
        case FusionRule::Mean: return "mean";
        case FusionRule::Max: return "max";
        case FusionRule::Prod: return "prod";
    }
    return "sum";
}

} // namespace mmgenre
