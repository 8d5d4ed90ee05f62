#include "mmgenre/projection.hpp"

#include <cmath>
#include <fstream>

#include "mmgenre/errors.hpp"
#include "mmgenre/io.hpp"
#include "mmgenre/rng.hpp"

#include <json.hpp>

namespace mmgenre {

std::vector<double> project(const SparseVector& v, const Projector& p) {
    if (p.output_dim < 1)
        throw ConfigError("projector output_dim must be >= 1");

    std::vector<double> out(p.output_dim, 0.0);
    for (const auto& [key, weight] : v) {
        if (!std::isfinite(weight))
            throw NumericError("project: non-finite weight");
        // Low bits pick the bucket, the top bit picks the sign.
        const std::uint64_t h = mix64(p.seed, key);
        const std::size_t bucket = static_cast<std::size_t>(h % p.output_dim);
        const double sign = (h >> 63) ? -1.0 : 1.0;
        out[bucket] += sign * weight;
    }
    return out;
}

FeatureMatrix project_matrix(const std::vector<SparseVector>& rows, const Projector& p,
                             const std::string& descriptor_base) {
    FeatureMatrix fm;
    fm.descriptor = descriptor_base + "-CS" + std::to_string(p.output_dim);
    fm.values = Matrix(rows.size(), p.output_dim);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto dense = project(rows[r], p);
        std::copy(dense.begin(), dense.end(), fm.values.row(r));
    }
    return fm;
}

Projector load_projector(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open projector: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed projector " + path + ": " + e.what());
    }
    if (j.value("scheme_version", 0) != Projector::scheme_version)
        throw ConfigError("unsupported projector scheme_version in " + path);
    Projector p;
    p.output_dim = j.at("output_dim").get<std::size_t>();
    p.seed = j.at("seed").get<std::uint64_t>();
    return p;
}

void save_projector(const std::string& path, const Projector& p) {
    nlohmann::json j;
    j["scheme_version"] = Projector::scheme_version;
    j["output_dim"] = p.output_dim;
    j["seed"] = p.seed;
    atomic_write_text(path, j.dump(2) + "\n");
}

} // namespace mmgenre
