#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmgenre/matrix.hpp"
#include "mmgenre/text.hpp"

namespace mmgenre {

// Implicit sparse sign-hash random projection. Each input coordinate maps
// to a (bucket, sign) pair derived from a seeded hash of its key, so the
// projection matrix is never materialized.
struct Projector {
    std::size_t output_dim = 128;
    std::uint64_t seed = 0;
    static constexpr int scheme_version = 1;
};

std::vector<double> project(const SparseVector& v, const Projector& p);

FeatureMatrix project_matrix(const std::vector<SparseVector>& rows, const Projector& p,
                             const std::string& descriptor_base);

Projector load_projector(const std::string& path);
void save_projector(const std::string& path, const Projector& p);

} // namespace mmgenre
