#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmgenre/image.hpp"
#include "mmgenre/matrix.hpp"

namespace mmgenre {

struct Codebook {
    std::string descriptor_name;
    std::size_t k = 0;
    Matrix centroids; // k x d
    std::uint64_t seed = 0;
};

// 120-frame scheme for the deep extractors: drop the first and last 5%,
// then take 40 stride-3 frames around each of three anchors (start+60,
// midpoint, end-61 of the usable range).
std::vector<std::size_t> select_frames_deep(std::size_t frame_count);

// n frames equally distant and linearly distributed over [0, frame_count).
std::vector<std::size_t> select_frames_uniform(std::size_t frame_count, std::size_t n = 555);

// Lloyd's algorithm with k-means++ seeding; empty clusters are re-seeded
// from the point farthest from its assigned centroid. Deterministic.
Codebook kmeans_fit(const Matrix& vectors, std::size_t k, std::uint64_t seed,
                    std::size_t max_iters = 100, const std::string& descriptor_name = "");

// Nearest-centroid histogram over the rows of frame_vectors, normalized by
// the row count. Ties break to the lowest centroid index.
std::vector<double> bovf_encode(const Matrix& frame_vectors, const Codebook& cb);

enum class VisualScheme { Lbp, Rgb };

// Per-frame descriptors of the 555 uniformly selected frames in a trailer
// directory (frame_%06d.ppm numbered from 0).
Matrix trailer_frame_descriptors(const std::string& frames_dir, VisualScheme scheme,
                                 std::size_t n_frames = 555, std::size_t threads = 1);

// Full handcrafted visual pipeline: select, describe, BOVF-encode.
std::vector<double> trailer_visual_features(const std::string& frames_dir, VisualScheme scheme,
                                            const Codebook& cb, std::size_t n_frames = 555,
                                            std::size_t threads = 1);

std::size_t count_frames(const std::string& frames_dir);
std::string frame_path(const std::string& frames_dir, std::size_t index);

// Whole-image poster descriptors (59-d LBP or 768-d RGB histogram).
std::vector<double> poster_features(const std::string& poster_path, VisualScheme scheme);

Codebook load_codebook(const std::string& path);
void save_codebook(const std::string& path, const Codebook& cb);

} // namespace mmgenre
