#include "mmgenre/frames.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include "mmgenre/errors.hpp"
#include "mmgenre/io.hpp"
#include "mmgenre/rng.hpp"

#include <json.hpp>

namespace mmgenre {

std::vector<std::size_t> select_frames_deep(std::size_t frame_count) {
    // Usable range after discarding the first and last 5%.
    const auto n = static_cast<double>(frame_count);
    const std::size_t usable_start = static_cast<std::size_t>(std::ceil(0.05 * n));
    const std::size_t usable_end = static_cast<std::size_t>(std::floor(0.95 * n));
    if (usable_end < usable_start + 121)
        throw DataError("InsufficientFrames: usable range below 121 frames");

    const std::size_t anchors[3] = {
        usable_start + 60,
        (usable_start + usable_end) / 2,
        usable_end - 61,
    };

    std::vector<std::size_t> out;
    out.reserve(120);
    for (const std::size_t anchor : anchors)
        for (std::size_t step = 0; step < 40; ++step)
            out.push_back(anchor - 60 + step * 3);
    return out;
}

std::vector<std::size_t> select_frames_uniform(std::size_t frame_count, std::size_t n) {
    if (frame_count == 0)
        throw DataError("select_frames_uniform on empty clip");
    std::vector<std::size_t> out(n);
    if (n == 1) {
        out[0] = 0;
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double pos = static_cast<double>(i) * static_cast<double>(frame_count - 1) /
                           static_cast<double>(n - 1);
        out[i] = static_cast<std::size_t>(std::llround(pos));
    }
    return out;
}

namespace {

std::vector<std::size_t> assign_nearest(const Matrix& points, const Matrix& centroids) {
    const std::size_t m = points.rows();
    const std::size_t d = points.cols();
    std::vector<std::size_t> assign(m);
    for (std::size_t i = 0; i < m; ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_c = 0;
        for (std::size_t c = 0; c < centroids.rows(); ++c) {
            const double dist = squared_distance(points.row(i), centroids.row(c), d);
            if (dist < best) {
                best = dist;
                best_c = c;
            }
        }
        assign[i] = best_c;
    }
    return assign;
}

} // namespace

Codebook kmeans_fit(const Matrix& vectors, std::size_t k, std::uint64_t seed,
                    std::size_t max_iters, const std::string& descriptor_name) {
    const std::size_t m = vectors.rows();
    const std::size_t d = vectors.cols();
    if (k < 1 || m < k)
        throw ConfigError("kmeans_fit requires m >= k >= 1");
    for (const double v : vectors.data())
        if (!std::isfinite(v))
            throw NumericError("kmeans_fit: non-finite input");

    Rng rng(seed);
    Matrix centroids(k, d);

    // k-means++ seeding.
    std::vector<double> min_dist(m, std::numeric_limits<double>::infinity());
    {
        const std::size_t first = static_cast<std::size_t>(rng.next_below(m));
        std::copy_n(vectors.row(first), d, centroids.row(0));
    }
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double dist = squared_distance(vectors.row(i), centroids.row(c - 1), d);
            min_dist[i] = std::min(min_dist[i], dist);
            total += min_dist[i];
        }
        std::size_t chosen = 0;
        if (total > 0.0) {
            const double target = rng.next_double() * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                acc += min_dist[i];
                if (acc >= target) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = static_cast<std::size_t>(rng.next_below(m));
        }
        std::copy_n(vectors.row(chosen), d, centroids.row(c));
    }

    // Lloyd iterations.
    std::vector<std::size_t> assign = assign_nearest(vectors, centroids);
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        Matrix sums(k, d);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < m; ++i) {
            ++counts[assign[i]];
            const double* p = vectors.row(i);
            double* s = sums.row(assign[i]);
            for (std::size_t j = 0; j < d; ++j) s[j] += p[j];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // Re-seed from the point farthest from its assigned centroid.
                double worst = -1.0;
                std::size_t worst_i = 0;
                for (std::size_t i = 0; i < m; ++i) {
                    const double dist =
                        squared_distance(vectors.row(i), centroids.row(assign[i]), d);
                    if (dist > worst) {
                        worst = dist;
                        worst_i = i;
                    }
                }
                std::copy_n(vectors.row(worst_i), d, centroids.row(c));
            } else {
                double* cr = centroids.row(c);
                const double* s = sums.row(c);
                for (std::size_t j = 0; j < d; ++j)
                    cr[j] = s[j] / static_cast<double>(counts[c]);
            }
        }
        std::vector<std::size_t> next = assign_nearest(vectors, centroids);
        if (next == assign)
            break;
        assign = std::move(next);
    }

    Codebook cb;
    cb.descriptor_name = descriptor_name;
    cb.k = k;
    cb.centroids = std::move(centroids);
    cb.seed = seed;
    return cb;
}

std::vector<double> bovf_encode(const Matrix& frame_vectors, const Codebook& cb) {
    if (frame_vectors.cols() != cb.centroids.cols())
        throw DataError("bovf_encode: descriptor dimension does not match codebook");
    if (frame_vectors.rows() == 0)
        throw DataError("bovf_encode: no frame vectors");

    std::vector<double> hist(cb.k, 0.0);
    const auto assign = assign_nearest(frame_vectors, cb.centroids);
    for (const std::size_t a : assign)
        ++hist[a];
    for (double& h : hist)
        h /= static_cast<double>(frame_vectors.rows());
    return hist;
}

std::string frame_path(const std::string& frames_dir, std::size_t index) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%06zu.ppm", index);
    return (std::filesystem::path(frames_dir) / name).string();
}

std::size_t count_frames(const std::string& frames_dir) {
    std::size_t n = 0;
    while (std::filesystem::exists(frame_path(frames_dir, n)))
        ++n;
    if (n == 0)
        throw DataError("no frames found in " + frames_dir);
    return n;
}

namespace {

std::vector<double> frame_descriptor(const RgbImage& img, VisualScheme scheme) {
    if (scheme == VisualScheme::Lbp) {
        const auto h = lbp_u2_8_2(to_gray(img));
        return std::vector<double>(h.begin(), h.end());
    }
    return rgb_histogram(img);
}

} // namespace

Matrix trailer_frame_descriptors(const std::string& frames_dir, VisualScheme scheme,
                                 std::size_t n_frames, std::size_t threads) {
    const std::size_t frame_count = count_frames(frames_dir);
    const auto indices = select_frames_uniform(frame_count, n_frames);
    const std::size_t dim = (scheme == VisualScheme::Lbp) ? 59 : 768;

    Matrix descriptors(indices.size(), dim);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const RgbImage img = load_ppm(frame_path(frames_dir, indices[i]));
            const auto vec = frame_descriptor(img, scheme);
            std::copy(vec.begin(), vec.end(), descriptors.row(i));
        }
    };

    // Result slots are index-ordered, so chunked threads stay deterministic.
    if (threads <= 1) {
        work(0, indices.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (indices.size() + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t) {
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(begin + chunk, indices.size());
            if (begin < end)
                pool.emplace_back(work, begin, end);
        }
        for (auto& th : pool)
            th.join();
    }
    return descriptors;
}

std::vector<double> trailer_visual_features(const std::string& frames_dir, VisualScheme scheme,
                                            const Codebook& cb, std::size_t n_frames,
                                            std::size_t threads) {
    return bovf_encode(trailer_frame_descriptors(frames_dir, scheme, n_frames, threads), cb);
}

std::vector<double> poster_features(const std::string& poster_path, VisualScheme scheme) {
    return frame_descriptor(load_ppm(poster_path), scheme);
}

Codebook load_codebook(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open codebook: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed codebook " + path + ": " + e.what());
    }
    if (j.value("format_version", 0) != 1)
        throw ConfigError("unsupported codebook version in " + path);

    Codebook cb;
    cb.descriptor_name = j.at("descriptor_name").get<std::string>();
    cb.k = j.at("k").get<std::size_t>();
    cb.seed = j.at("seed").get<std::uint64_t>();
    const std::size_t d = j.at("d").get<std::size_t>();
    const auto rows = j.at("centroids");
    if (rows.size() != cb.k)
        throw DataError("codebook centroid count mismatch in " + path);
    cb.centroids = Matrix(cb.k, d);
    for (std::size_t r = 0; r < cb.k; ++r) {
        if (rows[r].size() != d)
            throw DataError("codebook centroid dimension mismatch in " + path);
        for (std::size_t c = 0; c < d; ++c)
            cb.centroids(r, c) = rows[r][c].get<double>();
    }
    return cb;
}

void save_codebook(const std::string& path, const Codebook& cb) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["descriptor_name"] = cb.descriptor_name;
    j["k"] = cb.k;
    j["d"] = cb.centroids.cols();
    j["seed"] = cb.seed;
    auto rows = nlohmann::json::array();
    for (std::size_t r = 0; r < cb.k; ++r)
        rows.push_back(std::vector<double>(cb.centroids.row(r), cb.centroids.row(r) + cb.centroids.cols()));
    j["centroids"] = std::move(rows);
    atomic_write_text(path, j.dump(2) + "\n");
}

} // namespace mmgenre
