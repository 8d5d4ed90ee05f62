#include <benchmark/benchmark.h>

#include <cmath>

#include "mmgenre/audio.hpp"
#include "mmgenre/frames.hpp"
#include "mmgenre/image.hpp"
#include "mmgenre/learners.hpp"
#include "mmgenre/projection.hpp"
#include "mmgenre/rng.hpp"

using namespace mmgenre;

namespace {

GrayImage random_gray(std::size_t w, std::size_t h, std::uint64_t seed) {
    Rng rng(seed);
    GrayImage img;
    img.width = w;
    img.height = h;
    img.data.resize(w * h);
    for (auto& px : img.data) px = static_cast<std::uint8_t>(rng.next_below(256));
    return img;
}

void bm_lbp(benchmark::State& state) {
    const auto img = random_gray(static_cast<std::size_t>(state.range(0)),
                                 static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(lbp_u2_8_2(img));
}
BENCHMARK(bm_lbp)->Arg(64)->Arg(128)->Arg(256);

void bm_mfcc(benchmark::State& state) {
    Rng rng(2);
    PcmAudio audio;
    audio.sample_rate = 22050;
    audio.samples.resize(static_cast<std::size_t>(state.range(0)) * audio.sample_rate);
    for (auto& s : audio.samples) s = 2.0 * rng.next_double() - 1.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(mfcc(audio));
}
BENCHMARK(bm_mfcc)->Arg(5)->Arg(30);

void bm_kmeans(benchmark::State& state) {
    Rng rng(3);
    Matrix pts(static_cast<std::size_t>(state.range(0)), 59);
    for (auto& v : pts.data()) v = rng.next_double();
    for (auto _ : state)
        benchmark::DoNotOptimize(kmeans_fit(pts, 64, 7, 10));
}
BENCHMARK(bm_kmeans)->Arg(1000)->Arg(5000);

void bm_projection(benchmark::State& state) {
    Rng rng(4);
    SparseVector v;
    for (int i = 0; i < state.range(0); ++i)
        v.emplace_back(rng.next_u64(), rng.next_double());
    const Projector p{128, 11};
    for (auto _ : state)
        benchmark::DoNotOptimize(project(v, p));
}
BENCHMARK(bm_projection)->Arg(100)->Arg(10000);

void bm_mlknn_predict(benchmark::State& state) {
    Rng rng(5);
    const std::size_t m = static_cast<std::size_t>(state.range(0)), d = 128, q = 25;
    Matrix x(m, d);
    for (auto& v : x.data()) v = rng.next_double();
    LabelMatrix y(m, q);
    for (std::size_t i = 0; i < m; ++i)
        y(i, rng.next_below(q)) = 1;
    LabelSpace space;
    for (std::size_t l = 0; l < q; ++l) space.names.push_back("L" + std::to_string(l));
    const MlknnModel model = mlknn_train(x, y, space, 10);
    std::vector<double> query(d);
    for (auto& v : query) v = rng.next_double();
    for (auto _ : state)
        benchmark::DoNotOptimize(mlknn_predict(model, query.data(), d));
}
BENCHMARK(bm_mlknn_predict)->Arg(500)->Arg(2000);

} // namespace

BENCHMARK_MAIN();
