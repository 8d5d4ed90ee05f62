#include <algorithm>
#include <cmath>

#include "mmgenre/errors.hpp"
#include "mmgenre/learners.hpp"
#include "mmgenre/rng.hpp"

namespace mmgenre {

namespace {

double sigmoid(double z) {
    return (z >= 0.0) ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

// Numerically stable binary cross-entropy from the logit.
double bce_from_logit(double z, double y) {
    return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

} // namespace

MlpBinary::MlpBinary(std::size_t input_dim, std::size_t hidden_units, std::uint64_t seed)
    : input_dim_(input_dim), hidden_units_(hidden_units) {
    w1_.resize(hidden_units * input_dim);
    b1_.assign(hidden_units, 0.0);
    w2_.resize(hidden_units);

    Rng rng(seed);
    const double a1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
    for (double& w : w1_)
        w = (2.0 * rng.next_double() - 1.0) * a1;
    const double a2 = 1.0 / std::sqrt(static_cast<double>(hidden_units));
    for (double& w : w2_)
        w = (2.0 * rng.next_double() - 1.0) * a2;
}

double MlpBinary::forward(const double* x, std::vector<double>* hidden) const {
    double z2 = b2_;
    for (std::size_t h = 0; h < hidden_units_; ++h) {
        double z1 = b1_[h];
        const double* wrow = w1_.data() + h * input_dim_;
        for (std::size_t i = 0; i < input_dim_; ++i)
            z1 += wrow[i] * x[i];
        const double a = std::tanh(z1);
        if (hidden)
            (*hidden)[h] = a;
        z2 += w2_[h] * a;
    }
    return z2; // logit
}

double MlpBinary::predict(const double* x, std::size_t d) const {
    if (d != input_dim_)
        throw DataError("MLP predict: feature dimension mismatch");
    return sigmoid(forward(x, nullptr));
}

double MlpBinary::loss(const Matrix& x, const std::vector<std::uint8_t>& y) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i)
        acc += bce_from_logit(forward(x.row(i), nullptr), y[i]);
    return acc / static_cast<double>(x.rows());
}

std::vector<double> MlpBinary::parameters() const {
    std::vector<double> p;
    p.reserve(w1_.size() + b1_.size() + w2_.size() + 1);
    p.insert(p.end(), w1_.begin(), w1_.end());
    p.insert(p.end(), b1_.begin(), b1_.end());
    p.insert(p.end(), w2_.begin(), w2_.end());
    p.push_back(b2_);
    return p;
}

void MlpBinary::set_parameters(const std::vector<double>& params) {
    if (params.size() != w1_.size() + b1_.size() + w2_.size() + 1)
        throw DataError("MLP set_parameters: size mismatch");
    std::size_t pos = 0;
    std::copy_n(params.begin(), w1_.size(), w1_.begin());
    pos += w1_.size();
    std::copy_n(params.begin() + pos, b1_.size(), b1_.begin());
    pos += b1_.size();
    std::copy_n(params.begin() + pos, w2_.size(), w2_.begin());
    pos += w2_.size();
    b2_ = params[pos];
}

std::vector<double> MlpBinary::gradient(const Matrix& x, const std::vector<std::uint8_t>& y) const {
    std::vector<double> gw1(w1_.size(), 0.0);
    std::vector<double> gb1(b1_.size(), 0.0);
    std::vector<double> gw2(w2_.size(), 0.0);
    double gb2 = 0.0;

    std::vector<double> hidden(hidden_units_);
    const double inv_m = 1.0 / static_cast<double>(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double* xi = x.row(i);
        const double z = forward(xi, &hidden);
        const double delta = (sigmoid(z) - y[i]) * inv_m; // dL/dz
        gb2 += delta;
        for (std::size_t h = 0; h < hidden_units_; ++h) {
            gw2[h] += delta * hidden[h];
            const double dh = delta * w2_[h] * (1.0 - hidden[h] * hidden[h]);
            gb1[h] += dh;
            double* grow = gw1.data() + h * input_dim_;
            for (std::size_t c = 0; c < input_dim_; ++c)
                grow[c] += dh * xi[c];
        }
    }

    std::vector<double> g;
    g.reserve(gw1.size() + gb1.size() + gw2.size() + 1);
    g.insert(g.end(), gw1.begin(), gw1.end());
    g.insert(g.end(), gb1.begin(), gb1.end());
    g.insert(g.end(), gw2.begin(), gw2.end());
    g.push_back(gb2);
    return g;
}

void MlpBinary::fit(const Matrix& x, const std::vector<std::uint8_t>& y, const MlpHyper& hyper) {
    const std::size_t m = x.rows();
    Rng rng(mix64(hyper.seed, 0x6d6c7031ULL));
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i)
        order[i] = i;

    std::vector<double> hidden(hidden_units_);
    for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
        for (std::size_t i = m; i > 1; --i)
            std::swap(order[i - 1], order[rng.next_below(i)]);

        for (std::size_t start = 0; start < m; start += hyper.batch_size) {
            const std::size_t end = std::min(start + hyper.batch_size, m);
            const double inv_b = 1.0 / static_cast<double>(end - start);

            std::vector<double> gw1(w1_.size(), 0.0);
            std::vector<double> gb1(b1_.size(), 0.0);
            std::vector<double> gw2(w2_.size(), 0.0);
            double gb2 = 0.0;
            for (std::size_t pos = start; pos < end; ++pos) {
                const double* xi = x.row(order[pos]);
                const double z = forward(xi, &hidden);
                const double delta = (sigmoid(z) - y[order[pos]]) * inv_b;
                gb2 += delta;
                for (std::size_t h = 0; h < hidden_units_; ++h) {
                    gw2[h] += delta * hidden[h];
                    const double dh = delta * w2_[h] * (1.0 - hidden[h] * hidden[h]);
                    gb1[h] += dh;
                    double* grow = gw1.data() + h * input_dim_;
                    for (std::size_t c = 0; c < input_dim_; ++c)
                        grow[c] += dh * xi[c];
                }
            }

            const double lr = hyper.learning_rate;
            for (std::size_t i = 0; i < w1_.size(); ++i) w1_[i] -= lr * gw1[i];
            for (std::size_t i = 0; i < b1_.size(); ++i) b1_[i] -= lr * gb1[i];
            for (std::size_t i = 0; i < w2_.size(); ++i) w2_[i] -= lr * gw2[i];
            b2_ -= lr * gb2;
        }
    }
}

std::unique_ptr<BinaryLearner> MlpBinary::train(const Matrix& x,
                                                const std::vector<std::uint8_t>& y,
                                                const MlpHyper& hyper) {
    for (const double v : x.data())
        if (!std::isfinite(v))
            throw NumericError("MLP train: non-finite features");

    const std::size_t pos = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
    if (pos == 0 || pos == y.size())
        return std::make_unique<ConstantLearner>(pos == 0 ? 0.0 : 1.0);

    auto mlp = std::make_unique<MlpBinary>(x.cols(), hyper.hidden_units, hyper.seed);
    mlp->fit(x, y, hyper);
    return mlp;
}

nlohmann::json MlpBinary::to_json() const {
    return nlohmann::json{{"kind", "mlp"},
                          {"input_dim", input_dim_},
                          {"hidden_units", hidden_units_},
                          {"w1", w1_},
                          {"b1", b1_},
                          {"w2", w2_},
                          {"b2", b2_}};
}

std::unique_ptr<MlpBinary> MlpBinary::from_json(const nlohmann::json& j) {
    auto mlp = std::make_unique<MlpBinary>(j.at("input_dim").get<std::size_t>(),
                                           j.at("hidden_units").get<std::size_t>(), 0);
    mlp->w1_ = j.at("w1").get<std::vector<double>>();
    mlp->b1_ = j.at("b1").get<std::vector<double>>();
    mlp->w2_ = j.at("w2").get<std::vector<double>>();
    mlp->b2_ = j.at("b2").get<double>();
    return mlp;
}

} // namespace mmgenre
