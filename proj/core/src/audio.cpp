#include "mmgenre/audio.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <numbers>

#include "mmgenre/errors.hpp"

namespace mmgenre {

namespace {

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

// In-place iterative radix-2 FFT.
void fft(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(angle), std::sin(angle));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = a[i + j];
                const std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Zwicker's 24 critical bands of hearing (band edges in Hz).
constexpr double kBarkEdges[25] = {
    0,    100,  200,  300,  400,  510,  630,  770,  920,   1080,  1270,  1480, 1720,
    2000, 2320, 2700, 3150, 3700, 4400, 5300, 6400, 7700,  9500,  12000, 15500};

constexpr double kLogFloor = 1e-10;

} // namespace

PcmAudio load_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open WAV: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw DataError("not a RIFF WAVE file: " + path);

    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t bits = 0;
    const unsigned char* data = nullptr;
    std::size_t data_len = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::uint32_t chunk_size = read_u32(bytes.data() + pos + 4);
        const unsigned char* body = bytes.data() + pos + 8;
        if (pos + 8 + chunk_size > bytes.size())
            throw DataError("truncated WAV chunk in " + path);
        if (std::memcmp(bytes.data() + pos, "fmt ", 4) == 0) {
            if (chunk_size < 16)
                throw DataError("short fmt chunk in " + path);
            const std::uint16_t format = read_u16(body);
            if (format != 1)
                throw DataError("only PCM WAV supported: " + path);
            channels = read_u16(body + 2);
            sample_rate = read_u32(body + 4);
            bits = read_u16(body + 14);
        } else if (std::memcmp(bytes.data() + pos, "data", 4) == 0) {
            data = body;
            data_len = chunk_size;
        }
        pos += 8 + chunk_size + (chunk_size & 1);
    }

    if (!data || sample_rate == 0)
        throw DataError("WAV missing fmt/data chunk: " + path);
    if (bits != 16)
        throw DataError("only 16-bit PCM WAV supported: " + path);
    if (channels != 1 && channels != 2)
        throw DataError("only mono or stereo WAV supported: " + path);

    PcmAudio audio;
    audio.sample_rate = sample_rate;
    const std::size_t frames = data_len / (2 * channels);
    audio.samples.resize(frames);
    for (std::size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        for (std::uint16_t c = 0; c < channels; ++c) {
            const unsigned char* p = data + 2 * (i * channels + c);
            const std::int16_t s = static_cast<std::int16_t>(p[0] | (p[1] << 8));
            acc += static_cast<double>(s) / 32768.0;
        }
        audio.samples[i] = acc / channels;
    }
    return audio;
}

void save_wav(const std::string& path, const PcmAudio& audio) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write WAV: " + path);

    const std::uint32_t data_len = static_cast<std::uint32_t>(audio.samples.size() * 2);
    auto put_u32 = [&](std::uint32_t v) {
        const char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
                           static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
        out.write(b, 4);
    };
    auto put_u16 = [&](std::uint16_t v) {
        const char b[2] = {static_cast<char>(v), static_cast<char>(v >> 8)};
        out.write(b, 2);
    };

    out.write("RIFF", 4);
    put_u32(36 + data_len);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    put_u32(16);
    put_u16(1); // PCM
    put_u16(1); // mono
    put_u32(audio.sample_rate);
    put_u32(audio.sample_rate * 2);
    put_u16(2);
    put_u16(16);
    out.write("data", 4);
    put_u32(data_len);
    for (const double s : audio.samples) {
        const double clamped = std::clamp(s, -1.0, 1.0);
        const std::int16_t v = static_cast<std::int16_t>(std::lround(clamped * 32767.0));
        put_u16(static_cast<std::uint16_t>(v));
    }
}

Spectrogram stft_spectrogram(const PcmAudio& audio, std::size_t window_size, std::size_t hop) {
    if (!is_power_of_two(window_size))
        throw ConfigError("stft window_size must be a power of two");
    if (hop == 0)
        throw ConfigError("stft hop must be positive");
    if (audio.samples.size() < window_size)
        throw DataError("audio shorter than one STFT window");

    Spectrogram spec;
    spec.window_size = window_size;
    spec.hop = hop;
    spec.sample_rate = audio.sample_rate;
    spec.bins = window_size / 2 + 1;

    // Periodic Hann window.
    std::vector<double> window(window_size);
    for (std::size_t n = 0; n < window_size; ++n)
        window[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                          static_cast<double>(window_size)));

    const std::size_t columns = 1 + (audio.samples.size() - window_size) / hop;
    spec.magnitudes.resize(columns * spec.bins);

    std::vector<std::complex<double>> buf(window_size);
    for (std::size_t col = 0; col < columns; ++col) {
        const double* frame = audio.samples.data() + col * hop;
        for (std::size_t n = 0; n < window_size; ++n)
            buf[n] = std::complex<double>(frame[n] * window[n], 0.0);
        fft(buf);
        for (std::size_t b = 0; b < spec.bins; ++b)
            spec.magnitudes[col * spec.bins + b] = std::abs(buf[b]);
    }
    return spec;
}

Spectrogram crop_pad_30s(const Spectrogram& spec) {
    const std::size_t target =
        static_cast<std::size_t>(30ULL * spec.sample_rate / spec.hop);
    const std::size_t cols = spec.columns();

    Spectrogram out;
    out.window_size = spec.window_size;
    out.hop = spec.hop;
    out.sample_rate = spec.sample_rate;
    out.bins = spec.bins;
    out.magnitudes.assign(target * spec.bins, 0.0);

    if (cols >= target) {
        const std::size_t start = (cols - target) / 2;
        std::copy_n(spec.magnitudes.begin() + static_cast<std::ptrdiff_t>(start * spec.bins),
                    target * spec.bins, out.magnitudes.begin());
    } else {
        std::copy(spec.magnitudes.begin(), spec.magnitudes.end(), out.magnitudes.begin());
    }
    return out;
}

std::array<double, 13> mfcc(const PcmAudio& audio, std::size_t window_size, std::size_t hop) {
    const Spectrogram spec = stft_spectrogram(audio, window_size, hop);
    constexpr std::size_t n_filters = 26;
    const double nyquist = audio.sample_rate / 2.0;
    const double bin_hz = static_cast<double>(audio.sample_rate) / static_cast<double>(window_size);

    // Triangular mel filterbank, 0 Hz to Nyquist.
    std::vector<double> edges_hz(n_filters + 2);
    const double mel_max = hz_to_mel(nyquist);
    for (std::size_t i = 0; i < n_filters + 2; ++i)
        edges_hz[i] = mel_to_hz(mel_max * static_cast<double>(i) / (n_filters + 1));

    std::vector<std::vector<double>> filters(n_filters, std::vector<double>(spec.bins, 0.0));
    for (std::size_t f = 0; f < n_filters; ++f) {
        const double lo = edges_hz[f];
        const double mid = edges_hz[f + 1];
        const double hi = edges_hz[f + 2];
        for (std::size_t b = 0; b < spec.bins; ++b) {
            const double freq = b * bin_hz;
            if (freq > lo && freq < mid)
                filters[f][b] = (freq - lo) / (mid - lo);
            else if (freq >= mid && freq < hi)
                filters[f][b] = (hi - freq) / (hi - mid);
        }
    }

    std::array<double, 13> clip{};
    const std::size_t columns = spec.columns();
    for (std::size_t col = 0; col < columns; ++col) {
        double log_energy[n_filters];
        for (std::size_t f = 0; f < n_filters; ++f) {
            double acc = 0.0;
            for (std::size_t b = 0; b < spec.bins; ++b)
                acc += filters[f][b] * spec.at(col, b);
            log_energy[f] = std::log(std::max(acc, kLogFloor));
        }
        // Orthonormal DCT-II, coefficients 0..12.
        for (std::size_t k = 0; k < 13; ++k) {
            double c = 0.0;
            for (std::size_t f = 0; f < n_filters; ++f)
                c += log_energy[f] *
                     std::cos(std::numbers::pi * static_cast<double>(k) *
                              (static_cast<double>(f) + 0.5) / static_cast<double>(n_filters));
            const double scale = (k == 0) ? std::sqrt(1.0 / n_filters) : std::sqrt(2.0 / n_filters);
            clip[k] += scale * c;
        }
    }
    for (double& c : clip)
        c /= static_cast<double>(columns);
    return clip;
}

std::array<double, 168> ssd(const Spectrogram& spec) {
    const std::size_t t = spec.columns();
    if (t < 2)
        throw DataError("ssd requires at least 2 time columns");
    const double bin_hz = static_cast<double>(spec.sample_rate) / static_cast<double>(spec.window_size);

    std::array<double, 168> out{};
    std::vector<double> series(t);
    for (std::size_t band = 0; band < 24; ++band) {
        const double lo = kBarkEdges[band];
        const double hi = kBarkEdges[band + 1];

        bool any_bin = false;
        for (std::size_t col = 0; col < t; ++col) {
            double acc = 0.0;
            for (std::size_t b = 0; b < spec.bins; ++b) {
                const double freq = b * bin_hz;
                if (freq >= lo && freq < hi) {
                    acc += spec.at(col, b);
                    any_bin = true;
                }
            }
            series[col] = 20.0 * std::log10(std::max(acc, kLogFloor));
        }
        if (!any_bin)
            continue; // band above Nyquist: leave its statistics zero

        double mn = series[0], mx = series[0];
        for (const double v : series) {
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
        if (mn == mx) {
            // Constant series: write the degenerate statistics exactly
            // instead of amplifying round-off through the moments.
            double* stats = out.data() + band * 7;
            stats[0] = stats[1] = stats[5] = stats[6] = mn;
            stats[2] = stats[3] = stats[4] = 0.0;
            continue;
        }

        double mean = 0.0;
        for (const double v : series) mean += v;
        mean /= static_cast<double>(t);

        double m2 = 0.0, m3 = 0.0, m4 = 0.0;
        for (const double v : series) {
            const double d = v - mean;
            m2 += d * d;
            m3 += d * d * d;
            m4 += d * d * d * d;
        }
        m2 /= static_cast<double>(t);
        m3 /= static_cast<double>(t);
        m4 /= static_cast<double>(t);

        std::vector<double> sorted(series);
        std::sort(sorted.begin(), sorted.end());
        const double median = (t % 2 == 1)
                                  ? sorted[t / 2]
                                  : 0.5 * (sorted[t / 2 - 1] + sorted[t / 2]);

        const double skew = (m2 > 0.0) ? m3 / std::pow(m2, 1.5) : 0.0;
        const double kurt = (m2 > 0.0) ? m4 / (m2 * m2) : 0.0;

        double* stats = out.data() + band * 7;
        stats[0] = mean;
        stats[1] = median;
        stats[2] = m2;
        stats[3] = skew;
        stats[4] = kurt;
        stats[5] = mn;
        stats[6] = mx;
    }
    return out;
}

GrayImage spectrogram_image(const Spectrogram& spec, double dynamic_range_db) {
    const std::size_t cols = spec.columns();
    GrayImage img;
    img.width = cols;
    img.height = spec.bins;
    img.data.resize(cols * spec.bins);

    double max_db = -1e300;
    std::vector<double> db(spec.magnitudes.size());
    for (std::size_t i = 0; i < db.size(); ++i) {
        db[i] = 20.0 * std::log10(std::max(spec.magnitudes[i], kLogFloor));
        max_db = std::max(max_db, db[i]);
    }
    const double floor_db = max_db - dynamic_range_db;
    for (std::size_t col = 0; col < cols; ++col) {
        for (std::size_t b = 0; b < spec.bins; ++b) {
            const double norm = std::clamp((db[col * spec.bins + b] - floor_db) / dynamic_range_db, 0.0, 1.0);
            // low frequencies at the bottom of the image
            img.data[(spec.bins - 1 - b) * cols + col] =
                static_cast<std::uint8_t>(std::lround(norm * 255.0));
        }
    }
    return img;
}

std::array<double, 59> audio_spec_lbp(const PcmAudio& audio, std::size_t window_size,
                                      std::size_t hop) {
    const Spectrogram spec = crop_pad_30s(stft_spectrogram(audio, window_size, hop));
    return lbp_u2_8_2(spectrogram_image(spec));
}

} // namespace mmgenre
