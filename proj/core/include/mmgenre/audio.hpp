#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mmgenre/image.hpp"

namespace mmgenre {

struct PcmAudio {
    std::uint32_t sample_rate = 0;
    std::vector<double> samples; // mono, in [-1, 1]
};

// RIFF WAV, PCM 16-bit; stereo is channel-averaged to mono.
PcmAudio load_wav(const std::string& path);
void save_wav(const std::string& path, const PcmAudio& audio);

struct Spectrogram {
    std::size_t window_size = 0;
    std::size_t hop = 0;
    std::uint32_t sample_rate = 0;
    std::size_t bins = 0;             // window_size/2 + 1
    std::vector<double> magnitudes;   // column-major: columns() x bins

    std::size_t columns() const { return bins ? magnitudes.size() / bins : 0; }
    double at(std::size_t col, std::size_t bin) const { return magnitudes[col * bins + bin]; }
};

// Hann-windowed magnitude STFT. window_size must be a power of two (the
// transform is a radix-2 FFT so outputs stay bit-stable everywhere).
Spectrogram stft_spectrogram(const PcmAudio& audio, std::size_t window_size = 1024,
                             std::size_t hop = 512);

// Standardizes the column count to the 30 s span at (sample_rate, hop):
// centered crop when longer, right zero padding when shorter.
Spectrogram crop_pad_30s(const Spectrogram& spec);

// Per-frame mel-filterbank cepstra (26 filters, coefficients 0..12 of the
// orthonormal DCT), averaged over frames.
std::array<double, 13> mfcc(const PcmAudio& audio, std::size_t window_size = 1024,
                            std::size_t hop = 512);

// Statistical spectrum descriptor: 7 time statistics (mean, median,
// variance, skewness, kurtosis, min, max) over 24 Bark-scale bands of the
// dB-scaled spectrum, band-major. Bands above Nyquist stay zero.
std::array<double, 168> ssd(const Spectrogram& spec);

// dB-scaled spectrogram rendered as grayscale (80 dB dynamic range);
// columns map to image x, bins to image y (low frequencies at the bottom).
GrayImage spectrogram_image(const Spectrogram& spec, double dynamic_range_db = 80.0);

// stft -> 30 s crop/pad -> grayscale dB image -> uniform LBP(8,2).
std::array<double, 59> audio_spec_lbp(const PcmAudio& audio, std::size_t window_size = 1024,
                                      std::size_t hop = 512);

} // namespace mmgenre
