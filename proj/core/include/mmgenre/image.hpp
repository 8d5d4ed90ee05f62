#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace mmgenre {

struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> data; // row-major, width*height

    std::uint8_t at(std::size_t x, std::size_t y) const { return data[y * width + x]; }
};

struct RgbImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> data; // row-major r,g,b triples

    const std::uint8_t* pixel(std::size_t x, std::size_t y) const {
        return data.data() + 3 * (y * width + x);
    }
};

// Binary P6 PPM, 8-bit.
RgbImage load_ppm(const std::string& path);
void save_ppm(const std::string& path, const RgbImage& img);

// Luma conversion 0.299R + 0.587G + 0.114B, rounded to nearest integer.
GrayImage to_gray(const RgbImage& img);

// Uniform LBP with 8 circular neighbors at radius 2 (bilinear interpolation
// for the off-grid diagonals); 58 uniform bins plus one catch-all, L1
// normalized over interior pixels. Comparison rule: neighbor >= center.
std::array<double, 59> lbp_u2_8_2(const GrayImage& img);

// Bin index table for 8-bit patterns: uniform patterns (<= 2 circular bit
// transitions) get bins 0..57 in increasing pattern order, the rest bin 58.
const std::array<std::uint8_t, 256>& lbp_uniform_bin_table();

// Three concatenated 256-bin channel histograms (R,G,B), each block
// normalized by pixel count.
std::vector<double> rgb_histogram(const RgbImage& img);

} // namespace mmgenre
