#include "mmgenre/image.hpp"

#include <cmath>
#include <fstream>

#include "mmgenre/errors.hpp"

namespace mmgenre {

namespace {

// Skips whitespace and '#' comments in a PPM header.
int next_header_token(std::istream& in) {
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            in.unget();
            break;
        }
        c = in.get();
    }
    std::size_t value = 0;
    if (!(in >> value))
        return -1;
    return static_cast<int>(value);
}

} // namespace

RgbImage load_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open image: " + path);

    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (magic[0] != 'P' || magic[1] != '6')
        throw DataError("not a binary P6 PPM: " + path);

    const int width = next_header_token(in);
    const int height = next_header_token(in);
    const int maxval = next_header_token(in);
    if (width <= 0 || height <= 0 || maxval != 255)
        throw DataError("unsupported PPM header in " + path);
    in.get(); // single whitespace after maxval

    RgbImage img;
    img.width = static_cast<std::size_t>(width);
    img.height = static_cast<std::size_t>(height);
    img.data.resize(img.width * img.height * 3);
    in.read(reinterpret_cast<char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.data.size()))
        throw DataError("truncated PPM data in " + path);
    return img;
}

void save_ppm(const std::string& path, const RgbImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write image: " + path);
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()),
              static_cast<std::streamsize>(img.data.size()));
}

GrayImage to_gray(const RgbImage& img) {
    GrayImage g;
    g.width = img.width;
    g.height = img.height;
    g.data.resize(g.width * g.height);
    for (std::size_t i = 0; i < g.data.size(); ++i) {
        const std::uint8_t* p = img.data.data() + 3 * i;
        const double luma = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
        g.data[i] = static_cast<std::uint8_t>(std::lround(luma));
    }
    return g;
}

const std::array<std::uint8_t, 256>& lbp_uniform_bin_table() {
    static const std::array<std::uint8_t, 256> table = [] {
        std::array<std::uint8_t, 256> t{};
        std::uint8_t next_bin = 0;
        for (int p = 0; p < 256; ++p) {
            int transitions = 0;
            for (int b = 0; b < 8; ++b) {
                const int cur = (p >> b) & 1;
                const int nxt = (p >> ((b + 1) % 8)) & 1;
                if (cur != nxt) ++transitions;
            }
            t[p] = (transitions <= 2) ? next_bin++ : 58;
        }
        return t;
    }();
    return table;
}

std::array<double, 59> lbp_u2_8_2(const GrayImage& img) {
    if (img.width < 5 || img.height < 5)
        throw DataError("image too small for LBP(8,2): need at least 5x5");

    const auto& bin_of = lbp_uniform_bin_table();

    // Sampling offsets: (2cos(2*pi*p/8), -2sin(2*pi*p/8)) for p = 0..7.
    // Evens land on grid points, odds need bilinear interpolation.
    const double r = 2.0;
    const double d = r / std::sqrt(2.0);
    const double ox[8] = {r, d, 0.0, -d, -r, -d, 0.0, d};
    const double oy[8] = {0.0, -d, -r, -d, 0.0, d, r, d};

    std::array<double, 59> hist{};
    std::size_t interior = 0;
    for (std::size_t y = 2; y + 2 < img.height; ++y) {
        for (std::size_t x = 2; x + 2 < img.width; ++x) {
            const double center = img.at(x, y);
            int pattern = 0;
            for (int p = 0; p < 8; ++p) {
                const double sx = static_cast<double>(x) + ox[p];
                const double sy = static_cast<double>(y) + oy[p];
                double value;
                const double fx = std::floor(sx);
                const double fy = std::floor(sy);
                if (sx == fx && sy == fy) {
                    value = img.at(static_cast<std::size_t>(sx), static_cast<std::size_t>(sy));
                } else {
                    const std::size_t x0 = static_cast<std::size_t>(fx);
                    const std::size_t y0 = static_cast<std::size_t>(fy);
                    const double tx = sx - fx;
                    const double ty = sy - fy;
                    value = (1 - tx) * (1 - ty) * img.at(x0, y0) +
                            tx * (1 - ty) * img.at(x0 + 1, y0) +
                            (1 - tx) * ty * img.at(x0, y0 + 1) +
                            tx * ty * img.at(x0 + 1, y0 + 1);
                }
                if (value >= center)
                    pattern |= (1 << p);
            }
            ++hist[bin_of[pattern]];
            ++interior;
        }
    }

    for (double& h : hist)
        h /= static_cast<double>(interior);
    return hist;
}

std::vector<double> rgb_histogram(const RgbImage& img) {
    if (img.width == 0 || img.height == 0)
        throw DataError("rgb_histogram on empty image");

    std::vector<double> hist(768, 0.0);
    const std::size_t n = img.width * img.height;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t* p = img.data.data() + 3 * i;
        ++hist[p[0]];
        ++hist[256 + p[1]];
        ++hist[512 + p[2]];
    }
    for (double& h : hist)
        h /= static_cast<double>(n);
    return hist;
}

} // namespace mmgenre
