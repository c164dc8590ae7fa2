#include "relucert/synthdata.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace relucert {

namespace {

double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// 5x7 digit glyphs, one byte per row, bit 4 leftmost.
constexpr std::array<std::array<std::uint8_t, 7>, 10> kGlyphs = {{
    {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}, // 0
    {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}, // 1
    {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}, // 2
    {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}, // 3
    {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}, // 4
    {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}, // 5
    {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}, // 6
    {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}, // 7
    {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}, // 8
    {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}, // 9
}};

constexpr std::size_t kImageSide = 28;
constexpr std::size_t kScale = 3; // glyph renders as 15x21

} // namespace

Dataset synth_digits(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Dataset data;
    data.inputs = Matrix(count, kImageSide * kImageSide);
    data.labels.resize(count);

    for (std::size_t s = 0; s < count; ++s) {
        const std::size_t digit = static_cast<std::size_t>(unit_uniform(rng) * 10.0) % 10;
        data.labels[s] = digit;

        const std::size_t max_dx = kImageSide - 5 * kScale; // 13
        const std::size_t max_dy = kImageSide - 7 * kScale; // 7
        const std::size_t dx = static_cast<std::size_t>(unit_uniform(rng) * (max_dx + 1)) % (max_dx + 1);
        const std::size_t dy = static_cast<std::size_t>(unit_uniform(rng) * (max_dy + 1)) % (max_dy + 1);
        const double intensity = 0.7 + 0.3 * unit_uniform(rng);

        double* img = data.inputs.row_data(s);
        for (std::size_t row = 0; row < 7; ++row) {
            for (std::size_t col = 0; col < 5; ++col) {
                if (!(kGlyphs[digit][row] & (0x10 >> col))) continue;
                for (std::size_t yy = 0; yy < kScale; ++yy) {
                    for (std::size_t xx = 0; xx < kScale; ++xx) {
                        const std::size_t y = dy + row * kScale + yy;
                        const std::size_t x = dx + col * kScale + xx;
                        img[y * kImageSide + x] = intensity;
                    }
                }
            }
        }
        for (std::size_t p = 0; p < kImageSide * kImageSide; ++p) {
            const double noise = 0.16 * (unit_uniform(rng) - 0.5);
            img[p] = std::clamp(img[p] + noise, 0.0, 1.0);
            // Quantize to the byte grid so IDX round-trips are exact.
            img[p] = std::round(img[p] * 255.0) / 255.0;
        }
    }
    return data;
}

Dataset synth_blobs2d(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Dataset data;
    data.inputs = Matrix(count, 2);
    data.labels.resize(count);
    for (std::size_t s = 0; s < count; ++s) {
        const std::size_t label = s % 2;
        // Unit-square coordinates so the corpus survives byte containers.
        const double cx = label == 0 ? 0.1 : 0.9;
        data.inputs(s, 0) = cx + 0.15 * (unit_uniform(rng) - 0.5);
        data.inputs(s, 1) = 0.5 + 0.8 * (unit_uniform(rng) - 0.5);
        data.labels[s] = label;
    }
    return data;
}

} // namespace relucert
