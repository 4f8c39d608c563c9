#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace stylexfer {

struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

    Image(int w, int h, std::uint8_t fill = 255);
    void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b);
    void line(int x0, int y0, int x1, int y1, std::uint8_t r, std::uint8_t g, std::uint8_t b);
    void fill_rect(int x0, int y0, int x1, int y1, std::uint8_t r, std::uint8_t g, std::uint8_t b);
};

/// 8-bit RGB PNG. Throws IoError.
void write_png(const std::filesystem::path& path, const Image& image);

/// Line plot of values against their index. With log_y, non-positive values
/// are skipped.
Image line_plot(std::span<const double> values, bool log_y = false, int width = 640, int height = 400);

/// Matrix as a heatmap, rows top to bottom, dark = low.
Image heatmap(const std::vector<std::vector<double>>& matrix, int cell = 24);

/// Histogram over [lo, hi].
Image histogram(std::span<const double> values, int bins, double lo, double hi, int width = 640, int height = 400);

/// Viridis-like ramp for t in [0, 1].
void colormap(double t, std::uint8_t& r, std::uint8_t& g, std::uint8_t& b);

}  // namespace stylexfer
