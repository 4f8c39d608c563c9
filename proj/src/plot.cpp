#include "stylexfer/plot.hpp"

#include "stylexfer/error.hpp"
#include "stylexfer/fsutil.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <memory>

namespace stylexfer {

namespace {

constexpr int kMargin = 40;

void frame(Image& img) {
    const int x0 = kMargin, y0 = kMargin, x1 = img.width - kMargin, y1 = img.height - kMargin;
    img.line(x0, y1, x1, y1, 0, 0, 0);
    img.line(x0, y0, x0, y1, 0, 0, 0);
    for (int i = 0; i <= 10; ++i) {
        const int x = x0 + (x1 - x0) * i / 10;
        const int y = y1 - (y1 - y0) * i / 10;
        img.line(x, y1, x, y1 + 4, 0, 0, 0);
        img.line(x0 - 4, y, x0, y, 0, 0, 0);
    }
}

}  // namespace

Image::Image(int w, int h, std::uint8_t fill) : width(w), height(h), rgb(std::size_t(w) * h * 3, fill) {
    if (w <= 0 || h <= 0) throw InvalidArgument("image size must be positive");
}

void Image::set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    std::uint8_t* p = &rgb[(std::size_t(y) * width + x) * 3];
    p[0] = r;
    p[1] = g;
    p[2] = b;
}

void Image::line(int x0, int y0, int x1, int y1, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    // Bresenham
    const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        set(x0, y0, r, g, b);
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

void Image::fill_rect(int x0, int y0, int x1, int y1, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    for (int y = std::max(0, y0); y < std::min(height, y1); ++y) {
        for (int x = std::max(0, x0); x < std::min(width, x1); ++x) set(x, y, r, g, b);
    }
}

void write_png(const std::filesystem::path& path, const Image& image) {
    make_parent_dirs(path);
    std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
    if (!fp) throw IoError("cannot write " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG encoding failed: " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, image.width, image.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < image.height; ++y) {
        png_write_row(png, const_cast<png_bytep>(&image.rgb[std::size_t(y) * image.width * 3]));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void colormap(double t, std::uint8_t& r, std::uint8_t& g, std::uint8_t& b) {
    static constexpr std::array<std::array<double, 3>, 5> kStops{{{0.267, 0.005, 0.329},
                                                                  {0.230, 0.322, 0.546},
                                                                  {0.128, 0.567, 0.551},
                                                                  {0.369, 0.789, 0.383},
                                                                  {0.993, 0.906, 0.144}}};
    if (!std::isfinite(t)) t = 0.0;
    t = std::clamp(t, 0.0, 1.0) * (kStops.size() - 1);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(t), kStops.size() - 2);
    const double f = t - i;
    auto mix = [&](int c) {
        return static_cast<std::uint8_t>(std::lround(255 * ((1 - f) * kStops[i][c] + f * kStops[i + 1][c])));
    };
    r = mix(0);
    g = mix(1);
    b = mix(2);
}

Image line_plot(std::span<const double> values, bool log_y, int width, int height) {
    Image img(width, height);
    frame(img);
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < values.size(); ++i) {
        double v = values[i];
        if (log_y) {
            if (!(v > 0)) continue;
            v = std::log10(v);
        }
        if (std::isfinite(v)) pts.emplace_back(double(i), v);
    }
    if (pts.empty()) return img;
    double lo = pts.front().second, hi = lo;
    for (const auto& p : pts) {
        lo = std::min(lo, p.second);
        hi = std::max(hi, p.second);
    }
    if (hi - lo < 1e-300) hi = lo + 1.0;
    const double xmax = std::max(1.0, pts.back().first);
    const int x0 = kMargin, y0 = kMargin, x1 = width - kMargin, y1 = height - kMargin;
    auto px = [&](const std::pair<double, double>& p) {
        return std::pair<int, int>(x0 + static_cast<int>(std::lround((x1 - x0) * p.first / xmax)),
                                   y1 - static_cast<int>(std::lround((y1 - y0) * (p.second - lo) / (hi - lo))));
    };
    auto prev = px(pts.front());
    for (const auto& p : pts) {
        const auto cur = px(p);
        img.line(prev.first, prev.second, cur.first, cur.second, 31, 119, 180);
        prev = cur;
    }
    return img;
}

Image heatmap(const std::vector<std::vector<double>>& matrix, int cell) {
    const int rows = static_cast<int>(matrix.size());
    const int cols = rows ? static_cast<int>(matrix.front().size()) : 0;
    Image img(std::max(1, cols) * cell + 2, std::max(1, rows) * cell + 2, 255);
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& row : matrix) {
        if (static_cast<int>(row.size()) != cols) throw InvalidArgument("heatmap rows differ in length");
        for (double v : row) {
            if (!std::isfinite(v)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    const double span = hi > lo ? hi - lo : 1.0;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            std::uint8_t R, G, B;
            colormap((matrix[r][c] - lo) / span, R, G, B);
            img.fill_rect(1 + c * cell, 1 + r * cell, 1 + (c + 1) * cell - 1, 1 + (r + 1) * cell - 1, R, G, B);
        }
    }
    return img;
}

Image histogram(std::span<const double> values, int bins, double lo, double hi, int width, int height) {
    if (bins < 1 || !(hi > lo)) throw InvalidArgument("histogram needs bins >= 1 and hi > lo");
    std::vector<int> counts(bins, 0);
    for (double v : values) {
        if (!std::isfinite(v)) continue;
        const int b = std::clamp(static_cast<int>((v - lo) / (hi - lo) * bins), 0, bins - 1);
        ++counts[b];
    }
    Image img(width, height);
    frame(img);
    const int peak = std::max(1, *std::max_element(counts.begin(), counts.end()));
    const int x0 = kMargin, y0 = kMargin, x1 = width - kMargin, y1 = height - kMargin;
    for (int b = 0; b < bins; ++b) {
        const int xa = x0 + (x1 - x0) * b / bins + 1;
        const int xb = x0 + (x1 - x0) * (b + 1) / bins;
        const int top = y1 - static_cast<int>(std::lround(double(y1 - y0) * counts[b] / peak));
        img.fill_rect(xa, top, xb, y1, 214, 39, 40);
    }
    return img;
}

}  // namespace stylexfer
