#include "webscape/render.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "webscape/errors.hpp"

namespace webscape {

namespace {

Rgb lerp(Rgb a, Rgb b, double t) {
    t = std::clamp(t, 0.0, 1.0);
    const auto mix = [t](std::uint8_t x, std::uint8_t y) {
        return static_cast<std::uint8_t>(std::lround(x + (y - x) * t));
    };
    return Rgb{mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_chunk(std::vector<std::uint8_t>& out, const char* type,
               const std::vector<std::uint8_t>& data) {
    put_u32(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t type_at = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const auto crc = crc32(0L, out.data() + type_at, static_cast<uInt>(out.size() - type_at));
    put_u32(out, static_cast<std::uint32_t>(crc));
}

constexpr Rgb kAxis{60, 60, 60};
constexpr Rgb kGrid{225, 225, 225};
constexpr std::size_t kMargin = 40;

struct PlotArea {
    long left, top, right, bottom;
};

PlotArea draw_frame(Image& img, int gridlines) {
    const PlotArea a{static_cast<long>(kMargin), static_cast<long>(kMargin / 2),
                     static_cast<long>(img.width()) - static_cast<long>(kMargin / 2),
                     static_cast<long>(img.height()) - static_cast<long>(kMargin)};
    for (int i = 1; i <= gridlines; ++i) {
        const long y = a.bottom - (a.bottom - a.top) * i / gridlines;
        img.draw_line(a.left, y, a.right, y, kGrid);
    }
    img.draw_line(a.left, a.top, a.left, a.bottom, kAxis);
    img.draw_line(a.left, a.bottom, a.right, a.bottom, kAxis);
    return a;
}

}  // namespace

Image::Image(std::size_t width, std::size_t height, Rgb fill) : width_(width), height_(height) {
    if (width == 0 || height == 0) throw ValidationError("image needs a positive size");
    rgb_.resize(width * height * 3);
    for (std::size_t i = 0; i < width * height; ++i) {
        rgb_[3 * i] = fill.r;
        rgb_[3 * i + 1] = fill.g;
        rgb_[3 * i + 2] = fill.b;
    }
}

Rgb Image::at(std::size_t x, std::size_t y) const {
    if (x >= width_ || y >= height_) throw std::out_of_range("pixel outside the image");
    const std::size_t i = 3 * (y * width_ + x);
    return Rgb{rgb_.at(i), rgb_.at(i + 1), rgb_.at(i + 2)};
}

void Image::set(std::size_t x, std::size_t y, Rgb color) {
    if (x >= width_ || y >= height_) return;
    const std::size_t i = 3 * (y * width_ + x);
    rgb_[i] = color.r;
    rgb_[i + 1] = color.g;
    rgb_[i + 2] = color.b;
}

void Image::fill_rect(long x0, long y0, long x1, long y1, Rgb color) {
    x0 = std::max(x0, 0L);
    y0 = std::max(y0, 0L);
    x1 = std::min(x1, static_cast<long>(width_));
    y1 = std::min(y1, static_cast<long>(height_));
    for (long y = y0; y < y1; ++y)
        for (long x = x0; x < x1; ++x) set(static_cast<std::size_t>(x), static_cast<std::size_t>(y), color);
}

void Image::draw_line(long x0, long y0, long x1, long y1, Rgb color, int thickness) {
    // Bresenham, with a square brush for thickness > 1.
    const long dx = std::labs(x1 - x0), dy = -std::labs(y1 - y0);
    const long sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    long err = dx + dy;
    const long lo = -(thickness - 1) / 2, hi = thickness / 2;
    for (;;) {
        fill_rect(x0 + lo, y0 + lo, x0 + hi + 1, y0 + hi + 1, color);
        if (x0 == x1 && y0 == y1) break;
        const long e2 = 2 * err;
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

Rgb diverging_color(double value, double max_abs) {
    if (!(max_abs > 0) || value == 0.0) return kWhite;
    const double t = value / max_abs;
    return t > 0 ? lerp(kWhite, kDivergingHigh, t) : lerp(kWhite, kDivergingLow, -t);
}

Rgb sequential_color(double t) { return lerp(kSequentialLight, kSequentialDark, t); }

Image render_raster(const RasterGrid& raster, const RenderOptions& options) {
    const std::size_t px = std::max<std::size_t>(1, options.cell_px);
    const std::size_t width = raster.n_cols() * px;
    const std::size_t body = raster.n_rows() * px;
    const std::size_t height = body + (options.legend ? kLegendGap + kLegendHeight : 0);
    Image img(width, height);

    const double lo = raster.min(), hi = raster.max();
    const double max_abs = std::max(std::abs(lo), std::abs(hi));
    const auto color_of = [&](double v) {
        if (options.ramp == Ramp::Diverging) return diverging_color(v, max_abs);
        return sequential_color(hi > lo ? (v - lo) / (hi - lo) : 0.0);
    };
    for (std::size_t r = 0; r < raster.n_rows(); ++r) {
        for (std::size_t c = 0; c < raster.n_cols(); ++c) {
            const auto color = color_of(raster.at(r, c));
            if (color == kWhite) continue;
            img.fill_rect(static_cast<long>(c * px), static_cast<long>(r * px),
                          static_cast<long>((c + 1) * px), static_cast<long>((r + 1) * px), color);
        }
    }
    if (options.legend) {
        // Full ramp left to right, with ticks at the ends and the middle.
        const std::size_t y0 = body + kLegendGap;
        for (std::size_t x = 0; x < width; ++x) {
            const double t = width == 1 ? 1.0 : static_cast<double>(x) / static_cast<double>(width - 1);
            const Rgb color = options.ramp == Ramp::Diverging ? diverging_color(2 * t - 1, 1.0)
                                                              : sequential_color(t);
            img.fill_rect(static_cast<long>(x), static_cast<long>(y0 + 3), static_cast<long>(x + 1),
                          static_cast<long>(y0 + kLegendHeight), color);
        }
        for (std::size_t x : {std::size_t{0}, width / 2, width - 1})
            img.fill_rect(static_cast<long>(x), static_cast<long>(y0), static_cast<long>(x + 1),
                          static_cast<long>(y0 + 3), kAxis);
    }
    return img;
}

std::vector<std::uint8_t> encode_png(const Image& image) {
    std::vector<std::uint8_t> raw;
    const std::size_t stride = image.width() * 3;
    raw.reserve((stride + 1) * image.height());
    for (std::size_t y = 0; y < image.height(); ++y) {
        raw.push_back(0);  // filter: none
        const auto* row = image.rgb().data() + y * stride;
        raw.insert(raw.end(), row, row + stride);
    }
    uLongf packed_size = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> packed(packed_size);
    if (compress2(packed.data(), &packed_size, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK)
        throw Error("zlib compression failed");
    packed.resize(packed_size);

    std::vector<std::uint8_t> png = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    std::vector<std::uint8_t> header;
    put_u32(header, static_cast<std::uint32_t>(image.width()));
    put_u32(header, static_cast<std::uint32_t>(image.height()));
    header.insert(header.end(), {8, 2, 0, 0, 0});  // 8-bit truecolour
    put_chunk(png, "IHDR", header);
    put_chunk(png, "IDAT", packed);
    put_chunk(png, "IEND", {});
    return png;
}

std::vector<std::uint8_t> render_png(const RasterGrid& raster, const RenderOptions& options) {
    return encode_png(render_raster(raster, options));
}

void write_png_file(const std::filesystem::path& path, const Image& image) {
    const auto bytes = encode_png(image);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("short write to " + path.string());
}

Rgb chart_color(std::size_t index) {
    static constexpr std::array<Rgb, 8> palette = {{
        {31, 119, 180}, {214, 39, 40}, {44, 160, 44}, {255, 127, 14},
        {148, 103, 189}, {140, 86, 75}, {227, 119, 194}, {23, 190, 207},
    }};
    return palette[index % palette.size()];
}

Image line_chart(const std::vector<ChartSeries>& series, std::size_t width, std::size_t height) {
    Image img(width, height);
    const auto area = draw_frame(img, 4);
    double top = 0;
    std::size_t points = 0;
    for (const auto& s : series) {
        for (double v : s.values) top = std::max(top, v);
        points = std::max(points, s.values.size());
    }
    if (top <= 0) top = 1;
    const auto x_of = [&](std::size_t i) {
        if (points <= 1) return area.left;
        return area.left + static_cast<long>((area.right - area.left) * static_cast<double>(i) /
                                             static_cast<double>(points - 1));
    };
    const auto y_of = [&](double v) {
        return area.bottom - static_cast<long>(std::lround((area.bottom - area.top) * v / top));
    };
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& v = series[k].values;
        const Rgb color = chart_color(k);
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) img.draw_line(x_of(i - 1), y_of(v[i - 1]), x_of(i), y_of(v[i]), color, 2);
            img.fill_rect(x_of(i) - 2, y_of(v[i]) - 2, x_of(i) + 3, y_of(v[i]) + 3, color);
        }
        // Legend swatch, top right.
        const long sy = area.top + 4 + static_cast<long>(k) * 10;
        img.fill_rect(area.right - 24, sy, area.right - 4, sy + 6, color);
    }
    return img;
}

Image bar_chart(const std::vector<double>& values, std::size_t width, std::size_t height) {
    Image img(width, height);
    const auto area = draw_frame(img, 4);
    double top = 100;
    for (double v : values) top = std::max(top, v);
    if (values.empty()) return img;
    const double slot = static_cast<double>(area.right - area.left) / static_cast<double>(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const long x0 = area.left + static_cast<long>(slot * (static_cast<double>(i) + 0.15));
        const long x1 = area.left + static_cast<long>(slot * (static_cast<double>(i) + 0.85));
        const long y0 = area.bottom -
                        static_cast<long>(std::lround((area.bottom - area.top) * std::max(0.0, values[i]) / top));
        img.fill_rect(x0, y0, std::max(x1, x0 + 1), area.bottom, chart_color(i));
    }
    return img;
}

}  // namespace webscape
