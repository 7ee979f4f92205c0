#pragma once

// PNG output: colour-ramped rasters with a legend strip, and the plain line
// and bar charts used by the decay and statistics reports.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "webscape/raster.hpp"

namespace webscape {

struct Rgb {
    std::uint8_t r = 255, g = 255, b = 255;
    bool operator==(const Rgb&) const = default;
};

inline constexpr Rgb kWhite{255, 255, 255};
inline constexpr Rgb kDivergingHigh{178, 24, 43};
inline constexpr Rgb kDivergingLow{33, 102, 172};
inline constexpr Rgb kSequentialLight{255, 245, 235};
inline constexpr Rgb kSequentialDark{127, 39, 4};

/// 8-bit RGB, rows top to bottom.
class Image {
public:
    Image(std::size_t width, std::size_t height, Rgb fill = kWhite);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    const std::vector<std::uint8_t>& rgb() const noexcept { return rgb_; }

    /// Throws std::out_of_range outside the image; set() ignores such pixels.
    Rgb at(std::size_t x, std::size_t y) const;
    void set(std::size_t x, std::size_t y, Rgb color);
    /// Clipped to the image.
    void fill_rect(long x0, long y0, long x1, long y1, Rgb color);
    void draw_line(long x0, long y0, long x1, long y1, Rgb color, int thickness = 1);

private:
    std::size_t width_, height_;
    std::vector<std::uint8_t> rgb_;
};

enum class Ramp { Diverging, Sequential };

/// White at 0, blending to red for +max_abs and blue for -max_abs.
/// max_abs <= 0 gives white.
Rgb diverging_color(double value, double max_abs);
/// t in [0, 1] from light to dark; clamped.
Rgb sequential_color(double t);

struct RenderOptions {
    Ramp ramp = Ramp::Diverging;
    std::size_t cell_px = 2;
    bool legend = true;
};

inline constexpr std::size_t kLegendGap = 4;
inline constexpr std::size_t kLegendHeight = 12;

/// Body of n_rows·cell_px by n_cols·cell_px pixels, north up, followed by a
/// legend strip spanning the ramp when enabled. Diverging scales to max |v|;
/// sequential to [min, max].
Image render_raster(const RasterGrid& raster, const RenderOptions& options = {});

std::vector<std::uint8_t> encode_png(const Image& image);
std::vector<std::uint8_t> render_png(const RasterGrid& raster, const RenderOptions& options = {});
void write_png_file(const std::filesystem::path& path, const Image& image);

struct ChartSeries {
    std::string label;
    std::vector<double> values;
};

/// One polyline per series over a shared x index; y axis from 0 to the
/// largest value. Series colours come from a fixed palette.
Image line_chart(const std::vector<ChartSeries>& series, std::size_t width = 640,
                 std::size_t height = 400);

/// Vertical bars on a 0..max(values, 100) axis.
Image bar_chart(const std::vector<double>& values, std::size_t width = 640,
                std::size_t height = 400);

/// Palette colour used for series or bar `index`.
Rgb chart_color(std::size_t index);

}  // namespace webscape
