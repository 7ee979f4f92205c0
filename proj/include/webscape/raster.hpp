#pragma once

// Georeferenced lon/lat grid with rows stored north to south, and ESRI ASCII
// grid (.asc) serialization.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace webscape {

struct GridSpec {
    double min_lon = -125.0;
    double min_lat = 24.0;
    double max_lon = -66.0;
    double max_lat = 50.0;
    std::size_t n_cols = 590;
    std::size_t n_rows = 260;

    /// Throws ValidationError unless min < max on both axes and both counts are positive.
    void validate() const;

    /// Square cells of `cell_deg` covering the extent (rounded to whole cells).
    static GridSpec from_cell_size(double min_lon, double min_lat, double max_lon, double max_lat,
                                   double cell_deg);

    double cell_width() const noexcept { return (max_lon - min_lon) / static_cast<double>(n_cols); }
    double cell_height() const noexcept {
        return (max_lat - min_lat) / static_cast<double>(n_rows);
    }
    double cell_center_lon(std::size_t col) const noexcept {
        return min_lon + (static_cast<double>(col) + 0.5) * cell_width();
    }
    /// Row 0 is the northernmost row.
    double cell_center_lat(std::size_t row) const noexcept {
        return max_lat - (static_cast<double>(row) + 0.5) * cell_height();
    }
    /// Surface area of one cell in row `row` on the mean-radius sphere, m².
    double cell_area_m2(std::size_t row) const;

    bool operator==(const GridSpec&) const = default;
};

class RasterGrid {
public:
    /// All-zero raster.
    explicit RasterGrid(GridSpec spec);
    /// Throws ValidationError on a size mismatch or non-finite value.
    RasterGrid(GridSpec spec, std::vector<double> values);

    const GridSpec& spec() const noexcept { return spec_; }
    std::size_t n_cols() const noexcept { return spec_.n_cols; }
    std::size_t n_rows() const noexcept { return spec_.n_rows; }
    std::size_t size() const noexcept { return values_.size(); }

    double at(std::size_t row, std::size_t col) const { return values_[row * spec_.n_cols + col]; }
    double& at(std::size_t row, std::size_t col) { return values_[row * spec_.n_cols + col]; }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    double min() const;
    double max() const;

    bool operator==(const RasterGrid&) const = default;

private:
    GridSpec spec_;
    std::vector<double> values_;
};

inline constexpr double kAsciiNoData = -9999.0;

/// `cellsize` when cells are square, otherwise GDAL-style `dx` / `dy`.
std::string write_ascii_grid(const RasterGrid& raster);
/// NODATA cells read back as 0.
RasterGrid read_ascii_grid(std::string_view text);

void write_ascii_grid_file(const std::filesystem::path& path, const RasterGrid& raster);

}  // namespace webscape
