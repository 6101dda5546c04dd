#pragma once

#include <array>
#include <vector>

#include "uhpsot/image.hpp"

namespace uhpsot::features {

inline constexpr int kHogChannels = 31; // 18 sensitive + 9 insensitive + 4 texture
inline constexpr int kCnChannels = 10;
inline constexpr int kCnTableSize = 32768; // 5 bits per RGB channel, R major

/// Dense per-cell feature tensor. Channel planes are stored contiguously:
/// plane d is a row-major cells_y x cells_x grid at offset d*cells_y*cells_x.
struct FeatureMap {
    int cells_y = 0;   // N_y
    int cells_x = 0;   // N_x
    int depth = 0;     // D
    int cell_size = 0; // pixels per cell
    std::vector<double> data;

    FeatureMap() = default;
    FeatureMap(int cells_y, int cells_x, int depth, int cell_size)
        : cells_y(cells_y), cells_x(cells_x), depth(depth), cell_size(cell_size),
          data(static_cast<std::size_t>(cells_y) * cells_x * depth, 0.0) {}

    double& at(int y, int x, int d) {
        return data[(static_cast<std::size_t>(d) * cells_y + y) * cells_x + x];
    }
    double at(int y, int x, int d) const {
        return data[(static_cast<std::size_t>(d) * cells_y + y) * cells_x + x];
    }
    const double* plane(int d) const { return data.data() + static_cast<std::size_t>(d) * cells_y * cells_x; }
    double* plane(int d) { return data.data() + static_cast<std::size_t>(d) * cells_y * cells_x; }
    std::size_t plane_size() const { return static_cast<std::size_t>(cells_y) * cells_x; }
};

/// Gaussian regression target, peak 1 at the grid center cell.
struct LabelMap {
    int cells_y = 0;
    int cells_x = 0;
    double sigma = 0.0; // bandwidth in cells
    std::vector<double> data;

    double at(int y, int x) const { return data[static_cast<std::size_t>(y) * cells_x + x]; }
};

/// Quadratic regularization bowl: small on the target, large outside.
struct SpatialWeight {
    int cells_y = 0;
    int cells_x = 0;
    std::vector<double> data;

    double at(int y, int x) const { return data[static_cast<std::size_t>(y) * cells_x + x]; }
};

/// RGB -> color-name lookup table, 32768 x 10 row-major floats.
using CnTable = std::vector<float>;

/// Deterministically computed built-in table (soft assignment to ten
/// prototype colors). Shared, lazily initialized.
const CnTable& builtin_cn_table();

/// Load a table from the documented binary format: 32768*10 little-endian
/// float32, index = (r>>3)<<10 | (g>>3)<<5 | (b>>3).
CnTable load_cn_table(const std::string& path);
void save_cn_table(const CnTable& table, const std::string& path);

/// Felzenszwalb 31-channel HOG plus, for color patches when `use_cn` is set,
/// ten color-name channels averaged per cell.
FeatureMap extract_features(const Patch& patch, int cell_size, bool use_cn,
                            const CnTable* cn_table = nullptr);

/// Separable Hann window h(i)*h(j), h(k) = 0.5 - 0.5*cos(2*pi*k/(n-1)).
std::vector<double> cosine_window(int n_y, int n_x);

/// Multiply the window onto every channel of the map, in place.
void apply_window(FeatureMap& map, const std::vector<double>& window);

LabelMap gaussian_label(int n_y, int n_x, double sigma_factor, double target_w_cells,
                        double target_h_cells);

SpatialWeight spatial_weight(int n_y, int n_x, double target_w_cells, double target_h_cells,
                             double w_min, double w_slope);

} // namespace uhpsot::features
