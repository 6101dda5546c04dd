#include "uhpsot/features.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>

#include "uhpsot/errors.hpp"

namespace uhpsot::features {

namespace {

constexpr int kOrientations = 9;   // insensitive
constexpr int kSensitive = 18;     // contrast sensitive
constexpr double kTruncation = 0.2;
constexpr double kTextureScale = 0.2357; // 1/sqrt(18)

struct CellHist {
    int cells_y = 0;
    int cells_x = 0;
    std::vector<double> bins; // cells_y * cells_x * 18

    CellHist(int cy, int cx)
        : cells_y(cy), cells_x(cx), bins(static_cast<std::size_t>(cy) * cx * kSensitive, 0.0) {}

    double& at(int y, int x, int o) {
        return bins[(static_cast<std::size_t>(y) * cells_x + x) * kSensitive + o];
    }
    double at(int y, int x, int o) const {
        return bins[(static_cast<std::size_t>(y) * cells_x + x) * kSensitive + o];
    }
};

// Gradient of the dominant channel at (x, y), central differences with
// clamped borders.
inline void pixel_gradient(const Patch& p, int x, int y, double& dx, double& dy) {
    const int xm = x > 0 ? x - 1 : 0;
    const int xp = x < p.width - 1 ? x + 1 : p.width - 1;
    const int ym = y > 0 ? y - 1 : 0;
    const int yp = y < p.height - 1 ? y + 1 : p.height - 1;
    double best = -1.0;
    for (int c = 0; c < p.channels; ++c) {
        const double gx = p.at(xp, y, c) - p.at(xm, y, c);
        const double gy = p.at(x, yp, c) - p.at(x, ym, c);
        const double mag2 = gx * gx + gy * gy;
        if (mag2 > best) {
            best = mag2;
            dx = gx;
            dy = gy;
        }
    }
}

// Snap (dx, dy) to the nearest of 18 directions: argmax over the 9 base
// orientations of |cos*dx + sin*dy|, sign picking the half.
inline int snap_orientation(double dx, double dy) {
    static const std::array<double, kOrientations> uu = [] {
        std::array<double, kOrientations> t{};
        for (int o = 0; o < kOrientations; ++o) t[o] = std::cos(o * M_PI / kOrientations);
        return t;
    }();
    static const std::array<double, kOrientations> vv = [] {
        std::array<double, kOrientations> t{};
        for (int o = 0; o < kOrientations; ++o) t[o] = std::sin(o * M_PI / kOrientations);
        return t;
    }();
    double best = -1.0;
    int bin = 0;
    for (int o = 0; o < kOrientations; ++o) {
        const double dot = uu[o] * dx + vv[o] * dy;
        if (dot > best) {
            best = dot;
            bin = o;
        } else if (-dot > best) {
            best = -dot;
            bin = o + kOrientations;
        }
    }
    return bin;
}

CellHist bin_gradients(const Patch& patch, int cell_size) {
    const int cells_x = patch.width / cell_size;
    const int cells_y = patch.height / cell_size;
    CellHist hist(cells_y, cells_x);
    for (int y = 0; y < patch.height; ++y) {
        for (int x = 0; x < patch.width; ++x) {
            double dx = 0.0, dy = 0.0;
            pixel_gradient(patch, x, y, dx, dy);
            const double mag = std::sqrt(dx * dx + dy * dy);
            if (mag == 0.0) continue;
            const int o = snap_orientation(dx, dy);
            // bilinear spatial binning over the four surrounding cells
            const double cxf = (x + 0.5) / cell_size - 0.5;
            const double cyf = (y + 0.5) / cell_size - 0.5;
            const int cx0 = static_cast<int>(std::floor(cxf));
            const int cy0 = static_cast<int>(std::floor(cyf));
            const double wx1 = cxf - cx0;
            const double wy1 = cyf - cy0;
            const double wx0 = 1.0 - wx1;
            const double wy0 = 1.0 - wy1;
            const auto add = [&](int cy, int cx, double w) {
                if (cy >= 0 && cy < cells_y && cx >= 0 && cx < cells_x)
                    hist.at(cy, cx, o) += w * mag;
            };
            add(cy0, cx0, wy0 * wx0);
            add(cy0, cx0 + 1, wy0 * wx1);
            add(cy0 + 1, cx0, wy1 * wx0);
            add(cy0 + 1, cx0 + 1, wy1 * wx1);
        }
    }
    return hist;
}

void hog_from_hist(const CellHist& hist, FeatureMap& out) {
    const int cy_n = hist.cells_y;
    const int cx_n = hist.cells_x;
    // per-cell gradient energy over insensitive orientations
    std::vector<double> energy(static_cast<std::size_t>(cy_n) * cx_n, 0.0);
    for (int y = 0; y < cy_n; ++y)
        for (int x = 0; x < cx_n; ++x) {
            double e = 0.0;
            for (int o = 0; o < kOrientations; ++o) {
                const double s = hist.at(y, x, o) + hist.at(y, x, o + kOrientations);
                e += s * s;
            }
            energy[static_cast<std::size_t>(y) * cx_n + x] = e;
        }
    const auto eat = [&](int y, int x) {
        y = y < 0 ? 0 : (y >= cy_n ? cy_n - 1 : y);
        x = x < 0 ? 0 : (x >= cx_n ? cx_n - 1 : x);
        return energy[static_cast<std::size_t>(y) * cx_n + x];
    };
    constexpr double eps = 1e-10;
    for (int y = 0; y < cy_n; ++y)
        for (int x = 0; x < cx_n; ++x) {
            // four 2x2 block normalizers around this cell
            const std::array<double, 4> inv_n = {
                1.0 / std::sqrt(eat(y, x) + eat(y, x - 1) + eat(y - 1, x) + eat(y - 1, x - 1) + eps),
                1.0 / std::sqrt(eat(y, x) + eat(y, x + 1) + eat(y - 1, x) + eat(y - 1, x + 1) + eps),
                1.0 / std::sqrt(eat(y, x) + eat(y, x - 1) + eat(y + 1, x) + eat(y + 1, x - 1) + eps),
                1.0 / std::sqrt(eat(y, x) + eat(y, x + 1) + eat(y + 1, x) + eat(y + 1, x + 1) + eps)};
            std::array<double, 4> texture{};
            for (int o = 0; o < kSensitive; ++o) {
                const double h = hist.at(y, x, o);
                double acc = 0.0;
                for (int k = 0; k < 4; ++k) {
                    const double v = std::min(h * inv_n[k], kTruncation);
                    acc += v;
                    texture[k] += v;
                }
                out.at(y, x, o) = 0.5 * acc;
            }
            for (int o = 0; o < kOrientations; ++o) {
                const double h = hist.at(y, x, o) + hist.at(y, x, o + kOrientations);
                double acc = 0.0;
                for (int k = 0; k < 4; ++k) acc += std::min(h * inv_n[k], kTruncation);
                out.at(y, x, kSensitive + o) = 0.5 * acc;
            }
            for (int k = 0; k < 4; ++k)
                out.at(y, x, kSensitive + kOrientations + k) = kTextureScale * texture[k];
        }
}

} // namespace

const CnTable& builtin_cn_table() {
    static CnTable table;
    static std::once_flag once;
    std::call_once(once, [] {
        // Ten prototype colors; soft assignment by RGB distance.
        static const std::array<std::array<double, 3>, kCnChannels> protos = {{
            {0, 0, 0},       // black
            {0, 0, 255},     // blue
            {139, 69, 19},   // brown
            {128, 128, 128}, // grey
            {0, 128, 0},     // green
            {255, 165, 0},   // orange
            {255, 105, 180}, // pink
            {128, 0, 128},   // purple
            {255, 0, 0},     // red
            {255, 255, 0},   // yellow
        }};
        constexpr double sigma = 55.0;
        table.resize(static_cast<std::size_t>(kCnTableSize) * kCnChannels);
        for (int r5 = 0; r5 < 32; ++r5)
            for (int g5 = 0; g5 < 32; ++g5)
                for (int b5 = 0; b5 < 32; ++b5) {
                    const double r = r5 * 8.0 + 4.0;
                    const double g = g5 * 8.0 + 4.0;
                    const double b = b5 * 8.0 + 4.0;
                    const std::size_t idx =
                        (static_cast<std::size_t>(r5) << 10 | g5 << 5 | b5) * kCnChannels;
                    double sum = 0.0;
                    std::array<double, kCnChannels> m{};
                    for (int p = 0; p < kCnChannels; ++p) {
                        const double dr = r - protos[p][0];
                        const double dg = g - protos[p][1];
                        const double db = b - protos[p][2];
                        m[p] = std::exp(-(dr * dr + dg * dg + db * db) / (2.0 * sigma * sigma));
                        sum += m[p];
                    }
                    for (int p = 0; p < kCnChannels; ++p)
                        table[idx + p] = static_cast<float>(m[p] / sum);
                }
    });
    return table;
}

CnTable load_cn_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open color-name table: " + path);
    CnTable table(static_cast<std::size_t>(kCnTableSize) * kCnChannels);
    in.read(reinterpret_cast<char*>(table.data()),
            static_cast<std::streamsize>(table.size() * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(table.size() * sizeof(float)) ||
        in.peek() != std::ifstream::traits_type::eof())
        throw IoError("color-name table has wrong size: " + path);
    return table;
}

void save_cn_table(const CnTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write color-name table: " + path);
    out.write(reinterpret_cast<const char*>(table.data()),
              static_cast<std::streamsize>(table.size() * sizeof(float)));
}

FeatureMap extract_features(const Patch& patch, int cell_size, bool use_cn,
                            const CnTable* cn_table) {
    if (cell_size < 1 || patch.width % cell_size != 0 || patch.height % cell_size != 0)
        throw BadGeometry("patch " + std::to_string(patch.width) + "x" +
                          std::to_string(patch.height) + " not divisible by cell size " +
                          std::to_string(cell_size));
    const int cells_x = patch.width / cell_size;
    const int cells_y = patch.height / cell_size;
    const bool color = patch.channels == 3;
    const bool with_cn = use_cn && color;
    const int depth = kHogChannels + (with_cn ? kCnChannels : 0);

    FeatureMap map(cells_y, cells_x, depth, cell_size);
    const CellHist hist = bin_gradients(patch, cell_size);
    hog_from_hist(hist, map);

    if (with_cn) {
        const CnTable& table = cn_table ? *cn_table : builtin_cn_table();
        const double inv_area = 1.0 / (cell_size * cell_size);
        for (int y = 0; y < patch.height; ++y) {
            const int cy = y / cell_size;
            for (int x = 0; x < patch.width; ++x) {
                const int cx = x / cell_size;
                const auto q = [](double v) {
                    int b = static_cast<int>(v * 255.0);
                    b = b < 0 ? 0 : (b > 255 ? 255 : b);
                    return b >> 3;
                };
                const std::size_t idx =
                    (static_cast<std::size_t>(q(patch.at(x, y, 0))) << 10 |
                     q(patch.at(x, y, 1)) << 5 | q(patch.at(x, y, 2))) * kCnChannels;
                for (int p = 0; p < kCnChannels; ++p)
                    map.at(cy, cx, kHogChannels + p) += table[idx + p] * inv_area;
            }
        }
    }
    return map;
}

std::vector<double> cosine_window(int n_y, int n_x) {
    const auto hann = [](int k, int n) {
        if (n <= 1) return 1.0;
        return 0.5 - 0.5 * std::cos(2.0 * M_PI * k / (n - 1));
    };
    std::vector<double> win(static_cast<std::size_t>(n_y) * n_x);
    for (int i = 0; i < n_y; ++i) {
        const double hy = hann(i, n_y);
        for (int j = 0; j < n_x; ++j) win[static_cast<std::size_t>(i) * n_x + j] = hy * hann(j, n_x);
    }
    return win;
}

void apply_window(FeatureMap& map, const std::vector<double>& window) {
    if (window.size() != map.plane_size())
        throw DimensionMismatch("window size does not match feature grid");
    for (int d = 0; d < map.depth; ++d) {
        double* plane = map.plane(d);
        for (std::size_t i = 0; i < map.plane_size(); ++i) plane[i] *= window[i];
    }
}

LabelMap gaussian_label(int n_y, int n_x, double sigma_factor, double target_w_cells,
                        double target_h_cells) {
    LabelMap label;
    label.cells_y = n_y;
    label.cells_x = n_x;
    label.sigma = sigma_factor * std::sqrt(target_w_cells * target_h_cells);
    label.data.resize(static_cast<std::size_t>(n_y) * n_x);
    const int cy = n_y / 2;
    const int cx = n_x / 2;
    const double inv = 1.0 / (2.0 * label.sigma * label.sigma);
    for (int i = 0; i < n_y; ++i)
        for (int j = 0; j < n_x; ++j) {
            const double d2 = (i - cy) * double(i - cy) + (j - cx) * double(j - cx);
            label.data[static_cast<std::size_t>(i) * n_x + j] = std::exp(-d2 * inv);
        }
    return label;
}

SpatialWeight spatial_weight(int n_y, int n_x, double target_w_cells, double target_h_cells,
                             double w_min, double w_slope) {
    SpatialWeight weight;
    weight.cells_y = n_y;
    weight.cells_x = n_x;
    weight.data.resize(static_cast<std::size_t>(n_y) * n_x);
    const int cy = n_y / 2;
    const int cx = n_x / 2;
    for (int i = 0; i < n_y; ++i)
        for (int j = 0; j < n_x; ++j) {
            const double ry = (i - cy) / target_h_cells;
            const double rx = (j - cx) / target_w_cells;
            weight.data[static_cast<std::size_t>(i) * n_x + j] = w_min + w_slope * (ry * ry + rx * rx);
        }
    return weight;
}

} // namespace uhpsot::features
