#pragma once

#include <cstdint>
#include <vector>

#include "uhpsot/box.hpp"

namespace uhpsot {

/// 8-bit RGB frame, row-major, interleaved channels.
struct Frame {
    int index = 0;
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels; // width*height*3, R,G,B per pixel

    Frame() = default;
    Frame(int width, int height, std::uint8_t fill = 0)
        : width(width), height(height),
          pixels(static_cast<std::size_t>(width) * height * 3, fill) {}

    std::uint8_t& at(int x, int y, int c) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    std::uint8_t at(int x, int y, int c) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    bool empty() const { return pixels.empty(); }
};

/// Luminance image with values in [0, 1].
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> values; // row-major

    GrayImage() = default;
    GrayImage(int width, int height, double fill = 0.0)
        : width(width), height(height),
          values(static_cast<std::size_t>(width) * height, fill) {}

    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }

    /// Bilinear sample with replicate padding outside the frame.
    double sample(double x, double y) const;
};

/// Resampled image patch, 1 (gray) or 3 (RGB) planes of doubles in [0, 1].
/// Planes are stored separately, row-major.
struct Patch {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<double> data; // channels * width * height, plane-major

    Patch() = default;
    Patch(int width, int height, int channels)
        : width(width), height(height), channels(channels),
          data(static_cast<std::size_t>(width) * height * channels, 0.0) {}

    double& at(int x, int y, int c) {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    double at(int x, int y, int c) const {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
};

} // namespace uhpsot
