#pragma once

#include <algorithm>
#include <cmath>

namespace uhpsot {

/// Axis-aligned bounding box in frame pixels, stored as center + size.
/// This is the currency passed between all modules; conversions to the
/// OTB top-left convention happen only at the file-format boundary.
struct BoundingBox {
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;

    BoundingBox() = default;
    BoundingBox(double cx, double cy, double w, double h) : cx(cx), cy(cy), w(w), h(h) {}

    /// Build from OTB-style top-left corner + size.
    static BoundingBox from_tlwh(double x, double y, double w, double h) {
        return BoundingBox(x + w / 2.0, y + h / 2.0, w, h);
    }

    double x_min() const { return cx - w / 2.0; }
    double y_min() const { return cy - h / 2.0; }
    double x_max() const { return cx + w / 2.0; }
    double y_max() const { return cy + h / 2.0; }
    double area() const { return w * h; }
    bool valid() const {
        return std::isfinite(cx) && std::isfinite(cy) && std::isfinite(w) && std::isfinite(h) &&
               w > 0.0 && h > 0.0;
    }

    BoundingBox scaled(double factor) const { return BoundingBox(cx, cy, w * factor, h * factor); }
};

inline double center_distance(const BoundingBox& a, const BoundingBox& b) {
    return std::hypot(a.cx - b.cx, a.cy - b.cy);
}

inline double intersection_area(const BoundingBox& a, const BoundingBox& b) {
    const double iw = std::min(a.x_max(), b.x_max()) - std::max(a.x_min(), b.x_min());
    const double ih = std::min(a.y_max(), b.y_max()) - std::max(a.y_min(), b.y_min());
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    return iw * ih;
}

inline double box_iou(const BoundingBox& a, const BoundingBox& b) {
    const double inter = intersection_area(a, b);
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

} // namespace uhpsot
