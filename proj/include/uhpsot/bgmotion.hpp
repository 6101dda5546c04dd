#pragma once

#include <optional>
#include <vector>

#include "uhpsot/box.hpp"
#include "uhpsot/image.hpp"
#include "uhpsot/proposal.hpp"

namespace uhpsot::bgmotion {

struct Point2d {
    double x = 0.0;
    double y = 0.0;
};

/// 6-parameter affine background motion map (x_t, y_t) -> (x_{t+1}, y_{t+1}):
///   x' = a1*x + a2*y + a0
///   y' = b1*x + b2*y + b0
struct AffineModel {
    double a0 = 0.0, a1 = 1.0, a2 = 0.0;
    double b0 = 0.0, b1 = 0.0, b2 = 1.0;

    static AffineModel identity() { return {}; }
    static AffineModel translation(double dx, double dy) {
        AffineModel m;
        m.a0 = dx;
        m.b0 = dy;
        return m;
    }

    Point2d apply(const Point2d& p) const {
        return {a1 * p.x + a2 * p.y + a0, b1 * p.x + b2 * p.y + b0};
    }
    double det() const { return a1 * b2 - a2 * b1; }
    bool degenerate() const { return std::abs(det()) <= 1e-6; }
    AffineModel inverse() const;
};

struct Correspondence {
    Point2d from;
    Point2d to;
    double ncc = 0.0;
};

struct AffineFit {
    AffineModel model;
    double rms = 0.0; // residual RMS over the pairs kept
    int inliers = 0;
};

/// |warped previous - observed| per pixel, with the warp validity mask.
struct DifferenceMap {
    int width = 0;
    int height = 0;
    std::vector<double> data;      // >= 0, zero where invalid
    std::vector<std::uint8_t> valid_mask;

    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    bool valid(int x, int y) const { return valid_mask[static_cast<std::size_t>(y) * width + x] != 0; }
};

/// Interval ends of the residual profiles; x_max/y_max are exclusive pixel
/// edges, so width = x_max - x_min.
struct ShapeEstimate {
    double width = 0.0;  // w_hat
    double height = 0.0; // h_hat
    double x_min = 0.0, x_max = 0.0;
    double y_min = 0.0, y_max = 0.0;
};

/// Harris corners outside the (padded) exclusion box, strongest first,
/// non-maximum suppressed with the given radius.
std::vector<Point2d> detect_keypoints(const GrayImage& image, int max_points,
                                      const BoundingBox& exclusion, double nms_radius = 8.0,
                                      double exclusion_pad = 1.5);

/// Exhaustive NCC block matching of `points` from prev into curr within
/// +-radius. Matches below `min_ncc` are dropped.
std::vector<Correspondence> match_points(const GrayImage& prev, const GrayImage& curr,
                                         const std::vector<Point2d>& points, int radius,
                                         int patch, double min_ncc = 0.6);

/// Least-squares fit of the 6-parameter model over the pairs, with one
/// trimmed refit pass dropping pairs whose residual exceeds `trim_residual`.
AffineFit fit_affine(const std::vector<Correspondence>& correspondences,
                     double trim_residual = 3.0);

/// Inverse-mapped bilinear warp; destinations whose source falls outside the
/// frame are masked invalid.
std::pair<GrayImage, std::vector<std::uint8_t>> warp_image(const GrayImage& image,
                                                           const AffineModel& model);

/// |estimated - observed| on valid pixels, then 3x3 box smoothed.
DifferenceMap diff_map(const GrayImage& estimated, const GrayImage& observed,
                       const std::vector<std::uint8_t>& valid_mask);

/// Threshold the map at `rel_threshold * max`, keep 8-connected components of
/// at least `min_area` pixels, and return the bounding box of the one with
/// the largest mass. Absence is a valid outcome.
std::optional<Proposal> propose_background(const DifferenceMap& dmap, const BoundingBox& prev_box,
                                           double rel_threshold = 0.2, int min_area = 25);

/// Sum the residual over a 2x padded window around `region`, threshold both
/// profiles at `cut_threshold * max`, and read the interval ends off them.
ShapeEstimate estimate_shape(const DifferenceMap& dmap, const BoundingBox& region,
                             double cut_threshold);

} // namespace uhpsot::bgmotion
