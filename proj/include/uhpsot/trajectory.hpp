#pragma once

#include <deque>
#include <utility>

#include "uhpsot/bgmotion.hpp"
#include "uhpsot/box.hpp"

namespace uhpsot::trajectory {

/// Ring buffer of the last N tracked boxes, most recent last.
class TrajectoryBuffer {
public:
    explicit TrajectoryBuffer(int capacity = 20) : capacity_(capacity) {}

    void push(const BoundingBox& box);
    int size() const { return static_cast<int>(boxes_.size()); }
    int capacity() const { return capacity_; }
    const BoundingBox& back() const { return boxes_.back(); }
    const BoundingBox& at(int i) const { return boxes_[i]; }
    bool empty() const { return boxes_.empty(); }

private:
    int capacity_;
    std::deque<BoundingBox> boxes_;
};

/// PCA + line-fit extrapolation of the next center: project the stored
/// displacement vectors onto their first principal axis, fit score vs. index
/// with a least-squares line, extrapolate one step, and reconstruct with the
/// second component set to zero. Throws InsufficientHistory for < 2 boxes.
std::pair<double, double> predict_center(const TrajectoryBuffer& buffer);

/// Same procedure over (dw, dh); the result is floored at 2x2 px.
std::pair<double, double> predict_size(const TrajectoryBuffer& buffer);

/// True (reject) when the estimate deviates from the predicted size by more
/// than `tolerance` relative, in either dimension. Boundary accepts.
bool reject_deviation(const bgmotion::ShapeEstimate& candidate, const TrajectoryBuffer& buffer,
                      double tolerance = 0.25);

} // namespace uhpsot::trajectory
