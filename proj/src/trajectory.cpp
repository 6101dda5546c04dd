#include "uhpsot/trajectory.hpp"

#include <cmath>
#include <vector>

#include "uhpsot/errors.hpp"

namespace uhpsot::trajectory {

void TrajectoryBuffer::push(const BoundingBox& box) {
    boxes_.push_back(box);
    if (static_cast<int>(boxes_.size()) > capacity_) boxes_.pop_front();
}

namespace {

// PCA over 2-D displacement vectors, line fit of the first-component score
// against the sample index, one-step extrapolation. The second component is
// zeroed; zero covariance degenerates to the mean displacement.
std::pair<double, double> extrapolate(const std::vector<std::pair<double, double>>& deltas) {
    const int n = static_cast<int>(deltas.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [dx, dy] : deltas) {
        mx += dx;
        my += dy;
    }
    mx /= n;
    my /= n;

    double cxx = 0.0, cxy = 0.0, cyy = 0.0;
    for (const auto& [dx, dy] : deltas) {
        const double ux = dx - mx, uy = dy - my;
        cxx += ux * ux;
        cxy += ux * uy;
        cyy += uy * uy;
    }
    cxx /= n;
    cxy /= n;
    cyy /= n;

    // leading eigenvector of the 2x2 covariance
    const double tr = cxx + cyy;
    const double disc = std::sqrt(std::max(0.0, (cxx - cyy) * (cxx - cyy) + 4.0 * cxy * cxy));
    const double lambda = 0.5 * (tr + disc);
    if (lambda <= 1e-12) return {mx, my}; // degenerate: no variation around the mean

    double ax = cxy, ay = lambda - cxx;
    if (std::abs(ax) + std::abs(ay) < 1e-15) {
        ax = lambda - cyy;
        ay = cxy;
    }
    if (std::abs(ax) + std::abs(ay) < 1e-15) {
        ax = 1.0;
        ay = 0.0;
    }
    const double norm = std::hypot(ax, ay);
    ax /= norm;
    ay /= norm;

    // least-squares line of score_i over i = 0..n-1, evaluated at i = n
    double sum_s = 0.0, sum_is = 0.0;
    for (int i = 0; i < n; ++i) {
        const double s = (deltas[i].first - mx) * ax + (deltas[i].second - my) * ay;
        sum_s += s;
        sum_is += i * s;
    }
    const double mean_i = (n - 1) / 2.0;
    const double mean_s = sum_s / n;
    double var_i = 0.0;
    for (int i = 0; i < n; ++i) var_i += (i - mean_i) * (i - mean_i);
    const double cov_is = sum_is - n * mean_i * mean_s;
    const double slope = var_i > 0.0 ? cov_is / var_i : 0.0;
    const double predicted_score = mean_s + slope * (n - mean_i);

    return {mx + predicted_score * ax, my + predicted_score * ay};
}

} // namespace

std::pair<double, double> predict_center(const TrajectoryBuffer& buffer) {
    if (buffer.size() < 2)
        throw InsufficientHistory("need at least 2 boxes to predict the center");
    std::vector<std::pair<double, double>> deltas;
    deltas.reserve(buffer.size() - 1);
    for (int i = 1; i < buffer.size(); ++i)
        deltas.emplace_back(buffer.at(i).cx - buffer.at(i - 1).cx,
                            buffer.at(i).cy - buffer.at(i - 1).cy);
    const auto [dx, dy] = extrapolate(deltas);
    return {buffer.back().cx + dx, buffer.back().cy + dy};
}

std::pair<double, double> predict_size(const TrajectoryBuffer& buffer) {
    if (buffer.size() < 2)
        throw InsufficientHistory("need at least 2 boxes to predict the size");
    std::vector<std::pair<double, double>> deltas;
    deltas.reserve(buffer.size() - 1);
    for (int i = 1; i < buffer.size(); ++i)
        deltas.emplace_back(buffer.at(i).w - buffer.at(i - 1).w,
                            buffer.at(i).h - buffer.at(i - 1).h);
    const auto [dw, dh] = extrapolate(deltas);
    return {std::max(2.0, buffer.back().w + dw), std::max(2.0, buffer.back().h + dh)};
}

bool reject_deviation(const bgmotion::ShapeEstimate& candidate, const TrajectoryBuffer& buffer,
                      double tolerance) {
    if (buffer.empty()) throw InsufficientHistory("empty trajectory buffer");
    double w_hat, h_hat;
    if (buffer.size() < 2) {
        w_hat = buffer.back().w;
        h_hat = buffer.back().h;
    } else {
        std::tie(w_hat, h_hat) = predict_size(buffer);
    }
    return std::abs(candidate.width - w_hat) > tolerance * w_hat ||
           std::abs(candidate.height - h_hat) > tolerance * h_hat;
}

} // namespace uhpsot::trajectory
