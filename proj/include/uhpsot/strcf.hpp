#pragma once

#include <optional>
#include <vector>

#include "uhpsot/features.hpp"
#include "uhpsot/fft.hpp"
#include "uhpsot/proposal.hpp"

namespace uhpsot::strcf {

/// ADMM penalty schedule. The penalty starts at `init` and is scaled by
/// `scale` after every iteration, capped at `max`.
struct AdmmParams {
    double penalty_init = 1.0;
    double penalty_scale = 10.0;
    double penalty_max = 10000.0;
};

/// Fixed sampling geometry shared by all templates of one tracker.
struct ModelGeometry {
    int sample_w = 0;      // model patch size in px, multiple of cell_size
    int sample_h = 0;
    int cell_size = 4;
    double padding = 1.0;  // per-dimension crop factor around the target

    int grid_x() const { return sample_w / cell_size; }
    int grid_y() const { return sample_h / cell_size; }
};

/// The learned appearance template: one frequency-domain filter per feature
/// channel plus everything needed to score a patch against it.
struct TemplateModel {
    ModelGeometry geom;
    std::vector<fft::ComplexGrid> filters; // f, D planes of grid_y x grid_x
    features::SpatialWeight weight;        // w
    features::LabelMap label;              // y
    std::vector<double> window;            // Hann window, grid_y*grid_x
    double mu = 0.0;
    int trained_at = 0;
    double self_response = 0.0; // zero-displacement response on the training features

    int grid_x() const { return filters.empty() ? 0 : filters[0].nx; }
    int grid_y() const { return filters.empty() ? 0 : filters[0].ny; }
    int depth() const { return static_cast<int>(filters.size()); }
};

/// Correlation output over the search grid, indexed so zero displacement
/// maps to the center cell (grid_y/2, grid_x/2).
struct ResponseMap {
    int ny = 0;
    int nx = 0;
    std::vector<double> data;
    double peak_value = 0.0; // max of data
    double peak_x = 0.0;     // sub-cell location of the peak
    double peak_y = 0.0;

    double at(int y, int x) const { return data[static_cast<std::size_t>(y) * nx + x]; }
};

/// Learn the template minimizing
///   1/2 ||sum_d x^d (x) f^d - y||^2 + 1/2 sum_d ||w . f^d||^2 + mu/2 ||f - f_prev||^2
/// with (x) the circular cross-correlation matching respond(). The data and
/// temporal terms are solved per frequency bin (Sherman-Morrison across
/// channels), the spatial term element-wise in the spatial domain, glued by
/// ADMM with `admm_iters` iterations.
///
/// `f_prev` is required when mu > 0. If `objective_log` is given, the exact
/// objective value is recorded after every iteration.
TemplateModel train_template(const features::FeatureMap& x, const TemplateModel* f_prev,
                             const features::SpatialWeight& w, const features::LabelMap& y,
                             double mu, int admm_iters, const AdmmParams& params = {},
                             std::vector<double>* objective_log = nullptr);

/// Exact objective value for a filter stack (spatial-domain evaluation).
double objective_value(const features::FeatureMap& x, const features::SpatialWeight& w,
                       const features::LabelMap& y, double mu,
                       const std::vector<fft::ComplexGrid>* f_prev,
                       const std::vector<fft::ComplexGrid>& filters);

/// Correlate the template with a (windowed) search-region feature map:
/// real(IDFT(sum_d conj(F^d) .* Z^d)), shifted so zero displacement is the
/// grid center, with quadratic sub-cell refinement around the peak.
ResponseMap respond(const TemplateModel& model, const features::FeatureMap& z);

/// Feature extraction knobs forwarded by callers that crop patches.
struct FeatureOptions {
    bool use_cn = true;
    const features::CnTable* cn_table = nullptr;
};

/// Search over `scale_factors` around the previous box; highest
/// scale-penalized peak wins. Non-unit scales are divided by `scale_penalty`.
Proposal propose_appearance(const TemplateModel& model, const Frame& frame,
                            const BoundingBox& prev_box,
                            const std::vector<double>& scale_factors, double scale_penalty,
                            const FeatureOptions& opts);

/// Regularization schedule: 15 for the appearance box, else 10/5/0 by score
/// (the smaller the score, the smaller mu).
double adaptive_mu(ProposalSource chosen_source, double score, double t_hi, double t_lo,
                   double mu_app = 15.0, double mu_high = 10.0, double mu_mid = 5.0,
                   double mu_low = 0.0);

/// Template update gate: update only when the object moved at least
/// `min_motion` pixels since the last update (closed boundary).
bool should_update(double displacement, double min_motion);

/// Default geometric scale ladder {step^-k, ..., 1, ..., step^k}.
std::vector<double> scale_ladder(double step, int count);

} // namespace uhpsot::strcf
