#include "uhpsot/strcf.hpp"

#include <algorithm>
#include <cmath>

#include "uhpsot/errors.hpp"
#include "uhpsot/media_io.hpp"

namespace uhpsot::strcf {

namespace {

using fft::ComplexGrid;
using Cplx = std::complex<double>;

void check_dims(const features::FeatureMap& x, const features::SpatialWeight& w,
                const features::LabelMap& y) {
    if (x.cells_y != w.cells_y || x.cells_x != w.cells_x || x.cells_y != y.cells_y ||
        x.cells_x != y.cells_x)
        throw DimensionMismatch("feature/weight/label grids disagree");
    for (double v : x.data)
        if (!std::isfinite(v)) throw NonFiniteInput("feature map contains non-finite values");
}

// DFT of the label with its center peak moved to (0,0), so the data term is
// expressed in raw correlation indexing.
ComplexGrid label_spectrum(const features::LabelMap& y) {
    return fft::forward(fft::ifftshift(y.data, y.cells_y, y.cells_x), y.cells_y, y.cells_x);
}

std::vector<ComplexGrid> feature_spectra(const features::FeatureMap& x) {
    std::vector<ComplexGrid> out;
    out.reserve(x.depth);
    for (int d = 0; d < x.depth; ++d) {
        std::vector<double> plane(x.plane(d), x.plane(d) + x.plane_size());
        out.push_back(fft::forward(plane, x.cells_y, x.cells_x));
    }
    return out;
}

// real(IDFT(sum_d conj(F^d) Z^d)) in raw indexing.
std::vector<double> correlation_surface(const std::vector<ComplexGrid>& filters,
                                        const std::vector<ComplexGrid>& z) {
    const int ny = filters[0].ny, nx = filters[0].nx;
    ComplexGrid acc(ny, nx);
    for (std::size_t d = 0; d < filters.size(); ++d)
        for (std::size_t i = 0; i < acc.data.size(); ++i)
            acc.data[i] += std::conj(filters[d].data[i]) * z[d].data[i];
    return fft::inverse_real(acc);
}

} // namespace

double objective_value(const features::FeatureMap& x, const features::SpatialWeight& w,
                       const features::LabelMap& y, double mu,
                       const std::vector<ComplexGrid>* f_prev,
                       const std::vector<ComplexGrid>& filters) {
    const int ny = x.cells_y, nx = x.cells_x;
    const std::size_t n = static_cast<std::size_t>(ny) * nx;
    const auto xhat = feature_spectra(x);
    const std::vector<double> response = correlation_surface(filters, xhat);
    const std::vector<double> y0 = fft::ifftshift(y.data, ny, nx);

    double data_term = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = response[i] - y0[i];
        data_term += r * r;
    }
    double spatial_term = 0.0;
    double temporal_term = 0.0;
    for (std::size_t d = 0; d < filters.size(); ++d) {
        const std::vector<double> f = fft::inverse_real(filters[d]);
        std::vector<double> p;
        if (f_prev) p = fft::inverse_real((*f_prev)[d]);
        for (std::size_t i = 0; i < n; ++i) {
            const double wf = w.data[i] * f[i];
            spatial_term += wf * wf;
            if (f_prev) {
                const double df = f[i] - p[i];
                temporal_term += df * df;
            }
        }
    }
    return 0.5 * data_term + 0.5 * spatial_term + 0.5 * mu * temporal_term;
}

TemplateModel train_template(const features::FeatureMap& x, const TemplateModel* f_prev,
                             const features::SpatialWeight& w, const features::LabelMap& y,
                             double mu, int admm_iters, const AdmmParams& params,
                             std::vector<double>* objective_log) {
    check_dims(x, w, y);
    if (mu > 0.0 && (f_prev == nullptr || f_prev->filters.empty()))
        throw TrackerError("train_template: f_prev required when mu > 0");
    const int ny = x.cells_y, nx = x.cells_x;
    const int depth = x.depth;
    const std::size_t n = static_cast<std::size_t>(ny) * nx;

    const auto xhat = feature_spectra(x);
    const ComplexGrid yhat = label_spectrum(y);
    const std::vector<ComplexGrid>* prev = (f_prev && mu > 0.0) ? &f_prev->filters : nullptr;
    if (prev && (static_cast<int>(prev->size()) != depth || (*prev)[0].ny != ny ||
                 (*prev)[0].nx != nx))
        throw DimensionMismatch("previous template geometry disagrees with features");

    // precomputed per-bin channel energy sum_d |x^d_k|^2
    std::vector<double> x_energy(n, 0.0);
    for (int d = 0; d < depth; ++d)
        for (std::size_t i = 0; i < n; ++i) x_energy[i] += std::norm(xhat[d].data[i]);

    std::vector<ComplexGrid> f_hat(depth, ComplexGrid(ny, nx));
    std::vector<std::vector<double>> g(depth, std::vector<double>(n, 0.0));
    std::vector<std::vector<double>> dual(depth, std::vector<double>(n, 0.0));

    double gamma = params.penalty_init;
    for (int iter = 0; iter < admm_iters; ++iter) {
        // Filter subproblem, per frequency bin. The channel system is a
        // rank-1 update of a scaled identity; invert with Sherman-Morrison.
        std::vector<ComplexGrid> rhs(depth, ComplexGrid(ny, nx));
        for (int d = 0; d < depth; ++d) {
            std::vector<double> tmp(n);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = gamma * g[d][i] - dual[d][i];
            ComplexGrid gd_hat = fft::forward(tmp, ny, nx);
            for (std::size_t i = 0; i < n; ++i) {
                Cplx r = xhat[d].data[i] * std::conj(yhat.data[i]) + gd_hat.data[i];
                if (prev) r += mu * (*prev)[d].data[i];
                rhs[d].data[i] = r;
            }
        }
        const double c = mu + gamma;
        for (std::size_t i = 0; i < n; ++i) {
            Cplx xh_b(0.0, 0.0); // x_k^H b_k across channels
            for (int d = 0; d < depth; ++d) xh_b += std::conj(xhat[d].data[i]) * rhs[d].data[i];
            const Cplx corr = xh_b / (c + x_energy[i]);
            for (int d = 0; d < depth; ++d)
                f_hat[d].data[i] = (rhs[d].data[i] - xhat[d].data[i] * corr) / c;
        }

        // Spatial-weight subproblem and dual update, element-wise.
        for (int d = 0; d < depth; ++d) {
            const std::vector<double> f_spatial = fft::inverse_real(f_hat[d]);
            for (std::size_t i = 0; i < n; ++i) {
                const double wi = w.data[i];
                g[d][i] = (dual[d][i] + gamma * f_spatial[i]) / (wi * wi + gamma);
                dual[d][i] += gamma * (f_spatial[i] - g[d][i]);
            }
        }
        gamma = std::min(gamma * params.penalty_scale, params.penalty_max);

        if (objective_log)
            objective_log->push_back(objective_value(x, w, y, mu, prev, f_hat));
    }

    TemplateModel model;
    if (f_prev) model.geom = f_prev->geom;
    model.filters = std::move(f_hat);
    model.weight = w;
    model.label = y;
    if (f_prev) model.window = f_prev->window;
    model.mu = mu;

    // Zero-displacement self response, used to normalize proposal scores.
    const std::vector<double> self = correlation_surface(model.filters, xhat);
    model.self_response = self[0];
    return model;
}

ResponseMap respond(const TemplateModel& model, const features::FeatureMap& z) {
    if (z.cells_y != model.grid_y() || z.cells_x != model.grid_x() || z.depth != model.depth())
        throw DimensionMismatch("search features do not match template geometry");
    const int ny = z.cells_y, nx = z.cells_x;
    const auto zhat = feature_spectra(z);
    std::vector<double> raw = correlation_surface(model.filters, zhat);

    ResponseMap map;
    map.ny = ny;
    map.nx = nx;
    map.data = fft::fftshift(raw, ny, nx); // zero displacement at (ny/2, nx/2)

    int best = 0;
    for (std::size_t i = 1; i < map.data.size(); ++i)
        if (map.data[i] > map.data[best]) best = static_cast<int>(i);
    const int by = best / nx;
    const int bx = best % nx;
    map.peak_value = map.data[best];

    // quadratic sub-cell refinement, circular neighbors
    const auto at = [&](int y, int x) {
        y = (y % ny + ny) % ny;
        x = (x % nx + nx) % nx;
        return map.data[static_cast<std::size_t>(y) * nx + x];
    };
    const auto refine = [](double lo, double mid, double hi) {
        const double denom = lo - 2.0 * mid + hi;
        if (std::abs(denom) < 1e-12) return 0.0;
        double off = 0.5 * (lo - hi) / denom;
        return std::clamp(off, -0.5, 0.5);
    };
    map.peak_x = bx + refine(at(by, bx - 1), at(by, bx), at(by, bx + 1));
    map.peak_y = by + refine(at(by - 1, bx), at(by, bx), at(by + 1, bx));
    return map;
}

Proposal propose_appearance(const TemplateModel& model, const Frame& frame,
                            const BoundingBox& prev_box,
                            const std::vector<double>& scale_factors, double scale_penalty,
                            const FeatureOptions& opts) {
    const ModelGeometry& geom = model.geom;
    double best_score = -std::numeric_limits<double>::infinity();
    double best_raw = 0.0;
    double best_scale = 1.0;
    double best_dx = 0.0, best_dy = 0.0;

    for (double scale : scale_factors) {
        const Patch patch = media::extract_patch(frame, prev_box, geom.padding * scale,
                                                 geom.sample_w, geom.sample_h);
        features::FeatureMap z =
            features::extract_features(patch, geom.cell_size, opts.use_cn, opts.cn_table);
        features::apply_window(z, model.window);
        const ResponseMap response = respond(model, z);

        const bool unit = std::abs(scale - 1.0) < 1e-12;
        const double penalized = unit ? response.peak_value : response.peak_value / scale_penalty;
        if (penalized > best_score) {
            best_score = penalized;
            best_raw = response.peak_value;
            best_scale = scale;
            // cells -> pixels at this scale
            const double px_per_cell_x =
                geom.cell_size * (geom.padding * scale * prev_box.w) / geom.sample_w;
            const double px_per_cell_y =
                geom.cell_size * (geom.padding * scale * prev_box.h) / geom.sample_h;
            best_dx = (response.peak_x - geom.grid_x() / 2) * px_per_cell_x;
            best_dy = (response.peak_y - geom.grid_y() / 2) * px_per_cell_y;
        }
    }

    Proposal proposal;
    proposal.source = ProposalSource::appearance;
    proposal.box = BoundingBox(prev_box.cx + best_dx, prev_box.cy + best_dy,
                               prev_box.w * best_scale, prev_box.h * best_scale);
    proposal.score = best_raw;
    return proposal;
}

double adaptive_mu(ProposalSource chosen_source, double score, double t_hi, double t_lo,
                   double mu_app, double mu_high, double mu_mid, double mu_low) {
    if (chosen_source == ProposalSource::appearance) return mu_app;
    if (score >= t_hi) return mu_high;
    if (score >= t_lo) return mu_mid;
    return mu_low;
}

bool should_update(double displacement, double min_motion) {
    return displacement >= min_motion;
}

std::vector<double> scale_ladder(double step, int count) {
    std::vector<double> scales(count);
    const int half = (count - 1) / 2;
    for (int i = 0; i < count; ++i) scales[i] = std::pow(step, i - half);
    if (count % 2 == 1) scales[half] = 1.0;
    return scales;
}

} // namespace uhpsot::strcf
