#include "uhpsot/pipeline.hpp"

#include <cmath>

#include "uhpsot/errors.hpp"

namespace uhpsot::pipeline {

namespace {

const Proposal* highest(const std::vector<const Proposal*>& candidates) {
    const Proposal* best = nullptr;
    for (const Proposal* p : candidates)
        if (p && (!best || p->score > best->score)) best = p;
    return best;
}

} // namespace

Proposal fuse(const Proposal& p_app, const std::optional<Proposal>& p_trj,
              const std::optional<Proposal>& p_bgd, const BoundingBox& last_box,
              const TrackerConfig& config) {
    std::vector<const Proposal*> candidates = {&p_app};
    if (p_trj) candidates.push_back(&*p_trj);
    if (p_bgd) candidates.push_back(&*p_bgd);
    const Proposal* best = highest(candidates);

    // Special rule: the appearance box wins but jumped; a trajectory box with
    // a close score that the background box confirms is taken instead. In
    // no-background mode the confirmation is waived (naive correction).
    if (best == &p_app && p_trj) {
        const bool close_score = p_trj->score >= p_app.score - config.score_margin;
        const bool sudden_jump = center_distance(p_app.box, last_box) > config.jump_threshold;
        const bool agrees = config.enable_background
                                ? (p_bgd && box_iou(p_trj->box, p_bgd->box) >= config.agreement_iou)
                                : true;
        if (close_score && sudden_jump && agrees) return *p_trj;
    }
    return *best;
}

double score_proposal(const strcf::TemplateModel& model, const Frame& frame,
                      const BoundingBox& box, const strcf::FeatureOptions& opts) {
    const strcf::ModelGeometry& geom = model.geom;
    const Patch patch =
        media::extract_patch(frame, box, geom.padding, geom.sample_w, geom.sample_h);
    features::FeatureMap z =
        features::extract_features(patch, geom.cell_size, opts.use_cn, opts.cn_table);
    features::apply_window(z, model.window);
    const strcf::ResponseMap response = strcf::respond(model, z);
    const double center_value = response.at(response.ny / 2, response.nx / 2);
    if (model.self_response <= 1e-12) return center_value;
    return center_value / model.self_response;
}

struct Tracker::Impl {
    TrackerConfig config;
    strcf::FeatureOptions feature_opts;
    features::CnTable cn_override;
    strcf::AdmmParams admm;
    std::vector<double> scale_factors;

    bool initialized = false;
    int frame_index = 0;
    strcf::TemplateModel latest;
    strcf::TemplateModel anchor;
    int anchor_frame = 0;
    trajectory::TrajectoryBuffer traj{20};
    BoundingBox last_box;
    double last_update_cx = 0.0;
    double last_update_cy = 0.0;
    GrayImage prev_gray;
    GrayImage prev_gray_small;
    double bg_scale = 1.0;
    StepTrace trace;

    explicit Impl(const TrackerConfig& cfg)
        : config(cfg), traj(cfg.trajectory_capacity) {
        admm.penalty_init = cfg.admm_penalty_init;
        admm.penalty_scale = cfg.admm_penalty_scale;
        admm.penalty_max = cfg.admm_penalty_max;
        scale_factors = strcf::scale_ladder(cfg.scale_step, cfg.num_scales);
        feature_opts.use_cn = cfg.use_cn;
        if (!cfg.cn_table_path.empty()) {
            cn_override = features::load_cn_table(cfg.cn_table_path);
            feature_opts.cn_table = &cn_override;
        }
    }

    features::FeatureMap features_at(const Frame& frame, const BoundingBox& box) const {
        const Patch patch = media::extract_patch(frame, box, latest.geom.padding,
                                                 latest.geom.sample_w, latest.geom.sample_h);
        features::FeatureMap map = features::extract_features(
            patch, latest.geom.cell_size, feature_opts.use_cn, feature_opts.cn_table);
        features::apply_window(map, latest.window);
        return map;
    }

    void init(const Frame& frame, const BoundingBox& box) {
        if (!box.valid()) throw DegenerateBox("invalid init box");
        const int cell = config.cell_size;
        const double pad = std::sqrt(config.search_area_scale);
        const double region_w = box.w * pad;
        const double region_h = box.h * pad;
        const double area = region_w * region_h;
        const double shrink = area > config.max_sample_area
                                  ? std::sqrt(config.max_sample_area / area)
                                  : 1.0;
        const auto to_cells = [cell](double px) {
            return std::max(4, static_cast<int>(std::round(px / cell)));
        };
        const int grid_x = to_cells(region_w * shrink);
        const int grid_y = to_cells(region_h * shrink);

        strcf::ModelGeometry geom;
        geom.cell_size = cell;
        geom.padding = pad;
        geom.sample_w = grid_x * cell;
        geom.sample_h = grid_y * cell;

        const double target_w_cells = geom.sample_w / (pad * cell);
        const double target_h_cells = geom.sample_h / (pad * cell);
        const features::LabelMap label =
            features::gaussian_label(grid_y, grid_x, config.sigma_factor, target_w_cells,
                                     target_h_cells);
        const features::SpatialWeight weight = features::spatial_weight(
            grid_y, grid_x, target_w_cells, target_h_cells, config.w_min, config.w_slope);

        // bootstrap geometry/window through a seed model so train_template
        // can carry them over
        strcf::TemplateModel seed;
        seed.geom = geom;
        seed.window = features::cosine_window(grid_y, grid_x);

        latest = seed; // install geometry for features_at
        const features::FeatureMap x = features_at(frame, box);
        strcf::TemplateModel trained =
            strcf::train_template(x, &seed, weight, label, 0.0, config.admm_iters, admm);
        trained.geom = geom;
        trained.window = seed.window;
        trained.trained_at = 0;
        latest = std::move(trained);
        anchor = latest;
        anchor_frame = 0;

        traj = trajectory::TrajectoryBuffer(config.trajectory_capacity);
        traj.push(box);
        last_box = box;
        last_update_cx = box.cx;
        last_update_cy = box.cy;
        frame_index = 0;
        prev_gray = media::to_grayscale(frame);
        refresh_small();
        initialized = true;
        trace = StepTrace{};
    }

    void refresh_small() {
        const int max_side = std::max(prev_gray.width, prev_gray.height);
        bg_scale = max_side > config.bg_max_side
                       ? static_cast<double>(config.bg_max_side) / max_side
                       : 1.0;
        if (bg_scale < 1.0)
            prev_gray_small = media::resize_gray(
                prev_gray, std::max(1, static_cast<int>(std::round(prev_gray.width * bg_scale))),
                std::max(1, static_cast<int>(std::round(prev_gray.height * bg_scale))));
        else
            prev_gray_small = prev_gray;
    }

    std::optional<Proposal> background_proposal(const GrayImage& curr_small) {
        try {
            const double s = bg_scale;
            const BoundingBox excl(last_box.cx * s, last_box.cy * s, last_box.w * s,
                                   last_box.h * s);
            const auto points =
                bgmotion::detect_keypoints(prev_gray_small, config.bg_max_keypoints, excl,
                                           config.bg_nms_radius, config.bg_exclusion_pad);
            const auto matches =
                bgmotion::match_points(prev_gray_small, curr_small, points, config.bg_match_radius,
                                       config.bg_match_patch, config.bg_min_ncc);
            const auto fit = bgmotion::fit_affine(matches, config.bg_trim_residual);
            auto [warped, mask] = bgmotion::warp_image(prev_gray_small, fit.model);
            const auto dmap = bgmotion::diff_map(warped, curr_small, mask);
            auto proposal =
                bgmotion::propose_background(dmap, excl, config.bg_rel_threshold,
                                             config.bg_min_area);
            if (!proposal) return std::nullopt;

            // shape from the residual profiles, unless it deviates from the
            // size trajectory
            double out_w = last_box.w;
            double out_h = last_box.h;
            try {
                const auto shape =
                    bgmotion::estimate_shape(dmap, proposal->box, config.cut_threshold);
                bgmotion::ShapeEstimate full = shape;
                full.width = shape.width / s;
                full.height = shape.height / s;
                if (!trajectory::reject_deviation(full, traj, config.deviation_tolerance)) {
                    out_w = full.width;
                    out_h = full.height;
                }
            } catch (const NoShape&) {
            }
            proposal->box = BoundingBox(proposal->box.cx / s, proposal->box.cy / s, out_w, out_h);
            return proposal;
        } catch (const TrackerError&) {
            return std::nullopt; // module failure drops the proposal
        }
    }

    BoundingBox step(const Frame& frame) {
        if (!initialized) throw TrackerError("step before init");
        ++frame_index;
        trace = StepTrace{};
        const GrayImage gray = media::to_grayscale(frame);
        GrayImage gray_small;
        if (config.enable_background) {
            if (bg_scale < 1.0)
                gray_small = media::resize_gray(gray, prev_gray_small.width,
                                                prev_gray_small.height);
            else
                gray_small = gray;
        }

        // (1) appearance proposal
        std::optional<Proposal> p_app;
        try {
            p_app = strcf::propose_appearance(latest, frame, last_box, scale_factors,
                                              config.scale_penalty, feature_opts);
        } catch (const TrackerError&) {
        }

        // (2) trajectory proposal
        std::optional<Proposal> p_trj;
        if (config.enable_trajectory) {
            Proposal t;
            t.source = ProposalSource::trajectory;
            double cx = last_box.cx, cy = last_box.cy;
            double w = last_box.w, h = last_box.h;
            try {
                std::tie(cx, cy) = trajectory::predict_center(traj);
                std::tie(w, h) = trajectory::predict_size(traj);
            } catch (const InsufficientHistory&) {
            }
            t.box = BoundingBox(cx, cy, w, h);
            p_trj = t;
        }

        // (3) background proposal
        std::optional<Proposal> p_bgd;
        if (config.enable_background) p_bgd = background_proposal(gray_small);

        // (4) correlation scores: (f_{t-1}, B_app), (f_{t-1}, B_trj), (f_i, B_bgd)
        if (p_app) p_app->score = score_proposal(latest, frame, p_app->box, feature_opts);
        if (p_trj) p_trj->score = score_proposal(latest, frame, p_trj->box, feature_opts);
        if (p_bgd) p_bgd->score = score_proposal(anchor, frame, p_bgd->box, feature_opts);

        // (5) fuse
        Proposal chosen;
        if (p_app) {
            chosen = fuse(*p_app, p_trj, p_bgd, last_box, config);
        } else if (p_trj || p_bgd) {
            std::vector<const Proposal*> rest;
            if (p_trj) rest.push_back(&*p_trj);
            if (p_bgd) rest.push_back(&*p_bgd);
            chosen = *highest(rest);
        } else {
            chosen.box = last_box; // every module failed; hold position
            chosen.source = ProposalSource::appearance;
            chosen.score = 0.0;
        }

        // (6) anchor refresh when all three boxes land on the same location
        bool agree = false;
        if (p_app && p_trj && p_bgd) {
            const auto same = [&](const BoundingBox& a, const BoundingBox& b) {
                return center_distance(a, b) <= config.same_location_tol &&
                       box_iou(a, b) >= config.anchor_agreement_iou;
            };
            agree = same(p_app->box, p_trj->box) && same(p_app->box, p_bgd->box) &&
                    same(p_trj->box, p_bgd->box);
            if (agree) {
                anchor = latest;
                anchor_frame = latest.trained_at;
                trace.anchor_updated = true;
            }
        }

        // (7) regularization for this frame's update
        double mu;
        if (config.fixed_mu >= 0.0)
            mu = config.fixed_mu;
        else if (agree)
            mu = config.agreement_mu;
        else
            mu = strcf::adaptive_mu(chosen.source, chosen.score, config.mu_score_hi,
                                    config.mu_score_lo, config.mu_appearance, config.mu_high,
                                    config.mu_mid, config.mu_low);

        // (8) template update, gated on observed motion
        const double moved = std::hypot(chosen.box.cx - last_update_cx,
                                        chosen.box.cy - last_update_cy);
        if (strcf::should_update(moved, config.min_motion)) {
            try {
                const features::FeatureMap x = features_at(frame, chosen.box);
                strcf::TemplateModel updated =
                    strcf::train_template(x, &latest, latest.weight, latest.label, mu,
                                          config.admm_iters, admm);
                updated.trained_at = frame_index;
                latest = std::move(updated);
                last_update_cx = chosen.box.cx;
                last_update_cy = chosen.box.cy;
                trace.template_updated = true;
            } catch (const TrackerError&) {
            }
        }

        // (9) commit
        traj.push(chosen.box);
        last_box = chosen.box;
        prev_gray = gray;
        if (config.enable_background) prev_gray_small = std::move(gray_small);

        trace.appearance = p_app;
        trace.trajectory = p_trj;
        trace.background = p_bgd;
        trace.chosen = chosen;
        trace.mu = mu;
        return chosen.box;
    }
};

Tracker::Tracker(const TrackerConfig& config) : impl_(std::make_unique<Impl>(config)) {}
Tracker::~Tracker() = default;
Tracker::Tracker(Tracker&&) noexcept = default;
Tracker& Tracker::operator=(Tracker&&) noexcept = default;

void Tracker::init(const Frame& frame, const BoundingBox& box) { impl_->init(frame, box); }
BoundingBox Tracker::step(const Frame& frame) { return impl_->step(frame); }
bool Tracker::initialized() const { return impl_->initialized; }
const BoundingBox& Tracker::last_box() const { return impl_->last_box; }
const TrackerConfig& Tracker::config() const { return impl_->config; }
const strcf::TemplateModel& Tracker::latest_model() const { return impl_->latest; }
const strcf::TemplateModel& Tracker::anchor_model() const { return impl_->anchor; }
int Tracker::anchor_frame() const { return impl_->anchor_frame; }
int Tracker::current_frame() const { return impl_->frame_index; }
const trajectory::TrajectoryBuffer& Tracker::trajectory_buffer() const { return impl_->traj; }
const StepTrace& Tracker::last_trace() const { return impl_->trace; }

} // namespace uhpsot::pipeline
