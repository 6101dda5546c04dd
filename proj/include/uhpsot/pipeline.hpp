#pragma once

#include <memory>
#include <optional>

#include "uhpsot/bgmotion.hpp"
#include "uhpsot/media_io.hpp"
#include "uhpsot/strcf.hpp"
#include "uhpsot/tracker_config.hpp"
#include "uhpsot/trajectory.hpp"

namespace uhpsot::pipeline {

/// Pick the final box from the per-module proposals. General rule: highest
/// score. Special rule: when the appearance box wins but jumped more than
/// `jump_threshold` px from the last box while the trajectory box has a close
/// score and agrees with the background box, take the trajectory box instead.
/// In no-background mode the agreement condition is waived (naive correction).
Proposal fuse(const Proposal& p_app, const std::optional<Proposal>& p_trj,
              const std::optional<Proposal>& p_bgd, const BoundingBox& last_box,
              const TrackerConfig& config);

/// Correlation score of a box against a template: features at the box,
/// window, zero-displacement response, normalized by the template's stored
/// self-response so the two models are comparable.
double score_proposal(const strcf::TemplateModel& model, const Frame& frame,
                      const BoundingBox& box, const strcf::FeatureOptions& opts);

/// Per-frame record of what the tracker did, for tests and audit logs.
struct StepTrace {
    std::optional<Proposal> appearance;
    std::optional<Proposal> trajectory;
    std::optional<Proposal> background;
    Proposal chosen;
    bool anchor_updated = false;
    bool template_updated = false;
    double mu = 0.0;
};

/// One tracker instance tied to one sequence. Holds the dual templates
/// (latest f_{t-1} and anchor f_i), the trajectory buffer, and the previous
/// frame for background motion.
class Tracker {
public:
    explicit Tracker(const TrackerConfig& config);
    ~Tracker();
    Tracker(Tracker&&) noexcept;
    Tracker& operator=(Tracker&&) noexcept;

    /// Train on the first frame with mu = 0; the anchor starts as a copy.
    void init(const Frame& frame, const BoundingBox& box);

    /// Run one frame through all three modules, fuse, and update the models.
    /// Module failures drop that proposal; step never throws for them.
    BoundingBox step(const Frame& frame);

    bool initialized() const;
    const BoundingBox& last_box() const;
    const TrackerConfig& config() const;
    const strcf::TemplateModel& latest_model() const;
    const strcf::TemplateModel& anchor_model() const;
    int anchor_frame() const;
    int current_frame() const;
    const trajectory::TrajectoryBuffer& trajectory_buffer() const;
    const StepTrace& last_trace() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace uhpsot::pipeline
