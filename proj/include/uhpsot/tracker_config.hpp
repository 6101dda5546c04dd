#pragma once

#include <string>

namespace uhpsot {

enum class Variant { full, no_trajectory, no_background, baseline };

Variant parse_variant(const std::string& name);
std::string to_string(Variant variant);

/// Every tunable of the tracker, mirrored 1:1 by the flat JSON config keys
/// documented in the README. Defaults reproduce the reference setup.
struct TrackerConfig {
    // features
    int cell_size = 4;
    bool use_cn = true;
    std::string cn_table_path;      // optional binary table override
    double sigma_factor = 1.0 / 16.0;
    double w_min = 0.1;
    double w_slope = 3.0;

    // sampling geometry
    double search_area_scale = 5.0; // target-area multiple of the search region
    double max_sample_area = 200.0 * 200.0;

    // scale search
    double scale_step = 1.02;
    int num_scales = 5;
    double scale_penalty = 1.025;

    // solver
    int admm_iters = 2;
    double admm_penalty_init = 1.0;
    double admm_penalty_scale = 10.0;
    double admm_penalty_max = 10000.0;

    // regularization schedule
    double mu_appearance = 15.0;
    double mu_high = 10.0;
    double mu_mid = 5.0;
    double mu_low = 0.0;
    double mu_score_hi = 0.25;
    double mu_score_lo = 0.12;
    double agreement_mu = 5.0;      // smallest non-zero mu, used when all modules agree
    double fixed_mu = -1.0;         // >= 0 pins mu (baseline variant)
    double min_motion = 0.5;        // px gate for template updates

    // trajectory
    int trajectory_capacity = 20;   // N
    double deviation_tolerance = 0.25;

    // fusion
    double jump_threshold = 30.0;   // px
    double score_margin = 0.05;
    double agreement_iou = 0.5;     // B_trj vs B_bgd in the special rule
    double same_location_tol = 2.0; // px, anchor-update agreement
    double anchor_agreement_iou = 0.8;

    // background module
    int bg_max_side = 320;
    int bg_max_keypoints = 80;
    double bg_nms_radius = 8.0;
    int bg_match_radius = 10;
    int bg_match_patch = 11;
    double bg_min_ncc = 0.6;
    double bg_trim_residual = 3.0;
    double bg_rel_threshold = 0.2;
    int bg_min_area = 25;
    double bg_exclusion_pad = 1.5;
    double cut_threshold = 0.1;

    // module switches
    bool enable_trajectory = true;
    bool enable_background = true;
};

/// Apply a variant on top of a config: full, no_trajectory (UHP-SOT-I),
/// no_background (UHP-SOT-II) or baseline (STRCF only, fixed mu = 15).
TrackerConfig configure_variant(TrackerConfig config, Variant variant);
TrackerConfig configure_variant(TrackerConfig config, const std::string& variant);

/// Flat-key JSON round trip. Unknown keys raise.
TrackerConfig load_config(const std::string& path);
TrackerConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const TrackerConfig& config);

} // namespace uhpsot
