#include "uhpsot/tracker_config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "uhpsot/errors.hpp"

namespace uhpsot {

Variant parse_variant(const std::string& name) {
    if (name == "full") return Variant::full;
    if (name == "no_trajectory") return Variant::no_trajectory;
    if (name == "no_background") return Variant::no_background;
    if (name == "baseline") return Variant::baseline;
    throw UnknownVariant("unknown variant: " + name);
}

std::string to_string(Variant variant) {
    switch (variant) {
        case Variant::full: return "full";
        case Variant::no_trajectory: return "no_trajectory";
        case Variant::no_background: return "no_background";
        case Variant::baseline: return "baseline";
    }
    return "full";
}

TrackerConfig configure_variant(TrackerConfig config, Variant variant) {
    switch (variant) {
        case Variant::full:
            config.enable_trajectory = true;
            config.enable_background = true;
            config.fixed_mu = -1.0;
            break;
        case Variant::no_trajectory: // UHP-SOT-I
            config.enable_trajectory = false;
            config.enable_background = true;
            config.fixed_mu = -1.0;
            break;
        case Variant::no_background: // UHP-SOT-II
            config.enable_trajectory = true;
            config.enable_background = false;
            config.fixed_mu = -1.0;
            break;
        case Variant::baseline: // plain STRCF
            config.enable_trajectory = false;
            config.enable_background = false;
            config.fixed_mu = config.mu_appearance;
            break;
    }
    return config;
}

TrackerConfig configure_variant(TrackerConfig config, const std::string& variant) {
    return configure_variant(std::move(config), parse_variant(variant));
}

namespace {

using nlohmann::json;

// Single description of the flat key set; keeps load and save in sync.
template <typename Visitor>
void visit_fields(TrackerConfig& c, Visitor&& v) {
    v("cell_size", c.cell_size);
    v("use_cn", c.use_cn);
    v("cn_table_path", c.cn_table_path);
    v("sigma_factor", c.sigma_factor);
    v("w_min", c.w_min);
    v("w_slope", c.w_slope);
    v("search_area_scale", c.search_area_scale);
    v("max_sample_area", c.max_sample_area);
    v("scale_step", c.scale_step);
    v("num_scales", c.num_scales);
    v("scale_penalty", c.scale_penalty);
    v("admm_iters", c.admm_iters);
    v("admm_penalty_init", c.admm_penalty_init);
    v("admm_penalty_scale", c.admm_penalty_scale);
    v("admm_penalty_max", c.admm_penalty_max);
    v("mu_appearance", c.mu_appearance);
    v("mu_high", c.mu_high);
    v("mu_mid", c.mu_mid);
    v("mu_low", c.mu_low);
    v("mu_score_hi", c.mu_score_hi);
    v("mu_score_lo", c.mu_score_lo);
    v("agreement_mu", c.agreement_mu);
    v("fixed_mu", c.fixed_mu);
    v("min_motion", c.min_motion);
    v("trajectory_capacity", c.trajectory_capacity);
    v("deviation_tolerance", c.deviation_tolerance);
    v("jump_threshold", c.jump_threshold);
    v("score_margin", c.score_margin);
    v("agreement_iou", c.agreement_iou);
    v("same_location_tol", c.same_location_tol);
    v("anchor_agreement_iou", c.anchor_agreement_iou);
    v("bg_max_side", c.bg_max_side);
    v("bg_max_keypoints", c.bg_max_keypoints);
    v("bg_nms_radius", c.bg_nms_radius);
    v("bg_match_radius", c.bg_match_radius);
    v("bg_match_patch", c.bg_match_patch);
    v("bg_min_ncc", c.bg_min_ncc);
    v("bg_trim_residual", c.bg_trim_residual);
    v("bg_rel_threshold", c.bg_rel_threshold);
    v("bg_min_area", c.bg_min_area);
    v("bg_exclusion_pad", c.bg_exclusion_pad);
    v("cut_threshold", c.cut_threshold);
    v("enable_trajectory", c.enable_trajectory);
    v("enable_background", c.enable_background);
}

} // namespace

TrackerConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw IoError("config must be a JSON object");

    TrackerConfig config;
    std::set<std::string> known;
    visit_fields(config, [&](const char* key, auto& field) {
        known.insert(key);
        if (!j.contains(key)) return;
        try {
            field = j.at(key).get<std::decay_t<decltype(field)>>();
        } catch (const json::exception& e) {
            throw IoError(std::string("config key '") + key + "': " + e.what());
        }
    });
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw IoError("unknown config key: " + key);
    return config;
}

TrackerConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json_text(buf.str());
}

std::string config_to_json_text(const TrackerConfig& config) {
    json j = json::object();
    visit_fields(const_cast<TrackerConfig&>(config),
                 [&](const char* key, auto& field) { j[key] = field; });
    return j.dump(2);
}

} // namespace uhpsot
