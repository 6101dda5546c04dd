#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uhpsot/bgmotion.hpp"
#include "uhpsot/box.hpp"
#include "uhpsot/image.hpp"

namespace uhpsot::evalkit {

/// One leg of the object's motion program.
struct MotionSegment {
    int from_frame = 0;     // segment applies from this frame on
    double vx = 0.0;        // px per frame
    double vy = 0.0;
    double scale_per_frame = 1.0; // multiplicative size ramp
};

/// A rectangle drawn over the scene during [start, end] (inclusive).
struct OcclusionWindow {
    int start = 0;
    int end = -1;
    BoundingBox region;
};

/// Deterministic synthetic-sequence description; `seed` fixes all randomness.
struct SynthSpec {
    std::string name = "synth";
    int frames = 60;
    int width = 320;
    int height = 240;
    BoundingBox object{160.0, 120.0, 40.0, 40.0}; // initial box
    std::vector<MotionSegment> motion;            // defaults to static
    std::vector<OcclusionWindow> occlusions;
    bgmotion::AffineModel camera;                 // per-frame background map
    double noise_sigma = 0.0;                     // additive, 8-bit units
    std::uint32_t seed = 1;
    double min_inside = 0.5; // required visible fraction of the object
};

struct SynthSequence {
    std::vector<Frame> frames;
    std::vector<BoundingBox> ground_truth;
};

/// Render a textured rectangle over a textured background, moving the object
/// by the motion program and the background by the camera model. Ground truth
/// follows the program exactly. Raises SpecInfeasible if the object leaves
/// the frame beyond the allowed margin.
SynthSequence generate_synthetic(const SynthSpec& spec);

/// Ground-truth trace alone (no rendering).
std::vector<BoundingBox> synthetic_ground_truth(const SynthSpec& spec);

/// Write the sequence in OTB layout: img/%04d.png + groundtruth_rect.txt.
void write_otb_sequence(const SynthSequence& seq, const std::string& out_dir);

SynthSpec synth_spec_from_json_text(const std::string& text);
SynthSpec load_synth_spec(const std::string& path);
std::string synth_spec_to_json_text(const SynthSpec& spec);

} // namespace uhpsot::evalkit
