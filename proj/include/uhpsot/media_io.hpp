#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "uhpsot/box.hpp"
#include "uhpsot/image.hpp"

namespace uhpsot::media {

/// Description of one image sequence in OTB layout.
struct SequenceSpec {
    std::string name;
    std::vector<std::string> frame_paths;          // sorted by numeric filename
    std::optional<std::vector<BoundingBox>> ground_truth; // one box per frame when present
    std::set<std::string> attributes;              // subset of the 11 OTB tags
};

/// The 11 OTB attribute tags.
const std::set<std::string>& known_attributes();

/// Parse a groundtruth_rect.txt payload: one "x,y,w,h" record per line
/// (comma, tab or space separated, top-left corner convention).
std::vector<BoundingBox> parse_groundtruth(const std::string& text);

/// Serialize boxes back to the same convention (inverse of parse_groundtruth).
std::string serialize_groundtruth(const std::vector<BoundingBox>& boxes);

/// Scan `<root>/img/*` for numerically named images, read the optional
/// ground truth and attribute files.
SequenceSpec load_sequence(const std::string& root_path);

/// Decode one image file to an RGB frame. `index` is stored on the frame.
Frame load_frame(const std::string& path, int index = 0);

/// Encode a frame as PNG/JPEG depending on the path extension.
void save_frame(const Frame& frame, const std::string& path);

/// BT.601 luma, scaled to [0, 1].
GrayImage to_grayscale(const Frame& frame);

/// Crop a `padding*w x padding*h` region centered on `box` and resample it
/// bilinearly to `out_w x out_h`. Out-of-frame pixels replicate the edge.
Patch extract_patch(const Frame& frame, const BoundingBox& box, double padding,
                    int out_w, int out_h);
Patch extract_patch(const GrayImage& image, const BoundingBox& box, double padding,
                    int out_w, int out_h);

/// Nearest-neighbour-free downscale used by the background module.
GrayImage resize_gray(const GrayImage& src, int out_w, int out_h);

} // namespace uhpsot::media
