#include "uhpsot/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

#include "uhpsot/errors.hpp"
#include "uhpsot/media_io.hpp"

namespace fs = std::filesystem;

namespace uhpsot::evalkit {

namespace {

// Deterministic helpers on top of the mt19937 stream; distribution classes
// are avoided since their output is implementation-defined.
double uniform01(std::mt19937& rng) { return (rng() >> 8) * (1.0 / 16777216.0); }

double uniform(std::mt19937& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

double gaussian(std::mt19937& rng) {
    double u1 = uniform01(rng);
    if (u1 < 1e-12) u1 = 1e-12;
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

struct Texture {
    int width = 0;
    int height = 0;
    std::vector<double> rgb; // 3 planes

    Texture(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0.0) {}

    double& at(int x, int y, int c) {
        return rgb[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    double at(int x, int y, int c) const {
        return rgb[(static_cast<std::size_t>(c) * height + y) * width + x];
    }

    double sample(double x, double y, int c) const {
        const auto cl = [](int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); };
        const int x0 = static_cast<int>(std::floor(x));
        const int y0 = static_cast<int>(std::floor(y));
        const double fx = x - x0, fy = y - y0;
        const int x0c = cl(x0, width - 1), x1c = cl(x0 + 1, width - 1);
        const int y0c = cl(y0, height - 1), y1c = cl(y0 + 1, height - 1);
        return (1 - fy) * ((1 - fx) * at(x0c, y0c, c) + fx * at(x1c, y0c, c)) +
               fy * ((1 - fx) * at(x0c, y1c, c) + fx * at(x1c, y1c, c));
    }
};

// Random tile mosaic; tiles give Harris corners and HOG structure.
Texture mosaic(std::mt19937& rng, int w, int h, int tile, double lo, double hi) {
    Texture tex(w, h);
    const int tx = (w + tile - 1) / tile;
    const int ty = (h + tile - 1) / tile;
    std::vector<std::array<double, 3>> colors(static_cast<std::size_t>(tx) * ty);
    for (auto& c : colors) c = {uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi)};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const auto& c = colors[static_cast<std::size_t>(y / tile) * tx + x / tile];
            for (int ch = 0; ch < 3; ++ch) tex.at(x, y, ch) = c[ch];
        }
    return tex;
}

const MotionSegment* active_segment(const std::vector<MotionSegment>& motion, int frame) {
    const MotionSegment* seg = nullptr;
    for (const auto& m : motion)
        if (m.from_frame <= frame && (!seg || m.from_frame >= seg->from_frame)) seg = &m;
    return seg;
}

} // namespace

std::vector<BoundingBox> synthetic_ground_truth(const SynthSpec& spec) {
    std::vector<BoundingBox> gt;
    gt.reserve(spec.frames);
    BoundingBox box = spec.object;
    for (int t = 0; t < spec.frames; ++t) {
        if (t > 0) {
            const MotionSegment* seg = active_segment(spec.motion, t - 1);
            if (seg) {
                box.cx += seg->vx;
                box.cy += seg->vy;
                box.w *= seg->scale_per_frame;
                box.h *= seg->scale_per_frame;
            }
        }
        const BoundingBox frame_box(spec.width / 2.0, spec.height / 2.0,
                                    static_cast<double>(spec.width),
                                    static_cast<double>(spec.height));
        const double inside = intersection_area(box, frame_box) / box.area();
        if (inside < spec.min_inside)
            throw SpecInfeasible("object leaves the frame at t=" + std::to_string(t) +
                                 " (visible fraction " + std::to_string(inside) + ")");
        gt.push_back(box);
    }
    return gt;
}

SynthSequence generate_synthetic(const SynthSpec& spec) {
    SynthSequence seq;
    seq.ground_truth = synthetic_ground_truth(spec);

    std::mt19937 rng(spec.seed);
    const int margin = 256; // camera motion head room
    Texture background =
        mosaic(rng, spec.width + 2 * margin, spec.height + 2 * margin, 16, 0.15, 0.55);
    Texture object_tex = mosaic(rng, 64, 64, 8, 0.55, 1.0);
    Texture occluder_tex = mosaic(rng, 64, 64, 12, 0.05, 0.35);
    std::mt19937 noise_rng(spec.seed ^ 0x9e3779b9u);

    bgmotion::AffineModel cam_inv = bgmotion::AffineModel::identity();
    const bgmotion::AffineModel step_inv = spec.camera.inverse();

    seq.frames.reserve(spec.frames);
    for (int t = 0; t < spec.frames; ++t) {
        if (t > 0) {
            // accumulate the inverse so each frame resamples the base texture
            const bgmotion::AffineModel prev = cam_inv;
            bgmotion::AffineModel next;
            next.a1 = prev.a1 * step_inv.a1 + prev.a2 * step_inv.b1;
            next.a2 = prev.a1 * step_inv.a2 + prev.a2 * step_inv.b2;
            next.a0 = prev.a1 * step_inv.a0 + prev.a2 * step_inv.b0 + prev.a0;
            next.b1 = prev.b1 * step_inv.a1 + prev.b2 * step_inv.b1;
            next.b2 = prev.b1 * step_inv.a2 + prev.b2 * step_inv.b2;
            next.b0 = prev.b1 * step_inv.a0 + prev.b2 * step_inv.b0 + prev.b0;
            cam_inv = next;
        }

        Frame frame(spec.width, spec.height);
        frame.index = t;
        const BoundingBox& box = seq.ground_truth[t];

        for (int y = 0; y < spec.height; ++y)
            for (int x = 0; x < spec.width; ++x) {
                const bgmotion::Point2d src =
                    cam_inv.apply({static_cast<double>(x), static_cast<double>(y)});
                double rgb[3];
                for (int c = 0; c < 3; ++c)
                    rgb[c] = background.sample(src.x + margin, src.y + margin, c);

                // object on top of the background
                if (x + 0.5 > box.x_min() && x + 0.5 < box.x_max() && y + 0.5 > box.y_min() &&
                    y + 0.5 < box.y_max()) {
                    const double u = (x + 0.5 - box.x_min()) / box.w;
                    const double v = (y + 0.5 - box.y_min()) / box.h;
                    for (int c = 0; c < 3; ++c)
                        rgb[c] = object_tex.sample(u * (object_tex.width - 1),
                                                   v * (object_tex.height - 1), c);
                }

                // occluders on top of everything
                for (const auto& occ : spec.occlusions) {
                    if (t < occ.start || t > occ.end) continue;
                    const BoundingBox& r = occ.region;
                    if (x + 0.5 > r.x_min() && x + 0.5 < r.x_max() && y + 0.5 > r.y_min() &&
                        y + 0.5 < r.y_max()) {
                        const double u = (x + 0.5 - r.x_min()) / r.w;
                        const double v = (y + 0.5 - r.y_min()) / r.h;
                        for (int c = 0; c < 3; ++c)
                            rgb[c] = occluder_tex.sample(u * (occluder_tex.width - 1),
                                                         v * (occluder_tex.height - 1), c);
                    }
                }

                for (int c = 0; c < 3; ++c) {
                    double v = rgb[c] * 255.0;
                    if (spec.noise_sigma > 0.0) v += spec.noise_sigma * gaussian(noise_rng);
                    v = std::clamp(v, 0.0, 255.0);
                    frame.at(x, y, c) = static_cast<std::uint8_t>(std::lround(v));
                }
            }
        seq.frames.push_back(std::move(frame));
    }
    return seq;
}

void write_otb_sequence(const SynthSequence& seq, const std::string& out_dir) {
    const fs::path root(out_dir);
    fs::create_directories(root / "img");
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
        char name[16];
        std::snprintf(name, sizeof(name), "%04zu.png", i + 1);
        media::save_frame(seq.frames[i], (root / "img" / name).string());
    }
    std::ofstream gt(root / "groundtruth_rect.txt", std::ios::binary);
    if (!gt) throw IoError("cannot write ground truth under " + out_dir);
    gt << media::serialize_groundtruth(seq.ground_truth);
}

namespace {

using nlohmann::json;

BoundingBox box_from_json(const json& j) {
    return BoundingBox(j.at("cx").get<double>(), j.at("cy").get<double>(),
                       j.at("w").get<double>(), j.at("h").get<double>());
}

json box_to_json(const BoundingBox& b) {
    return json{{"cx", b.cx}, {"cy", b.cy}, {"w", b.w}, {"h", b.h}};
}

} // namespace

SynthSpec synth_spec_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError(std::string("synth spec parse error: ") + e.what());
    }
    SynthSpec spec;
    spec.name = j.value("name", spec.name);
    spec.frames = j.value("frames", spec.frames);
    spec.width = j.value("width", spec.width);
    spec.height = j.value("height", spec.height);
    if (j.contains("object")) spec.object = box_from_json(j.at("object"));
    if (j.contains("motion"))
        for (const auto& m : j.at("motion")) {
            MotionSegment seg;
            seg.from_frame = m.value("from_frame", 0);
            seg.vx = m.value("vx", 0.0);
            seg.vy = m.value("vy", 0.0);
            seg.scale_per_frame = m.value("scale_per_frame", 1.0);
            spec.motion.push_back(seg);
        }
    if (j.contains("occlusions"))
        for (const auto& o : j.at("occlusions")) {
            OcclusionWindow occ;
            occ.start = o.value("start", 0);
            occ.end = o.value("end", -1);
            occ.region = box_from_json(o.at("region"));
            spec.occlusions.push_back(occ);
        }
    if (j.contains("camera")) {
        const auto& c = j.at("camera");
        spec.camera.a0 = c.value("a0", 0.0);
        spec.camera.a1 = c.value("a1", 1.0);
        spec.camera.a2 = c.value("a2", 0.0);
        spec.camera.b0 = c.value("b0", 0.0);
        spec.camera.b1 = c.value("b1", 0.0);
        spec.camera.b2 = c.value("b2", 1.0);
    }
    spec.noise_sigma = j.value("noise_sigma", spec.noise_sigma);
    spec.seed = j.value("seed", spec.seed);
    spec.min_inside = j.value("min_inside", spec.min_inside);
    return spec;
}

SynthSpec load_synth_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open synth spec: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return synth_spec_from_json_text(buf.str());
}

std::string synth_spec_to_json_text(const SynthSpec& spec) {
    json j;
    j["name"] = spec.name;
    j["frames"] = spec.frames;
    j["width"] = spec.width;
    j["height"] = spec.height;
    j["object"] = box_to_json(spec.object);
    json motion = json::array();
    for (const auto& m : spec.motion)
        motion.push_back(json{{"from_frame", m.from_frame},
                              {"vx", m.vx},
                              {"vy", m.vy},
                              {"scale_per_frame", m.scale_per_frame}});
    j["motion"] = std::move(motion);
    json occ = json::array();
    for (const auto& o : spec.occlusions)
        occ.push_back(json{{"start", o.start}, {"end", o.end}, {"region", box_to_json(o.region)}});
    j["occlusions"] = std::move(occ);
    j["camera"] = json{{"a0", spec.camera.a0}, {"a1", spec.camera.a1}, {"a2", spec.camera.a2},
                       {"b0", spec.camera.b0}, {"b1", spec.camera.b1}, {"b2", spec.camera.b2}};
    j["noise_sigma"] = spec.noise_sigma;
    j["seed"] = spec.seed;
    j["min_inside"] = spec.min_inside;
    return j.dump(2);
}

} // namespace uhpsot::evalkit
