#include "uhpsot/media_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "uhpsot/errors.hpp"

namespace fs = std::filesystem;

namespace uhpsot {

double GrayImage::sample(double x, double y) const {
    const auto clampi = [](int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); };
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    const int x0c = clampi(x0, 0, width - 1);
    const int x1c = clampi(x0 + 1, 0, width - 1);
    const int y0c = clampi(y0, 0, height - 1);
    const int y1c = clampi(y0 + 1, 0, height - 1);
    const double v00 = at(x0c, y0c), v10 = at(x1c, y0c);
    const double v01 = at(x0c, y1c), v11 = at(x1c, y1c);
    return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11);
}

} // namespace uhpsot

namespace uhpsot::media {

const std::set<std::string>& known_attributes() {
    static const std::set<std::string> tags = {"BC", "DEF", "FM",  "IPR", "IV", "LR",
                                               "MB", "OCC", "OPR", "OV",  "SV"};
    return tags;
}

std::vector<BoundingBox> parse_groundtruth(const std::string& text) {
    std::vector<BoundingBox> boxes;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // normalize separators, tolerate trailing \r
        std::string cleaned = line;
        for (char& c : cleaned)
            if (c == ',' || c == '\t' || c == '\r') c = ' ';
        std::istringstream fields(cleaned);
        std::vector<double> v;
        double value;
        while (fields >> value) v.push_back(value);
        if (v.empty()) continue; // blank line
        if (v.size() != 4) throw MalformedLine(line_no, line);
        if (v[2] <= 0.0 || v[3] <= 0.0)
            throw NonPositiveSize("non-positive box size at line " + std::to_string(line_no));
        boxes.push_back(BoundingBox::from_tlwh(v[0], v[1], v[2], v[3]));
    }
    return boxes;
}

std::string serialize_groundtruth(const std::vector<BoundingBox>& boxes) {
    std::ostringstream out;
    out.precision(10);
    for (const auto& b : boxes)
        out << b.x_min() << "," << b.y_min() << "," << b.w << "," << b.h << "\n";
    return out.str();
}

namespace {

bool is_image_file(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext == ".jpg" || ext == ".jpeg" || ext == ".png" || ext == ".bmp";
}

// Numeric part of a stem like "0042"; nullopt for non-numeric names.
std::optional<long> numeric_stem(const fs::path& p) {
    const std::string stem = p.stem().string();
    long value = 0;
    const auto [ptr, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), value);
    if (ec != std::errc() || ptr != stem.data() + stem.size()) return std::nullopt;
    return value;
}

std::string read_text_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

} // namespace

SequenceSpec load_sequence(const std::string& root_path) {
    const fs::path root(root_path);
    const fs::path img_dir = root / "img";
    if (!fs::is_directory(img_dir))
        throw MissingImages("no img/ directory under " + root_path);

    std::vector<std::pair<long, std::string>> numbered;
    for (const auto& entry : fs::directory_iterator(img_dir)) {
        if (!entry.is_regular_file() || !is_image_file(entry.path())) continue;
        if (auto n = numeric_stem(entry.path()))
            numbered.emplace_back(*n, entry.path().string());
    }
    if (numbered.empty()) throw MissingImages("no numbered images in " + img_dir.string());
    std::sort(numbered.begin(), numbered.end());

    SequenceSpec spec;
    spec.name = root.filename().string();
    if (spec.name.empty()) spec.name = root.parent_path().filename().string();
    for (auto& [n, path] : numbered) spec.frame_paths.push_back(std::move(path));

    const fs::path gt_path = root / "groundtruth_rect.txt";
    if (fs::exists(gt_path)) {
        auto boxes = parse_groundtruth(read_text_file(gt_path));
        if (boxes.size() != spec.frame_paths.size())
            throw GroundTruthMismatch(spec.name + ": " + std::to_string(spec.frame_paths.size()) +
                                      " frames vs " + std::to_string(boxes.size()) + " gt lines");
        spec.ground_truth = std::move(boxes);
    }

    const fs::path attr_path = root / "attrs.txt";
    if (fs::exists(attr_path)) {
        std::istringstream in(read_text_file(attr_path));
        std::string tag;
        while (in >> tag)
            if (known_attributes().count(tag)) spec.attributes.insert(tag);
    }
    return spec;
}

Frame load_frame(const std::string& path, int index) {
    cv::Mat bgr = cv::imread(path, cv::IMREAD_COLOR);
    if (bgr.empty()) throw IoError("cannot decode image: " + path);
    Frame frame(bgr.cols, bgr.rows);
    frame.index = index;
    for (int y = 0; y < bgr.rows; ++y) {
        const cv::Vec3b* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) {
            frame.at(x, y, 0) = row[x][2];
            frame.at(x, y, 1) = row[x][1];
            frame.at(x, y, 2) = row[x][0];
        }
    }
    return frame;
}

void save_frame(const Frame& frame, const std::string& path) {
    cv::Mat bgr(frame.height, frame.width, CV_8UC3);
    for (int y = 0; y < frame.height; ++y) {
        cv::Vec3b* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < frame.width; ++x)
            row[x] = cv::Vec3b(frame.at(x, y, 2), frame.at(x, y, 1), frame.at(x, y, 0));
    }
    if (!cv::imwrite(path, bgr)) throw IoError("cannot write image: " + path);
}

GrayImage to_grayscale(const Frame& frame) {
    GrayImage gray(frame.width, frame.height);
    const std::uint8_t* px = frame.pixels.data();
    for (std::size_t i = 0; i < gray.values.size(); ++i, px += 3)
        gray.values[i] = (0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2]) / 255.0;
    return gray;
}

namespace {

// Shared resample core: maps output pixel centers onto the crop region and
// samples with replicate padding.
template <typename SampleFn>
Patch resample_region(const BoundingBox& box, double padding, int out_w, int out_h, int channels,
                      SampleFn&& sample) {
    if (box.w < 1.0 || box.h < 1.0)
        throw DegenerateBox("box smaller than one pixel: " + std::to_string(box.w) + "x" +
                            std::to_string(box.h));
    const double region_w = padding * box.w;
    const double region_h = padding * box.h;
    const double x0 = box.cx - region_w / 2.0;
    const double y0 = box.cy - region_h / 2.0;
    const double sx = region_w / out_w;
    const double sy = region_h / out_h;
    Patch patch(out_w, out_h, channels);
    for (int c = 0; c < channels; ++c)
        for (int y = 0; y < out_h; ++y) {
            const double src_y = y0 + (y + 0.5) * sy - 0.5;
            for (int x = 0; x < out_w; ++x) {
                const double src_x = x0 + (x + 0.5) * sx - 0.5;
                patch.at(x, y, c) = sample(src_x, src_y, c);
            }
        }
    return patch;
}

} // namespace

Patch extract_patch(const Frame& frame, const BoundingBox& box, double padding, int out_w,
                    int out_h) {
    const auto clampi = [](int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); };
    return resample_region(box, padding, out_w, out_h, 3, [&](double x, double y, int c) {
        const int x0 = static_cast<int>(std::floor(x));
        const int y0 = static_cast<int>(std::floor(y));
        const double fx = x - x0;
        const double fy = y - y0;
        const int x0c = clampi(x0, 0, frame.width - 1);
        const int x1c = clampi(x0 + 1, 0, frame.width - 1);
        const int y0c = clampi(y0, 0, frame.height - 1);
        const int y1c = clampi(y0 + 1, 0, frame.height - 1);
        const double v00 = frame.at(x0c, y0c, c), v10 = frame.at(x1c, y0c, c);
        const double v01 = frame.at(x0c, y1c, c), v11 = frame.at(x1c, y1c, c);
        return ((1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) +
                fy * ((1.0 - fx) * v01 + fx * v11)) / 255.0;
    });
}

Patch extract_patch(const GrayImage& image, const BoundingBox& box, double padding, int out_w,
                    int out_h) {
    return resample_region(box, padding, out_w, out_h, 1,
                           [&](double x, double y, int) { return image.sample(x, y); });
}

GrayImage resize_gray(const GrayImage& src, int out_w, int out_h) {
    GrayImage out(out_w, out_h);
    const double sx = static_cast<double>(src.width) / out_w;
    const double sy = static_cast<double>(src.height) / out_h;
    for (int y = 0; y < out_h; ++y) {
        const double src_y = (y + 0.5) * sy - 0.5;
        for (int x = 0; x < out_w; ++x)
            out.at(x, y) = src.sample((x + 0.5) * sx - 0.5, src_y);
    }
    return out;
}

} // namespace uhpsot::media
