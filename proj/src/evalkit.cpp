#include "uhpsot/evalkit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "uhpsot/errors.hpp"
#include "uhpsot/pipeline.hpp"

namespace fs = std::filesystem;

namespace uhpsot::evalkit {

double iou(const BoundingBox& a, const BoundingBox& b) { return box_iou(a, b); }

double center_error(const BoundingBox& a, const BoundingBox& b) { return center_distance(a, b); }

EvalCurves compute_curves(const std::vector<BoundingBox>& pred,
                          const std::vector<BoundingBox>& gt) {
    if (pred.size() != gt.size() || pred.empty())
        throw LengthMismatch("prediction/ground-truth length mismatch: " +
                             std::to_string(pred.size()) + " vs " + std::to_string(gt.size()));
    EvalCurves curves;
    curves.precision.assign(kPrecisionThresholds, 0.0);
    curves.success.assign(kSuccessThresholds, 0.0);
    const double n = static_cast<double>(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double err = center_error(pred[i], gt[i]);
        const double overlap = iou(pred[i], gt[i]);
        for (int t = 0; t < kPrecisionThresholds; ++t)
            if (err <= t) curves.precision[t] += 1.0;
        for (int k = 0; k < kSuccessThresholds; ++k)
            if (overlap > k * 0.05) curves.success[k] += 1.0;
    }
    for (double& v : curves.precision) v /= n;
    for (double& v : curves.success) v /= n;
    curves.dp20 = curves.precision[20];
    double acc = 0.0;
    for (double v : curves.success) acc += v;
    curves.auc = acc / kSuccessThresholds;
    return curves;
}

EvalCurves aggregate_curves(const std::vector<EvalCurves>& curves) {
    if (curves.empty()) throw LengthMismatch("cannot aggregate zero curve sets");
    EvalCurves agg;
    agg.precision.assign(kPrecisionThresholds, 0.0);
    agg.success.assign(kSuccessThresholds, 0.0);
    for (const auto& c : curves) {
        for (int t = 0; t < kPrecisionThresholds; ++t) agg.precision[t] += c.precision[t];
        for (int k = 0; k < kSuccessThresholds; ++k) agg.success[k] += c.success[k];
    }
    for (double& v : agg.precision) v /= curves.size();
    for (double& v : agg.success) v /= curves.size();
    agg.dp20 = agg.precision[20];
    double acc = 0.0;
    for (double v : agg.success) acc += v;
    agg.auc = acc / kSuccessThresholds;
    return agg;
}

OpeResult run_ope(Variant variant, const std::vector<media::SequenceSpec>& dataset,
                  const TrackerConfig& base_config) {
    const TrackerConfig config = configure_variant(base_config, variant);
    OpeResult result;
    double total_time_s = 0.0;
    std::size_t total_frames = 0;

    for (const auto& seq : dataset) {
        if (!seq.ground_truth || seq.ground_truth->empty() || seq.frame_paths.empty()) {
            result.skipped.push_back(seq.name + ": no ground truth");
            continue;
        }
        try {
            RunRecord record;
            record.name = seq.name;
            record.variant = to_string(variant);

            pipeline::Tracker tracker(config);
            for (std::size_t i = 0; i < seq.frame_paths.size(); ++i) {
                const Frame frame = media::load_frame(seq.frame_paths[i], static_cast<int>(i));
                const auto t0 = std::chrono::steady_clock::now();
                BoundingBox box;
                if (i == 0) {
                    tracker.init(frame, (*seq.ground_truth)[0]);
                    box = (*seq.ground_truth)[0];
                } else {
                    box = tracker.step(frame);
                }
                const auto t1 = std::chrono::steady_clock::now();
                record.boxes.push_back(box);
                record.frame_times_ms.push_back(
                    std::chrono::duration<double, std::milli>(t1 - t0).count());
            }
            record.curves = compute_curves(record.boxes, *seq.ground_truth);
            for (double ms : record.frame_times_ms) total_time_s += ms / 1000.0;
            total_frames += record.boxes.size();
            result.records.push_back(std::move(record));
        } catch (const TrackerError& e) {
            result.skipped.push_back(seq.name + ": " + e.what());
        }
    }
    if (result.records.empty()) throw TrackerError("no sequence survived evaluation");

    std::vector<EvalCurves> per_seq;
    per_seq.reserve(result.records.size());
    for (const auto& r : result.records) per_seq.push_back(r.curves);
    result.aggregate = aggregate_curves(per_seq);
    result.fps = total_time_s > 0.0 ? static_cast<double>(total_frames) / total_time_s : 0.0;
    return result;
}

std::map<std::string, EvalCurves> attribute_breakdown(
    const std::vector<RunRecord>& records, const std::vector<media::SequenceSpec>& dataset) {
    std::map<std::string, std::vector<EvalCurves>> buckets;
    for (const auto& record : records) {
        const auto it = std::find_if(dataset.begin(), dataset.end(),
                                     [&](const auto& s) { return s.name == record.name; });
        if (it == dataset.end()) continue;
        for (const auto& tag : it->attributes) buckets[tag].push_back(record.curves);
    }
    std::map<std::string, EvalCurves> out;
    for (auto& [tag, curves] : buckets) out[tag] = aggregate_curves(curves);
    return out;
}

std::vector<media::SequenceSpec> load_dataset(const std::string& dataset_dir) {
    if (!fs::is_directory(dataset_dir)) throw IoError("not a directory: " + dataset_dir);
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dataset_dir))
        if (entry.is_directory() && fs::is_directory(entry.path() / "img"))
            names.push_back(entry.path().string());
    std::sort(names.begin(), names.end());
    if (names.empty()) throw IoError("no sequences under " + dataset_dir);
    std::vector<media::SequenceSpec> specs;
    for (const auto& name : names) specs.push_back(media::load_sequence(name));
    return specs;
}

namespace {

using nlohmann::json;

json curves_to_json(const EvalCurves& c) {
    return json{{"precision", c.precision},
                {"success", c.success},
                {"dp20", c.dp20},
                {"auc", c.auc}};
}

// Minimal standalone SVG line plot, legend carries the ranking number.
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::vector<double>& xs,
                    const std::vector<double>& ys, const std::string& legend) {
    const int width = 640, height = 480;
    const int ml = 60, mr = 20, mt = 40, mb = 50;
    const double x_max = xs.back();
    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << title << "</text>\n";
    // axes
    svg << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
        << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << height - mb << "\" stroke=\"black\"/>\n";
    const auto px = [&](double x) { return ml + x / x_max * (width - ml - mr); };
    const auto py = [&](double y) { return height - mb - y * (height - mt - mb); };
    for (int g = 0; g <= 5; ++g) {
        const double fy = g / 5.0;
        svg << "<text x=\"" << ml - 8 << "\" y=\"" << py(fy) + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << fy << "</text>\n";
        const double fx = x_max * g / 5.0;
        svg << "<text x=\"" << px(fx) << "\" y=\"" << height - mb + 18
            << "\" text-anchor=\"middle\" font-size=\"11\">" << fx << "</text>\n";
    }
    svg << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
    svg << "<polyline fill=\"none\" stroke=\"#c02020\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) svg << px(xs[i]) << "," << py(ys[i]) << " ";
    svg << "\"/>\n";
    svg << "<text x=\"" << width - mr - 10 << "\" y=\"" << mt + 16
        << "\" text-anchor=\"end\" font-size=\"13\" fill=\"#c02020\">" << legend << "</text>\n";
    svg << "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write plot: " + path);
    out << svg.str();
}

std::string format_double(double v) {
    std::ostringstream s;
    s.precision(4);
    s << std::fixed << v;
    return s.str();
}

} // namespace

void emit_report(const OpeResult& result, const std::map<std::string, EvalCurves>& breakdown,
                 const TrackerConfig& config, const std::string& out_dir) {
    fs::create_directories(out_dir);

    json root;
    root["meta"] = {{"variant", result.records.empty() ? "" : result.records[0].variant},
                    {"aggregation", "per-sequence-mean"},
                    {"config", json::parse(config_to_json_text(config))}};
    root["aggregate"] = curves_to_json(result.aggregate);
    root["timing"] = {{"fps", result.fps}};
    json seqs = json::array();
    for (const auto& r : result.records) {
        json s;
        s["name"] = r.name;
        s["curves"] = curves_to_json(r.curves);
        json boxes = json::array();
        for (const auto& b : r.boxes)
            boxes.push_back(json::array({b.x_min(), b.y_min(), b.w, b.h}));
        s["boxes"] = std::move(boxes);
        double mean_ms = 0.0;
        for (double ms : r.frame_times_ms) mean_ms += ms;
        mean_ms /= std::max<std::size_t>(1, r.frame_times_ms.size());
        s["timing"] = {{"mean_frame_ms", mean_ms}};
        seqs.push_back(std::move(s));
    }
    root["sequences"] = std::move(seqs);
    if (!breakdown.empty()) {
        json attrs;
        for (const auto& [tag, curves] : breakdown) attrs[tag] = curves_to_json(curves);
        root["attributes"] = std::move(attrs);
    }
    if (!result.skipped.empty()) root["skipped"] = result.skipped;

    {
        std::ofstream out(fs::path(out_dir) / "results.json", std::ios::binary);
        if (!out) throw IoError("cannot write results.json under " + out_dir);
        out << root.dump(2) << "\n";
    }
    {
        std::ofstream out(fs::path(out_dir) / "summary.csv", std::ios::binary);
        if (!out) throw IoError("cannot write summary.csv under " + out_dir);
        out << "sequence,frames,dp20,auc,mean_frame_ms\n";
        for (const auto& r : result.records) {
            double mean_ms = 0.0;
            for (double ms : r.frame_times_ms) mean_ms += ms;
            mean_ms /= std::max<std::size_t>(1, r.frame_times_ms.size());
            out << r.name << "," << r.boxes.size() << "," << format_double(r.curves.dp20) << ","
                << format_double(r.curves.auc) << "," << format_double(mean_ms) << "\n";
        }
    }

    const std::string variant = result.records.empty() ? "tracker" : result.records[0].variant;
    std::vector<double> pthr(kPrecisionThresholds);
    for (int t = 0; t < kPrecisionThresholds; ++t) pthr[t] = t;
    write_svg_plot((fs::path(out_dir) / "precision.svg").string(), "Precision plot",
                   "Location error threshold (px)", pthr, result.aggregate.precision,
                   variant + " [" + format_double(result.aggregate.dp20) + "]");
    std::vector<double> sthr(kSuccessThresholds);
    for (int k = 0; k < kSuccessThresholds; ++k) sthr[k] = k * 0.05;
    write_svg_plot((fs::path(out_dir) / "success.svg").string(), "Success plot",
                   "Overlap threshold", sthr, result.aggregate.success,
                   variant + " [" + format_double(result.aggregate.auc) + "]");
}

} // namespace uhpsot::evalkit
