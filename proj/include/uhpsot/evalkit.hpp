#pragma once

#include <map>
#include <string>
#include <vector>

#include "uhpsot/box.hpp"
#include "uhpsot/media_io.hpp"
#include "uhpsot/tracker_config.hpp"

namespace uhpsot::evalkit {

inline constexpr int kPrecisionThresholds = 51; // 0..50 px step 1
inline constexpr int kSuccessThresholds = 21;   // 0..1 step 0.05

/// OPE metric curves for one sequence or an aggregate.
struct EvalCurves {
    std::vector<double> precision; // precision[t] = fraction with center error <= t
    std::vector<double> success;   // success[k]  = fraction with IoU > k*0.05
    double dp20 = 0.0;             // precision[20]
    double auc = 0.0;              // mean of success
};

double iou(const BoundingBox& a, const BoundingBox& b);
double center_error(const BoundingBox& a, const BoundingBox& b);

EvalCurves compute_curves(const std::vector<BoundingBox>& pred,
                          const std::vector<BoundingBox>& gt);

/// Elementwise mean of per-sequence curves (OTB convention).
EvalCurves aggregate_curves(const std::vector<EvalCurves>& curves);

struct RunRecord {
    std::string name;
    std::vector<BoundingBox> boxes;      // one per frame, frame 0 = init box
    std::vector<double> frame_times_ms;  // tracker time only, I/O excluded
    std::string variant;
    EvalCurves curves;
};

struct OpeResult {
    std::vector<RunRecord> records;
    EvalCurves aggregate;
    double fps = 0.0;    // total frames / total tracker time
    std::vector<std::string> skipped; // sequences that failed to load
};

/// One-Pass Evaluation: init on frame 0's ground truth, track once through,
/// no re-initialization. Sequences that fail to load are skipped with a note;
/// an empty surviving set raises.
OpeResult run_ope(Variant variant, const std::vector<media::SequenceSpec>& dataset,
                  const TrackerConfig& config);

/// Aggregate curves over the subset of sequences carrying each attribute tag.
/// Attributes with zero sequences are omitted.
std::map<std::string, EvalCurves> attribute_breakdown(
    const std::vector<RunRecord>& records, const std::vector<media::SequenceSpec>& dataset);

/// Write results.json, summary.csv and the precision/success SVG plots.
void emit_report(const OpeResult& result, const std::map<std::string, EvalCurves>& breakdown,
                 const TrackerConfig& config, const std::string& out_dir);

/// Load every OTB-layout subdirectory of `dataset_dir` that has ground truth.
std::vector<media::SequenceSpec> load_dataset(const std::string& dataset_dir);

} // namespace uhpsot::evalkit
