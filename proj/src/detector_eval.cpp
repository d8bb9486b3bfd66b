// Copyright 2026 The Exposure Analytics Authors
// SPDX-License-Identifier: Apache-2.0

#include "exposure/detector_eval.hpp"

#include <algorithm>
#include <numeric>

namespace exposure::eval {

BoxMode parse_box_mode(std::string_view s) {
    if (s == "obb") return BoxMode::Obb;
    if (s == "hbb") return BoxMode::Hbb;
    throw ConfigError("box mode must be obb or hbb");
}

const char* to_string(BoxMode m) { return m == BoxMode::Obb ? "obb" : "hbb"; }

Interpolation parse_interpolation(std::string_view s) {
    if (s == "all" || s == "all-points") return Interpolation::AllPoints;
    if (s == "11" || s == "11-point") return Interpolation::ElevenPoint;
    throw ConfigError("AP interpolation must be 'all' or '11'");
}

const char* to_string(Interpolation i) { return i == Interpolation::AllPoints ? "all-points" : "11-point"; }

void EvalConfig::validate() const {
    if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) throw ConfigError("IoU threshold must lie in (0, 1)");
    if (conf_threshold && !(*conf_threshold >= 0.0 && *conf_threshold <= 1.0))
        throw ConfigError("confidence threshold must lie in [0, 1]");
    for (double t : histogram_thresholds)
        if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("histogram thresholds must lie in [0, 1]");
}

double box_iou(const Quad& a, const Quad& b, BoxMode mode) {
    if (mode == BoxMode::Obb) return geom::iou_obb(a, b);
    return geom::iou_rect(geom::enclosing_hbb(a), geom::enclosing_hbb(b));
}

FrameMatch match_frame(std::span<const Detection> preds, std::span<const GroundTruth> gts, double iou_threshold,
                       BoxMode mode, std::size_t frame) {
    if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) throw ConfigError("IoU threshold must lie in (0, 1)");
    FrameMatch out;

    std::map<int, std::vector<std::size_t>> gt_by_class;
    for (std::size_t g = 0; g < gts.size(); ++g) {
        if (gts[g].quad.degenerate()) {
            ++out.dropped_gts;
            out.audit.push_back("frame " + std::to_string(frame) + ": dropped degenerate ground truth #" + std::to_string(g));
            continue;
        }
        gt_by_class[gts[g].class_id].push_back(g);
    }
    for (const auto& [cls, list] : gt_by_class) out.gt_per_class[cls] = list.size();

    std::map<int, std::vector<std::size_t>> pred_by_class;
    for (std::size_t p = 0; p < preds.size(); ++p) {
        if (preds[p].quad.degenerate()) {
            ++out.dropped_preds;
            out.audit.push_back("frame " + std::to_string(frame) + ": dropped degenerate prediction #" + std::to_string(p));
            continue;
        }
        pred_by_class[preds[p].class_id].push_back(p);
    }

    std::vector<MatchRecord> records;
    for (auto& [cls, plist] : pred_by_class) {
        std::stable_sort(plist.begin(), plist.end(),
                         [&](std::size_t a, std::size_t b) { return preds[a].confidence > preds[b].confidence; });
        const auto git = gt_by_class.find(cls);
        const std::vector<std::size_t> empty;
        const auto& glist = git == gt_by_class.end() ? empty : git->second;
        std::vector<bool> taken(glist.size(), false);

        for (std::size_t p : plist) {
            MatchRecord rec;
            rec.frame = frame;
            rec.pred_index = p;
            rec.class_id = cls;
            rec.confidence = preds[p].confidence;
            double best_free = -1.0;
            std::size_t best_slot = glist.size();
            double best_any = 0.0;
            for (std::size_t k = 0; k < glist.size(); ++k) {
                const double iou = box_iou(preds[p].quad, gts[glist[k]].quad, mode);
                best_any = std::max(best_any, iou);
                if (!taken[k] && iou >= iou_threshold && iou > best_free) {
                    best_free = iou;
                    best_slot = k;
                }
            }
            if (best_slot < glist.size()) {
                taken[best_slot] = true;
                rec.tp = true;
                rec.gt_index = glist[best_slot];
                rec.iou = best_free;
            } else {
                rec.iou = best_any;
            }
            records.push_back(rec);
        }
    }
    std::sort(records.begin(), records.end(),
              [](const MatchRecord& a, const MatchRecord& b) { return a.pred_index < b.pred_index; });
    out.records = std::move(records);
    return out;
}

namespace {

// Descending confidence; ties by frame, then prediction order.
bool pr_order(const MatchRecord& a, const MatchRecord& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.frame != b.frame) return a.frame < b.frame;
    return a.pred_index < b.pred_index;
}

}  // namespace

std::optional<double> average_precision(std::span<const MatchRecord> records, std::size_t total_gt,
                                        Interpolation interp) {
    if (total_gt == 0) return std::nullopt;
    std::vector<MatchRecord> sorted(records.begin(), records.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const MatchRecord& a, const MatchRecord& b) { return a.confidence > b.confidence; });

    // One PR point per distinct confidence, so tied records act as a block
    // and their input order cannot change the result.
    std::vector<double> precision, recall;
    std::size_t tp = 0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        if (sorted[k].tp) ++tp;
        if (k + 1 < sorted.size() && sorted[k + 1].confidence == sorted[k].confidence) continue;
        precision.push_back(static_cast<double>(tp) / static_cast<double>(k + 1));
        recall.push_back(static_cast<double>(tp) / static_cast<double>(total_gt));
    }
    const std::size_t n = precision.size();
    for (std::size_t k = n; k-- > 1;) precision[k - 1] = std::max(precision[k - 1], precision[k]);

    if (interp == Interpolation::ElevenPoint) {
        double sum = 0.0;
        for (int i = 0; i <= 10; ++i) {
            const double r = i / 10.0;
            double best = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                if (recall[k] >= r - 1e-12) best = std::max(best, precision[k]);
            sum += best;
        }
        return sum / 11.0;
    }

    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        ap += (recall[k] - prev_recall) * precision[k];
        prev_recall = recall[k];
    }
    return ap;
}

IouHistogram iou_threshold_histogram(std::span<const MatchRecord> records, std::span<const double> thresholds) {
    IouHistogram h;
    h.thresholds.assign(thresholds.begin(), thresholds.end());
    std::sort(h.thresholds.begin(), h.thresholds.end());
    h.count = records.size();
    for (double t : h.thresholds) {
        std::size_t above = 0;
        for (const auto& r : records)
            if (r.tp && r.iou >= t) ++above;
        h.fractions.push_back(h.count ? static_cast<double>(above) / static_cast<double>(h.count) : 0.0);
    }
    return h;
}

EvalResult evaluate(std::span<const EvalFrame> frames, const EvalConfig& config) {
    config.validate();
    EvalResult res;
    res.iou_threshold = config.iou_threshold;
    res.box_mode = config.box_mode;
    res.interpolation = config.interpolation;
    res.n_frames = frames.size();

    std::map<int, std::size_t> gt_per_class;
    std::vector<MatchRecord> pooled;
    for (std::size_t f = 0; f < frames.size(); ++f) {
        auto fm = match_frame(frames[f].preds, frames[f].gts, config.iou_threshold, config.box_mode, f);
        for (const auto& [cls, n] : fm.gt_per_class) gt_per_class[cls] += n;
        res.dropped_preds += fm.dropped_preds;
        res.dropped_gts += fm.dropped_gts;
        for (auto& note : fm.audit) res.audit.push_back(frames[f].frame_id + ": " + note);
        pooled.insert(pooled.end(), fm.records.begin(), fm.records.end());
    }
    std::sort(pooled.begin(), pooled.end(), pr_order);

    for (const auto& [cls, n] : gt_per_class) res.n_gt += n;
    res.n_pred = pooled.size();
    if (res.n_gt == 0) throw DataError("no usable ground truth in evaluation set");

    std::map<int, std::vector<MatchRecord>> by_class;
    for (const auto& r : pooled) by_class[r.class_id].push_back(r);
    for (const auto& [cls, n] : gt_per_class) by_class.try_emplace(cls);

    double ap_sum = 0.0;
    for (const auto& [cls, recs] : by_class) {
        ClassEval ce;
        ce.class_id = cls;
        const auto git = gt_per_class.find(cls);
        ce.n_gt = git == gt_per_class.end() ? 0 : git->second;
        ce.n_pred = recs.size();
        ce.n_tp = static_cast<std::size_t>(std::count_if(recs.begin(), recs.end(), [](const MatchRecord& r) { return r.tp; }));
        ce.ap = average_precision(recs, ce.n_gt, config.interpolation);
        if (ce.ap) {
            res.per_class_ap[cls] = *ce.ap;
            ap_sum += *ce.ap;
        }
        res.classes.push_back(ce);
    }
    res.map50 = ap_sum / static_cast<double>(res.per_class_ap.size());

    // Operating point over the pooled PR curve.
    std::size_t cut = 0;  // number of leading records kept
    if (config.conf_threshold) {
        while (cut < pooled.size() && pooled[cut].confidence >= *config.conf_threshold) ++cut;
        if (!pooled.empty()) res.operating_confidence = *config.conf_threshold;
    } else if (!pooled.empty()) {
        double best_f1 = -1.0;
        std::size_t tp = 0;
        for (std::size_t k = 0; k < pooled.size(); ++k) {
            if (pooled[k].tp) ++tp;
            const bool boundary = k + 1 == pooled.size() || pooled[k + 1].confidence != pooled[k].confidence;
            if (!boundary) continue;
            const double p = static_cast<double>(tp) / static_cast<double>(k + 1);
            const double r = static_cast<double>(tp) / static_cast<double>(res.n_gt);
            const double f1 = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
            if (f1 > best_f1) {
                best_f1 = f1;
                cut = k + 1;
                res.operating_confidence = pooled[k].confidence;
            }
        }
    }
    const std::span<const MatchRecord> kept(pooled.data(), cut);
    const auto tp_kept = static_cast<std::size_t>(std::count_if(kept.begin(), kept.end(), [](const MatchRecord& r) { return r.tp; }));
    res.precision = cut ? static_cast<double>(tp_kept) / static_cast<double>(cut) : 0.0;
    res.recall = static_cast<double>(tp_kept) / static_cast<double>(res.n_gt);
    res.f1 = res.precision + res.recall > 0 ? 2 * res.precision * res.recall / (res.precision + res.recall) : 0.0;
    res.iou_histogram = iou_threshold_histogram(kept, config.histogram_thresholds);
    res.records = std::move(pooled);
    return res;
}

double map_over_thresholds(std::span<const EvalFrame> frames, EvalConfig config, std::span<const double> thresholds) {
    if (thresholds.empty()) throw ConfigError("need at least one IoU threshold");
    double sum = 0.0;
    for (double t : thresholds) {
        config.iou_threshold = t;
        sum += evaluate(frames, config).map50;
    }
    return sum / static_cast<double>(thresholds.size());
}

}  // namespace exposure::eval
