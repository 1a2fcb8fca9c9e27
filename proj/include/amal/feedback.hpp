#ifndef AMAL_FEEDBACK_HPP
#define AMAL_FEEDBACK_HPP

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "amal/assess.hpp"

namespace amal {

namespace detail {

inline std::string describe_parameter(const std::string& key) {
    auto field = [&](int i) {
        std::size_t a = 0;
        std::string out;
        for (int k = 0; k <= i; ++k) {
            std::size_t b = key.find(':', a);
            out = key.substr(a, b == std::string::npos ? b : b - a);
            if (b == std::string::npos) break;
            a = b + 1;
        }
        return out;
    };
    if (key.rfind("pos:", 0) == 0) return field(2) + " position of " + field(1);
    if (key.rfind("vel:", 0) == 0) return field(2) + " velocity of " + field(1);
    if (key.rfind("dist:", 0) == 0) return "distance between " + field(1) + " and " + field(2);
    if (key.rfind("ang:", 0) == 0) return "angle between " + field(1) + " and " + field(2);
    if (key == "time:total") return "movement";
    if (key.rfind("time:seg:", 0) == 0) return "movement segment " + field(2);
    return key;
}

inline std::string format_seconds(double t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", t);
    return buf;
}

}  // namespace detail

/// Everything scoring needs about one deviating segment, plus what feedback
/// needs to describe it and to recompute the score without it.
struct ScoredSegment {
    Segment segment;
    std::size_t param_index = 0;  // index into per-parameter bookkeeping
    bool is_time = false;
};

struct ScoringInput {
    // Per parameter (series and time parameters alike): class, total
    // thresholded deviation and frame count over deviating segments, and the
    // deviating segment count. Non-deviating parameters carry zero segments.
    struct Param {
        ParamClass cls;
        double dev_sum = 0.0;
        int dev_frames = 0;
        int segment_count = 0;
    };
    std::vector<Param> params;
    std::vector<ScoredSegment> segments;
    int count_a = 0, count_n = 0, count_t = 0;
};

/// Collects deviating segments of every series and time parameter into the
/// scoring bookkeeping.
inline ScoringInput collect_scoring_input(const std::vector<DeviationSeries>& deviations,
                                          const std::vector<SegmentationResult>& segmentations,
                                          const std::vector<TimeDeviation>& time_devs) {
    ScoringInput in;
    for (std::size_t s = 0; s < deviations.size(); ++s) {
        const auto& d = deviations[s];
        ScoringInput::Param p{d.cls, 0.0, 0, 0};
        (d.cls == ParamClass::Active ? in.count_a : in.count_n)++;
        for (const auto& seg : segmentations[s].segments) {
            if (seg.dev_class == DevClass::None) continue;
            double acc = 0.0;
            for (int f = seg.start; f <= seg.end; ++f) acc += d.thresholded[f];
            p.dev_sum += acc;
            p.dev_frames += seg.end - seg.start + 1;
            ++p.segment_count;
            in.segments.push_back({seg, in.params.size(), false});
        }
        in.params.push_back(p);
    }
    for (const auto& td : time_devs) {
        ++in.count_t;
        ScoringInput::Param p{ParamClass::Time, 0.0, 0, 0};
        if (td.thresholded > 0.0) {
            p.dev_sum = td.thresholded;
            p.dev_frames = 1;
            p.segment_count = 1;
            Segment seg;
            seg.key = td.key;
            seg.cls = ParamClass::Time;
            seg.dev_class = td.sign > 0 ? DevClass::Positive : DevClass::Negative;
            seg.confidence = 1.0;
            seg.mean_deviation = td.thresholded;
            in.segments.push_back({seg, in.params.size(), true});
        }
        in.params.push_back(p);
    }
    return in;
}

namespace detail {

// Score with an optional segment excluded (excluded < 0 scores everything).
inline ScoreBreakdown score_excluding(const ScoringInput& in, int excluded, const ScoreWeights& w,
                                      const ScoringOptions& opt) {
    std::vector<DeviatingParam> devs;
    std::vector<ScoringInput::Param> params = in.params;
    if (excluded >= 0) {
        const auto& ex = in.segments[excluded];
        auto& p = params[ex.param_index];
        const auto& seg = ex.segment;
        double acc = seg.mean_deviation * (ex.is_time ? 1 : seg.end - seg.start + 1);
        p.dev_sum -= acc;
        p.dev_frames -= ex.is_time ? 1 : seg.end - seg.start + 1;
        --p.segment_count;
    }
    for (const auto& p : params)
        if (p.segment_count > 0)
            devs.push_back({p.cls, p.dev_sum / p.dev_frames, p.segment_count});
    return score_from_params(devs, in.count_a, in.count_n, in.count_t, w, opt);
}

}  // namespace detail

/// Ranks deviating segments by the exact score mass each one removes, then
/// emits templated feedback lines until the half-loss rule or the 5-item cap
/// stops the list.
inline std::vector<FeedbackItem> generate_feedback(const ScoringInput& in, double full_score,
                                                   double fps, const ScoreWeights& w,
                                                   const ScoringOptions& opt) {
    struct Ranked {
        FeedbackItem item;
        int start;
    };
    std::vector<Ranked> ranked;
    for (std::size_t k = 0; k < in.segments.size(); ++k) {
        const auto& ss = in.segments[k];
        FeedbackItem item;
        item.key = ss.segment.key;
        item.loss = detail::score_excluding(in, static_cast<int>(k), w, opt).final_score - full_score;
        item.t_start = ss.segment.start / fps;
        item.t_end = (ss.segment.end + 1) / fps;
        const std::string desc = detail::describe_parameter(ss.segment.key);
        if (ss.is_time) {
            item.direction = ss.segment.dev_class == DevClass::Positive ? "too slow" : "too fast";
            item.text = desc + " performed " + item.direction;
        } else {
            item.direction = ss.segment.dev_class == DevClass::Positive   ? "too high"
                             : ss.segment.dev_class == DevClass::Negative ? "too low"
                                                                          : "unstable";
            item.text = desc + " was " + item.direction + " between " +
                        detail::format_seconds(item.t_start) + "s and " +
                        detail::format_seconds(item.t_end) + "s";
        }
        ranked.push_back({item, ss.segment.start});
    }
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.item.loss != b.item.loss) return a.item.loss > b.item.loss;
        if (a.start != b.start) return a.start < b.start;
        return a.item.key < b.item.key;
    });

    std::vector<FeedbackItem> out;
    for (const auto& r : ranked) {
        if (!out.empty() && r.item.loss < 0.5 * out.back().loss) break;
        if (out.size() == 5) break;
        out.push_back(r.item);
    }
    return out;
}

/// Full scoring pass over precomputed deviations and segmentations.
inline AssessmentResult score_and_feedback(const std::vector<DeviationSeries>& deviations,
                                           const std::vector<SegmentationResult>& segmentations,
                                           const std::vector<TimeDeviation>& time_devs, double fps,
                                           const ScoreWeights& w, const ScoringOptions& opt) {
    ScoringInput in = collect_scoring_input(deviations, segmentations, time_devs);
    detail::ScoreBreakdown b = detail::score_excluding(in, -1, w, opt);
    AssessmentResult r;
    r.score = b.final_score;
    r.score_a = b.a;
    r.score_n = b.n;
    r.score_t = b.t;
    for (const auto& ss : in.segments) r.segments.push_back(ss.segment);
    r.feedback = generate_feedback(in, b.final_score, fps, w, opt);
    // Attach the marginal loss to each reported segment.
    for (std::size_t k = 0; k < in.segments.size(); ++k)
        r.segments[k].confidence = in.segments[k].segment.confidence;
    return r;
}

}  // namespace amal

#endif
