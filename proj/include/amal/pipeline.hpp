#ifndef AMAL_PIPELINE_HPP
#define AMAL_PIPELINE_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "amal/feedback.hpp"
#include "amal/model.hpp"

namespace amal {

enum class WarpMethod { Poi, Dtw, None };

struct PipelineOptions {
    AlignmentConfig align;
    ScoreWeights weights;
    ScoringOptions scoring;
    WarpMethod warp = WarpMethod::Poi;
};

struct TrainArtifacts {
    TrainedModel model;
    int reference_index = 0;
    SkeletonVideo reference_normalized;  // kept for the DTW assessment baseline
    std::vector<PoISet> pois;
};

/// Normalization shared by training and assessment: designated edge lengths,
/// then the body-plane projection.
inline SkeletonVideo normalize_video(const SkeletonVideo& video, const DesignatedSkeleton& d) {
    return align_to_body_plane(normalize_dimensions(video, d));
}

/// The full training pipeline: normalize, detect active joints and rests,
/// reconcile PoIs, warp onto the reference timeline, fit the model.
inline TrainArtifacts train(const std::vector<SkeletonVideo>& videos,
                            const std::vector<std::string>& person_ids,
                            const PipelineOptions& opt) {
    if (videos.size() < 3) throw std::invalid_argument("need >= 3 training videos");
    opt.align.check();
    opt.weights.check();

    DesignatedSkeleton designated = compute_designated_skeleton(videos, person_ids);
    std::vector<SkeletonVideo> norm;
    norm.reserve(videos.size());
    for (const auto& v : videos) norm.push_back(normalize_video(v, designated));

    ActiveJointSet active = detect_active_joints(norm, opt.align);

    std::vector<std::vector<RestSequence>> rests;
    for (const auto& v : norm) rests.push_back(detect_rest_sequences(v, active, opt.align));
    std::vector<PoISet> pois = reconcile_rest_counts(rests, norm, active, opt.align);

    std::vector<int> lengths;
    for (const auto& v : norm) lengths.push_back(v.frame_count());
    const int ref = select_reference_video(pois, lengths);
    const int ref_length = norm[ref].frame_count();

    std::vector<FeatureSet> features;
    for (std::size_t i = 0; i < norm.size(); ++i) {
        SkeletonVideo warped;
        switch (opt.warp) {
            case WarpMethod::Poi:
                warped = warp_to_reference(norm[i], pois[i], pois[ref], ref_length);
                break;
            case WarpMethod::Dtw:
                warped = dtw_align(norm[i], norm[ref], active);
                break;
            case WarpMethod::None:
                warped = warp_to_reference(norm[i], PoISet{}, PoISet{}, ref_length);
                break;
        }
        features.push_back(extract_frame_features(
            warped, active, videos[i].frame_count(),
            segment_lengths_from_pois(pois[i], videos[i].frame_count())));
    }

    TrainArtifacts art;
    art.model = fit_model(features, videos.front().topology, designated, active, pois[ref], ref_length);
    art.reference_index = ref;
    art.reference_normalized = norm[ref];
    art.pois = pois;
    return art;
}

namespace detail {

// PoIs for a test video: re-run rest detection with the model's rest count.
// If detection cannot reach the count (severely degraded input), fall back to
// the model's PoIs scaled to the video length so assessment still proceeds.
inline PoISet locate_test_pois(const SkeletonVideo& norm, const TrainedModel& model,
                               const AlignmentConfig& cfg) {
    if (model.rest_count() == 0 || model.active.active.empty()) return {};
    try {
        auto rests = detect_rest_sequences(norm, model.active, cfg, model.rest_count());
        if (static_cast<int>(rests.size()) > model.rest_count()) {
            std::vector<std::vector<RestSequence>> wrapped{rests};
            // Reuse the surplus-dropping rule against the model's reference PoIs.
            std::vector<double> mean;
            for (int idx : model.reference_pois.indices)
                mean.push_back(static_cast<double>(idx) / model.reference_length);
            std::vector<RestSequence> best;
            double best_d = std::numeric_limits<double>::infinity();
            for_each_subset(static_cast<int>(rests.size()), model.rest_count(),
                            [&](const std::vector<int>& idx) {
                                std::vector<RestSequence> cand;
                                for (int k : idx) cand.push_back(rests[k]);
                                double d = sq_distance(
                                    normalized_boundaries(cand, norm.frame_count()), mean);
                                if (d < best_d) {
                                    best_d = d;
                                    best = cand;
                                }
                            });
            rests = best;
        }
        return pois_from_rests(rests, norm.frame_count());
    } catch (const std::exception&) {
        PoISet scaled;
        const double ratio = static_cast<double>(norm.frame_count() - 1) /
                             std::max(1, model.reference_length - 1);
        for (int idx : model.reference_pois.indices)
            scaled.indices.push_back(static_cast<int>(std::lround(idx * ratio)));
        return scaled;
    }
}

}  // namespace detail

/// Assesses one video against a trained model. `reference` is only consulted
/// by the DTW baseline; PoI warping uses the PoIs stored in the model.
inline AssessmentResult assess(const TrainedModel& model, const SkeletonVideo& video,
                               const PipelineOptions& opt,
                               const SkeletonVideo* reference = nullptr) {
    if (!(video.topology == model.topology))
        throw std::invalid_argument("video topology does not match model");
    opt.align.check();
    opt.weights.check();

    SkeletonVideo norm = normalize_video(video, model.designated);
    PoISet own = detail::locate_test_pois(norm, model, opt.align);

    SkeletonVideo warped;
    switch (opt.warp) {
        case WarpMethod::Poi:
            warped = warp_to_reference(norm, own, model.reference_pois, model.reference_length);
            break;
        case WarpMethod::Dtw:
            if (!reference) throw std::invalid_argument("DTW warp needs the reference video");
            warped = dtw_align(norm, *reference, model.active);
            break;
        case WarpMethod::None:
            warped = warp_to_reference(norm, PoISet{}, PoISet{}, model.reference_length);
            break;
    }

    FeatureSet features = extract_frame_features(
        warped, model.active, video.frame_count(),
        segment_lengths_from_pois(own, video.frame_count()));

    std::vector<DeviationSeries> deviations = compute_deviations(model, features, opt.weights);
    std::vector<SegmentationResult> segmentations;
    segmentations.reserve(deviations.size());
    for (const auto& d : deviations)
        segmentations.push_back(opt.scoring.deviation_segmentation ? segment_deviations(d, opt.weights)
                                                                   : segment_runs(d, opt.weights));
    std::vector<TimeDeviation> time_devs = compute_time_deviations(model, features, opt.weights);
    return score_and_feedback(deviations, segmentations, time_devs, video.fps, opt.weights,
                              opt.scoring);
}

}  // namespace amal

#endif
