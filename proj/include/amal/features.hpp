#ifndef AMAL_FEATURES_HPP
#define AMAL_FEATURES_HPP

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "amal/align.hpp"
#include "amal/skeleton.hpp"

namespace amal {

/// A: active-joint related, N: non-active-joint related, T: time-related.
enum class ParamClass : char { Active = 'A', NonActive = 'N', Time = 'T' };

/// One scalar observable tracked over the warped timeline. `values[f]` is the
/// observation at frame f; NaN marks a frame where the observable is
/// undefined (degenerate angle). Velocity series are one frame shorter than
/// the video.
struct FeatureSeries {
    std::string key;  // e.g. pos:wrist:x, dist:a:b, ang:a-b:b-c
    ParamClass cls = ParamClass::NonActive;
    std::vector<double> values;
};

/// Scalar observables with a single value per video (time-related).
struct TimeFeature {
    std::string key;  // time:total or time:seg:<k>
    double value = 0.0;
};

struct FeatureSet {
    std::vector<FeatureSeries> series;
    std::vector<TimeFeature> time;
};

inline bool feature_missing(double v) { return std::isnan(v); }

namespace detail {

inline const char* axis_name(int a) { return a == 0 ? "x" : a == 1 ? "y" : "z"; }

inline double axis_value(const Vec3& v, int a) { return a == 0 ? v.x : a == 1 ? v.y : v.z; }

inline std::string edge_key(const SkeletonTopology& t, int e) {
    return t.joint_names[t.edges[e].first] + "-" + t.joint_names[t.edges[e].second];
}

// Distance/angle parameters count as active when any involved joint is.
inline ParamClass joint_class(const ActiveJointSet& active, std::initializer_list<int> joints) {
    for (int j : joints)
        if (active.is_active(j)) return ParamClass::Active;
    return ParamClass::NonActive;
}

}  // namespace detail

/// Per-frame scalars: joint positions and velocities split by axis, pairwise
/// joint distances, and the angle at every pair of edges sharing a joint.
/// Time features carry the pre-warp total length and inter-PoI segment
/// lengths, both in frames of the original video.
inline FeatureSet extract_frame_features(const SkeletonVideo& video, const ActiveJointSet& active,
                                         int original_length,
                                         const std::vector<int>& original_segment_lengths) {
    const auto& topo = video.topology;
    const int nj = topo.joint_count();
    const int nf = video.frame_count();
    FeatureSet out;

    for (int j = 0; j < nj; ++j)
        for (int a = 0; a < 3; ++a) {
            FeatureSeries s;
            s.key = "pos:" + topo.joint_names[j] + ":" + detail::axis_name(a);
            s.cls = detail::joint_class(active, {j});
            s.values.resize(nf);
            for (int f = 0; f < nf; ++f) s.values[f] = detail::axis_value(video.frames[f][j], a);
            out.series.push_back(std::move(s));
        }

    for (int j = 0; j < nj; ++j)
        for (int a = 0; a < 3; ++a) {
            FeatureSeries s;
            s.key = "vel:" + topo.joint_names[j] + ":" + detail::axis_name(a);
            s.cls = detail::joint_class(active, {j});
            s.values.resize(nf - 1);
            for (int f = 0; f + 1 < nf; ++f)
                s.values[f] = detail::axis_value(video.frames[f + 1][j] - video.frames[f][j], a);
            out.series.push_back(std::move(s));
        }

    for (int i = 0; i < nj; ++i)
        for (int j = i + 1; j < nj; ++j) {
            FeatureSeries s;
            s.key = "dist:" + topo.joint_names[i] + ":" + topo.joint_names[j];
            s.cls = detail::joint_class(active, {i, j});
            s.values.resize(nf);
            for (int f = 0; f < nf; ++f) s.values[f] = (video.frames[f][i] - video.frames[f][j]).norm();
            out.series.push_back(std::move(s));
        }

    // Angles at shared joints only; adjacent edges define the joint angle.
    auto adj = topo.adjacency();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int j = 0; j < nj; ++j) {
        const auto& nbrs = adj[j];
        for (std::size_t a = 0; a < nbrs.size(); ++a)
            for (std::size_t b = a + 1; b < nbrs.size(); ++b) {
                if (nbrs[a].second > nbrs[b].second) continue;  // one orientation per pair
                FeatureSeries s;
                s.key = "ang:" + detail::edge_key(topo, nbrs[a].second) + ":" +
                        detail::edge_key(topo, nbrs[b].second);
                s.cls = detail::joint_class(active, {j, nbrs[a].first, nbrs[b].first});
                s.values.resize(nf);
                for (int f = 0; f < nf; ++f) {
                    Vec3 u = video.frames[f][nbrs[a].first] - video.frames[f][j];
                    Vec3 v = video.frames[f][nbrs[b].first] - video.frames[f][j];
                    double lu = u.norm(), lv = v.norm();
                    if (lu == 0.0 || lv == 0.0) {
                        s.values[f] = nan;  // undefined angle, recorded as missing
                        continue;
                    }
                    double c = std::clamp(u.dot(v) / (lu * lv), -1.0, 1.0);
                    s.values[f] = std::acos(c);
                }
                out.series.push_back(std::move(s));
            }
    }

    out.time.push_back({"time:total", static_cast<double>(original_length)});
    for (std::size_t k = 0; k < original_segment_lengths.size(); ++k)
        out.time.push_back({"time:seg:" + std::to_string(k),
                            static_cast<double>(original_segment_lengths[k])});
    return out;
}

/// Inter-PoI segment lengths over [0 .. length-1] with virtual boundaries at
/// both ends. Boundaries are kept even when coincident so every video yields
/// the same 2k+1 segment features for k rests.
inline std::vector<int> segment_lengths_from_pois(const PoISet& pois, int length) {
    std::vector<int> b{0};
    for (int p : pois.indices) b.push_back(std::clamp(p, 0, length - 1));
    b.push_back(length - 1);
    std::vector<int> out;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) out.push_back(b[i + 1] - b[i]);
    return out;
}

}  // namespace amal

#endif
