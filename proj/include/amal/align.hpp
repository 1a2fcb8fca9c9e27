#ifndef AMAL_ALIGN_HPP
#define AMAL_ALIGN_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "amal/signal.hpp"
#include "amal/skeleton.hpp"

namespace amal {

struct AlignmentConfig {
    double p_joint = 0.8;      // vote fraction for active joints
    double eta = -1.5;         // velocity-flip exponent
    double p_rest = 0.3;       // fraction of active joints agreeing on a rest frame
    double rho_gap = 0.075;    // new-sequence gap as a fraction of video length
    double eta_decay = 0.9;    // retry multiplier when too few rests are found
    int median_window = 5;
    int pyramid_levels = 2;

    void check() const {
        auto in01 = [](double v) { return v > 0.0 && v <= 1.0; };
        if (!in01(p_joint) || !in01(p_rest) || !in01(rho_gap))
            throw std::invalid_argument("p_joint, p_rest, rho_gap must be in (0,1]");
        if (eta >= -1.0) throw std::invalid_argument("eta must be < -1");
        if (eta_decay <= 0.0 || eta_decay >= 1.0) throw std::invalid_argument("eta_decay must be in (0,1)");
        if (median_window < 3 || median_window % 2 == 0)
            throw std::invalid_argument("median_window must be odd >= 3");
        if (pyramid_levels < 0) throw std::invalid_argument("pyramid_levels must be >= 0");
    }
};

struct ActiveJointSet {
    std::vector<int> active;                      // sorted joint indices
    std::vector<std::vector<int>> per_video_votes;

    bool is_active(int joint) const {
        return std::binary_search(active.begin(), active.end(), joint);
    }
};

struct RestSequence {
    int start_frame = 0;
    int end_frame = 0;  // inclusive
};

struct PoISet {
    std::vector<int> indices;  // strictly increasing rest boundaries, flattened
};

/// Boundaries within this many frames of the video edge snap onto it: the
/// smoothing filters shave a frame or two off rests that physically touch the
/// start or end of the recording, and the virtual warp anchors live there.
inline constexpr int kEdgeSnap = 3;

inline PoISet pois_from_rests(const std::vector<RestSequence>& rests, int video_length = 0) {
    PoISet p;
    for (const auto& r : rests) {
        int start = r.start_frame, end = r.end_frame;
        if (video_length > 0) {
            if (start <= kEdgeSnap) start = 0;
            if (end >= video_length - 1 - kEdgeSnap) end = video_length - 1;
        }
        p.indices.push_back(start);
        p.indices.push_back(end);
    }
    return p;
}

/// |L(j,f+1) - L(j,f)| for every consecutive frame pair; length is frames-1.
inline std::vector<double> compute_velocity_magnitudes(const SkeletonVideo& video, int joint) {
    if (video.frame_count() < 2) throw std::invalid_argument("need at least 2 frames");
    std::vector<double> out(video.frame_count() - 1);
    for (int f = 0; f + 1 < video.frame_count(); ++f)
        out[f] = (video.frames[f + 1][joint] - video.frames[f][joint]).norm();
    return out;
}

namespace detail {

// Sample variance of a joint's 3D positions: sum of squared distances from
// the mean location, divided by |F|-1.
inline double joint_location_variance(const SkeletonVideo& video, int joint) {
    const int n = video.frame_count();
    Vec3 mean;
    for (const auto& f : video.frames) mean += f[joint];
    mean = mean / static_cast<double>(n);
    double acc = 0.0;
    for (const auto& f : video.frames) {
        Vec3 d = f[joint] - mean;
        acc += d.dot(d);
    }
    return acc / static_cast<double>(n - 1);
}

}  // namespace detail

/// A joint is voted active in a video iff its location variance strictly
/// exceeds the mean of all joint variances of that video; the final set keeps
/// joints voted by at least p_joint of the videos.
inline ActiveJointSet detect_active_joints(const std::vector<SkeletonVideo>& videos,
                                           const AlignmentConfig& cfg) {
    if (videos.empty()) throw std::invalid_argument("no videos");
    const int nj = videos.front().topology.joint_count();
    ActiveJointSet result;
    std::vector<int> tally(nj, 0);
    for (const auto& video : videos) {
        if (video.frame_count() < 2) throw std::invalid_argument("video with < 2 frames");
        std::vector<double> var(nj);
        double mean = 0.0;
        for (int j = 0; j < nj; ++j) {
            var[j] = detail::joint_location_variance(video, j);
            mean += var[j];
        }
        mean /= nj;
        std::vector<int> votes;
        for (int j = 0; j < nj; ++j)
            if (var[j] > mean) {
                votes.push_back(j);
                ++tally[j];
            }
        result.per_video_votes.push_back(std::move(votes));
    }
    const double needed = cfg.p_joint * static_cast<double>(videos.size());
    for (int j = 0; j < nj; ++j)
        if (static_cast<double>(tally[j]) >= needed) result.active.push_back(j);
    return result;
}

// Velocity floor before raising to the negative exponent; rest frames have
// near-zero velocity and must map to large finite flipped values.
inline constexpr double kVelocityClamp = 1e-6;

namespace detail {

inline std::vector<RestSequence> detect_rests_once(const SkeletonVideo& video,
                                                   const ActiveJointSet& active,
                                                   const AlignmentConfig& cfg, double eta) {
    const int nframes = video.frame_count();
    const int nvel = nframes - 1;
    std::vector<int> rest_votes(nvel, 0);

    for (int joint : active.active) {
        // positions: median filter then Gaussian pyramid, per coordinate
        std::vector<double> xs(nframes), ys(nframes), zs(nframes);
        for (int f = 0; f < nframes; ++f) {
            xs[f] = video.frames[f][joint].x;
            ys[f] = video.frames[f][joint].y;
            zs[f] = video.frames[f][joint].z;
        }
        for (auto* s : {&xs, &ys, &zs})
            *s = gaussian_smooth(median_filter(*s, cfg.median_window), cfg.pyramid_levels);

        std::vector<double> vel(nvel);
        for (int f = 0; f < nvel; ++f) {
            Vec3 d{xs[f + 1] - xs[f], ys[f + 1] - ys[f], zs[f + 1] - zs[f]};
            vel[f] = d.norm();
        }
        vel = median_filter(vel, cfg.median_window);

        std::vector<double> flipped(nvel);
        double mean = 0.0;
        for (int f = 0; f < nvel; ++f) {
            flipped[f] = std::pow(std::max(vel[f], kVelocityClamp), eta);
            mean += flipped[f];
        }
        mean /= nvel;
        // Strictly above the mean, with a relative epsilon so a nominally
        // constant series (steady motion) never votes off rounding noise.
        for (int f = 0; f < nvel; ++f)
            if (flipped[f] > mean * (1.0 + 1e-9)) ++rest_votes[f];
    }

    const double needed = cfg.p_rest * static_cast<double>(active.active.size());
    std::vector<int> rest_frames;
    for (int f = 0; f < nvel; ++f)
        if (static_cast<double>(rest_votes[f]) >= needed) rest_frames.push_back(f);

    // A rest velocity index f means frames f and f+1 are both at rest, so a
    // run [a,b] of velocity indices covers position frames [a, b+1].
    std::vector<RestSequence> rests;
    const double gap = cfg.rho_gap * static_cast<double>(nframes);
    int prev = -1;
    for (int idx : rest_frames) {
        if (rests.empty() || static_cast<double>(idx - prev) > gap)
            rests.push_back({idx, idx + 1});
        else
            rests.back().end_frame = idx + 1;
        prev = idx;
    }
    return rests;
}

}  // namespace detail

/// Rest frames are runs of near-zero active-joint velocity. When
/// required_count is set and too few sequences are found, detection retries
/// with eta decayed toward -1 until the count is reached.
inline std::vector<RestSequence> detect_rest_sequences(const SkeletonVideo& video,
                                                       const ActiveJointSet& active,
                                                       const AlignmentConfig& cfg,
                                                       int required_count = -1) {
    if (active.active.empty()) throw std::invalid_argument("no active joints");
    if (video.frame_count() < 2) throw std::invalid_argument("video with < 2 frames");
    double eta = cfg.eta;
    auto rests = detail::detect_rests_once(video, active, cfg, eta);
    if (required_count < 0) return rests;
    while (static_cast<int>(rests.size()) < required_count) {
        eta *= cfg.eta_decay;
        if (eta > -1.0)
            throw std::runtime_error("rest detection: could not reach " +
                                     std::to_string(required_count) + " sequences");
        rests = detail::detect_rests_once(video, active, cfg, eta);
    }
    return rests;
}

namespace detail {

inline std::vector<double> normalized_boundaries(const std::vector<RestSequence>& rests, int length) {
    std::vector<double> v;
    for (const auto& r : rests) {
        v.push_back(static_cast<double>(r.start_frame) / static_cast<double>(length));
        v.push_back(static_cast<double>(r.end_frame) / static_cast<double>(length));
    }
    return v;
}

inline double sq_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return acc;
}

// All k-subsets of {0..n-1}, in lexicographic order.
inline void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        fn(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace detail

/// Forces every video to the designated rest count (lower median of the
/// per-video counts). Videos with surplus rests keep the subset closest to the
/// mean normalized boundary vector of the videos already at the count; videos
/// with a deficit re-run detection with decayed eta.
inline std::vector<PoISet> reconcile_rest_counts(std::vector<std::vector<RestSequence>> per_video_rests,
                                                 const std::vector<SkeletonVideo>& videos,
                                                 const ActiveJointSet& active,
                                                 const AlignmentConfig& cfg) {
    const std::size_t n = videos.size();
    if (per_video_rests.size() != n) throw std::invalid_argument("rests/videos size mismatch");

    std::vector<int> counts;
    for (const auto& r : per_video_rests) counts.push_back(static_cast<int>(r.size()));
    std::vector<int> sorted = counts;
    std::sort(sorted.begin(), sorted.end());
    const int designated = sorted[(sorted.size() - 1) / 2];  // lower median

    for (std::size_t i = 0; i < n; ++i)
        if (counts[i] < designated)
            per_video_rests[i] = detect_rest_sequences(videos[i], active, cfg, designated);

    // Mean boundary vector over videos already at the designated count.
    std::vector<double> mean(2 * designated, 0.0);
    int at_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (static_cast<int>(per_video_rests[i].size()) != designated) continue;
        auto b = detail::normalized_boundaries(per_video_rests[i], videos[i].frame_count());
        for (std::size_t k = 0; k < b.size(); ++k) mean[k] += b[k];
        ++at_count;
    }
    for (double& m : mean) m /= std::max(1, at_count);

    std::vector<PoISet> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& rests = per_video_rests[i];
        const int have = static_cast<int>(rests.size());
        if (have > designated) {
            std::vector<RestSequence> best;
            double best_d = std::numeric_limits<double>::infinity();
            detail::for_each_subset(have, designated, [&](const std::vector<int>& idx) {
                std::vector<RestSequence> cand;
                for (int k : idx) cand.push_back(rests[k]);
                double d = detail::sq_distance(
                    detail::normalized_boundaries(cand, videos[i].frame_count()), mean);
                if (d < best_d) {
                    best_d = d;
                    best = cand;
                }
            });
            rests = best;
        }
        out[i] = pois_from_rests(rests, videos[i].frame_count());
    }
    return out;
}

/// Index of the video whose length-normalized PoI vector is closest to the
/// centroid; ties go to the smallest index.
inline int select_reference_video(const std::vector<PoISet>& poi_sets,
                                  const std::vector<int>& video_lengths) {
    if (poi_sets.empty()) throw std::invalid_argument("no PoI sets");
    const std::size_t k = poi_sets.front().indices.size();
    std::vector<std::vector<double>> norm(poi_sets.size());
    std::vector<double> mean(k, 0.0);
    for (std::size_t i = 0; i < poi_sets.size(); ++i) {
        if (poi_sets[i].indices.size() != k) throw std::invalid_argument("PoI sets differ in length");
        for (int idx : poi_sets[i].indices)
            norm[i].push_back(static_cast<double>(idx) / static_cast<double>(video_lengths[i]));
        for (std::size_t j = 0; j < k; ++j) mean[j] += norm[i][j];
    }
    for (double& m : mean) m /= static_cast<double>(poi_sets.size());
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poi_sets.size(); ++i) {
        double d = detail::sq_distance(norm[i], mean);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

namespace detail {

inline Vec3 interpolate_at(const SkeletonVideo& v, double t, int joint) {
    const int lo = static_cast<int>(std::floor(t));
    const int hi = std::min(lo + 1, v.frame_count() - 1);
    const double u = t - lo;
    return v.frames[lo][joint] * (1.0 - u) + v.frames[hi][joint] * u;
}

// Augments a PoI list with virtual boundaries 0 and length-1, dropping
// duplicates so the result stays strictly increasing.
inline std::vector<int> augmented_pois(const std::vector<int>& pois, int length) {
    std::vector<int> out{0};
    for (int p : pois)
        if (p > out.back() && p < length - 1) out.push_back(p);
    if (length - 1 > out.back()) out.push_back(length - 1);
    return out;
}

}  // namespace detail

/// Piecewise linear time-rescaling: each inter-PoI span of the source is
/// stretched onto the matching span of the reference timeline; joint
/// positions at fractional source indices are linear interpolations.
inline SkeletonVideo warp_to_reference(const SkeletonVideo& video, const PoISet& own_pois,
                                       const PoISet& ref_pois, int ref_length) {
    if (video.frames.empty()) throw std::invalid_argument("empty video");
    if (own_pois.indices.size() != ref_pois.indices.size())
        throw std::invalid_argument("PoI sets differ in length");

    // Virtual PoIs keep both lists same length: a boundary collapsed into
    // 0/length-1 on one side must collapse on the other too.
    std::vector<double> src{0.0}, dst{0.0};
    for (std::size_t i = 0; i < own_pois.indices.size(); ++i) {
        double s = std::clamp(own_pois.indices[i], 0, video.frame_count() - 1);
        double d = std::clamp(ref_pois.indices[i], 0, ref_length - 1);
        if (d > dst.back()) {
            src.push_back(std::max(s, src.back()));
            dst.push_back(d);
        }
    }
    if (dst.back() < ref_length - 1) {
        src.push_back(video.frame_count() - 1);
        dst.push_back(ref_length - 1);
    } else {
        src.back() = video.frame_count() - 1;
    }

    SkeletonVideo out;
    out.topology = video.topology;
    out.fps = video.fps;
    out.frames.resize(ref_length, Frame(video.topology.joint_count()));
    std::size_t seg = 0;
    for (int t = 0; t < ref_length; ++t) {
        while (seg + 2 < dst.size() && t > dst[seg + 1]) ++seg;
        const double d0 = dst[seg], d1 = dst[seg + 1];
        const double s0 = src[seg], s1 = src[seg + 1];
        double srct;
        if (s1 - s0 == d1 - d0) {
            srct = s0 + (t - d0);  // unstretched span: exact integer mapping
        } else {
            const double u = (d1 > d0) ? (t - d0) / (d1 - d0) : 1.0;
            srct = (t == d1) ? s1 : s0 + u * (s1 - s0);
        }
        for (int j = 0; j < video.topology.joint_count(); ++j)
            out.frames[t][j] = detail::interpolate_at(video, srct, j);
    }
    return out;
}

// ---------------------------------------------------------------------------
// DTW baseline

/// Per-frame feature for DTW distance: active-joint positions concatenated
/// with active-joint velocities (zero for the last frame).
inline std::vector<std::vector<double>> dtw_features(const SkeletonVideo& v,
                                                     const ActiveJointSet& active) {
    std::vector<int> joints = active.active;
    if (joints.empty())
        for (int j = 0; j < v.topology.joint_count(); ++j) joints.push_back(j);
    std::vector<std::vector<double>> out(v.frame_count());
    for (int f = 0; f < v.frame_count(); ++f) {
        auto& feat = out[f];
        for (int j : joints) {
            const Vec3& p = v.frames[f][j];
            feat.insert(feat.end(), {p.x, p.y, p.z});
        }
        for (int j : joints) {
            Vec3 vel = (f + 1 < v.frame_count()) ? v.frames[f + 1][j] - v.frames[f][j] : Vec3{};
            feat.insert(feat.end(), {vel.x, vel.y, vel.z});
        }
    }
    return out;
}

struct DtwResult {
    double cost = 0.0;
    std::vector<int> source_for_ref;  // length = reference frames
};

/// Classic O(nm) dynamic time warping with Euclidean frame distance.
/// source_for_ref[t] is the source frame matched to reference frame t,
/// taking the last match when the path pairs several source frames with t.
inline DtwResult dtw_match(const std::vector<std::vector<double>>& src,
                           const std::vector<std::vector<double>>& ref) {
    const int n = static_cast<int>(src.size()), m = static_cast<int>(ref.size());
    if (n == 0 || m == 0) throw std::invalid_argument("empty input");
    auto dist = [&](int i, int j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < src[i].size(); ++k) {
            double d = src[i][k] - ref[j][k];
            acc += d * d;
        }
        return std::sqrt(acc);
    };
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> dp(n, std::vector<double>(m, inf));
    std::vector<std::vector<int>> back(n, std::vector<int>(m, -1));  // 0=diag 1=up 2=left
    dp[0][0] = dist(0, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            if (i == 0 && j == 0) continue;
            double best = inf;
            int arg = -1;
            if (i > 0 && j > 0 && dp[i - 1][j - 1] < best) { best = dp[i - 1][j - 1]; arg = 0; }
            if (i > 0 && dp[i - 1][j] < best) { best = dp[i - 1][j]; arg = 1; }
            if (j > 0 && dp[i][j - 1] < best) { best = dp[i][j - 1]; arg = 2; }
            dp[i][j] = best + dist(i, j);
            back[i][j] = arg;
        }

    DtwResult r;
    r.cost = dp[n - 1][m - 1];
    r.source_for_ref.assign(m, -1);
    int i = n - 1, j = m - 1;
    while (true) {
        if (i > r.source_for_ref[j]) r.source_for_ref[j] = i;  // last match wins
        if (back[i][j] < 0) break;
        switch (back[i][j]) {
            case 0: --i; --j; break;
            case 1: --i; break;
            default: --j; break;
        }
    }
    return r;
}

/// Remaps the video onto the reference timeline using the DTW path.
inline SkeletonVideo dtw_align(const SkeletonVideo& video, const SkeletonVideo& reference,
                               const ActiveJointSet& active) {
    auto r = dtw_match(dtw_features(video, active), dtw_features(reference, active));
    SkeletonVideo out;
    out.topology = video.topology;
    out.fps = reference.fps;
    out.frames.reserve(reference.frame_count());
    for (int t = 0; t < reference.frame_count(); ++t)
        out.frames.push_back(video.frames[r.source_for_ref[t]]);
    return out;
}

}  // namespace amal

#endif
