#ifndef AMAL_SYNTH_HPP
#define AMAL_SYNTH_HPP

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "amal/skeleton.hpp"

namespace amal {

/// 15-joint humanoid tree with the three plane-reference joints.
inline SkeletonTopology humanoid_topology() {
    SkeletonTopology t;
    t.joint_names = {"spinebase", "spinemid",  "neck",      "head",      "shoulderleft",
                     "elbowleft", "wristleft", "shoulderright", "elbowright", "wristright",
                     "handright", "hipleft",   "kneeleft",  "hipright",  "kneeright"};
    t.edges = {{0, 1}, {1, 2}, {2, 3}, {2, 4}, {4, 5}, {5, 6}, {2, 7},
               {7, 8}, {8, 9}, {9, 10}, {0, 11}, {11, 12}, {0, 13}, {13, 14}};
    t.refs.spine_base = 0;
    t.refs.shoulder_left = 4;
    t.refs.shoulder_right = 7;
    return t;
}

/// A planned rest, as fractions of the video duration.
struct RestPlan {
    double start = 0.0;
    double duration = 0.0;
};

/// Raise-hold-lower style movement of the right arm: the arm swings from
/// hanging to overhead and back, holding still during each planned rest.
/// Poses alternate between down and up at successive rests.
struct MovementSpec {
    SkeletonTopology topology = humanoid_topology();
    std::vector<RestPlan> rest_plan = {{0.0, 0.15}, {0.45, 0.10}, {0.85, 0.15}};
    int duration = 120;  // frames
    double fps = 30.0;
    double noise_std = 0.0;  // meters, per coordinate
    double limb_scale = 1.0; // person profile: uniform limb length factor
    unsigned seed = 1;

    void check() const {
        if (duration < 30) throw std::invalid_argument("duration must be >= 30 frames");
        if (noise_std < 0.0) throw std::invalid_argument("noise_std must be >= 0");
        double prev_end = -1.0;
        for (const auto& r : rest_plan) {
            if (r.start < prev_end) throw std::invalid_argument("rest plan overlaps or unsorted");
            if (r.start < 0.0 || r.start + r.duration > 1.0)
                throw std::invalid_argument("rest plan outside [0,1]");
            prev_end = r.start + r.duration;
        }
    }

    /// Planned rest boundaries in frames, for pipeline self-checks. Rounded
    /// inward so every returned frame lies inside the constant-pose window.
    std::vector<std::pair<int, int>> planned_rest_frames() const {
        std::vector<std::pair<int, int>> out;
        for (const auto& r : rest_plan)
            out.push_back({static_cast<int>(std::ceil(r.start * (duration - 1) - 1e-9)),
                           static_cast<int>(std::floor((r.start + r.duration) * (duration - 1) + 1e-9))});
        return out;
    }
};

namespace detail {

// Movement progress in [0,1]: constant inside each planned rest, cosine-eased
// between, alternating target pose at each rest (down, up, down, ...).
inline double movement_progress(const MovementSpec& spec, double t /* in [0,1] */) {
    const auto& plan = spec.rest_plan;
    auto pose_at_rest = [](std::size_t k) { return k % 2 == 0 ? 0.0 : 1.0; };
    if (plan.empty()) return 0.5 - 0.5 * std::cos(2.0 * M_PI * t);
    for (std::size_t k = 0; k < plan.size(); ++k)
        if (t >= plan[k].start && t <= plan[k].start + plan[k].duration) return pose_at_rest(k);
    // Between rest k and k+1 (or before the first / after the last).
    if (t < plan.front().start) return pose_at_rest(0);
    for (std::size_t k = 0; k + 1 < plan.size(); ++k) {
        double a = plan[k].start + plan[k].duration, b = plan[k + 1].start;
        if (t > a && t < b) {
            double u = (t - a) / (b - a);
            double eased = 0.5 - 0.5 * std::cos(M_PI * u);
            return pose_at_rest(k) + eased * (pose_at_rest(k + 1) - pose_at_rest(k));
        }
    }
    return pose_at_rest(plan.size() - 1);
}

}  // namespace detail

/// Deterministic given the spec; active joints hold exactly still inside
/// planned rests before noise is added.
inline SkeletonVideo generate(const MovementSpec& spec) {
    spec.check();
    const double s = spec.limb_scale;
    SkeletonVideo v;
    v.topology = spec.topology;
    v.fps = spec.fps;

    // Static base pose (camera coordinates, meters). Right arm animated below.
    Frame base(15);
    base[0] = {0.00, 0.80, 2.00};          // spinebase
    base[1] = {0.00, 0.80 + 0.25 * s, 2.00};
    base[2] = {0.00, 0.80 + 0.50 * s, 2.00};  // neck
    base[3] = {0.00, 0.80 + 0.62 * s, 2.00};
    base[4] = {-0.18 * s, 0.80 + 0.45 * s, 2.00};  // shoulderleft
    base[5] = {-0.22 * s, 0.80 + 0.18 * s, 2.00};
    base[6] = {-0.24 * s, 0.80 - 0.08 * s, 2.00};
    base[7] = {0.18 * s, 0.80 + 0.45 * s, 2.00};   // shoulderright
    base[11] = {-0.10 * s, 0.80 - 0.05 * s, 2.00};
    base[12] = {-0.11 * s, 0.80 - 0.45 * s, 2.00};
    base[13] = {0.10 * s, 0.80 - 0.05 * s, 2.00};
    base[14] = {0.11 * s, 0.80 - 0.45 * s, 2.00};

    const double upper = 0.28 * s, fore = 0.26 * s, hand = 0.08 * s;
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    for (int f = 0; f < spec.duration; ++f) {
        double t = spec.duration > 1 ? static_cast<double>(f) / (spec.duration - 1) : 0.0;
        double progress = detail::movement_progress(spec, t);
        Frame frame = base;
        // Arm direction swings in the X-Y plane from hanging (-Y) through the
        // side (+X) to overhead (+Y).
        double phi = M_PI * progress;
        Vec3 dir{std::sin(phi), -std::cos(phi), 0.0};
        frame[8] = frame[7] + dir * upper;           // elbowright
        frame[9] = frame[8] + dir * fore;            // wristright
        frame[10] = frame[9] + dir * hand;           // handright
        if (spec.noise_std > 0.0)
            for (auto& p : frame) {
                p.x += spec.noise_std * noise(rng);
                p.y += spec.noise_std * noise(rng);
                p.z += spec.noise_std * noise(rng);
            }
        v.frames.push_back(std::move(frame));
    }
    return v;
}

// ---------------------------------------------------------------------------
// Perturbations

enum class PerturbationKind {
    AmplitudeScale,       // scales displacement from the first-frame pose
    TempoScale,           // time-resamples by the magnitude factor
    Tremor,               // sinusoidal jitter on the target joint
    HoldShorten,          // removes frames from the middle of a frame range
    WrongJointActivation, // sinusoidal motion on a nominally inactive joint
    ElbowBend             // rotates the subtree below the pivot joint
};

/// Magnitude 0 always means identity; otherwise the magnitude is the scale
/// factor (amplitude/tempo) or the severity (tremor, bend in radians).
struct Perturbation {
    PerturbationKind kind = PerturbationKind::AmplitudeScale;
    double magnitude = 0.0;
    std::string target_joint;     // tremor / wrong-joint / elbow-bend pivot
    int range_start = -1, range_end = -1;  // optional frame range, inclusive
};

namespace detail {

inline std::pair<int, int> perturb_range(const Perturbation& p, int nframes) {
    int a = p.range_start < 0 ? 0 : p.range_start;
    int b = p.range_end < 0 ? nframes - 1 : p.range_end;
    if (a < 0 || b >= nframes || a > b) throw std::invalid_argument("perturbation range out of bounds");
    return {a, b};
}

inline int require_joint(const SkeletonTopology& t, const std::string& name) {
    int j = t.find_joint(name);
    if (j < 0) throw std::invalid_argument("unknown target joint '" + name + "'");
    return j;
}

// Joints whose tree path to spinebase passes through `pivot`.
inline std::vector<int> subtree_below(const SkeletonTopology& t, int pivot) {
    auto adj = t.adjacency();
    std::vector<int> parent(t.joint_count(), -1);
    std::vector<bool> seen(t.joint_count(), false);
    std::queue<int> q;
    q.push(t.refs.spine_base);
    seen[t.refs.spine_base] = true;
    while (!q.empty()) {
        int j = q.front();
        q.pop();
        for (auto [n, e] : adj[j])
            if (!seen[n]) {
                seen[n] = true;
                parent[n] = j;
                q.push(n);
            }
    }
    std::vector<int> out;
    for (int j = 0; j < t.joint_count(); ++j) {
        for (int p = j; p != -1; p = parent[p])
            if (p == pivot && j != pivot) {
                out.push_back(j);
                break;
            }
    }
    return out;
}

inline SkeletonVideo resample(const SkeletonVideo& v, int a, int b, int new_len) {
    SkeletonVideo out;
    out.topology = v.topology;
    out.fps = v.fps;
    for (int f = 0; f < a; ++f) out.frames.push_back(v.frames[f]);
    for (int k = 0; k < new_len; ++k) {
        double t = new_len > 1 ? a + static_cast<double>(k) * (b - a) / (new_len - 1) : a;
        int lo = static_cast<int>(std::floor(t));
        int hi = std::min(lo + 1, b);
        double u = t - lo;
        Frame frame(v.topology.joint_count());
        for (int j = 0; j < v.topology.joint_count(); ++j)
            frame[j] = v.frames[lo][j] * (1.0 - u) + v.frames[hi][j] * u;
        out.frames.push_back(std::move(frame));
    }
    for (int f = b + 1; f < v.frame_count(); ++f) out.frames.push_back(v.frames[f]);
    return out;
}

}  // namespace detail

inline SkeletonVideo perturb(const SkeletonVideo& video, const Perturbation& p) {
    if (p.magnitude == 0.0) return video;
    const int nf = video.frame_count();
    auto [a, b] = detail::perturb_range(p, nf);
    SkeletonVideo out = video;

    switch (p.kind) {
        case PerturbationKind::AmplitudeScale: {
            // Displacement measured against the first frame (the rest pose).
            const Frame& rest = video.frames[0];
            for (int f = a; f <= b; ++f)
                for (int j = 0; j < video.topology.joint_count(); ++j)
                    out.frames[f][j] = rest[j] + (video.frames[f][j] - rest[j]) * p.magnitude;
            break;
        }
        case PerturbationKind::TempoScale: {
            int span = b - a + 1;
            int new_len = std::max(1, static_cast<int>(std::lround(span * p.magnitude)));
            return detail::resample(video, a, b, new_len);
        }
        case PerturbationKind::Tremor: {
            int j = detail::require_joint(video.topology, p.target_joint);
            for (int f = a; f <= b; ++f)
                out.frames[f][j].x += 0.01 * p.magnitude * std::sin(2.0 * M_PI * 6.0 * f / video.fps);
            break;
        }
        case PerturbationKind::HoldShorten: {
            int span = b - a + 1;
            int remove = std::min(span - 1, static_cast<int>(std::lround(span * p.magnitude)));
            return detail::resample(video, a, b, span - remove);
        }
        case PerturbationKind::WrongJointActivation: {
            int j = detail::require_joint(video.topology, p.target_joint);
            for (int f = a; f <= b; ++f)
                out.frames[f][j].y += 0.05 * p.magnitude * std::sin(M_PI * (f - a) / double(b - a + 1));
            break;
        }
        case PerturbationKind::ElbowBend: {
            int pivot = detail::require_joint(video.topology, p.target_joint);
            auto moved = detail::subtree_below(video.topology, pivot);
            const Vec3 axis{0.0, 0.0, 1.0};
            for (int f = a; f <= b; ++f)
                for (int j : moved)
                    out.frames[f][j] = video.frames[f][pivot] +
                                       rotate_about_axis(video.frames[f][j] - video.frames[f][pivot],
                                                         axis, p.magnitude);
            break;
        }
    }
    return out;
}

}  // namespace amal

#endif
