#ifndef AMAL_NORMALIZE_HPP
#define AMAL_NORMALIZE_HPP

#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "amal/skeleton.hpp"

namespace amal {

/// Canonical edge lengths every video is rescaled to. One length per
/// topology edge, indexed like topology.edges.
struct DesignatedSkeleton {
    std::vector<double> edge_lengths;
    int root_joint = 0;  // BFS start for rescaling
};

/// Two-stage mean: per-person frame average first, then average over people.
/// A person may own several videos; their frames pool together.
inline DesignatedSkeleton compute_designated_skeleton(const std::vector<SkeletonVideo>& videos,
                                                      const std::vector<std::string>& person_ids) {
    if (videos.empty()) throw std::invalid_argument("no videos");
    if (person_ids.size() != videos.size())
        throw std::invalid_argument("person_ids must align with videos");
    const auto& topo = videos.front().topology;
    const int ne = static_cast<int>(topo.edges.size());

    std::map<std::string, std::vector<double>> person_sum;
    std::map<std::string, long> person_frames;
    for (std::size_t i = 0; i < videos.size(); ++i) {
        if (!(videos[i].topology == topo)) throw std::invalid_argument("mixed topologies");
        auto& sums = person_sum[person_ids[i]];
        sums.resize(ne, 0.0);
        for (const auto& frame : videos[i].frames)
            for (int e = 0; e < ne; ++e)
                sums[e] += (frame[topo.edges[e].first] - frame[topo.edges[e].second]).norm();
        person_frames[person_ids[i]] += videos[i].frame_count();
    }

    DesignatedSkeleton d;
    d.edge_lengths.assign(ne, 0.0);
    d.root_joint = topo.refs.spine_base;
    for (const auto& [person, sums] : person_sum) {
        for (int e = 0; e < ne; ++e) {
            double mean = sums[e] / static_cast<double>(person_frames[person]);
            if (mean <= 0.0)
                throw std::runtime_error("zero-length edge " + std::to_string(e) + " for person " + person);
            d.edge_lengths[e] += mean;
        }
    }
    for (double& l : d.edge_lengths) l /= static_cast<double>(person_sum.size());
    return d;
}

/// Rescales every frame so each edge has its designated length. Joints are
/// visited in BFS order from the root (neighbors in ascending joint index);
/// the root keeps its original position, every descendant is placed at
/// new(parent) + unit(old child - old parent) * designated length, so edge
/// directions of the input frame are preserved exactly.
inline SkeletonVideo normalize_dimensions(const SkeletonVideo& video, const DesignatedSkeleton& d) {
    const auto& topo = video.topology;
    if (d.edge_lengths.size() != topo.edges.size())
        throw std::invalid_argument("designated skeleton does not match topology");
    if (!topo.connected()) throw std::invalid_argument("topology not connected");

    auto adj = topo.adjacency();
    for (auto& nbrs : adj)
        std::sort(nbrs.begin(), nbrs.end());

    SkeletonVideo out = video;
    for (int f = 0; f < video.frame_count(); ++f) {
        const Frame& old = video.frames[f];
        Frame& cur = out.frames[f];
        std::vector<bool> placed(topo.joint_count(), false);
        std::queue<int> q;
        q.push(d.root_joint);
        placed[d.root_joint] = true;
        cur[d.root_joint] = old[d.root_joint];
        while (!q.empty()) {
            int p = q.front();
            q.pop();
            for (auto [child, e] : adj[p]) {
                if (placed[child]) continue;
                Vec3 dir = old[child] - old[p];
                double len = dir.norm();
                if (len == 0.0)
                    throw std::runtime_error("zero-length edge in frame " + std::to_string(f) +
                                             ": direction undefined");
                cur[child] = cur[p] + dir * (d.edge_lengths[e] / len);
                placed[child] = true;
                q.push(child);
            }
        }
    }
    return out;
}

/// Projects every frame onto the body-center plane coordinate system:
/// A = SpineBase, B = ShoulderLeft, C = ShoulderRight, D = (B+C)/2;
/// Y = unit(AD), Z = unit(AC x AB), X = Y x Z. Joints are multiplied by the
/// matrix with rows X, Y, Z and then translated so A sits at the origin.
inline SkeletonVideo align_to_body_plane(const SkeletonVideo& video) {
    const auto& refs = video.topology.refs;
    SkeletonVideo out = video;
    for (int f = 0; f < video.frame_count(); ++f) {
        const Frame& frame = video.frames[f];
        const Vec3 a = frame[refs.spine_base];
        const Vec3 b = frame[refs.shoulder_left];
        const Vec3 c = frame[refs.shoulder_right];
        const Vec3 d = (b + c) * 0.5;
        const Vec3 ad = d - a;
        const Vec3 zraw = (c - a).cross(b - a);
        if (ad.norm() == 0.0 || zraw.norm() == 0.0)
            throw std::runtime_error("degenerate reference joints in frame " + std::to_string(f));
        Mat3 m;
        m.rows[1] = ad.normalized();
        m.rows[2] = zraw.normalized();
        m.rows[0] = m.rows[1].cross(m.rows[2]);
        const Vec3 origin = m * a;
        for (int j = 0; j < video.topology.joint_count(); ++j)
            out.frames[f][j] = m * frame[j] - origin;
    }
    return out;
}

}  // namespace amal

#endif
