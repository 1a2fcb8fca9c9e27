#ifndef AMAL_SKELETON_HPP
#define AMAL_SKELETON_HPP

#include <cstddef>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "amal/geometry.hpp"

namespace amal {

struct ReferenceJoints {
    int spine_base = -1;
    int shoulder_left = -1;
    int shoulder_right = -1;
};

/// Fixed joint/edge layout shared by every frame of a skeleton video.
struct SkeletonTopology {
    std::vector<std::string> joint_names;
    std::vector<std::pair<int, int>> edges;  // undirected, 0-based indices
    ReferenceJoints refs;

    int joint_count() const { return static_cast<int>(joint_names.size()); }

    int find_joint(const std::string& name) const {
        for (int i = 0; i < joint_count(); ++i)
            if (joint_names[i] == name) return i;
        return -1;
    }

    /// Adjacency list; each entry lists (neighbor joint, edge index).
    std::vector<std::vector<std::pair<int, int>>> adjacency() const {
        std::vector<std::vector<std::pair<int, int>>> adj(joint_names.size());
        for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
            adj[edges[e].first].push_back({edges[e].second, e});
            adj[edges[e].second].push_back({edges[e].first, e});
        }
        return adj;
    }

    bool connected() const {
        if (joint_names.empty()) return true;
        auto adj = adjacency();
        std::vector<bool> seen(joint_names.size(), false);
        std::queue<int> q;
        q.push(0);
        seen[0] = true;
        std::size_t found = 1;
        while (!q.empty()) {
            int j = q.front();
            q.pop();
            for (auto [n, e] : adj[j])
                if (!seen[n]) {
                    seen[n] = true;
                    ++found;
                    q.push(n);
                }
        }
        return found == joint_names.size();
    }

    bool operator==(const SkeletonTopology& o) const {
        return joint_names == o.joint_names && edges == o.edges &&
               refs.spine_base == o.refs.spine_base &&
               refs.shoulder_left == o.refs.shoulder_left &&
               refs.shoulder_right == o.refs.shoulder_right;
    }
};

using Frame = std::vector<Vec3>;  // one position per topology joint

struct SkeletonVideo {
    SkeletonTopology topology;
    double fps = 30.0;
    std::vector<Frame> frames;

    int frame_count() const { return static_cast<int>(frames.size()); }
};

struct Violation {
    std::string what;
    int location = -1;  // frame or edge index where applicable, else -1
};

/// Checks every SkeletonVideo invariant; violations are data, not errors.
inline std::vector<Violation> validate(const SkeletonVideo& v) {
    std::vector<Violation> out;
    const auto& t = v.topology;
    const int n = t.joint_count();

    std::unordered_set<std::string> names(t.joint_names.begin(), t.joint_names.end());
    if (static_cast<int>(names.size()) != n)
        out.push_back({"duplicate joint names", -1});

    for (int e = 0; e < static_cast<int>(t.edges.size()); ++e) {
        auto [a, b] = t.edges[e];
        if (a < 0 || a >= n || b < 0 || b >= n)
            out.push_back({"edge references invalid joint index", e});
        else if (a == b)
            out.push_back({"self-loop edge", e});
    }

    if (!t.connected()) out.push_back({"topology not connected", -1});

    for (int r : {t.refs.spine_base, t.refs.shoulder_left, t.refs.shoulder_right})
        if (r < 0 || r >= n) {
            out.push_back({"reference joint missing", -1});
            break;
        }

    if (v.fps <= 0.0) out.push_back({"non-positive fps", -1});
    if (v.frames.empty()) out.push_back({"video has no frames", -1});
    for (int f = 0; f < v.frame_count(); ++f)
        if (static_cast<int>(v.frames[f].size()) != n)
            out.push_back({"incomplete frame", f});

    return out;
}

inline void require_valid(const SkeletonVideo& v) {
    auto viol = validate(v);
    if (!viol.empty()) throw std::runtime_error("invalid skeleton video: " + viol.front().what);
}

}  // namespace amal

#endif
