#ifndef AMAL_SKV_HPP
#define AMAL_SKV_HPP

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "amal/skeleton.hpp"

// SKV: line-oriented UTF-8 text format for skeleton videos.
//   SKV 1
//   fps <decimal>
//   joints <name...>
//   edges <i>-<j> ...
//   refs <spinebase> <shoulderleft> <shoulderright>
//   then per frame: a "frame" line followed by one "<x> <y> <z>" line per joint.
// Blank lines and lines starting with '#' are ignored.

namespace amal {

struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

inline double parse_double(const std::string& s, int line) {
    double v;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw ParseError(line, "malformed number '" + s + "'");
    return v;
}

inline int parse_int(const std::string& s, int line) {
    int v;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw ParseError(line, "malformed integer '" + s + "'");
    return v;
}

// Reads the next meaningful line; returns false at EOF.
inline bool next_line(std::istream& in, std::string& out, int& lineno) {
    while (std::getline(in, out)) {
        ++lineno;
        if (!out.empty() && out.back() == '\r') out.pop_back();
        std::size_t i = out.find_first_not_of(" \t");
        if (i == std::string::npos || out[i] == '#') continue;
        return true;
    }
    return false;
}

/// Shortest decimal text with up to 6 significant digits that survives round-trip.
inline std::string format_coord(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace detail

inline SkeletonVideo parse_video(std::istream& in) {
    using namespace detail;
    SkeletonVideo v;
    std::string line;
    int lineno = 0;

    if (!next_line(in, line, lineno) || split_ws(line) != std::vector<std::string>{"SKV", "1"})
        throw ParseError(lineno, "expected header 'SKV 1'");

    if (!next_line(in, line, lineno)) throw ParseError(lineno, "missing fps line");
    auto toks = split_ws(line);
    if (toks.size() != 2 || toks[0] != "fps") throw ParseError(lineno, "expected 'fps <value>'");
    v.fps = parse_double(toks[1], lineno);
    if (v.fps <= 0.0) throw ParseError(lineno, "fps must be positive");

    if (!next_line(in, line, lineno)) throw ParseError(lineno, "missing joints line");
    toks = split_ws(line);
    if (toks.size() < 2 || toks[0] != "joints") throw ParseError(lineno, "expected 'joints <names>'");
    v.topology.joint_names.assign(toks.begin() + 1, toks.end());
    const int n = v.topology.joint_count();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (v.topology.joint_names[i] == v.topology.joint_names[j])
                throw ParseError(lineno, "duplicate joint name '" + v.topology.joint_names[i] + "'");

    if (!next_line(in, line, lineno)) throw ParseError(lineno, "missing edges line");
    toks = split_ws(line);
    if (toks.empty() || toks[0] != "edges") throw ParseError(lineno, "expected 'edges <i>-<j> ...'");
    for (std::size_t k = 1; k < toks.size(); ++k) {
        auto dash = toks[k].find('-');
        if (dash == std::string::npos) throw ParseError(lineno, "edge '" + toks[k] + "' not of form i-j");
        int a = parse_int(toks[k].substr(0, dash), lineno);
        int b = parse_int(toks[k].substr(dash + 1), lineno);
        if (a < 0 || a >= n || b < 0 || b >= n)
            throw ParseError(lineno, "edge '" + toks[k] + "' references unknown joint");
        if (a == b) throw ParseError(lineno, "self-loop edge '" + toks[k] + "'");
        v.topology.edges.push_back({a, b});
    }

    if (!next_line(in, line, lineno)) throw ParseError(lineno, "missing refs line");
    toks = split_ws(line);
    if (toks.size() != 4 || toks[0] != "refs")
        throw ParseError(lineno, "expected 'refs <spinebase> <shoulderleft> <shoulderright>'");
    v.topology.refs.spine_base = parse_int(toks[1], lineno);
    v.topology.refs.shoulder_left = parse_int(toks[2], lineno);
    v.topology.refs.shoulder_right = parse_int(toks[3], lineno);
    for (int r : {v.topology.refs.spine_base, v.topology.refs.shoulder_left, v.topology.refs.shoulder_right})
        if (r < 0 || r >= n) throw ParseError(lineno, "reference joint index out of range");

    while (next_line(in, line, lineno)) {
        if (split_ws(line) != std::vector<std::string>{"frame"})
            throw ParseError(lineno, "expected 'frame', got '" + line + "'");
        Frame frame;
        frame.reserve(n);
        for (int j = 0; j < n; ++j) {
            if (!next_line(in, line, lineno))
                throw ParseError(lineno, "frame truncated: expected " + std::to_string(n) +
                                             " joint lines, got " + std::to_string(j));
            toks = split_ws(line);
            if (toks.size() != 3)
                throw ParseError(lineno, "joint line must have exactly 3 coordinates");
            frame.push_back({parse_double(toks[0], lineno), parse_double(toks[1], lineno),
                             parse_double(toks[2], lineno)});
        }
        v.frames.push_back(std::move(frame));
    }

    if (v.frames.empty()) throw ParseError(lineno, "video has no frames");
    auto viol = validate(v);
    if (!viol.empty()) throw ParseError(lineno, viol.front().what);
    return v;
}

inline SkeletonVideo parse_video(const std::string& text) {
    std::istringstream in(text);
    return parse_video(in);
}

inline void serialize_video(const SkeletonVideo& v, std::ostream& out) {
    using detail::format_coord;
    out << "SKV 1\n";
    out << "fps " << format_coord(v.fps) << "\n";
    out << "joints";
    for (const auto& name : v.topology.joint_names) out << " " << name;
    out << "\nedges";
    for (auto [a, b] : v.topology.edges) out << " " << a << "-" << b;
    out << "\nrefs " << v.topology.refs.spine_base << " " << v.topology.refs.shoulder_left << " "
        << v.topology.refs.shoulder_right << "\n";
    for (const auto& frame : v.frames) {
        out << "frame\n";
        for (const auto& p : frame)
            out << format_coord(p.x) << " " << format_coord(p.y) << " " << format_coord(p.z) << "\n";
    }
}

inline std::string serialize_video(const SkeletonVideo& v) {
    std::ostringstream out;
    serialize_video(v, out);
    return out.str();
}

}  // namespace amal

#endif
