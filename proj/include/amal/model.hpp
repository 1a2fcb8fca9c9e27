#ifndef AMAL_MODEL_HPP
#define AMAL_MODEL_HPP

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "amal/features.hpp"
#include "amal/normalize.hpp"
#include "amal/skv.hpp"

namespace amal {

/// Leave-one-out statistics of one scalar parameter: the observation mean,
/// the mean of the leave-one-out absolute differences, and their sample
/// standard deviation.
struct ParameterTriplet {
    double mean = 0.0;
    double dev_mean = 0.0;
    double dev_std = 0.0;
    bool present = true;  // false when the parameter was dropped at fit time
};

/// Per-frame triplets of one feature series.
struct SeriesStats {
    std::string key;
    ParamClass cls = ParamClass::NonActive;
    std::vector<ParameterTriplet> per_frame;
};

struct TimeStats {
    std::string key;
    ParameterTriplet triplet;
};

struct TrainedModel {
    int format_version = 1;
    SkeletonTopology topology;
    DesignatedSkeleton designated;
    ActiveJointSet active;
    PoISet reference_pois;
    int reference_length = 0;
    std::vector<SeriesStats> series;
    std::vector<TimeStats> time;

    int rest_count() const { return static_cast<int>(reference_pois.indices.size()) / 2; }
};

/// ō, M_o, S_o from n observations: d_i = |o_i - mean of the others|,
/// M_o = mean(d_i), S_o = sample std of {d_i} (n-1 denominator).
inline ParameterTriplet fit_triplet(const std::vector<double>& obs) {
    const int n = static_cast<int>(obs.size());
    if (n < 3) throw std::invalid_argument("fit_triplet needs >= 3 observations");
    double sum = 0.0;
    for (double o : obs) sum += o;
    ParameterTriplet t;
    t.mean = sum / n;
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) {
        double others = (sum - obs[i]) / (n - 1);
        d[i] = std::fabs(obs[i] - others);
        t.dev_mean += d[i];
    }
    t.dev_mean /= n;
    double ss = 0.0;
    for (double di : d) ss += (di - t.dev_mean) * (di - t.dev_mean);
    t.dev_std = std::sqrt(ss / (n - 1));
    return t;
}

/// Fits the full model from the per-video feature sets of n >= 3 warped,
/// normalized training videos. A per-frame observation missing in some videos
/// is fitted on the available ones when >= 3 remain, otherwise dropped.
inline TrainedModel fit_model(const std::vector<FeatureSet>& features,
                              const SkeletonTopology& topology, const DesignatedSkeleton& designated,
                              const ActiveJointSet& active, const PoISet& reference_pois,
                              int reference_length) {
    const int n = static_cast<int>(features.size());
    if (n < 3) throw std::invalid_argument("need >= 3 training videos");
    TrainedModel m;
    m.topology = topology;
    m.designated = designated;
    m.active = active;
    m.reference_pois = reference_pois;
    m.reference_length = reference_length;

    const std::size_t ns = features.front().series.size();
    for (std::size_t s = 0; s < ns; ++s) {
        SeriesStats st;
        st.key = features.front().series[s].key;
        st.cls = features.front().series[s].cls;
        const std::size_t nf = features.front().series[s].values.size();
        st.per_frame.resize(nf);
        std::vector<double> obs;
        for (std::size_t f = 0; f < nf; ++f) {
            obs.clear();
            for (int i = 0; i < n; ++i) {
                if (features[i].series[s].key != st.key)
                    throw std::invalid_argument("feature sets disagree on series layout");
                double v = features[i].series[s].values[f];
                if (!feature_missing(v)) obs.push_back(v);
            }
            if (static_cast<int>(obs.size()) >= 3)
                st.per_frame[f] = fit_triplet(obs);
            else
                st.per_frame[f].present = false;
        }
        m.series.push_back(std::move(st));
    }

    const std::size_t nt = features.front().time.size();
    for (std::size_t k = 0; k < nt; ++k) {
        std::vector<double> obs;
        for (int i = 0; i < n; ++i) obs.push_back(features[i].time[k].value);
        m.time.push_back({features.front().time[k].key, fit_triplet(obs)});
    }
    return m;
}

// ---------------------------------------------------------------------------
// AMALMODEL text format

namespace detail {

inline std::string format_stat(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace detail

inline void serialize_model(const TrainedModel& m, std::ostream& out) {
    using detail::format_stat;
    out << "AMALMODEL " << m.format_version << "\n";
    out << "joints";
    for (const auto& name : m.topology.joint_names) out << " " << name;
    out << "\nedges";
    for (auto [a, b] : m.topology.edges) out << " " << a << "-" << b;
    out << "\nrefs " << m.topology.refs.spine_base << " " << m.topology.refs.shoulder_left << " "
        << m.topology.refs.shoulder_right << "\n";
    out << "designated";
    for (double l : m.designated.edge_lengths) out << " " << format_stat(l);
    out << "\nactive";
    for (int j : m.active.active) out << " " << j;
    out << "\npois";
    for (int i : m.reference_pois.indices) out << " " << i;
    out << "\nreflength " << m.reference_length << "\n";
    for (const auto& s : m.series)
        for (std::size_t f = 0; f < s.per_frame.size(); ++f) {
            const auto& t = s.per_frame[f];
            if (!t.present) continue;
            out << s.key << ":" << f << " " << format_stat(t.mean) << " " << format_stat(t.dev_mean)
                << " " << format_stat(t.dev_std) << "\n";
        }
    for (const auto& t : m.time)
        out << t.key << " " << format_stat(t.triplet.mean) << " " << format_stat(t.triplet.dev_mean)
            << " " << format_stat(t.triplet.dev_std) << "\n";
}

inline std::string serialize_model(const TrainedModel& m) {
    std::ostringstream out;
    serialize_model(m, out);
    return out.str();
}

/// Rebuilds series layout from the topology so a parsed model matches a
/// freshly fitted one structurally. Triplet lines must reference known keys.
inline TrainedModel parse_model(std::istream& in) {
    using namespace detail;
    TrainedModel m;
    std::string line;
    int lineno = 0;

    if (!next_line(in, line, lineno)) throw ParseError(lineno, "empty model file");
    auto toks = split_ws(line);
    if (toks.size() != 2 || toks[0] != "AMALMODEL") throw ParseError(lineno, "expected 'AMALMODEL <version>'");
    if (toks[1] != "1") throw ParseError(lineno, "unsupported model version '" + toks[1] + "'");

    auto expect = [&](const std::string& tag) {
        if (!next_line(in, line, lineno)) throw ParseError(lineno, "missing '" + tag + "' section");
        auto t = split_ws(line);
        if (t.empty() || t[0] != tag) throw ParseError(lineno, "expected '" + tag + "' section");
        return std::vector<std::string>(t.begin() + 1, t.end());
    };

    for (const auto& name : expect("joints")) m.topology.joint_names.push_back(name);
    const int nj = m.topology.joint_count();
    for (const auto& tok : expect("edges")) {
        auto dash = tok.find('-');
        if (dash == std::string::npos) throw ParseError(lineno, "bad edge '" + tok + "'");
        int a = parse_int(tok.substr(0, dash), lineno), b = parse_int(tok.substr(dash + 1), lineno);
        if (a < 0 || a >= nj || b < 0 || b >= nj) throw ParseError(lineno, "edge out of range");
        m.topology.edges.push_back({a, b});
    }
    auto refs = expect("refs");
    if (refs.size() != 3) throw ParseError(lineno, "refs needs 3 indices");
    m.topology.refs.spine_base = parse_int(refs[0], lineno);
    m.topology.refs.shoulder_left = parse_int(refs[1], lineno);
    m.topology.refs.shoulder_right = parse_int(refs[2], lineno);

    auto des = expect("designated");
    if (des.size() != m.topology.edges.size())
        throw ParseError(lineno, "designated length count does not match edges");
    for (const auto& tok : des) m.designated.edge_lengths.push_back(parse_double(tok, lineno));
    m.designated.root_joint = m.topology.refs.spine_base;

    for (const auto& tok : expect("active")) m.active.active.push_back(parse_int(tok, lineno));
    for (const auto& tok : expect("pois")) m.reference_pois.indices.push_back(parse_int(tok, lineno));
    auto rl = expect("reflength");
    if (rl.size() != 1) throw ParseError(lineno, "reflength needs one value");
    m.reference_length = parse_int(rl[0], lineno);

    // Series skeleton from topology; triplet lines fill it in.
    SkeletonVideo probe;
    probe.topology = m.topology;
    probe.frames.assign(std::max(2, m.reference_length), Frame(nj));
    FeatureSet layout = extract_frame_features(probe, m.active, 0, {});
    std::map<std::string, std::size_t> series_index;
    for (const auto& s : layout.series) {
        SeriesStats st;
        st.key = s.key;
        st.cls = s.cls;
        st.per_frame.assign(s.values.size(), ParameterTriplet{0, 0, 0, false});
        series_index[st.key] = m.series.size();
        m.series.push_back(std::move(st));
    }

    while (next_line(in, line, lineno)) {
        toks = split_ws(line);
        if (toks.size() != 4)
            throw ParseError(lineno, "triplet line for '" + (toks.empty() ? "?" : toks[0]) +
                                         "' must have key and 3 numbers");
        ParameterTriplet t;
        t.mean = parse_double(toks[1], lineno);
        t.dev_mean = parse_double(toks[2], lineno);
        t.dev_std = parse_double(toks[3], lineno);
        const std::string& key = toks[0];
        if (key.rfind("time:", 0) == 0) {
            m.time.push_back({key, t});
            continue;
        }
        auto colon = key.rfind(':');
        if (colon == std::string::npos) throw ParseError(lineno, "bad parameter key '" + key + "'");
        std::string base = key.substr(0, colon);
        int frame = parse_int(key.substr(colon + 1), lineno);
        auto it = series_index.find(base);
        if (it == series_index.end()) throw ParseError(lineno, "unknown parameter '" + base + "'");
        auto& st = m.series[it->second];
        if (frame < 0 || frame >= static_cast<int>(st.per_frame.size()))
            throw ParseError(lineno, "frame index out of range for '" + base + "'");
        st.per_frame[frame] = t;
    }
    return m;
}

inline TrainedModel parse_model(const std::string& text) {
    std::istringstream in(text);
    return parse_model(in);
}

}  // namespace amal

#endif
