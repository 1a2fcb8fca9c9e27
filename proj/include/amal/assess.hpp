#ifndef AMAL_ASSESS_HPP
#define AMAL_ASSESS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "amal/model.hpp"

namespace amal {

struct ScoreWeights {
    double alpha_a = 0.73;
    double alpha_n = 0.02;
    double alpha_t = 0.25;
    double gamma = 2.5;        // deviation acceptance threshold, in std units
    double epsilon = 0.0005;   // denominator guard in the deviation normalization
    double lambda = 0.25;      // elementary class score factor
    double rho_unstable = 2.0;
    double xi = 0.2;           // segment length reward exponent
    double alpha_decay = 0.75; // active-joint noise reduction base
    double d_cap = 10.0;       // deviation saturation, in std units

    void check() const {
        if (std::fabs(alpha_a + alpha_n + alpha_t - 1.0) > 1e-12)
            throw std::invalid_argument("alpha_A + alpha_N + alpha_T must be 1");
        for (double v : {alpha_a, alpha_n, alpha_t, gamma, epsilon, lambda, rho_unstable, xi,
                         alpha_decay, d_cap})
            if (v < 0.0) throw std::invalid_argument("score weights must be non-negative");
    }
};

enum class DevClass { None, Positive, Negative, Unstable };

inline const char* dev_class_name(DevClass c) {
    switch (c) {
        case DevClass::Positive: return "positive";
        case DevClass::Negative: return "negative";
        case DevClass::Unstable: return "unstable";
        default: return "none";
    }
}

/// Frame-level normalized deviations of one parameter series.
/// thresholded[f] is 0 or the value D_o > gamma; sign[f] is the sign of
/// (observed - model mean), kept separately for classification.
struct DeviationSeries {
    std::string key;
    ParamClass cls = ParamClass::NonActive;
    std::vector<double> thresholded;
    std::vector<int> sign;
};

struct Segment {
    std::string key;
    ParamClass cls = ParamClass::NonActive;
    int start = 0;
    int end = 0;  // inclusive
    DevClass dev_class = DevClass::None;
    double confidence = 0.0;
    double mean_deviation = 0.0;  // mean thresholded D over the segment
};

struct FeedbackItem {
    std::string text;
    std::string key;
    double t_start = 0.0, t_end = 0.0;  // seconds
    std::string direction;              // too high / too low / unstable / too slow / too fast
    double loss = 0.0;
};

struct AssessmentResult {
    double score = 1.0;
    double score_a = 1.0, score_n = 1.0, score_t = 1.0;
    std::vector<Segment> segments;           // deviating segments only
    std::vector<FeedbackItem> feedback;
};

/// D_o = (|value - mean| - M_o) / (S_o + epsilon), zeroed unless D_o > gamma.
inline double normalized_deviation(double value, const ParameterTriplet& t, const ScoreWeights& w) {
    const double d = std::fabs(value - t.mean);
    const double dev = (d - t.dev_mean) / (t.dev_std + w.epsilon);
    return dev > w.gamma ? dev : 0.0;
}

/// Deviations for every per-frame series of the feature set against the model.
/// Missing observations or dropped model parameters contribute no deviation.
inline std::vector<DeviationSeries> compute_deviations(const TrainedModel& model,
                                                       const FeatureSet& features,
                                                       const ScoreWeights& w) {
    if (features.series.size() != model.series.size())
        throw std::invalid_argument("feature set does not match model layout");
    std::vector<DeviationSeries> out;
    out.reserve(model.series.size());
    for (std::size_t s = 0; s < model.series.size(); ++s) {
        const auto& st = model.series[s];
        const auto& fs = features.series[s];
        if (fs.key != st.key) throw std::invalid_argument("feature/model series mismatch at " + fs.key);
        DeviationSeries d;
        d.key = st.key;
        d.cls = st.cls;
        const std::size_t nf = std::min(st.per_frame.size(), fs.values.size());
        d.thresholded.assign(nf, 0.0);
        d.sign.assign(nf, 0);
        for (std::size_t f = 0; f < nf; ++f) {
            const auto& t = st.per_frame[f];
            if (!t.present || feature_missing(fs.values[f])) continue;
            d.thresholded[f] = normalized_deviation(fs.values[f], t, w);
            if (d.thresholded[f] > 0.0) d.sign[f] = fs.values[f] >= t.mean ? 1 : -1;
        }
        out.push_back(std::move(d));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sequence classification (positive / negative / none / unstable / dummy)

struct Classification {
    DevClass dev_class = DevClass::None;
    std::array<double, 5> confidence{};  // softmax over {+, -, none, unstable, dummy}
    double score = 0.0;                  // winner confidence; 0 when dummy wins
};

/// Per-frame labels with prefix sums of counts, index sums and squared index
/// sums per label, so any subrange classifies in O(1).
class LabelPrefix {
  public:
    LabelPrefix(const std::vector<double>& thresholded, const std::vector<int>& sign) {
        const int n = static_cast<int>(thresholded.size());
        for (auto& c : cnt_) c.assign(n + 1, 0.0);
        for (auto& s : sum_) s.assign(n + 1, 0.0);
        for (auto& s : sumsq_) s.assign(n + 1, 0.0);
        for (int i = 0; i < n; ++i) {
            int label = thresholded[i] > 0.0 ? (sign[i] > 0 ? 0 : 1) : 2;
            for (int l = 0; l < 3; ++l) {
                cnt_[l][i + 1] = cnt_[l][i] + (l == label ? 1.0 : 0.0);
                sum_[l][i + 1] = sum_[l][i] + (l == label ? i : 0.0);
                sumsq_[l][i + 1] = sumsq_[l][i] + (l == label ? double(i) * i : 0.0);
            }
        }
    }

    // Rate and scattering goodness of label l over [a,b] inclusive.
    // Goodness is 1 - min(1, S_T) with S_T the squared relative difference of
    // the label-index variance from the full-range index variance; an empty
    // label set has rate 0 and worst goodness.
    void rate_goodness(int l, int a, int b, double& rate, double& goodness) const {
        const double len = b - a + 1;
        const double c = cnt_[l][b + 1] - cnt_[l][a];
        rate = c / len;
        if (c == 0.0) {
            goodness = 0.0;
            return;
        }
        const double mean = (sum_[l][b + 1] - sum_[l][a]) / c;
        const double var_t = (sumsq_[l][b + 1] - sumsq_[l][a]) / c - mean * mean;  // population
        const double var_all = (len * len - 1.0) / 12.0;  // variance of consecutive integers
        double s_t;
        if (var_all == 0.0)
            s_t = var_t == 0.0 ? 0.0 : 1.0;
        else
            s_t = ((var_t - var_all) / var_all) * ((var_t - var_all) / var_all);
        goodness = 1.0 - std::min(1.0, s_t);
    }

  private:
    std::array<std::vector<double>, 3> cnt_, sum_, sumsq_;  // labels: 0 = +, 1 = -, 2 = none
};

/// Classifies the inclusive frame range [a,b] of a deviation series.
inline Classification classify_range(const LabelPrefix& p, int a, int b, const ScoreWeights& w) {
    double r_pos, g_pos, r_neg, g_neg, r_non, g_non;
    p.rate_goodness(0, a, b, r_pos, g_pos);
    p.rate_goodness(1, a, b, r_neg, g_neg);
    p.rate_goodness(2, a, b, r_non, g_non);

    std::array<double, 5> raw;
    raw[0] = w.lambda * r_pos * g_pos;
    raw[1] = w.lambda * r_neg * g_neg;
    raw[2] = w.lambda * r_non * g_non;
    const double r_uns = std::min(1.0, w.rho_unstable * std::min(r_pos, r_neg));
    raw[3] = r_uns * 0.5 * (g_pos + g_neg);
    raw[4] = std::min({1.0 - g_pos, 1.0 - g_neg, 1.0 - g_non});

    Classification c;
    double mx = *std::max_element(raw.begin(), raw.end());
    double denom = 0.0;
    for (int i = 0; i < 5; ++i) {
        c.confidence[i] = std::exp(raw[i] - mx);
        denom += c.confidence[i];
    }
    for (auto& v : c.confidence) v /= denom;

    int winner = 0;
    for (int i = 1; i < 5; ++i)
        if (raw[i] > raw[winner]) winner = i;
    if (winner == 4) {
        c.dev_class = DevClass::None;  // dummy: no clear classification
        c.score = 0.0;
    } else {
        c.dev_class = winner == 0   ? DevClass::Positive
                      : winner == 1 ? DevClass::Negative
                      : winner == 2 ? DevClass::None
                                    : DevClass::Unstable;
        c.score = c.confidence[winner];
    }
    return c;
}

struct ClassifyFn {
    const LabelPrefix* prefix;
    const ScoreWeights* weights;
    Classification operator()(int a, int b) const { return classify_range(*prefix, a, b, *weights); }
};

/// Segment score with the length reward that discourages per-frame segments.
inline double segment_score(const Classification& c, int len, const ScoreWeights& w) {
    return c.score * std::pow(1.0 + std::log(static_cast<double>(len)), w.xi);
}

struct SegmentationResult {
    std::vector<Segment> segments;  // partition of the whole range
    double objective = 0.0;         // mean of per-segment rewarded scores
};

/// Exact optimal segmentation: maximizes the average rewarded segment score.
/// The average objective has no optimal substructure over prefixes alone, so
/// the dynamic program is additionally indexed by segment count — best[k][i]
/// is the highest total score of a k-segment partition of [0..i] — and the
/// answer is the best total/count ratio at the last frame. Ties prefer fewer
/// segments, then earlier boundaries.
inline SegmentationResult segment_deviations(const DeviationSeries& series, const ScoreWeights& w) {
    const int n = static_cast<int>(series.thresholded.size());
    if (n == 0) throw std::invalid_argument("empty deviation series");
    LabelPrefix prefix(series.thresholded, series.sign);
    ClassifyFn cls{&prefix, &w};

    // Rewarded scores of every [a,b] range, so the cubic loop below is pure
    // arithmetic.
    std::vector<double> cs(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b)
            cs[static_cast<std::size_t>(a) * n + b] = segment_score(cls(a, b), b - a + 1, w);

    const double neg = -1.0;
    // best[k][i], back[k][i]: k segments covering [0..i]; k is 1-based.
    std::vector<std::vector<double>> best(n + 1, std::vector<double>(n, neg));
    std::vector<std::vector<int>> back(n + 1, std::vector<int>(n, -1));
    for (int i = 0; i < n; ++i) best[1][i] = cs[i];
    for (int k = 2; k <= n; ++k)
        for (int i = k - 1; i < n; ++i)
            for (int j = k - 2; j < i; ++j) {
                if (best[k - 1][j] < 0.0) continue;
                const double cand = best[k - 1][j] + cs[static_cast<std::size_t>(j + 1) * n + i];
                if (cand > best[k][i] + 1e-15) {
                    best[k][i] = cand;
                    back[k][i] = j;
                }
            }

    int best_k = 1;
    double obj = best[1][n - 1];
    for (int k = 2; k <= n; ++k) {
        const double cand = best[k][n - 1] / k;
        if (cand > obj + 1e-15) {
            obj = cand;
            best_k = k;
        }
    }

    SegmentationResult r;
    r.objective = obj;
    int i = n - 1, k = best_k;
    while (i >= 0) {
        int j = k == 1 ? -1 : back[k][i];
        Segment s;
        s.key = series.key;
        s.cls = series.cls;
        s.start = j + 1;
        s.end = i;
        Classification c = cls(s.start, s.end);
        s.dev_class = c.dev_class;
        s.confidence = c.score;
        double acc = 0.0;
        for (int f = s.start; f <= s.end; ++f) acc += series.thresholded[f];
        s.mean_deviation = acc / (s.end - s.start + 1);
        r.segments.push_back(s);
        i = j;
        --k;
    }
    std::reverse(r.segments.begin(), r.segments.end());
    return r;
}

/// Ablation path: every maximal run of thresholded frames becomes a deviating
/// segment directly, classified by the signs it contains.
inline SegmentationResult segment_runs(const DeviationSeries& series, const ScoreWeights&) {
    const int n = static_cast<int>(series.thresholded.size());
    SegmentationResult r;
    int i = 0;
    while (i < n) {
        if (series.thresholded[i] == 0.0) {
            ++i;
            continue;
        }
        int j = i;
        bool pos = false, neg = false;
        double acc = 0.0;
        while (j < n && series.thresholded[j] > 0.0) {
            (series.sign[j] > 0 ? pos : neg) = true;
            acc += series.thresholded[j];
            ++j;
        }
        Segment s;
        s.key = series.key;
        s.cls = series.cls;
        s.start = i;
        s.end = j - 1;
        s.dev_class = pos && neg ? DevClass::Unstable : pos ? DevClass::Positive : DevClass::Negative;
        s.confidence = 1.0;
        s.mean_deviation = acc / (j - i);
        r.segments.push_back(s);
        i = j;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Scoring (parameter-set scores and the weighted final score)

struct ScoringOptions {
    bool joint_grouping = true;        // off: A and N share one blended weight
    bool deviation_segmentation = true;
};

namespace detail {

struct DeviatingParam {
    ParamClass cls;
    double mean_deviation = 0.0;  // mean thresholded D over deviating frames
    int segment_count = 0;
};

struct ScoreBreakdown {
    double final_score = 1.0, a = 1.0, n = 1.0, t = 1.0;
};

inline ScoreBreakdown score_from_params(const std::vector<DeviatingParam>& devs, int count_a,
                                        int count_n, int count_t, const ScoreWeights& w,
                                        const ScoringOptions& opt) {
    double d = 0.0;
    int na = 0;
    for (const auto& p : devs)
        if (p.cls == ParamClass::Active) {
            d += p.segment_count;
            ++na;
        }
    if (na > 0) d /= na;
    const double decay = std::pow(w.alpha_decay, d);

    double sum_a = 0.0, sum_n = 0.0, sum_t = 0.0;
    for (const auto& p : devs) {
        double s = std::min(1.0, p.mean_deviation / w.d_cap);
        switch (p.cls) {
            case ParamClass::Active: sum_a += s * decay; break;
            case ParamClass::NonActive: sum_n += s; break;
            case ParamClass::Time: sum_t += s; break;
        }
    }
    ScoreBreakdown b;
    b.a = count_a > 0 ? 1.0 - std::min(1.0, sum_a / count_a) : 1.0;
    b.n = count_n > 0 ? 1.0 - std::min(1.0, sum_n / count_n) : 1.0;
    b.t = count_t > 0 ? 1.0 - std::min(1.0, sum_t / count_t) : 1.0;
    double wa = w.alpha_a, wn = w.alpha_n;
    if (!opt.joint_grouping) wa = wn = 0.5 * (w.alpha_a + w.alpha_n);
    b.final_score = wa * b.a + wn * b.n + w.alpha_t * b.t;
    return b;
}

}  // namespace detail

/// One per-video scalar (time parameter) deviating against its triplet forms
/// a single pseudo-segment covering "frame" 0.
struct TimeDeviation {
    std::string key;
    double thresholded = 0.0;
    int sign = 0;
};

inline std::vector<TimeDeviation> compute_time_deviations(const TrainedModel& model,
                                                          const FeatureSet& features,
                                                          const ScoreWeights& w) {
    std::vector<TimeDeviation> out;
    for (const auto& ts : model.time) {
        double value = 0.0;
        bool found = false;
        for (const auto& tf : features.time)
            if (tf.key == ts.key) {
                value = tf.value;
                found = true;
                break;
            }
        TimeDeviation d;
        d.key = ts.key;
        if (found) {
            d.thresholded = normalized_deviation(value, ts.triplet, w);
            if (d.thresholded > 0.0) d.sign = value >= ts.triplet.mean ? 1 : -1;
        }
        out.push_back(d);
    }
    return out;
}

}  // namespace amal

#endif
