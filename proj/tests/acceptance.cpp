// End-to-end acceptance checks for the assessment pipeline. Each criterion
// prints one PASS/FAIL line; the exit code is the number of failures.
// argv[1] must point at the amal CLI binary (used by the determinism check).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "amal/amal.hpp"

using namespace amal;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;
std::string g_cli_path;

void report(int number, const char* name, bool ok, double seconds, double limit,
            const std::string& detail) {
    bool in_time = limit <= 0.0 || seconds <= limit;
    std::printf("criterion %d (%s): %s (%.2fs)%s%s\n", number, name,
                ok && in_time ? "PASS" : "FAIL", seconds,
                ok && !in_time ? " - over time budget" : "",
                !ok && !detail.empty() ? (" - " + detail).c_str() : "");
    if (!ok || !in_time) ++g_failures;
}

template <typename Fn>
void run_criterion(int number, const char* name, double limit, Fn body) {
    std::string detail;
    auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(number, name, ok, seconds, limit, detail);
}

// Shared synthetic fixture family: the default raise-hold-lower movement with
// per-video limb scale, duration and slightly jittered rest plan, so training
// sets carry honest person-to-person spread.
MovementSpec family_spec(unsigned seed, double limb, int duration, double noise,
                         double jitter = 0.03) {
    MovementSpec s;
    s.noise_std = noise;
    s.seed = seed;
    s.limb_scale = limb;
    s.duration = duration;
    std::mt19937_64 rng(seed * 77 + 5);
    std::uniform_real_distribution<double> u(-jitter, jitter);
    s.rest_plan = {{0.0, 0.15 + u(rng)}, {0.45 + u(rng), 0.10 + u(rng)}, {0.85 + u(rng), 0.0}};
    s.rest_plan[2].duration = 1.0 - s.rest_plan[2].start;
    return s;
}

// ---------------------------------------------------------------------------
// 1. Geometry

Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Vec3 v{nd(rng), nd(rng), nd(rng)};
    while (v.norm() < 1e-6) v = {nd(rng), nd(rng), nd(rng)};
    return v.normalized();
}

SkeletonVideo apply_rigid(const SkeletonVideo& v, const Vec3& axis, double angle,
                          const Vec3& shift) {
    SkeletonVideo out = v;
    for (auto& frame : out.frames)
        for (auto& p : frame) p = rotate_about_axis(p, axis, angle) + shift;
    return out;
}

bool criterion_geometry(std::string& detail) {
    std::vector<SkeletonVideo> vids;
    std::vector<std::string> persons;
    for (int i = 0; i < 3; ++i) {
        vids.push_back(generate(family_spec(41 + i, 0.9 + 0.05 * i, 110 + 6 * i, 0.002)));
        persons.push_back("p" + std::to_string(i));
    }
    auto designated = compute_designated_skeleton(vids, persons);

    for (const auto& v : vids) {
        auto norm = normalize_dimensions(v, designated);
        const auto& topo = norm.topology;
        for (const auto& frame : norm.frames)
            for (std::size_t e = 0; e < topo.edges.size(); ++e) {
                double len = (frame[topo.edges[e].first] - frame[topo.edges[e].second]).norm();
                if (std::fabs(len - designated.edge_lengths[e]) > 1e-9 * designated.edge_lengths[e]) {
                    detail = "edge length off after normalization";
                    return false;
                }
            }
    }

    auto base = align_to_body_plane(normalize_dimensions(vids[0], designated));
    const auto& refs = base.topology.refs;
    for (const auto& frame : base.frames) {
        Vec3 a = frame[refs.spine_base];
        Vec3 mid = (frame[refs.shoulder_left] + frame[refs.shoulder_right]) * 0.5;
        if (a.norm() > 1e-9) { detail = "spine base not at origin"; return false; }
        if (std::fabs(mid.x) > 1e-9 || std::fabs(mid.z) > 1e-9 || mid.y <= 0.0) {
            detail = "shoulder midpoint not on +Y";
            return false;
        }
        if (std::fabs(frame[refs.shoulder_left].z) > 1e-9 ||
            std::fabs(frame[refs.shoulder_right].z) > 1e-9) {
            detail = "shoulders off the Z = 0 plane";
            return false;
        }
    }

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> angle(-3.0, 3.0), offset(-2.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        Vec3 shift{offset(rng), offset(rng), offset(rng)};
        auto moved = apply_rigid(vids[0], random_unit(rng), angle(rng), shift);
        auto aligned = align_to_body_plane(normalize_dimensions(moved, designated));
        for (int f = 0; f < base.frame_count(); ++f)
            for (int j = 0; j < base.topology.joint_count(); ++j)
                if ((aligned.frames[f][j] - base.frames[f][j]).norm() > 1e-9) {
                    detail = "body-plane alignment not rigid-motion invariant";
                    return false;
                }
    }
    return true;
}

// ---------------------------------------------------------------------------
// 2. Leave-one-out triplets

ParameterTriplet brute_triplet(const std::vector<double>& obs) {
    const int n = static_cast<int>(obs.size());
    ParameterTriplet t;
    for (double o : obs) t.mean += o;
    t.mean /= n;
    std::vector<double> d;
    for (int i = 0; i < n; ++i) {
        double others = 0.0;
        for (int j = 0; j < n; ++j)
            if (j != i) others += obs[j];
        others /= (n - 1);
        d.push_back(std::fabs(obs[i] - others));
    }
    for (double di : d) t.dev_mean += di;
    t.dev_mean /= n;
    double ss = 0.0;
    for (double di : d) ss += (di - t.dev_mean) * (di - t.dev_mean);
    t.dev_std = std::sqrt(ss / (n - 1));
    return t;
}

bool criterion_triplets(std::string& detail) {
    std::vector<std::vector<double>> sets = {
        {1.0, 2.0, 3.0},
        {0.0, 0.0, 0.0, 0.0},
        {-5.0, 1.5, 2.25, 7.0},
        {10.0, 10.1, 9.9, 10.05, 9.95},
        {3.0, -3.0, 3.0, -3.0, 3.0, -3.0},
        {0.001, 0.002, 0.004, 0.008, 0.016, 0.032},
    };
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    std::uniform_int_distribution<int> size(3, 6);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> obs(size(rng));
        for (double& o : obs) o = u(rng);
        sets.push_back(obs);
    }
    for (const auto& obs : sets) {
        auto got = fit_triplet(obs);
        auto want = brute_triplet(obs);
        auto close = [](double a, double b) {
            return std::fabs(a - b) <= 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)});
        };
        if (!close(got.mean, want.mean) || !close(got.dev_mean, want.dev_mean) ||
            !close(got.dev_std, want.dev_std)) {
            detail = "triplet disagrees with brute force";
            return false;
        }
    }
    auto t = fit_triplet({1.0, 2.0, 3.0});
    if (t.mean != 2.0 || t.dev_mean != 1.0 || std::fabs(t.dev_std - std::sqrt(3.0) / 2.0) > 1e-12) {
        detail = "hand-worked {1,2,3} case off";
        return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// 3. Segmentation DP vs exhaustive enumeration
// The oracle recomputes rates, index variances and the softmax from scratch
// and walks every boundary bitmask.

double oracle_classify_score(const DeviationSeries& s, int a, int b, const ScoreWeights& w) {
    std::vector<int> labels;
    for (int f = a; f <= b; ++f)
        labels.push_back(s.thresholded[f] > 0.0 ? (s.sign[f] > 0 ? 0 : 1) : 2);
    const int len = b - a + 1;

    double rate[3], good[3];
    for (int l = 0; l < 3; ++l) {
        std::vector<double> idx;
        for (int i = 0; i < len; ++i)
            if (labels[i] == l) idx.push_back(i + a);
        rate[l] = static_cast<double>(idx.size()) / len;
        if (idx.empty()) { good[l] = 0.0; continue; }
        double mean = 0.0;
        for (double v : idx) mean += v;
        mean /= idx.size();
        double var = 0.0;
        for (double v : idx) var += (v - mean) * (v - mean);
        var /= idx.size();
        double var_all = (double(len) * len - 1.0) / 12.0;
        double st = var_all == 0.0 ? (var == 0.0 ? 0.0 : 1.0)
                                   : ((var - var_all) / var_all) * ((var - var_all) / var_all);
        good[l] = 1.0 - std::min(1.0, st);
    }
    double raw[5];
    for (int l = 0; l < 3; ++l) raw[l] = w.lambda * rate[l] * good[l];
    raw[3] = std::min(1.0, w.rho_unstable * std::min(rate[0], rate[1])) * 0.5 * (good[0] + good[1]);
    raw[4] = std::min({1.0 - good[0], 1.0 - good[1], 1.0 - good[2]});
    int win = 0;
    for (int i = 1; i < 5; ++i)
        if (raw[i] > raw[win]) win = i;
    if (win == 4) return 0.0;
    double denom = 0.0;
    for (double r : raw) denom += std::exp(r);
    return std::exp(raw[win]) / denom;
}

double oracle_best_objective(const DeviationSeries& s, const ScoreWeights& w) {
    const int n = static_cast<int>(s.thresholded.size());
    double best = -1.0;
    for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
        double total = 0.0;
        int count = 0, start = 0;
        for (int i = 0; i < n; ++i) {
            bool boundary = i == n - 1 || (mask >> i) & 1u;
            if (!boundary) continue;
            total += oracle_classify_score(s, start, i, w) *
                     std::pow(1.0 + std::log(double(i - start + 1)), w.xi);
            ++count;
            start = i + 1;
        }
        best = std::max(best, total / count);
    }
    return best;
}

bool criterion_segmentation(std::string& detail) {
    ScoreWeights w;
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> len(2, 12), label(0, 2);
    std::uniform_real_distribution<double> mag(2.6, 8.0);
    for (int trial = 0; trial < 500; ++trial) {
        DeviationSeries s;
        s.key = "pos:test:x";
        s.cls = ParamClass::Active;
        int n = len(rng);
        for (int i = 0; i < n; ++i) {
            int l = label(rng);
            s.thresholded.push_back(l == 2 ? 0.0 : mag(rng));
            s.sign.push_back(l == 2 ? 0 : (l == 0 ? 1 : -1));
        }
        auto r = segment_deviations(s, w);
        double want = oracle_best_objective(s, w);
        if (std::fabs(r.objective - want) > 1e-9 * std::max(1.0, std::fabs(want))) {
            detail = "DP objective " + std::to_string(r.objective) + " vs enumeration " +
                     std::to_string(want) + " at trial " + std::to_string(trial);
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// 4. DTW vs exhaustive path enumeration

double brute_dtw(const std::vector<std::vector<double>>& a,
                 const std::vector<std::vector<double>>& b) {
    auto dist = [&](int i, int j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < a[i].size(); ++k) {
            double d = a[i][k] - b[j][k];
            acc += d * d;
        }
        return std::sqrt(acc);
    };
    const int n = static_cast<int>(a.size()), m = static_cast<int>(b.size());
    double best = std::numeric_limits<double>::infinity();
    std::function<void(int, int, double)> walk = [&](int i, int j, double cost) {
        cost += dist(i, j);
        if (cost >= best) return;
        if (i == n - 1 && j == m - 1) { best = cost; return; }
        if (i + 1 < n && j + 1 < m) walk(i + 1, j + 1, cost);
        if (i + 1 < n) walk(i + 1, j, cost);
        if (j + 1 < m) walk(i, j + 1, cost);
    };
    walk(0, 0, 0.0);
    return best;
}

bool criterion_dtw(std::string& detail) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> len(1, 8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::vector<double>> a(len(rng)), b(len(rng));
        for (auto& f : a) { f.resize(3); for (double& v : f) v = u(rng); }
        for (auto& f : b) { f.resize(3); for (double& v : f) v = u(rng); }
        double got = dtw_match(a, b).cost;
        double want = brute_dtw(a, b);
        if (std::fabs(got - want) > 1e-9 * std::max(1.0, want)) {
            detail = "DTW cost mismatch at trial " + std::to_string(trial);
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// 5. Warping contract and rest recovery

bool criterion_warping(std::string& detail) {
    AlignmentConfig cfg;

    // Identity: warping a video onto its own PoIs and length changes nothing.
    auto video = generate(family_spec(300, 1.0, 120, 0.002));
    auto active = detect_active_joints({video}, cfg);
    auto own = pois_from_rests(detect_rest_sequences(video, active, cfg), video.frame_count());
    auto same = warp_to_reference(video, own, own, video.frame_count());
    for (int f = 0; f < video.frame_count(); ++f)
        for (int j = 0; j < video.topology.joint_count(); ++j)
            if ((same.frames[f][j] - video.frames[f][j]).norm() != 0.0) {
                detail = "self-warp is not the identity";
                return false;
            }

    // PoI mapping: each of the video's PoI frames lands exactly on the
    // matching reference PoI frame of the warped timeline.
    std::vector<SkeletonVideo> pair{generate(family_spec(301, 1.0, 132, 0.002)), video};
    auto active2 = detect_active_joints(pair, cfg);
    std::vector<std::vector<RestSequence>> rests;
    for (const auto& v : pair) rests.push_back(detect_rest_sequences(v, active2, cfg));
    auto pois = reconcile_rest_counts(rests, pair, active2, cfg);
    auto warped = warp_to_reference(pair[1], pois[1], pois[0], pair[0].frame_count());
    for (std::size_t k = 0; k < pois[0].indices.size(); ++k) {
        int rp = pois[0].indices[k], op = pois[1].indices[k];
        for (int j = 0; j < video.topology.joint_count(); ++j)
            if ((warped.frames[rp][j] - pair[1].frames[op][j]).norm() > 1e-9) {
                detail = "warped PoI frame differs from the source PoI frame";
                return false;
            }
    }

    // Rest recovery on 100 seeded low-noise fixtures.
    int ok_count = 0;
    for (unsigned seed = 1; seed <= 100; ++seed) {
        MovementSpec spec;
        spec.noise_std = 0.002;
        spec.seed = seed;
        auto v = generate(spec);
        MovementSpec s2 = spec; s2.seed = seed + 1000;
        MovementSpec s3 = spec; s3.seed = seed + 2000;
        auto act = detect_active_joints({v, generate(s2), generate(s3)}, cfg);
        auto planned = spec.planned_rest_frames();
        std::vector<RestSequence> found;
        try { found = detect_rest_sequences(v, act, cfg); } catch (...) { continue; }
        if (found.size() != planned.size()) continue;
        int worst = 0;
        for (std::size_t k = 0; k < found.size(); ++k) {
            worst = std::max(worst, std::abs(found[k].start_frame - planned[k].first));
            worst = std::max(worst, std::abs(found[k].end_frame - planned[k].second));
        }
        if (worst <= 3) ++ok_count;
    }
    if (ok_count < 95) {
        detail = "rest recovery only " + std::to_string(ok_count) + "/100";
        return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// 6. Held-out proper performances score high

bool criterion_perfect_input(std::string& detail) {
    const double noise = 0.002;
    PipelineOptions opt;
    std::vector<SkeletonVideo> vids;
    std::vector<std::string> persons;
    int durs[6] = {112, 116, 120, 124, 128, 132};
    for (int i = 0; i < 6; ++i) {
        vids.push_back(generate(family_spec(100 + i, 0.95 + 0.02 * i, durs[i], noise, 0.02)));
        persons.push_back("p" + std::to_string(i));
    }
    int ok_count = 0;
    for (int hold = 0; hold < 6; ++hold) {
        std::vector<SkeletonVideo> tr;
        std::vector<std::string> pr;
        for (int i = 0; i < 6; ++i)
            if (i != hold) { tr.push_back(vids[i]); pr.push_back(persons[i]); }
        auto art = train(tr, pr, opt);
        auto r = assess(art.model, vids[hold], opt);
        if (r.score >= 0.9 && r.feedback.size() <= 1) ++ok_count;
    }
    if (ok_count < 6) {  // >= 90% of 6 rotations means all of them
        detail = "only " + std::to_string(ok_count) + "/6 rotations scored >= 0.9";
        return false;
    }

    // A video equal to the model mean (three identical training videos)
    // scores exactly 1 with no feedback.
    auto v = generate(family_spec(77, 1.0, 120, noise, 0.02));
    auto art = train({v, v, v}, {"a", "b", "c"}, opt);
    auto r = assess(art.model, v, opt);
    if (r.score != 1.0 || !r.feedback.empty()) {
        detail = "exact-model-mean video did not score 1.0 with empty feedback";
        return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// 7. Three-class separation and ablation ordering

double mean_f1(const std::vector<double>& scores, const std::vector<int>& labels, double t0,
               double t1) {
    double f1sum = 0.0;
    for (int c = 0; c < 3; ++c) {
        int tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            int pred = scores[i] < t0 ? 0 : scores[i] < t1 ? 1 : 2;
            if (pred == c && labels[i] == c) ++tp;
            else if (pred == c) ++fp;
            else if (labels[i] == c) ++fn;
        }
        double p = tp + fp ? double(tp) / (tp + fp) : 0.0;
        double r = tp + fn ? double(tp) / (tp + fn) : 0.0;
        f1sum += (p + r > 0) ? 2 * p * r / (p + r) : 0.0;
    }
    return f1sum / 3.0;
}

double best_f1(const std::vector<double>& scores, const std::vector<int>& labels) {
    std::vector<double> cand = scores;
    std::sort(cand.begin(), cand.end());
    cand.push_back(1.01);
    double best = 0.0;
    for (std::size_t i = 0; i < cand.size(); ++i)
        for (std::size_t j = i; j < cand.size(); ++j)
            best = std::max(best, mean_f1(scores, labels, cand[i] - 1e-9, cand[j] - 1e-9));
    return best;
}

bool criterion_separation(std::string& detail) {
    const double noise = 0.002;
    PipelineOptions full;
    std::vector<SkeletonVideo> tr;
    std::vector<std::string> pr;
    int durs[6] = {112, 116, 120, 124, 128, 132};
    for (int i = 0; i < 6; ++i) {
        tr.push_back(generate(family_spec(100 + i, 0.90 + 0.04 * i, durs[i], noise)));
        pr.push_back("p" + std::to_string(i));
    }
    auto art_poi = train(tr, pr, full);
    PipelineOptions dtw_opt = full;
    dtw_opt.warp = WarpMethod::Dtw;
    auto art_dtw = train(tr, pr, dtw_opt);

    std::vector<SkeletonVideo> fixtures;
    std::vector<int> labels;
    int k = 0;
    for (int i = 0; i < 15; ++i, ++k) {  // proper
        fixtures.push_back(generate(family_spec(500 + k, 0.92 + 0.012 * (k % 13),
                                                110 + (k % 7) * 4, noise)));
        labels.push_back(2);
    }
    for (int i = 0; i < 15; ++i, ++k) {  // mild
        auto spec = family_spec(500 + k, 0.92 + 0.012 * (k % 13), 110 + (k % 7) * 4, noise);
        auto v = generate(spec);
        Perturbation p;
        if (i % 3 == 0) {
            p.kind = PerturbationKind::AmplitudeScale;
            p.magnitude = 0.6;
            v = perturb(v, p);
        } else if (i % 3 == 1) {
            p.kind = PerturbationKind::ElbowBend;
            p.magnitude = 0.35;
            p.target_joint = "elbowright";
            v = perturb(v, p);
        } else {
            p.kind = PerturbationKind::HoldShorten;
            p.magnitude = 0.7;
            auto planned = spec.planned_rest_frames();
            for (int r = 2; r >= 0; --r) {  // back to front so ranges stay valid
                p.range_start = planned[r].first;
                p.range_end = planned[r].second;
                v = perturb(v, p);
            }
        }
        fixtures.push_back(v);
        labels.push_back(1);
    }
    for (int i = 0; i < 15; ++i, ++k) {  // severe
        auto v = generate(family_spec(500 + k, 0.92 + 0.012 * (k % 13), 110 + (k % 7) * 4, noise));
        Perturbation p;
        p.kind = PerturbationKind::AmplitudeScale;
        p.magnitude = (i % 2 == 0) ? 0.15 : 0.05;
        fixtures.push_back(perturb(v, p));
        labels.push_back(0);
    }

    auto run = [&](const TrainArtifacts& art, const PipelineOptions& opt) {
        std::vector<double> scores;
        for (const auto& v : fixtures)
            scores.push_back(assess(art.model, v, opt, &art.reference_normalized).score);
        return best_f1(scores, labels);
    };
    double f_full = run(art_poi, full);
    double f_dtw = run(art_dtw, dtw_opt);
    PipelineOptions nds = full;
    nds.scoring.deviation_segmentation = false;
    PipelineOptions njg = full;
    njg.scoring.joint_grouping = false;
    double f_nds = run(art_poi, nds);
    double f_njg = run(art_poi, njg);

    std::ostringstream msg;
    msg.precision(4);
    msg << "mean F1 full " << f_full << " dtw " << f_dtw << " nds " << f_nds << " njg " << f_njg;
    if (f_full < 0.90) {
        detail = msg.str() + " (full below 0.90)";
        return false;
    }
    if (f_dtw > f_full || f_nds > f_full || f_njg > f_full) {
        detail = msg.str() + " (an ablation beats the full pipeline)";
        return false;
    }
    std::printf("  %s\n", msg.str().c_str());
    return true;
}

// ---------------------------------------------------------------------------
// 8. Feedback stopping rules and joint attribution

AssessmentResult time_only(const std::vector<double>& thresholded, int count_t,
                           const ScoreWeights& w) {
    std::vector<TimeDeviation> devs;
    for (std::size_t i = 0; i < thresholded.size(); ++i)
        devs.push_back({"time:seg:" + std::to_string(i), thresholded[i], 1});
    for (int i = static_cast<int>(thresholded.size()); i < count_t; ++i)
        devs.push_back({"time:seg:" + std::to_string(i), 0.0, 0});
    return score_and_feedback({}, {}, devs, 30.0, w, ScoringOptions{});
}

bool criterion_feedback(std::string& detail) {
    ScoreWeights w;
    // Half-loss rule: the third loss sits below half of the second.
    auto r = time_only({7.5, 5.0, 2.0}, 10, w);
    if (r.feedback.size() != 2) {
        detail = "half-loss rule kept " + std::to_string(r.feedback.size()) + " items";
        return false;
    }
    // Cap: seven equal losses still yield at most five items.
    if (time_only(std::vector<double>(7, 5.0), 12, w).feedback.size() != 5) {
        detail = "five-item cap violated";
        return false;
    }

    // Attribution: halve one joint's displacement; the top feedback item must
    // name a parameter of that joint.
    const double noise = 0.002;
    PipelineOptions opt;
    std::vector<SkeletonVideo> tr;
    std::vector<std::string> pr;
    int durs[6] = {112, 116, 120, 124, 128, 132};
    for (int i = 0; i < 6; ++i) {
        tr.push_back(generate(family_spec(100 + i, 0.90 + 0.04 * i, durs[i], noise)));
        pr.push_back("p" + std::to_string(i));
    }
    auto art = train(tr, pr, opt);
    int hits = 0;
    for (int t = 0; t < 50; ++t) {
        MovementSpec spec;
        spec.noise_std = noise;
        spec.seed = 900 + t;
        spec.limb_scale = 0.92 + 0.012 * (t % 13);
        spec.duration = 120;
        spec.rest_plan = {{0.0, 0.15}, {0.45, 0.10}, {0.85, 0.15}};
        auto v = generate(spec);
        int hand = v.topology.find_joint("handright");
        for (int f = 1; f < v.frame_count(); ++f)
            v.frames[f][hand] = v.frames[0][hand] + (v.frames[f][hand] - v.frames[0][hand]) * 0.35;
        auto res = assess(art.model, v, opt, &art.reference_normalized);
        if (!res.feedback.empty() &&
            res.feedback[0].key.find("handright") != std::string::npos)
            ++hits;
    }
    if (hits < 45) {
        detail = "top feedback named the perturbed joint in only " + std::to_string(hits) +
                 "/50 trials";
        return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// 9. CLI determinism

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool criterion_determinism(std::string& detail) {
    if (g_cli_path.empty()) {
        detail = "CLI path not supplied as argv[1]";
        return false;
    }
    fs::path dir = fs::temp_directory_path() / "amal_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto sh = [&](const std::string& cmd) {
        return std::system((cmd + " >/dev/null 2>&1").c_str()) == 0;
    };
    const std::string cli = "'" + g_cli_path + "'";
    const std::string d = dir.string();

    std::ofstream(dir / "movement.cfg") << "duration = 120\nnoise_std = 0.002\nseed = 42\n"
                                        << "rests = 0:0.15,0.45:0.10,0.85:0.15\n";
    if (!sh(cli + " synth --spec " + d + "/movement.cfg --out-dir " + d + " --count 4")) {
        detail = "synth failed";
        return false;
    }
    std::string inputs = d + "/synth_0.skv " + d + "/synth_1.skv " + d + "/synth_2.skv";
    for (const char* env : {"OMP_NUM_THREADS=1 ", "OMP_NUM_THREADS=8 "}) {
        std::string tag = env[16] == '1' ? "t1" : "t8";
        for (const char* rep : {"a", "b"}) {
            std::string model = d + "/model_" + tag + "_" + rep + ".amal";
            if (!sh(std::string(env) + cli + " train " + inputs + " --out " + model)) {
                detail = "train failed";
                return false;
            }
            if (std::system((std::string(env) + cli + " assess --model " + model + " " + d +
                             "/synth_3.skv > " + d + "/assess_" + tag + "_" + rep +
                             ".txt 2>/dev/null")
                                .c_str()) != 0) {
                detail = "assess failed";
                return false;
            }
        }
    }
    std::string model_ref = slurp(dir / "model_t1_a.amal");
    std::string assess_ref = slurp(dir / "assess_t1_a.txt");
    if (model_ref.empty() || assess_ref.empty()) {
        detail = "empty outputs";
        return false;
    }
    for (const char* tag : {"t1", "t8"})
        for (const char* rep : {"a", "b"}) {
            if (slurp(dir / ("model_" + std::string(tag) + "_" + rep + ".amal")) != model_ref) {
                detail = "model files differ across runs";
                return false;
            }
            if (slurp(dir / ("assess_" + std::string(tag) + "_" + rep + ".txt")) != assess_ref) {
                detail = "assessment reports differ across runs";
                return false;
            }
        }
    fs::remove_all(dir);
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli_path = argv[1];

    run_criterion(1, "geometry", 1.0, criterion_geometry);
    run_criterion(2, "leave-one-out triplets", 1.0, criterion_triplets);
    run_criterion(3, "segmentation DP vs enumeration", 30.0, criterion_segmentation);
    run_criterion(4, "DTW vs enumeration", 10.0, criterion_dtw);
    run_criterion(5, "warping contract", 30.0, criterion_warping);
    run_criterion(6, "held-out proper score", 60.0, criterion_perfect_input);
    run_criterion(7, "three-class separation", 300.0, criterion_separation);
    run_criterion(8, "feedback rules", 60.0, criterion_feedback);
    run_criterion(9, "determinism", 0.0, criterion_determinism);

    return g_failures;
}
