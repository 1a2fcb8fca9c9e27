#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "amal/model.hpp"

using namespace amal;

namespace {

// Brute-force oracle for the leave-one-out triplet: recompute each
// leave-one-out mean from scratch instead of reusing the total sum.
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

SkeletonTopology tiny_topology() {
    SkeletonTopology t;
    t.joint_names = {"spine_base", "shoulder_left", "shoulder_right", "hand"};
    t.edges = {{0, 1}, {0, 2}, {0, 3}};
    t.refs = {0, 1, 2};
    return t;
}

SkeletonVideo tiny_video(unsigned seed, int frames = 6) {
    SkeletonVideo v;
    v.topology = tiny_topology();
    v.fps = 30.0;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 0.01);
    for (int f = 0; f < frames; ++f) {
        Frame fr = {{0, 0, 0}, {-0.2, 0.4, 0}, {0.2, 0.4, 0}, {0.3 + 0.02 * f, 0.1, 0}};
        for (auto& p : fr) {
            p.x += nd(rng);
            p.y += nd(rng);
            p.z += nd(rng);
        }
        v.frames.push_back(fr);
    }
    return v;
}

TrainedModel fit_from_seeds(const std::vector<unsigned>& seeds) {
    ActiveJointSet active;
    active.active = {3};
    PoISet pois{{1, 2, 3, 4}};
    std::vector<FeatureSet> feats;
    DesignatedSkeleton des{{0.447214, 0.447214, 0.316228}, 0};
    for (unsigned s : seeds)
        feats.push_back(extract_frame_features(tiny_video(s), active, 6,
                                               segment_lengths_from_pois(pois, 6)));
    return fit_model(feats, tiny_topology(), des, active, pois, 6);
}

}  // namespace

TEST_CASE("triplet: hand-worked {1,2,3}") {
    auto t = fit_triplet({1.0, 2.0, 3.0});
    // leave-one-out means are 2.5, 2, 1.5 -> d = {1.5, 0, 1.5}
    CHECK(t.mean == doctest::Approx(2.0));
    CHECK(t.dev_mean == doctest::Approx(1.0));
    CHECK(t.dev_std == doctest::Approx(std::sqrt(3.0) / 2.0));  // ~0.8660
}

TEST_CASE("triplet: identical observations give zero spread") {
    auto t = fit_triplet({4.2, 4.2, 4.2, 4.2});
    CHECK(t.mean == doctest::Approx(4.2));
    CHECK(t.dev_mean == 0.0);
    CHECK(t.dev_std == 0.0);
}

TEST_CASE("triplet: matches the brute-force oracle on random inputs") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ud(-5.0, 5.0);
    std::uniform_int_distribution<int> nd(3, 12);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> obs(nd(rng));
        for (auto& o : obs) o = ud(rng);
        auto got = fit_triplet(obs);
        auto want = brute_triplet(obs);
        CHECK(got.mean == doctest::Approx(want.mean).epsilon(1e-12));
        CHECK(got.dev_mean == doctest::Approx(want.dev_mean).epsilon(1e-12));
        CHECK(got.dev_std == doctest::Approx(want.dev_std).epsilon(1e-12));
    }
}

TEST_CASE("triplet: permutation invariant") {
    std::vector<double> obs{0.3, -1.2, 2.8, 0.9, -0.4};
    auto a = fit_triplet(obs);
    std::sort(obs.begin(), obs.end());
    auto b = fit_triplet(obs);
    CHECK(a.mean == doctest::Approx(b.mean));
    CHECK(a.dev_mean == doctest::Approx(b.dev_mean));
    CHECK(a.dev_std == doctest::Approx(b.dev_std));
}

TEST_CASE("triplet: fewer than 3 observations is an error") {
    CHECK_THROWS_AS(fit_triplet({}), std::invalid_argument);
    CHECK_THROWS_AS(fit_triplet({1.0}), std::invalid_argument);
    CHECK_THROWS_AS(fit_triplet({1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("fit_model: needs at least 3 videos") {
    ActiveJointSet active;
    active.active = {3};
    std::vector<FeatureSet> feats(2);
    CHECK_THROWS_AS(fit_model(feats, tiny_topology(), {}, active, {}, 6), std::invalid_argument);
}

TEST_CASE("fit_model: parameters with a missing frame in too many videos are dropped") {
    ActiveJointSet active;
    active.active = {3};
    std::vector<FeatureSet> feats;
    PoISet pois{{1, 2, 3, 4}};
    for (unsigned s : {1u, 2u, 3u})
        feats.push_back(extract_frame_features(tiny_video(s), active, 6,
                                               segment_lengths_from_pois(pois, 6)));
    feats[0].series[0].values[2] = std::numeric_limits<double>::quiet_NaN();
    auto m = fit_model(feats, tiny_topology(), {{1, 1, 1}, 0}, active, pois, 6);
    CHECK_FALSE(m.series[0].per_frame[2].present);  // only 2 observations remain
    CHECK(m.series[0].per_frame[1].present);
}

TEST_CASE("model round-trip: parse(serialize(m)) reproduces every field") {
    auto m = fit_from_seeds({1, 2, 3, 4});
    auto text = serialize_model(m);
    auto p = parse_model(text);

    CHECK(p.topology == m.topology);
    REQUIRE(p.designated.edge_lengths.size() == m.designated.edge_lengths.size());
    for (std::size_t i = 0; i < m.designated.edge_lengths.size(); ++i)
        CHECK(p.designated.edge_lengths[i] ==
              doctest::Approx(m.designated.edge_lengths[i]).epsilon(1e-8));
    CHECK(p.active.active == m.active.active);
    CHECK(p.reference_pois.indices == m.reference_pois.indices);
    CHECK(p.reference_length == m.reference_length);

    REQUIRE(p.series.size() == m.series.size());
    for (std::size_t s = 0; s < m.series.size(); ++s) {
        CHECK(p.series[s].key == m.series[s].key);
        CHECK(p.series[s].cls == m.series[s].cls);
        REQUIRE(p.series[s].per_frame.size() == m.series[s].per_frame.size());
        for (std::size_t f = 0; f < m.series[s].per_frame.size(); ++f) {
            const auto& a = m.series[s].per_frame[f];
            const auto& b = p.series[s].per_frame[f];
            CHECK(a.present == b.present);
            if (!a.present) continue;
            CHECK(b.mean == doctest::Approx(a.mean).epsilon(1e-8));
            CHECK(b.dev_mean == doctest::Approx(a.dev_mean).epsilon(1e-8));
            CHECK(b.dev_std == doctest::Approx(a.dev_std).epsilon(1e-8));
        }
    }
    REQUIRE(p.time.size() == m.time.size());
    for (std::size_t k = 0; k < m.time.size(); ++k) {
        CHECK(p.time[k].key == m.time[k].key);
        CHECK(p.time[k].triplet.mean == doctest::Approx(m.time[k].triplet.mean).epsilon(1e-8));
    }

    // The serialization itself is stable across a round trip.
    CHECK(serialize_model(p) == text);
}

TEST_CASE("model parse errors carry line numbers") {
    CHECK_THROWS_AS(parse_model(std::string("")), ParseError);
    CHECK_THROWS_AS(parse_model(std::string("AMALMODEL 2\n")), ParseError);
    CHECK_THROWS_AS(parse_model(std::string("NOTAMODEL 1\n")), ParseError);

    auto m = fit_from_seeds({1, 2, 3});
    auto text = serialize_model(m);
    CHECK_THROWS_AS(parse_model(text + "pos:hand:x:999 1 1 1\n"), ParseError);   // frame range
    CHECK_THROWS_AS(parse_model(text + "pos:nosuch:x:0 1 1 1\n"), ParseError);   // unknown key
    CHECK_THROWS_AS(parse_model(text + "pos:hand:x:0 1 1\n"), ParseError);       // short line

    try {
        parse_model(std::string("AMALMODEL 1\njoints a b\nbogus\n"));
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
    }
}
