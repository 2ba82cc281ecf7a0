#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dtseg/metrics.hpp"
#include "oracles.hpp"

using namespace dtseg;

namespace {

SegmentationMap make_map(int height, int width, std::vector<std::uint16_t> labels) {
    SegmentationMap map;
    map.height = height;
    map.width = width;
    map.labels = std::move(labels);
    int max_label = 0;
    for (const auto l : map.labels) max_label = std::max<int>(max_label, l);
    map.num_labels = max_label + 1;
    return map;
}

// relabels by a random permutation of the id space
SegmentationMap permuted(const SegmentationMap& map, Rng& rng) {
    std::vector<std::uint16_t> perm(map.num_labels);
    for (int c = 0; c < map.num_labels; ++c) perm[c] = static_cast<std::uint16_t>(c);
    rng.shuffle(perm);
    SegmentationMap out = map;
    for (auto& l : out.labels) l = perm[l];
    return out;
}

} // namespace

TEST_CASE("pr_index basics") {
    Rng rng(70);
    const SegmentationMap s = oracle::random_map(rng, 6, 6, 4);
    CHECK(pr_index(s, s) == 1.0);

    const SegmentationMap a = make_map(2, 1, {0, 0});
    const SegmentationMap b = make_map(2, 1, {0, 1});
    CHECK(pr_index(a, b) == 0.0); // the single pair disagrees

    SegmentationMap one;
    one.height = 1;
    one.width = 1;
    one.num_labels = 1;
    one.labels = {0};
    CHECK_THROWS_AS(pr_index(one, one), std::invalid_argument);
    CHECK_THROWS_AS(pr_index(a, s), std::invalid_argument);
}

TEST_CASE("pr_index equals the all-pairs oracle exactly") {
    Rng rng(71);
    for (int trial = 0; trial < 200; ++trial) {
        const SegmentationMap a = oracle::random_map(rng, 6, 6, 4);
        const SegmentationMap b = oracle::random_map(rng, 6, 6, 4);
        CHECK(pr_index(a, b) == oracle::pr_index(a, b));
        CHECK(pr_index(a, b) == pr_index(b, a)); // symmetric
    }
}

TEST_CASE("voi identities") {
    Rng rng(72);
    const SegmentationMap s = oracle::random_map(rng, 8, 8, 4);
    CHECK(voi(s, s) == 0.0);

    for (int trial = 0; trial < 100; ++trial) {
        const SegmentationMap a = oracle::random_map(rng, 8, 8, 4);
        const SegmentationMap b = oracle::random_map(rng, 8, 8, 4);
        const double v = voi(a, b);
        CHECK(v >= 0.0);
        CHECK(v == doctest::Approx(voi(b, a)).epsilon(1e-12));
        CHECK(v == doctest::Approx(oracle::voi(a, b)).epsilon(1e-12));
        if (pr_index(a, b) != 1.0) CHECK(v > 0.0); // zero only for equal partitions
    }
}

TEST_CASE("voi approaches 2 ln 2 for independent binary maps") {
    Rng rng(73);
    SegmentationMap a, b;
    a.height = b.height = 128;
    a.width = b.width = 128;
    a.num_labels = b.num_labels = 2;
    a.labels.resize(128 * 128);
    b.labels.resize(128 * 128);
    for (std::size_t i = 0; i < a.labels.size(); ++i) {
        a.labels[i] = static_cast<std::uint16_t>(rng.bounded(2));
        b.labels[i] = static_cast<std::uint16_t>(rng.bounded(2));
    }
    CHECK(std::abs(voi(a, b) - 2.0 * std::log(2.0)) < 0.05);
}

TEST_CASE("voi satisfies the triangle inequality") {
    Rng rng(74);
    for (int trial = 0; trial < 50; ++trial) {
        const SegmentationMap a = oracle::random_map(rng, 6, 6, 4);
        const SegmentationMap b = oracle::random_map(rng, 6, 6, 4);
        const SegmentationMap c = oracle::random_map(rng, 6, 6, 4);
        CHECK(voi(a, c) <= voi(a, b) + voi(b, c) + 1e-12);
    }
}

TEST_CASE("pri reduces to pr_index for one ground truth") {
    Rng rng(75);
    for (int trial = 0; trial < 50; ++trial) {
        const SegmentationMap a = oracle::random_map(rng, 6, 6, 4);
        const SegmentationMap g = oracle::random_map(rng, 6, 6, 4);
        CHECK(pri(a, {g}) == doctest::Approx(pr_index(a, g)).epsilon(1e-15));
    }
    const SegmentationMap s = oracle::random_map(rng, 6, 6, 3);
    CHECK_THROWS_AS(pri(s, {}), std::invalid_argument);
}

TEST_CASE("pri of identical maps in the set") {
    Rng rng(76);
    SegmentationMap g = oracle::random_map(rng, 6, 6, 3);
    while (g.num_labels < 2) g = oracle::random_map(rng, 6, 6, 3);
    CHECK(pri(g, {g, g}) == 1.0);
    SegmentationMap other = g;
    other.labels[0] = static_cast<std::uint16_t>((other.labels[0] + 1) % g.num_labels);
    CHECK(pri(compact_labels(other), {g, g}) < 1.0);
}

TEST_CASE("pri with two conflicting ground truths on 4 pixels") {
    // S = [0,0,1,1], G1 = [0,0,1,1], G2 = [0,1,0,1]
    // pairwise agreement sums to 4 over the 6 pairs
    const SegmentationMap s = make_map(2, 2, {0, 0, 1, 1});
    const SegmentationMap g1 = make_map(2, 2, {0, 0, 1, 1});
    const SegmentationMap g2 = make_map(2, 2, {0, 1, 0, 1});
    const std::vector<SegmentationMap> gts = {g1, g2};
    CHECK(pri(s, gts) == doctest::Approx(4.0 / 6.0).epsilon(1e-15));
    CHECK(pri(s, gts) == doctest::Approx(oracle::pri(s, gts)).epsilon(1e-15));
}

TEST_CASE("f_measure basics and oracle agreement") {
    Rng rng(77);
    const SegmentationMap s = oracle::random_map(rng, 6, 6, 4);
    CHECK(f_measure(s, s) == 1.0);

    // all singletons: no same-label pair anywhere
    SegmentationMap single;
    single.height = 3;
    single.width = 3;
    single.num_labels = 9;
    single.labels.resize(9);
    for (int i = 0; i < 9; ++i) single.labels[i] = static_cast<std::uint16_t>(i);
    CHECK_THROWS_AS(f_measure(single, s), std::invalid_argument);
    CHECK_THROWS_AS(f_measure(s, single), std::invalid_argument);

    for (int trial = 0; trial < 100; ++trial) {
        const SegmentationMap a = oracle::random_map(rng, 6, 6, 4);
        const SegmentationMap b = oracle::random_map(rng, 6, 6, 4);
        CHECK(f_measure(a, b) == doctest::Approx(oracle::f_measure(a, b)).epsilon(1e-12));
    }
}

TEST_CASE("evaluate aggregates the verified metrics") {
    Rng rng(78);
    const SegmentationMap s = oracle::random_map(rng, 8, 8, 3);
    const MetricsReport same = evaluate(s, s);
    CHECK(same.pr == 1.0);
    CHECK(same.gce == 0.0);
    CHECK(same.voi == 0.0);
    CHECK(same.f_measure == 1.0);
    CHECK(same.pri == 1.0);
    CHECK(same.pixels == 64);

    const SegmentationMap a = oracle::random_map(rng, 8, 8, 4);
    const SegmentationMap b = oracle::random_map(rng, 8, 8, 4);
    const MetricsReport r = evaluate(a, b);
    CHECK(r.pr == pr_index(a, b));
    CHECK(r.voi == voi(a, b));
    CHECK(r.f_measure == f_measure(a, b));
    CHECK(r.pri == pri(a, {b}));

    const std::string json = report_to_json(r);
    CHECK(json.find("\"pr\"") != std::string::npos);
    CHECK(json.find("\"gce\"") != std::string::npos);
}

TEST_CASE("metric ranges hold over 1000 random pairs") {
    Rng rng(79);
    for (int trial = 0; trial < 1000; ++trial) {
        const SegmentationMap a = oracle::random_map(rng, 5, 5, 4);
        const SegmentationMap b = oracle::random_map(rng, 5, 5, 4);
        const MetricsReport r = evaluate(a, b);
        CHECK(r.pr >= 0.0);
        CHECK(r.pr <= 1.0);
        CHECK(r.gce >= 0.0);
        CHECK(r.gce <= 1.0);
        CHECK(r.voi >= 0.0);
        CHECK(r.pri >= 0.0);
        CHECK(r.pri <= 1.0);
        CHECK(r.f_measure >= 0.0);
        CHECK(r.f_measure <= 1.0);
    }
}

TEST_CASE("all metrics are invariant to relabeling either input") {
    Rng rng(80);
    for (int trial = 0; trial < 50; ++trial) {
        const SegmentationMap a = oracle::random_map(rng, 6, 6, 4);
        const SegmentationMap b = oracle::random_map(rng, 6, 6, 4);
        const SegmentationMap ap = permuted(a, rng);
        const SegmentationMap bp = permuted(b, rng);

        CHECK(pr_index(ap, bp) == pr_index(a, b)); // integer-exact
        CHECK(voi(ap, bp) == doctest::Approx(voi(a, b)).epsilon(1e-12));
        CHECK(f_measure(ap, bp) == doctest::Approx(f_measure(a, b)).epsilon(1e-12));
        CHECK(pri(ap, {bp}) == doctest::Approx(pri(a, {b})).epsilon(1e-12));
    }
}
