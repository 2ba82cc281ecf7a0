#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dtseg/ensemble.hpp"
#include "dtseg/metrics.hpp"
#include "dtseg/projection.hpp"
#include "dtseg/synth.hpp"
#include "oracles.hpp"

using namespace dtseg;

namespace {

FeatureMatrix random_matrix(Rng& rng, std::uint32_t rows, std::uint32_t dim) {
    FeatureMatrix x;
    x.rows = rows;
    x.dim = dim;
    x.values.resize(static_cast<std::size_t>(rows) * dim);
    for (auto& v : x.values) v = static_cast<float>(rng.uniform01() * 10.0);
    return x;
}

double sq_row_dist(const FeatureMatrix& x, std::uint32_t i, std::uint32_t j) {
    double acc = 0.0;
    for (std::uint32_t d = 0; d < x.dim; ++d) {
        const double diff = static_cast<double>(x.row(i)[d]) - x.row(j)[d];
        acc += diff * diff;
    }
    return acc;
}

} // namespace

TEST_CASE("projecting the zero matrix gives zero") {
    FeatureMatrix x;
    x.rows = 8;
    x.dim = 30;
    x.values.assign(240, 0.0f);
    ProjectionSpec spec{30, 10, 99};
    const FeatureMatrix red = random_projection(x, spec);
    for (const auto v : red.values) CHECK(v == 0.0f);
}

TEST_CASE("identity projection hook reproduces the 1/sqrt(k) scaling") {
    Rng rng(4);
    const FeatureMatrix x = random_matrix(rng, 12, 25);
    std::vector<float> identity(25 * 25, 0.0f);
    for (int d = 0; d < 25; ++d) identity[static_cast<std::size_t>(d) * 25 + d] = 1.0f;

    const FeatureMatrix red = apply_projection(x, identity, 25);
    const double scale = 1.0 / std::sqrt(25.0);
    for (std::uint32_t i = 0; i < x.rows; ++i)
        for (std::uint32_t d = 0; d < x.dim; ++d)
            CHECK(red.row(i)[d] == static_cast<float>(static_cast<double>(x.row(i)[d]) * scale));
}

TEST_CASE("projection is deterministic in the seed and rejects k > D") {
    Rng rng(5);
    const FeatureMatrix x = random_matrix(rng, 10, 40);
    ProjectionSpec spec{40, 15, 1234};
    const FeatureMatrix a = random_projection(x, spec);
    const FeatureMatrix b = random_projection(x, spec);
    CHECK(a.values == b.values);

    ProjectionSpec too_big{40, 41, 1};
    CHECK_THROWS_AS(random_projection(x, too_big), std::invalid_argument);
}

TEST_CASE("projection commutes with row permutation") {
    Rng rng(6);
    const FeatureMatrix x = random_matrix(rng, 9, 20);
    std::vector<std::uint32_t> perm(9);
    for (std::uint32_t i = 0; i < 9; ++i) perm[i] = i;
    rng.shuffle(perm);

    FeatureMatrix shuffled = x;
    for (std::uint32_t i = 0; i < 9; ++i)
        std::copy_n(x.row(perm[i]), x.dim, shuffled.row(i));

    ProjectionSpec spec{20, 7, 55};
    const FeatureMatrix red = random_projection(x, spec);
    const FeatureMatrix red_shuffled = random_projection(shuffled, spec);
    for (std::uint32_t i = 0; i < 9; ++i)
        for (std::uint32_t d = 0; d < 7; ++d)
            CHECK(red_shuffled.row(i)[d] == red.row(perm[i])[d]);
}

TEST_CASE("random projection roughly preserves pairwise distances (JL)") {
    Rng rng(1717);
    const FeatureMatrix x = random_matrix(rng, 200, 960);
    ProjectionSpec spec{960, 100, 4242};
    const FeatureMatrix red = random_projection(x, spec);

    int total = 0, within = 0;
    for (std::uint32_t i = 0; i < x.rows; ++i)
        for (std::uint32_t j = i + 1; j < x.rows; ++j) {
            const double orig = sq_row_dist(x, i, j);
            const double proj = sq_row_dist(red, i, j);
            ++total;
            if (proj >= 0.65 * orig && proj <= 1.35 * orig) ++within;
        }
    CHECK(total == 200 * 199 / 2);
    CHECK(static_cast<double>(within) / total >= 0.95);
}

TEST_CASE("kmeans recovers well-separated blobs up to label permutation") {
    Rng rng(8);
    const int per_blob = 30;
    FeatureMatrix x;
    x.rows = 90;
    x.dim = 4;
    x.values.resize(360);
    std::vector<std::uint16_t> truth(90);
    for (int i = 0; i < 90; ++i) {
        const int blob = i / per_blob;
        truth[i] = static_cast<std::uint16_t>(blob);
        for (int d = 0; d < 4; ++d)
            x.row(i)[d] = static_cast<float>(100.0 * blob + rng.uniform01());
    }

    KmeansParams params;
    params.clusters = 3;
    params.seed = 3;
    const KmeansResult result = kmeans(x, 9, 10, params);
    CHECK(result.map.num_labels == 3);

    // every blob must map to exactly one cluster
    for (int blob = 0; blob < 3; ++blob) {
        const std::uint16_t first = result.map.labels[blob * per_blob];
        for (int i = 0; i < per_blob; ++i) CHECK(result.map.labels[blob * per_blob + i] == first);
    }
}

TEST_CASE("kmeans with one cluster reports the total variance") {
    Rng rng(9);
    const FeatureMatrix x = random_matrix(rng, 24, 3);

    KmeansParams params;
    params.clusters = 1;
    params.seed = 7;
    const KmeansResult result = kmeans(x, 4, 6, params);
    CHECK(result.map.num_labels == 1);
    for (const auto label : result.map.labels) CHECK(label == 0);

    std::vector<double> mean(3, 0.0);
    for (std::uint32_t i = 0; i < 24; ++i)
        for (int d = 0; d < 3; ++d) mean[d] += x.row(i)[d] / 24.0;
    double sse = 0.0;
    for (std::uint32_t i = 0; i < 24; ++i)
        for (int d = 0; d < 3; ++d) {
            const double diff = x.row(i)[d] - mean[d];
            sse += diff * diff;
        }
    CHECK(result.inertia == doctest::Approx(sse).epsilon(1e-9));
}

TEST_CASE("kmeans stays within 5% of a 200-restart oracle") {
    // 50 points from three loose gaussians; loose enough that Lloyd
    // has real work to do, structured enough that the optimum basin
    // is reachable from any k-means++ draw
    Rng rng(10);
    FeatureMatrix x;
    x.rows = 50;
    x.dim = 5;
    x.values.resize(250);
    for (std::uint32_t i = 0; i < x.rows; ++i) {
        const int blob = static_cast<int>(rng.bounded(3));
        for (std::uint32_t d = 0; d < x.dim; ++d)
            x.row(i)[d] = static_cast<float>(6.0 * blob + 1.5 * rng.normal());
    }

    double best = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < 200; ++restart) {
        KmeansParams params;
        params.clusters = 3;
        params.seed = 100000 + restart;
        best = std::min(best, kmeans(x, 5, 10, params).inertia);
    }
    for (int seed = 0; seed < 10; ++seed) {
        KmeansParams params;
        params.clusters = 3;
        params.seed = static_cast<std::uint64_t>(seed);
        CHECK(kmeans(x, 5, 10, params).inertia <= best * 1.05);
    }
}

TEST_CASE("kmeans rejects more clusters than points") {
    Rng rng(11);
    const FeatureMatrix x = random_matrix(rng, 4, 2);
    KmeansParams params;
    params.clusters = 5;
    CHECK_THROWS_AS(kmeans(x, 2, 2, params), std::invalid_argument);
}

TEST_CASE("kmeans drops empty clusters and compacts") {
    FeatureMatrix x;
    x.rows = 10;
    x.dim = 2;
    x.values.assign(20, 1.0f); // all points identical
    KmeansParams params;
    params.clusters = 3;
    params.seed = 5;
    const KmeansResult result = kmeans(x, 2, 5, params);
    CHECK(result.map.num_labels == 1);
    CHECK(result.inertia == 0.0);
    CHECK_NOTHROW(validate(result.map));
}

TEST_CASE("ensemble size and determinism") {
    SynthSpec spec;
    spec.height = 24;
    spec.width = 24;
    spec.frames = 10;
    spec.seed = 21;
    const VideoCube cube = generate_synthetic(spec).cube;

    const LbpParams lbp;
    FeatureParams fp;
    EnsembleConfig config;
    config.replicates = 1;
    config.clusters = 2;
    config.reduced_dim = 20;
    config.master_seed = 77;

    const auto members = generate_ensemble(cube, lbp, fp, config);
    CHECK(members.size() == 3); // K = 1 -> exactly 3 maps
    for (const auto& m : members) {
        CHECK(m.map.height == 24);
        CHECK(m.map.width == 24);
        CHECK_NOTHROW(validate(m.map));
    }
    CHECK(members[0].plane == PlaneFamily::XY);
    CHECK(members[1].plane == PlaneFamily::XT);
    CHECK(members[2].plane == PlaneFamily::YT);

    const auto again = generate_ensemble(cube, lbp, fp, config);
    for (std::size_t j = 0; j < members.size(); ++j) {
        CHECK(again[j].map.labels == members[j].map.labels);
        CHECK(again[j].projection_seed == members[j].projection_seed);
    }

    config.replicates = 4;
    CHECK(generate_ensemble(cube, lbp, fp, config).size() == 12); // J = 3K
}

TEST_CASE("generate_ensemble equals the two-phase feature/ensemble path") {
    SynthSpec spec;
    spec.height = 24;
    spec.width = 24;
    spec.frames = 10;
    spec.seed = 22;
    const VideoCube cube = generate_synthetic(spec).cube;

    const LbpParams lbp;
    const FeatureParams fp;
    EnsembleConfig config;
    config.replicates = 2;
    config.reduced_dim = 30;
    config.master_seed = 5;

    const auto direct = generate_ensemble(cube, lbp, fp, config);
    const FamilyFeatures features = build_family_features(cube, lbp, fp);
    const auto staged = ensemble_from_features(features, 24, 24, config);
    REQUIRE(direct.size() == staged.size());
    for (std::size_t j = 0; j < direct.size(); ++j) {
        CHECK(direct[j].map.labels == staged[j].map.labels);
        CHECK(direct[j].inertia == staged[j].inertia);
    }
}

TEST_CASE("member seeds are decorrelated across planes and replicates") {
    const std::uint64_t a = member_stream_seed(1, PlaneFamily::XY, 0);
    const std::uint64_t b = member_stream_seed(1, PlaneFamily::XT, 0);
    const std::uint64_t c = member_stream_seed(1, PlaneFamily::XY, 1);
    CHECK(a != b);
    CHECK(a != c);
    CHECK(b != c);
    CHECK(member_stream_seed(2, PlaneFamily::XY, 0) != a);
}

TEST_CASE("every ensemble member clears the weak-segmentation floor") {
    SynthSpec spec; // defaults: 64x64x16 two-texture fixture
    spec.seed = 33;
    const SynthResult fixture = generate_synthetic(spec);

    const LbpParams lbp;
    const FeatureParams fp;
    EnsembleConfig config;
    config.replicates = 4;
    config.clusters = 2;
    config.reduced_dim = 100;
    config.master_seed = 99;

    const auto members = generate_ensemble(fixture.cube, lbp, fp, config);
    CHECK(members.size() == 12);
    for (const auto& m : members) {
        const double pr = pr_index(m.map, fixture.truth);
        CHECK(pr >= 0.6);
    }
}
