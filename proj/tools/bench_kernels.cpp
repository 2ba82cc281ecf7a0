// Times the OpenMP kernels against their serial reference on a
// synthetic cube and checks that the outputs match bit for bit.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dtseg/ensemble.hpp"
#include "dtseg/features.hpp"
#include "dtseg/kmeans.hpp"
#include "dtseg/lbp.hpp"
#include "dtseg/projection.hpp"
#include "dtseg/serial_ref.hpp"
#include "dtseg/synth.hpp"

using namespace dtseg;
using Clock = std::chrono::steady_clock;

namespace {

template <typename F>
double time_it(F&& f) {
    const auto t0 = Clock::now();
    f();
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(const char* name, double serial, double parallel, bool equal) {
    std::printf("%-18s serial %7.3f s   omp %7.3f s   speedup %5.2fx   %s\n", name, serial,
                parallel, serial / parallel, equal ? "match" : "MISMATCH");
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (built without OpenMP)\n");
#endif

    SynthSpec spec;
    spec.height = 110;
    spec.width = 160;
    spec.frames = 60;
    spec.seed = 7;
    const VideoCube cube = generate_synthetic(spec).cube;
    std::printf("cube: %dx%dx%d\n\n", cube.height, cube.width, cube.frames);

    const LbpParams lbp;
    const FeatureParams feat;
    bool all_equal = true;

    LbpVolume vol_s, vol_p;
    {
        const double ts = time_it([&] { vol_s = serial::lbp_volume(cube, PlaneFamily::XY, lbp); });
        const double tp = time_it([&] { vol_p = lbp_volume(cube, PlaneFamily::XY, lbp); });
        const bool eq = vol_s.codes == vol_p.codes;
        all_equal &= eq;
        report("lbp_volume", ts, tp, eq);
    }

    FeatureMatrix feat_s, feat_p;
    {
        const double ts = time_it([&] { feat_s = serial::feature_matrix(vol_s, feat); });
        const double tp = time_it([&] { feat_p = feature_matrix(vol_p, feat); });
        const bool eq = feat_s.values == feat_p.values;
        all_equal &= eq;
        report("feature_matrix", ts, tp, eq);
    }

    FeatureMatrix red_s, red_p;
    {
        ProjectionSpec proj;
        proj.input_dim = feat_p.dim;
        proj.output_dim = 100;
        proj.seed = 11;
        const auto rp = make_projection_matrix(proj);
        const double ts = time_it([&] { red_s = serial::apply_projection(feat_p, rp, 100); });
        const double tp = time_it([&] { red_p = apply_projection(feat_p, rp, 100); });
        const bool eq = red_s.values == red_p.values;
        all_equal &= eq;
        report("apply_projection", ts, tp, eq);
    }

    {
        KmeansParams km;
        km.clusters = 3;
        km.seed = 13;
        KmeansResult rs, rp;
        const double ts = time_it([&] { rs = serial::kmeans(red_p, cube.height, cube.width, km); });
        const double tp = time_it([&] { rp = kmeans(red_p, cube.height, cube.width, km); });
        const bool eq = rs.map.labels == rp.map.labels && rs.inertia == rp.inertia;
        all_equal &= eq;
        report("kmeans", ts, tp, eq);
    }

    if (!all_equal) {
        std::printf("\nFAILURE: parallel kernels diverged from the serial reference\n");
        return 1;
    }
    return 0;
}
