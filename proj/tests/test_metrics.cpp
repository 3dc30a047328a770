#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gsr/metrics.hpp"
#include "gsr/scene_io.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using gsr::GroupConfig;
using gsr::ImageBuffer;

namespace {

ImageBuffer flat(int w, int h, float v) {
    ImageBuffer img(w, h);
    img.rgb.assign(img.rgb.size(), v);
    return img;
}

}  // namespace

TEST_CASE("psnr: cap, known MSE values, and shape checks") {
    const auto a = flat(8, 8, 0.0f);
    CHECK(gsr::psnr(a, a) == 99.0);
    // 10*log10(1/0.01) = 20 dB, evaluated with the stored value of 0.1f.
    const double expected = 10.0 * std::log10(1.0 / (static_cast<double>(0.1f) * 0.1f));
    CHECK(gsr::psnr(a, flat(8, 8, 0.1f)) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(20.0).epsilon(1e-6));
    CHECK(gsr::psnr(a, flat(8, 8, 1.0f)) == 0.0);
    CHECK_THROWS_AS(gsr::psnr(a, flat(8, 4, 0.0f)), gsr::ValidationError);
}

TEST_CASE("max_abs_diff finds the first largest difference") {
    auto a = flat(4, 4, 0.25f);
    auto b = a;
    CHECK(gsr::max_abs_diff(a, b).value == 0.0f);

    b.pixel(2, 1)[1] += 0.25f;
    const auto d = gsr::max_abs_diff(a, b);
    CHECK(d.value == 0.25f);
    CHECK(d.x == 2);
    CHECK(d.y == 1);
    CHECK(d.channel == 1);

    // Matches an exhaustive scan on random images.
    gsr::SplitMix64 rng(9);
    ImageBuffer ra(16, 16), rb(16, 16);
    for (auto& v : ra.rgb) v = rng.uniform();
    for (auto& v : rb.rgb) v = rng.uniform();
    const auto got = gsr::max_abs_diff(ra, rb);
    float best = 0.0f;
    size_t best_i = 0;
    for (size_t i = 0; i < ra.rgb.size(); ++i) {
        const float dv = std::fabs(ra.rgb[i] - rb.rgb[i]);
        if (dv > best) {
            best = dv;
            best_i = i;
        }
    }
    CHECK(got.value == best);
    CHECK(static_cast<size_t>((got.y * 16 + got.x) * 3 + got.channel) == best_i);

    CHECK_THROWS_AS(gsr::max_abs_diff(ra, flat(4, 4, 0.0f)), gsr::ValidationError);
}

TEST_CASE("load_reduction formula and histogram") {
    SUBCASE("full 2x2 coverage reduces by exactly 0.75") {
        std::vector<gsr::KeyedEntry> entries = {{0, {0, 1.0f, 0b1111u}}};
        const auto r = gsr::load_reduction(entries);
        CHECK(r.n_total == 4);
        CHECK(r.n_group == 1);
        CHECK(r.load_reduction == 0.75);
        CHECK(r.mask_popcount_hist[4] == 1);
    }
    SUBCASE("single-tile splats yield zero reduction") {
        std::vector<gsr::KeyedEntry> entries = {{0, {0, 1.0f, 0b0001u}}, {1, {1, 1.0f, 0b0100u}}};
        const auto r = gsr::load_reduction(entries);
        CHECK(r.load_reduction == 0.0);
        CHECK(r.mask_popcount_hist[1] == 2);
    }
    SUBCASE("empty list is an error") {
        CHECK_THROWS_AS(gsr::load_reduction({}), gsr::ValidationError);
    }
}

TEST_CASE("reuse accounting agrees with the brute-force recount on real scenes") {
    const auto cam = testutil::make_camera(320, 240);
    const auto scene = gsr::gen_synthetic_scene(31, 800, 1.0f, {0.02f, 0.15f});
    const auto projected = gsr::project_scene(scene, cam, 1);
    const auto recount = oracle::tile_appearance_recount(projected, cam.width, cam.height);

    double prev_reduction = -1.0;
    std::uint64_t prev_n_group = ~0ull;
    for (int g : {1, 2, 4}) {
        const auto cfg = GroupConfig::square(g, cam.width, cam.height);
        const auto entries = gsr::build_group_entries(projected, cfg);
        const auto r = gsr::load_reduction(entries);
        CHECK(r.n_total == recount);
        // Monotonicity over nested groupings.
        CHECK(r.n_group <= prev_n_group);
        CHECK(r.load_reduction >= prev_reduction);
        prev_n_group = r.n_group;
        prev_reduction = r.load_reduction;
    }
}

TEST_CASE("entry overhead is 1 byte over 16, and wide masks are rejected") {
    const auto e2 = gsr::entry_overhead(GroupConfig::square(2, 256, 256));
    CHECK(e2.payload_bytes == 16);
    CHECK(e2.mask_bytes == 1);
    CHECK(e2.overhead == 0.0625);

    const auto e1 = gsr::entry_overhead(GroupConfig::square(1, 256, 256));
    CHECK(e1.overhead == 0.0625);  // fixed layout regardless of group size

    CHECK_THROWS_AS(gsr::entry_overhead(GroupConfig::square(4, 256, 256)),
                    gsr::ValidationError);

    // The computed payload matches the serializer's actual record size.
    gsr::ProjectedGaussian p;
    p.mean2d = {1.0f, 2.0f};
    const auto bytes = gsr::serialize_group_entry({0, 1.0f, 1u}, p);
    CHECK(bytes.size() == e2.payload_bytes + e2.mask_bytes);
}
