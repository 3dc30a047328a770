#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>

#include "gsr/render.hpp"
#include "gsr/scene_io.hpp"
#include "testutil.hpp"

using gsr::Backend;
using gsr::GaussianChunk;
using gsr::Half;
using gsr::PrecisionMode;
using gsr::ProjectedGaussian;
using testutil::make_camera;

namespace {

ProjectedGaussian splat(float x, float y, float a, float b, float c, float depth, float opacity) {
    ProjectedGaussian p;
    p.mean2d = {x, y};
    p.conic_a = a;
    p.conic_b = b;
    p.conic_c = c;
    p.depth = depth;
    p.opacity = opacity;
    p.radius = 8;
    p.color = {0.5f, 0.5f, 0.5f};
    return p;
}

gsr::ImageBuffer run(const std::vector<gsr::Gaussian3D>& scene, const gsr::Camera& cam,
                     Backend backend, PrecisionMode mode, int group, int chunk_len = 16,
                     int workers = 1, gsr::OpReport* ops = nullptr) {
    gsr::RenderOptions opt;
    opt.backend = backend;
    opt.mode = mode;
    opt.group_size = group;
    opt.chunk_len = chunk_len;
    opt.workers = workers;
    auto res = gsr::render(scene, cam, opt);
    if (ops) *ops = res.ops;
    return std::move(res.image);
}

bool same_bits(const gsr::ImageBuffer& a, const gsr::ImageBuffer& b) {
    if (a.rgb.size() != b.rgb.size()) return false;
    for (size_t i = 0; i < a.rgb.size(); ++i)
        if (std::bit_cast<std::uint32_t>(a.rgb[i]) != std::bit_cast<std::uint32_t>(b.rgb[i]))
            return false;
    return true;
}

}  // namespace

TEST_CASE("build_q_operand mask-selects rows in chunk order") {
    std::vector<ProjectedGaussian> projected;
    std::vector<gsr::GroupEntry> entries;
    for (int i = 0; i < 3; ++i) {
        projected.push_back(splat(10.0f + i, 10.0f, 2.0f, 1.0f, 4.0f, 1.0f + i, 0.5f));
        entries.push_back({static_cast<std::uint32_t>(i), 1.0f + i, 0u});
    }
    entries[0].mask = 0b01;  // tile 0 only
    entries[1].mask = 0b10;  // tile 1 only
    entries[2].mask = 0b11;  // both

    const auto chunk = gsr::stage_chunk<float>(
        std::span<const gsr::GroupEntry>(entries.data(), entries.size()), projected);
    const auto q0 = gsr::build_q_operand(chunk, 0);
    REQUIRE(q0.rows == 2);
    CHECK(q0.row_to_entry[0] == 0);
    CHECK(q0.row_to_entry[1] == 2);
    CHECK(q0.fragment.rows[0][0] == -1.0f);  // -a/2
    CHECK(q0.fragment.rows[0][1] == -1.0f);  // -b
    CHECK(q0.fragment.rows[0][2] == -2.0f);  // -c/2
    for (int k = 3; k < 16; ++k) CHECK(q0.fragment.rows[0][k] == 0.0f);
    for (int k = 0; k < 16; ++k) CHECK(q0.fragment.rows[2][k] == 0.0f);  // unused row

    const auto q_none = gsr::build_q_operand(chunk, 5);
    CHECK(q_none.rows == 0);

    entries[0].mask = entries[1].mask = entries[2].mask = 0b1111;
    const auto full = gsr::stage_chunk<float>(
        std::span<const gsr::GroupEntry>(entries.data(), entries.size()), projected);
    const auto q_all = gsr::build_q_operand(full, 3);
    REQUIRE(q_all.rows == 3);
    for (int i = 0; i < 3; ++i) CHECK(q_all.row_to_entry[i] == i);
}

TEST_CASE("build_phi_operand fills padded basis columns") {
    // Splat centered on the sample point of pixel (4, 2) in tile (0, 0).
    gsr::SplatOperands<float> row;
    row.mean_x = 4.5f;
    row.mean_y = 2.5f;
    const auto phi_center = gsr::build_phi_operand(row, 0, 0, 2);
    for (int k = 0; k < 16; ++k) CHECK(phi_center.cols[4][k] == 0.0f);

    // d = (2, 3): basis column [4, 6, 9, 0 x 13].
    gsr::SplatOperands<float> off;
    off.mean_x = 2.5f;  // pixel 4 sample is 4.5 -> dx = 2
    off.mean_y = -0.5f;  // panel row 2 sample is 2.5 -> dy = 3
    const auto phi = gsr::build_phi_operand(off, 0, 0, 2);
    CHECK(phi.cols[4][0] == 4.0f);
    CHECK(phi.cols[4][1] == 6.0f);
    CHECK(phi.cols[4][2] == 9.0f);
    for (int k = 3; k < 16; ++k) CHECK(phi.cols[4][k] == 0.0f);

    // Mirrored offsets produce identical columns (even basis).
    gsr::SplatOperands<float> mirror;
    mirror.mean_x = 6.5f;  // dx = -2
    mirror.mean_y = 5.5f;  // dy = -3
    const auto phi_m = gsr::build_phi_operand(mirror, 0, 0, 2);
    for (int k = 0; k < 16; ++k) CHECK(phi_m.cols[4][k] == phi.cols[4][k]);
}

TEST_CASE("fragment walk equals the canonical scalar power, both lane types") {
    gsr::SplitMix64 rng(0xF00D);
    for (int iter = 0; iter < 500; ++iter) {
        const float ca = rng.uniform(1e-4f, 2.0f);
        const float cc = rng.uniform(1e-4f, 2.0f);
        const float cb = rng.uniform(-0.9f, 0.9f) * std::sqrt(ca * cc);
        const auto p = splat(rng.uniform(0.0f, 32.0f), rng.uniform(0.0f, 32.0f), ca, cb, cc,
                             rng.uniform(0.5f, 5.0f), 0.7f);
        const gsr::GroupEntry entry{0, p.depth, 1u};
        const std::vector<ProjectedGaussian> projected{p};

        auto check_lane = [&](auto lane_tag) {
            using Lane = decltype(lane_tag);
            const auto chunk = gsr::stage_chunk<Lane>(
                std::span<const gsr::GroupEntry>(&entry, 1), projected);
            const auto q = gsr::build_q_operand(chunk, 0);
            REQUIRE(q.rows == 1);
            for (int panel = 0; panel < 2; ++panel) {
                const auto phi = gsr::build_phi_operand(chunk.ops[0], 0, 0, panel);
                for (int px = 0; px < 16; ++px) {
                    const float via_fragment =
                        gsr::fragment_dot(q.fragment.rows[0], phi.cols[px], 0.0f);
                    const float via_scalar = gsr::splat_power(
                        chunk.ops[0], gsr::pixel_basis(chunk.ops[0], gsr::pixel_center(px),
                                                       gsr::pixel_center(panel)));
                    REQUIRE(std::bit_cast<std::uint32_t>(via_fragment) ==
                            std::bit_cast<std::uint32_t>(via_scalar));
                }
            }
        };
        check_lane(float{});
        check_lane(Half{});
    }
}

TEST_CASE("tensor G=1 fp32 matches the scalar backend bit-for-bit") {
    const gsr::Camera cam = make_camera(256, 192);
    const auto scene = gsr::gen_synthetic_scene(21, 800, 1.0f, {0.01f, 0.08f});
    const auto scalar = run(scene, cam, Backend::scalar, PrecisionMode::fp32, 1);
    const auto tensor = run(scene, cam, Backend::tensor, PrecisionMode::fp32, 1);
    CHECK(same_bits(scalar, tensor));
}

TEST_CASE("tensor fp16 matches scalar fp16 bit-for-bit") {
    const gsr::Camera cam = make_camera(192, 128);
    const auto scene = gsr::gen_synthetic_scene(22, 500, 1.0f, {0.01f, 0.08f});
    const auto scalar = run(scene, cam, Backend::scalar, PrecisionMode::fp16, 1);
    const auto tensor = run(scene, cam, Backend::tensor, PrecisionMode::fp16, 1);
    CHECK(same_bits(scalar, tensor));
}

TEST_CASE("grouping invariance: G in {1,2,4} render identically in both modes") {
    // Image deliberately not a multiple of the group span.
    const gsr::Camera cam = make_camera(200, 120);
    const auto scene = gsr::gen_synthetic_scene(23, 600, 1.0f, {0.02f, 0.1f});
    for (PrecisionMode mode : {PrecisionMode::fp32, PrecisionMode::fp16}) {
        const auto g1 = run(scene, cam, Backend::tensor, mode, 1);
        const auto g2 = run(scene, cam, Backend::tensor, mode, 2);
        const auto g4 = run(scene, cam, Backend::tensor, mode, 4);
        CHECK(same_bits(g1, g2));
        CHECK(same_bits(g1, g4));
    }
}

TEST_CASE("chunk-boundary invariance: lengths {1, 5, 16} agree") {
    const gsr::Camera cam = make_camera(160, 160);
    const auto scene = gsr::gen_synthetic_scene(24, 500, 1.0f, {0.02f, 0.1f});
    for (PrecisionMode mode : {PrecisionMode::fp32, PrecisionMode::fp16}) {
        const auto c16 = run(scene, cam, Backend::tensor, mode, 2, 16);
        const auto c5 = run(scene, cam, Backend::tensor, mode, 2, 5);
        const auto c1 = run(scene, cam, Backend::tensor, mode, 2, 1);
        CHECK(same_bits(c16, c5));
        CHECK(same_bits(c16, c1));
    }
}

TEST_CASE("empty scene leaves the background black and issues no fragments") {
    const gsr::Camera cam = make_camera(64, 64);
    gsr::OpReport ops;
    const auto img = run({}, cam, Backend::tensor, PrecisionMode::fp32, 2, 16, 1, &ops);
    for (float v : img.rgb) REQUIRE(v == 0.0f);
    CHECK(ops.fragment_ops == 0);
    CHECK(ops.chunk_loads == 0);
}

TEST_CASE("worker count does not change the tensor image") {
    const gsr::Camera cam = make_camera(192, 144);
    const auto scene = gsr::gen_synthetic_scene(25, 700, 1.0f, {0.02f, 0.1f});
    for (PrecisionMode mode : {PrecisionMode::fp32, PrecisionMode::fp16}) {
        const auto w1 = run(scene, cam, Backend::tensor, mode, 2, 16, 1);
        const auto w4 = run(scene, cam, Backend::tensor, mode, 2, 16, 4);
        CHECK(same_bits(w1, w4));
    }
}

TEST_CASE("fp16 images stay close to fp32 (PSNR >= 40 dB)") {
    const gsr::Camera cam = make_camera(256, 256);
    const auto scene = gsr::gen_synthetic_scene(26, 1500, 1.0f, {0.01f, 0.06f});
    const auto fp32 = run(scene, cam, Backend::tensor, PrecisionMode::fp32, 2);
    const auto fp16 = run(scene, cam, Backend::tensor, PrecisionMode::fp16, 2);
    CHECK_FALSE(same_bits(fp32, fp16));
    double se = 0.0;
    for (size_t i = 0; i < fp32.rgb.size(); ++i) {
        const double d = fp32.rgb[i] - fp16.rgb[i];
        se += d * d;
    }
    const double psnr = 10.0 * std::log10(1.0 / (se / static_cast<double>(fp32.rgb.size())));
    CHECK(psnr >= 40.0);
}

TEST_CASE("op counters: grouping reduces chunk loads on wide-splat scenes") {
    const gsr::Camera cam = make_camera(256, 256);
    const auto scene = gsr::gen_synthetic_scene(27, 400, 1.0f, {0.1f, 0.25f});  // radius >= tile
    gsr::OpReport g1, g2, g4;
    run(scene, cam, Backend::tensor, PrecisionMode::fp32, 1, 16, 1, &g1);
    run(scene, cam, Backend::tensor, PrecisionMode::fp32, 2, 16, 1, &g2);
    run(scene, cam, Backend::tensor, PrecisionMode::fp32, 4, 16, 1, &g4);
    CHECK(g1.fragment_ops > 0);
    CHECK(g2.chunk_loads < g1.chunk_loads);
    CHECK(g4.chunk_loads < g2.chunk_loads);
    CHECK(g2.skipped_pairs > 0);
    CHECK(g2.padding_waste() > 0.0);
    CHECK(g2.padding_waste() < 1.0);

    // The scalar backend reports no fragment work.
    gsr::RenderOptions sopt;
    sopt.backend = Backend::scalar;
    sopt.group_size = 1;
    const auto sres = gsr::render(scene, cam, sopt);
    CHECK(sres.ops.fragment_ops == 0);
    CHECK(sres.ops.chunk_loads == 0);
}
