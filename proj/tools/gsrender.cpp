// gsrender: command-line front end for the splat renderer.
//
// Exit codes: 0 success, 1 compare mismatch, 2 usage/format/stage error.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gsr/metrics.hpp"
#include "gsr/render.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct RenderArgs {
    std::string scene, camera, out;
    std::string backend = "tensor";
    std::string precision = "fp32";
    int group = 2;
    int workers = 1;
};

gsr::RenderOptions to_options(const RenderArgs& a) {
    gsr::RenderOptions opt;
    opt.backend = a.backend == "scalar" ? gsr::Backend::scalar : gsr::Backend::tensor;
    opt.mode = a.precision == "fp16" ? gsr::PrecisionMode::fp16 : gsr::PrecisionMode::fp32;
    opt.group_size = a.group;
    opt.workers = a.workers;
    if (opt.backend == gsr::Backend::scalar && a.group != 1)
        throw CLI::ValidationError("--group", "the scalar backend requires --group 1");
    return opt;
}

void write_stats(const std::string& path, const RenderArgs& a, const gsr::Camera& cam,
                 std::size_t scene_size, const gsr::RenderResult& res) {
    std::ofstream out(path, std::ios::trunc);
    out << "backend=" << a.backend << "\n"
        << "precision=" << a.precision << "\n"
        << "group=" << a.group << "\n"
        << "workers=" << a.workers << "\n"
        << "width=" << cam.width << "\n"
        << "height=" << cam.height << "\n"
        << "gaussians=" << scene_size << "\n"
        << "culled=" << res.projection.culled << "\n"
        << "dropped_degenerate=" << res.projection.dropped_degenerate << "\n"
        << "entries=" << res.entries << "\n"
        << "tile_appearances=" << res.tile_appearances << "\n"
        << "fragment_ops=" << res.ops.fragment_ops << "\n"
        << "chunk_loads=" << res.ops.chunk_loads << "\n"
        << "skipped_pairs=" << res.ops.skipped_pairs << "\n"
        << "padding_waste=" << res.ops.padding_waste() << "\n";
    if (!out) throw gsr::FormatError("write failed: " + path);
}

int cmd_render(const RenderArgs& a) {
    const auto scene = gsr::load_scene(a.scene);
    const auto cam = gsr::load_camera(a.camera);
    const auto res = gsr::render(scene, cam, to_options(a));
    gsr::write_image(res.image, a.out);
    write_stats(a.out + ".stats", a, cam, scene.size(), res);
    return 0;
}

int cmd_compare(const std::string& path_a, const std::string& path_b) {
    const auto img_a = gsr::read_ppm(path_a);
    const auto img_b = gsr::read_ppm(path_b);
    const double db = gsr::psnr(img_a, img_b);
    const auto diff = gsr::max_abs_diff(img_a, img_b);
    const bool exact = diff.value == 0.0f;
    std::printf("psnr_db=%.6f\n", db);
    std::printf("max_abs_diff=%.9g\n", static_cast<double>(diff.value));
    std::printf("max_abs_diff_at=%d,%d,%d\n", diff.x, diff.y, diff.channel);
    std::printf("bit_exact=%s\n", exact ? "true" : "false");
    return exact ? 0 : 1;
}

int cmd_stats(const std::string& scene_path, const std::string& camera_path,
              const std::vector<int>& groups, int workers) {
    const auto scene = gsr::load_scene(scene_path);
    const auto cam = gsr::load_camera(camera_path);
    const auto projected = gsr::project_scene(scene, cam, workers);
    for (int g : groups) {
        const auto cfg = gsr::GroupConfig::square(g, cam.width, cam.height);
        const auto entries = gsr::build_group_entries(projected, cfg);
        if (entries.empty()) {
            std::printf("group=%d n_total=0 n_group=0 load_reduction=0 mask_hist=\n", g);
            continue;
        }
        const auto r = gsr::load_reduction(entries);
        std::ostringstream hist;
        for (int pc = 1; pc <= 16; ++pc) {
            if (r.mask_popcount_hist[pc] == 0) continue;
            if (hist.tellp() > 0) hist << ",";
            hist << pc << ":" << r.mask_popcount_hist[pc];
        }
        std::printf("group=%d n_total=%llu n_group=%llu load_reduction=%.6f mask_hist=%s\n", g,
                    static_cast<unsigned long long>(r.n_total),
                    static_cast<unsigned long long>(r.n_group), r.load_reduction,
                    hist.str().c_str());
    }
    return 0;
}

int cmd_bench(const std::string& scene_path, const std::string& camera_path,
              const std::string& precision, int reps, int workers) {
    const auto scene = gsr::load_scene(scene_path);
    const auto cam = gsr::load_camera(camera_path);

    struct Config {
        const char* backend;
        int group;
    };
    const Config configs[] = {{"scalar", 1}, {"tensor", 1}, {"tensor", 2}, {"tensor", 4}};

    std::printf("# op counts are hardware-independent proxies; GPU wall-clock speedups are not "
                "reproduction targets\n");
    for (const Config& c : configs) {
        RenderArgs a;
        a.backend = c.backend;
        a.precision = precision;
        a.group = c.group;
        a.workers = workers;
        std::vector<double> times;
        gsr::RenderResult res;
        for (int r = 0; r < reps; ++r) {
            const auto t0 = Clock::now();
            res = gsr::render(scene, cam, to_options(a));
            times.push_back(ms_since(t0));
        }
        std::sort(times.begin(), times.end());
        double mean = 0.0;
        for (double t : times) mean += t;
        mean /= static_cast<double>(times.size());
        const double median = times[times.size() / 2];
        std::printf("backend=%s group=%d precision=%s reps=%d mean_ms=%.3f median_ms=%.3f "
                    "fragment_ops=%llu chunk_loads=%llu skipped_pairs=%llu padding_waste=%.6f\n",
                    c.backend, c.group, precision.c_str(), reps, mean, median,
                    static_cast<unsigned long long>(res.ops.fragment_ops),
                    static_cast<unsigned long long>(res.ops.chunk_loads),
                    static_cast<unsigned long long>(res.ops.skipped_pairs),
                    res.ops.padding_waste());
    }
    return 0;
}

int cmd_gen_scene(const std::string& out, std::uint64_t seed, int count, float extent,
                  float scale_min, float scale_max) {
    const auto scene = gsr::gen_synthetic_scene(seed, count, extent, {scale_min, scale_max});
    gsr::save_scene(scene, out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CPU splat renderer with scalar and tensorized rasterizer backends"};
    app.require_subcommand(1);

    RenderArgs render_args;
    auto* render = app.add_subcommand("render", "Render a scene to a PPM image plus .stats sidecar");
    render->add_option("--scene", render_args.scene, "Scene file (.gsb)")->required();
    render->add_option("--camera", render_args.camera, "Camera config file")->required();
    render->add_option("--out", render_args.out, "Output PPM path")->required();
    render->add_option("--backend", render_args.backend, "Rasterizer backend")
        ->check(CLI::IsMember({"scalar", "tensor"}));
    render->add_option("--precision", render_args.precision, "Operand precision")
        ->check(CLI::IsMember({"fp32", "fp16"}));
    render->add_option("--group", render_args.group, "Tile-group size per side")
        ->check(CLI::IsMember({1, 2, 4}));
    render->add_option("--workers", render_args.workers, "Worker threads")
        ->check(CLI::PositiveNumber);

    std::string cmp_a, cmp_b;
    auto* compare = app.add_subcommand("compare", "Compare two PPM images");
    compare->add_option("a", cmp_a, "First image")->required();
    compare->add_option("b", cmp_b, "Second image")->required();

    std::string stats_scene, stats_camera;
    std::vector<int> stats_groups{1, 2, 4};
    int stats_workers = 1;
    auto* stats = app.add_subcommand("stats", "Report grouping reuse statistics per group size");
    stats->add_option("--scene", stats_scene)->required();
    stats->add_option("--camera", stats_camera)->required();
    stats->add_option("--groups", stats_groups, "Group sizes to evaluate")
        ->delimiter(',')
        ->check(CLI::IsMember({1, 2, 4}));
    stats->add_option("--workers", stats_workers)->check(CLI::PositiveNumber);

    std::string bench_scene, bench_camera, bench_precision = "fp32";
    int bench_reps = 3, bench_workers = 1;
    auto* bench = app.add_subcommand("bench", "Time both backends across group sizes");
    bench->add_option("--scene", bench_scene)->required();
    bench->add_option("--camera", bench_camera)->required();
    bench->add_option("--reps", bench_reps, "Repetitions per configuration")
        ->check(CLI::PositiveNumber);
    bench->add_option("--precision", bench_precision)->check(CLI::IsMember({"fp32", "fp16"}));
    bench->add_option("--workers", bench_workers)->check(CLI::PositiveNumber);

    std::string gen_out;
    std::uint64_t gen_seed = 1;
    int gen_count = 1000;
    float gen_extent = 1.0f, gen_scale_min = 0.01f, gen_scale_max = 0.05f;
    auto* gen = app.add_subcommand("gen-scene", "Generate a deterministic synthetic scene");
    gen->add_option("--out", gen_out)->required();
    gen->add_option("--seed", gen_seed);
    gen->add_option("--count", gen_count)->check(CLI::NonNegativeNumber);
    gen->add_option("--extent", gen_extent);
    gen->add_option("--scale-min", gen_scale_min);
    gen->add_option("--scale-max", gen_scale_max);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (render->parsed()) return cmd_render(render_args);
        if (compare->parsed()) return cmd_compare(cmp_a, cmp_b);
        if (stats->parsed()) return cmd_stats(stats_scene, stats_camera, stats_groups, stats_workers);
        if (bench->parsed())
            return cmd_bench(bench_scene, bench_camera, bench_precision, bench_reps, bench_workers);
        if (gen->parsed())
            return cmd_gen_scene(gen_out, gen_seed, gen_count, gen_extent, gen_scale_min,
                                 gen_scale_max);
    } catch (const std::exception& e) {
        std::cerr << "gsrender: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
