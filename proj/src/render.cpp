#include "gsr/render.hpp"

#include <bit>

namespace gsr {

RenderResult render(const std::vector<Gaussian3D>& scene, const Camera& cam,
                    const RenderOptions& opt) {
    if (opt.backend == Backend::scalar && opt.group_size != 1)
        throw ValidationError("render: the scalar backend requires group size 1");
    if (opt.workers < 1) throw ValidationError("render: workers must be >= 1");

    const GroupConfig cfg = GroupConfig::square(opt.group_size, cam.width, cam.height);

    RenderResult res;
    const auto projected = project_scene(scene, cam, opt.workers, &res.projection);
    auto entries = build_group_entries(projected, cfg);
    res.entries = entries.size();
    for (const auto& e : entries)
        res.tile_appearances += static_cast<std::uint64_t>(std::popcount(e.entry.mask));
    const auto lists = sort_entries(std::move(entries), cfg);

    if (opt.backend == Backend::scalar) {
        res.image = rasterize_tiles_scalar(lists, projected, cfg, opt.constants, opt.mode,
                                           opt.workers);
    } else {
        TensorRasterOptions topt;
        topt.constants = opt.constants;
        topt.mode = opt.mode;
        topt.chunk_len = opt.chunk_len;
        topt.workers = opt.workers;
        res.image = rasterize_groups_tensor(lists, projected, cfg, topt, &res.ops);
    }
    return res;
}

}  // namespace gsr
