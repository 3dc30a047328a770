#include "gsr/raster_scalar.hpp"

#include "gsr/parallel.hpp"

namespace gsr {

namespace {

template <class Lane>
void rasterize_tile(int tile_x, int tile_y, const SortedGroupLists& lists,
                    const std::vector<ProjectedGaussian>& projected, const GroupConfig& cfg,
                    const RasterConstants& k, ImageBuffer& img) {
    const int tile_id = tile_y * cfg.tiles_x() + tile_x;
    const std::uint32_t begin = lists.group_begin(tile_id);
    const std::uint32_t end = lists.group_end(tile_id);
    if (begin == end) return;

    struct Staged {
        SplatOperands<Lane> ops;
        Eigen::Vector3f color;
    };
    std::vector<Staged> staged;
    staged.reserve(end - begin);
    for (std::uint32_t e = begin; e < end; ++e) {
        const ProjectedGaussian& p = projected[lists.entries[e].gaussian_index];
        staged.push_back({stage_operands<Lane>(p), p.color});
    }

    const int x0 = tile_x * kTileSize, y0 = tile_y * kTileSize;
    const int x1 = std::min(x0 + kTileSize, cfg.image_width);
    const int y1 = std::min(y0 + kTileSize, cfg.image_height);
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            const float px = pixel_center(x), py = pixel_center(y);
            PixelState st;
            for (const Staged& s : staged) {
                const float power = splat_power(s.ops, pixel_basis(s.ops, px, py));
                if (const auto alpha = alpha_of(power, lane_widen(s.ops.opacity), k))
                    blend(st, *alpha, s.color, k);
                if (st.done) break;
            }
            float* out = img.pixel(x, y);
            out[0] = st.accum[0];
            out[1] = st.accum[1];
            out[2] = st.accum[2];
        }
    }
}

}  // namespace

ImageBuffer rasterize_tiles_scalar(const SortedGroupLists& lists,
                                   const std::vector<ProjectedGaussian>& projected,
                                   const GroupConfig& cfg, const RasterConstants& k,
                                   PrecisionMode mode, int workers) {
    if (cfg.group_h != 1 || cfg.group_w != 1)
        throw ValidationError("rasterize_tiles_scalar: requires 1x1 groups (per-tile lists)");

    ImageBuffer img(cfg.image_width, cfg.image_height);
    const std::size_t n_tiles = static_cast<std::size_t>(cfg.tiles_x()) * cfg.tiles_y();
    parallel_for(n_tiles, workers, [&](std::size_t t) {
        const int tx = static_cast<int>(t) % cfg.tiles_x();
        const int ty = static_cast<int>(t) / cfg.tiles_x();
        if (mode == PrecisionMode::fp32)
            rasterize_tile<float>(tx, ty, lists, projected, cfg, k, img);
        else
            rasterize_tile<Half>(tx, ty, lists, projected, cfg, k, img);
    });
    img.finalize();
    return img;
}

}  // namespace gsr
