#include "gsr/raster_tensor.hpp"

#include <bit>

#include "gsr/parallel.hpp"

namespace gsr {

template <class Lane>
GaussianChunk<Lane> stage_chunk(std::span<const GroupEntry> entries,
                                const std::vector<ProjectedGaussian>& projected) {
    GaussianChunk<Lane> chunk;
    chunk.size = static_cast<int>(entries.size());
    for (int i = 0; i < chunk.size; ++i) {
        const ProjectedGaussian& p = projected[entries[i].gaussian_index];
        chunk.ops[i] = stage_operands<Lane>(p);
        chunk.colors[i] = p.color;
        chunk.depths[i] = entries[i].depth;
        chunk.masks[i] = entries[i].mask;
    }
    return chunk;
}

template <class Lane>
QOperand<Lane> build_q_operand(const GaussianChunk<Lane>& chunk, int tile_bit) {
    QOperand<Lane> q;
    const std::uint32_t bit = 1u << tile_bit;
    for (int i = 0; i < chunk.size; ++i) {
        if (!(chunk.masks[i] & bit)) continue;
        auto& row = q.fragment.rows[q.rows];
        row[0] = chunk.ops[i].q1;
        row[1] = chunk.ops[i].q2;
        row[2] = chunk.ops[i].q3;
        q.row_to_entry[q.rows] = i;
        ++q.rows;
    }
    return q;
}

template <class Lane>
FragmentB<Lane> build_phi_operand(const SplatOperands<Lane>& row, int tile_px0, int tile_py0,
                                  int panel) {
    FragmentB<Lane> b;
    const float py = pixel_center(tile_py0 + panel);
    for (int p = 0; p < kFragmentDim; ++p) {
        const PixelBasis<Lane> basis = pixel_basis(row, pixel_center(tile_px0 + p), py);
        b.cols[p][0] = basis.f1;
        b.cols[p][1] = basis.f2;
        b.cols[p][2] = basis.f3;
    }
    return b;
}

namespace {

struct TileContext {
    int px0 = 0, py0 = 0;      // pixel origin
    int width = 0, height = 0; // in-image extent, <= 16 each
    int live_pixels = 0;       // not-yet-done in-image pixels
    bool in_grid = false;
    std::array<PixelState, kTileSize * kTileSize> pixels{};
};

template <class Lane>
void rasterize_group_impl(int group_id, const SortedGroupLists& lists,
                          const std::vector<ProjectedGaussian>& projected, const GroupConfig& cfg,
                          const TensorRasterOptions& opt, ImageBuffer& img, OpReport& ops) {
    const RasterConstants& k = opt.constants;
    const int gx = group_id % cfg.groups_x();
    const int gy = group_id / cfg.groups_x();
    const int n_tiles = cfg.tiles_per_group();

    std::vector<TileContext> tiles(static_cast<std::size_t>(n_tiles));
    for (int r = 0; r < cfg.group_h; ++r) {
        for (int c = 0; c < cfg.group_w; ++c) {
            TileContext& t = tiles[static_cast<std::size_t>(r) * cfg.group_w + c];
            const int tx = gx * cfg.group_w + c, ty = gy * cfg.group_h + r;
            t.in_grid = tx < cfg.tiles_x() && ty < cfg.tiles_y();
            if (!t.in_grid) continue;
            t.px0 = tx * kTileSize;
            t.py0 = ty * kTileSize;
            t.width = std::min(kTileSize, cfg.image_width - t.px0);
            t.height = std::min(kTileSize, cfg.image_height - t.py0);
            t.live_pixels = t.width * t.height;
        }
    }

    const std::uint32_t begin = lists.group_begin(group_id);
    const std::uint32_t end = lists.group_end(group_id);
    const int chunk_len = std::clamp(opt.chunk_len, 1, kFragmentDim);

    for (std::uint32_t at = begin; at < end;) {
        int live_tiles = 0;
        for (const TileContext& t : tiles)
            if (t.in_grid && t.live_pixels > 0) ++live_tiles;
        if (live_tiles == 0) break;

        const int len = std::min<std::uint32_t>(chunk_len, end - at);
        const auto chunk = stage_chunk<Lane>(
            std::span<const GroupEntry>(&lists.entries[at], static_cast<std::size_t>(len)),
            projected);
        at += static_cast<std::uint32_t>(len);
        ++ops.chunk_loads;

        for (int local = 0; local < n_tiles; ++local) {
            TileContext& tile = tiles[static_cast<std::size_t>(local)];
            if (!tile.in_grid || tile.live_pixels == 0) continue;

            const QOperand<Lane> q = build_q_operand(chunk, local);
            ops.skipped_pairs += static_cast<std::uint64_t>(chunk.size - q.rows);
            if (q.rows == 0) continue;

            for (int panel = 0; panel < kFragmentDim; ++panel) {
                if (panel >= tile.height) break;
                // One emulated m16n16k16 issue: selected rows of Q against this
                // panel's basis columns; padded rows/lanes contribute exact zeros.
                FragmentC block{};
                for (int g = 0; g < q.rows; ++g) {
                    const FragmentB<Lane> phi = build_phi_operand(
                        chunk.ops[q.row_to_entry[g]], tile.px0, tile.py0, panel);
                    for (int p = 0; p < kFragmentDim; ++p)
                        block.values[g][p] =
                            fragment_dot(q.fragment.rows[g], phi.cols[p], block.values[g][p]);
                }
                ++ops.fragment_ops;
                ops.used_lanes += static_cast<std::uint64_t>(q.rows) * kFragmentDim * 3;
                ops.total_lanes +=
                    static_cast<std::uint64_t>(kFragmentDim) * kFragmentDim * kFragmentDim;

                for (int p = 0; p < tile.width; ++p) {
                    PixelState& st = tile.pixels[static_cast<std::size_t>(panel) * kTileSize + p];
                    if (st.done) continue;
                    for (int g = 0; g < q.rows; ++g) {
                        const int slot = q.row_to_entry[g];
                        if (const auto alpha = alpha_of(block.values[g][p],
                                                        lane_widen(chunk.ops[slot].opacity), k))
                            blend(st, *alpha, chunk.colors[slot], k);
                        if (st.done) {
                            --tile.live_pixels;
                            break;
                        }
                    }
                }
            }
        }
    }

    for (const TileContext& t : tiles) {
        if (!t.in_grid) continue;
        for (int y = 0; y < t.height; ++y) {
            for (int x = 0; x < t.width; ++x) {
                const PixelState& st = t.pixels[static_cast<std::size_t>(y) * kTileSize + x];
                float* out = img.pixel(t.px0 + x, t.py0 + y);
                out[0] = st.accum[0];
                out[1] = st.accum[1];
                out[2] = st.accum[2];
            }
        }
    }
}

}  // namespace

void rasterize_group(int group_id, const SortedGroupLists& lists,
                     const std::vector<ProjectedGaussian>& projected, const GroupConfig& cfg,
                     const TensorRasterOptions& opt, ImageBuffer& img, OpReport& ops) {
    if (opt.mode == PrecisionMode::fp32)
        rasterize_group_impl<float>(group_id, lists, projected, cfg, opt, img, ops);
    else
        rasterize_group_impl<Half>(group_id, lists, projected, cfg, opt, img, ops);
}

ImageBuffer rasterize_groups_tensor(const SortedGroupLists& lists,
                                    const std::vector<ProjectedGaussian>& projected,
                                    const GroupConfig& cfg, const TensorRasterOptions& opt,
                                    OpReport* ops) {
    cfg.validate();
    ImageBuffer img(cfg.image_width, cfg.image_height);
    const std::size_t n_groups = static_cast<std::size_t>(cfg.group_count());
    std::vector<OpReport> group_ops(n_groups);
    parallel_for(n_groups, opt.workers, [&](std::size_t g) {
        rasterize_group(static_cast<int>(g), lists, projected, cfg, opt, img, group_ops[g]);
    });
    if (ops) {
        OpReport total;
        for (const OpReport& o : group_ops) total += o;
        *ops = total;
    }
    img.finalize();
    return img;
}

// The chunk-staging and operand builders are part of the public surface for
// tests and tooling; instantiate both lane types.
template GaussianChunk<float> stage_chunk<float>(std::span<const GroupEntry>,
                                                 const std::vector<ProjectedGaussian>&);
template GaussianChunk<Half> stage_chunk<Half>(std::span<const GroupEntry>,
                                               const std::vector<ProjectedGaussian>&);
template QOperand<float> build_q_operand<float>(const GaussianChunk<float>&, int);
template QOperand<Half> build_q_operand<Half>(const GaussianChunk<Half>&, int);
template FragmentB<float> build_phi_operand<float>(const SplatOperands<float>&, int, int, int);
template FragmentB<Half> build_phi_operand<Half>(const SplatOperands<Half>&, int, int, int);

}  // namespace gsr
