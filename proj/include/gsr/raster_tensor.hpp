#pragma once

#include <span>

#include "gsr/fragment.hpp"
#include "gsr/metrics.hpp"
#include "gsr/raster_scalar.hpp"

namespace gsr {

/// A batch of up to 16 depth-consecutive group-list entries staged at operand
/// precision; one chunk fills one operand fragment's row capacity.
template <class Lane>
struct GaussianChunk {
    int size = 0;
    std::array<SplatOperands<Lane>, kFragmentDim> ops{};
    std::array<Eigen::Vector3f, kFragmentDim> colors{};
    std::array<float, kFragmentDim> depths{};
    std::array<std::uint32_t, kFragmentDim> masks{};
};

template <class Lane>
GaussianChunk<Lane> stage_chunk(std::span<const GroupEntry> entries,
                                const std::vector<ProjectedGaussian>& projected);

/// Mask-selects the chunk entries overlapping one member tile and stacks
/// their padded conic rows into a fragment, preserving chunk (depth) order.
/// row_to_entry maps populated fragment rows back to chunk slots.
template <class Lane>
struct QOperand {
    FragmentA<Lane> fragment{};
    std::array<int, kFragmentDim> row_to_entry{};
    int rows = 0;
};

template <class Lane>
QOperand<Lane> build_q_operand(const GaussianChunk<Lane>& chunk, int tile_bit);

/// Pixel-side operand of one fragment row: the padded quadratic basis columns
/// of a 16-pixel panel (one tile row), relative to that row's splat center.
template <class Lane>
FragmentB<Lane> build_phi_operand(const SplatOperands<Lane>& row, int tile_px0, int tile_py0,
                                  int panel);

struct TensorRasterOptions {
    RasterConstants constants{};
    PrecisionMode mode = PrecisionMode::fp32;
    int chunk_len = kFragmentDim;  // in [1, 16]; rendering is invariant to it
    int workers = 1;
};

/// Rasterizes one tile group: walks the group's depth-sorted list chunk by
/// chunk, shares each staged chunk across all live member tiles via mask
/// filtering, evaluates powers through padded fragment reductions, and blends
/// per pixel in list order. Writes the group's pixels into img.
void rasterize_group(int group_id, const SortedGroupLists& lists,
                     const std::vector<ProjectedGaussian>& projected, const GroupConfig& cfg,
                     const TensorRasterOptions& opt, ImageBuffer& img, OpReport& ops);

/// Grouped rasterization over the whole image; groups are independent work
/// items, so the result is identical for any worker count.
ImageBuffer rasterize_groups_tensor(const SortedGroupLists& lists,
                                    const std::vector<ProjectedGaussian>& projected,
                                    const GroupConfig& cfg, const TensorRasterOptions& opt,
                                    OpReport* ops = nullptr);

}  // namespace gsr
