#pragma once

#include "gsr/raster_tensor.hpp"
#include "gsr/scene_io.hpp"

namespace gsr {

enum class Backend { scalar, tensor };

struct RenderOptions {
    Backend backend = Backend::tensor;
    PrecisionMode mode = PrecisionMode::fp32;
    int group_size = 2;  // tiles per group side; scalar requires 1
    int workers = 1;
    int chunk_len = kFragmentDim;
    RasterConstants constants{};
};

struct RenderResult {
    ImageBuffer image;
    ProjectionStats projection;
    OpReport ops;
    std::uint64_t entries = 0;            // group-level entries (N_group)
    std::uint64_t tile_appearances = 0;   // tile-level appearances (N_total)
};

/// Full pipeline: frustum culling and projection, group-entry construction,
/// (group ID, depth) sorting, then the chosen rasterizer. Deterministic for
/// fixed inputs regardless of worker count.
RenderResult render(const std::vector<Gaussian3D>& scene, const Camera& cam,
                    const RenderOptions& opt);

}  // namespace gsr
