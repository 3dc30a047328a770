#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "gsr/binning.hpp"
#include "gsr/operands.hpp"

namespace gsr {

/// Pruning and termination thresholds of the blend loop, shared verbatim by
/// both backends.
struct RasterConstants {
    float alpha_skip = 1.0f / 255.0f;
    float alpha_clamp = 0.99f;
    float t_terminate = 1e-4f;
};

/// Front-to-back blending state of one pixel.
struct PixelState {
    float transmittance = 1.0f;
    Eigen::Vector3f accum = Eigen::Vector3f::Zero();
    bool done = false;
};

/// Power term of Eq.-style quadratic falloff in the canonical association:
/// zero accumulator, then (-a/2)*dx^2, (-b)*dx*dy, (-c/2)*dy^2 in order.
inline float power_scalar(float a, float b, float c, float dx, float dy) {
    float acc = 0.0f;
    acc += (-0.5f * a) * (dx * dx);
    acc += (-b) * (dx * dy);
    acc += (-0.5f * c) * (dy * dy);
    return acc;
}

/// Opacity contribution, or nullopt when the contribution is negligible.
/// Positive powers (possible after fp16 quantization of the operands) are
/// treated as zero before exponentiation.
inline std::optional<float> alpha_of(float power, float opacity, const RasterConstants& k) {
    if (power > 0.0f) power = 0.0f;
    const float alpha = std::min(k.alpha_clamp, opacity * std::exp(power));
    if (alpha < k.alpha_skip) return std::nullopt;
    return alpha;
}

/// One front-to-back blend step: accum += T * alpha * color, T *= (1 - alpha),
/// done once the remaining transmittance is negligible.
inline void blend(PixelState& state, float alpha, const Eigen::Vector3f& color,
                  const RasterConstants& k) {
    const float w = state.transmittance * alpha;
    state.accum += w * color;
    state.transmittance *= (1.0f - alpha);
    if (state.transmittance < k.t_terminate) state.done = true;
}

/// Baseline tile rasterizer. Requires per-tile lists (1x1 groups); every
/// pixel walks its tile's depth-sorted list until done or list end.
ImageBuffer rasterize_tiles_scalar(const SortedGroupLists& lists,
                                   const std::vector<ProjectedGaussian>& projected,
                                   const GroupConfig& cfg, const RasterConstants& k,
                                   PrecisionMode mode = PrecisionMode::fp32, int workers = 1);

}  // namespace gsr
