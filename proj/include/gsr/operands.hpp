#pragma once

#include <Eigen/Core>

#include "gsr/half.hpp"
#include "gsr/projection.hpp"

namespace gsr {

/// Operand precision of the rasterization stage. fp16 quantizes the conic
/// coefficients, 2D mean, opacity, and quadratic basis terms to binary16;
/// accumulation, exp, and blending stay in binary32 in both modes.
enum class PrecisionMode { fp32, fp16 };

/// Continuous coordinate of a pixel's sample point.
inline float pixel_center(int i) { return static_cast<float>(i) + 0.5f; }

/// One splat's rasterization operands at lane precision: the staged conic
/// row [-a/2, -b, -c/2], the 2D mean, and the opacity.
template <class Lane>
struct SplatOperands {
    Lane q1{}, q2{}, q3{};
    Lane mean_x{}, mean_y{};
    Lane opacity{};
};

template <class Lane>
inline SplatOperands<Lane> stage_operands(const ProjectedGaussian& p) {
    SplatOperands<Lane> s;
    s.q1 = lane_quantize<Lane>(-0.5f * p.conic_a);
    s.q2 = lane_quantize<Lane>(-p.conic_b);
    s.q3 = lane_quantize<Lane>(-0.5f * p.conic_c);
    s.mean_x = lane_quantize<Lane>(p.mean2d.x());
    s.mean_y = lane_quantize<Lane>(p.mean2d.y());
    s.opacity = lane_quantize<Lane>(p.opacity);
    return s;
}

/// Quadratic basis [dx*dx, dx*dy, dy*dy] of one (splat, pixel) pair. The
/// offsets are formed from widened lane values in binary32, then the offsets
/// and products are taken back to lane precision, so fp16 lanes hold exactly
/// what a half-precision operand fragment would.
template <class Lane>
struct PixelBasis {
    Lane f1{}, f2{}, f3{};
};

template <class Lane>
inline PixelBasis<Lane> pixel_basis(const SplatOperands<Lane>& s, float px, float py) {
    const Lane dx = lane_quantize<Lane>(px - lane_widen(s.mean_x));
    const Lane dy = lane_quantize<Lane>(py - lane_widen(s.mean_y));
    const float wx = lane_widen(dx), wy = lane_widen(dy);
    PixelBasis<Lane> b;
    b.f1 = lane_quantize<Lane>(wx * wx);
    b.f2 = lane_quantize<Lane>(wx * wy);
    b.f3 = lane_quantize<Lane>(wy * wy);
    return b;
}

/// Canonical power evaluation shared by both backends: binary32 products of
/// widened lanes, accumulated in term order from a zero accumulator, no FMA.
/// This is exactly the value a zero-padded 16-lane fragment reduction yields,
/// bit for bit, so scalar and tensor outputs can be compared for equality
/// instead of tolerance.
template <class Lane>
inline float splat_power(const SplatOperands<Lane>& s, const PixelBasis<Lane>& b) {
    float acc = 0.0f;
    acc += lane_widen(s.q1) * lane_widen(b.f1);
    acc += lane_widen(s.q2) * lane_widen(b.f2);
    acc += lane_widen(s.q3) * lane_widen(b.f3);
    return acc;
}

}  // namespace gsr
