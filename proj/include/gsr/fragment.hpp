#pragma once

#include <array>
#include <cstddef>

#include "gsr/half.hpp"

namespace gsr {

/// Emulation of one m16n16k16 matrix-unit instruction: 16x16 operands over a
/// 16-lane reduction, low-precision inputs, binary32 products and accumulation.
///
/// The numeric contract is fixed so results are reproducible anywhere:
///  - each product widen(a) * widen(b) is a single binary32 multiply (exact
///    for half operands, whose product always fits in binary32),
///  - accumulation runs strictly in ascending k order,
///  - no fused multiply-add.
inline constexpr int kFragmentDim = 16;

/// Gaussian-side operand. Row g holds the padded conic coefficients
/// [-a/2, -b, -c/2, 0, ..., 0]; unused rows stay all-zero.
template <class Lane>
struct FragmentA {
    std::array<std::array<Lane, kFragmentDim>, kFragmentDim> rows{};
};

/// Pixel-side operand, stored column-major: cols[p][k]. Column p holds the
/// padded quadratic basis [dx*dx, dx*dy, dy*dy, 0, ..., 0].
template <class Lane>
struct FragmentB {
    std::array<std::array<Lane, kFragmentDim>, kFragmentDim> cols{};
};

/// Output block of binary32 accumulators, values[g][p].
struct FragmentC {
    std::array<std::array<float, kFragmentDim>, kFragmentDim> values{};
};

/// One inner-product lane walk: acc + sum_k widen(a[k]) * widen(b[k]),
/// in ascending k, one add per lane.
template <class Lane>
inline float fragment_dot(const std::array<Lane, kFragmentDim>& a,
                          const std::array<Lane, kFragmentDim>& b, float acc) {
    for (int k = 0; k < kFragmentDim; ++k) {
        acc += lane_widen(a[k]) * lane_widen(b[k]);
    }
    return acc;
}

/// C' = C + A * B over the full 16x16x16 block.
template <class Lane>
inline FragmentC fragment_mma(const FragmentA<Lane>& a, const FragmentB<Lane>& b,
                              const FragmentC& c) {
    FragmentC out;
    for (int g = 0; g < kFragmentDim; ++g) {
        for (int p = 0; p < kFragmentDim; ++p) {
            out.values[g][p] = fragment_dot(a.rows[g], b.cols[p], c.values[g][p]);
        }
    }
    return out;
}

}  // namespace gsr
