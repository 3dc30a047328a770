#pragma once

#include <bit>
#include <cstdint>

namespace gsr {

/// IEEE 754 binary16 value held as its raw bit pattern.
///
/// All arithmetic on halves happens after widening to binary32; the type
/// exists so half-typed storage can never be mixed up with float storage.
struct Half {
    std::uint16_t bits = 0;

    friend constexpr bool operator==(Half a, Half b) { return a.bits == b.bits; }

    static constexpr Half from_bits(std::uint16_t b) { return Half{b}; }

    constexpr bool is_nan() const { return (bits & 0x7FFFu) > 0x7C00u; }
    constexpr bool is_inf() const { return (bits & 0x7FFFu) == 0x7C00u; }
    constexpr bool is_finite() const { return (bits & 0x7C00u) != 0x7C00u; }
};

namespace detail {
// Quiet-NaN pattern all NaN inputs collapse to; keeps golden outputs stable.
inline constexpr std::uint16_t kCanonicalNanBits = 0x7E00u;
// Smallest binary32 magnitude that rounds to a nonzero half (2^-25 ties even to 0).
inline constexpr std::uint32_t kHalfMinRoundBits = 0x33000000u;
// Smallest binary32 magnitude that rounds past 65504 to infinity (65520).
inline constexpr std::uint32_t kHalfInfRoundBits = 0x477FF000u;
// Smallest binary32 magnitude whose half is normal (2^-14).
inline constexpr std::uint32_t kHalfNormBits = 0x38800000u;
}  // namespace detail

/// Nearest binary16 under round-to-nearest-even. Subnormals are exact,
/// overflow goes to signed infinity, every NaN maps to one quiet pattern.
inline Half f32_to_f16(float x) {
    const std::uint32_t u = std::bit_cast<std::uint32_t>(x);
    const std::uint32_t sign = (u >> 16) & 0x8000u;
    const std::uint32_t mag = u & 0x7FFFFFFFu;

    if (mag > 0x7F800000u) return Half::from_bits(detail::kCanonicalNanBits);
    if (mag >= detail::kHalfInfRoundBits)
        return Half::from_bits(static_cast<std::uint16_t>(sign | 0x7C00u));

    if (mag >= detail::kHalfNormBits) {
        // Normal half: rebias exponent, round the low 13 mantissa bits.
        // A mantissa carry ripples into the exponent field by construction.
        std::uint32_t half = sign | (((mag >> 23) - 112u) << 10) | ((mag & 0x7FFFFFu) >> 13);
        const std::uint32_t rem = mag & 0x1FFFu;
        if (rem > 0x1000u || (rem == 0x1000u && (half & 1u))) ++half;
        return Half::from_bits(static_cast<std::uint16_t>(half));
    }

    if (mag < detail::kHalfMinRoundBits) return Half::from_bits(static_cast<std::uint16_t>(sign));

    // Subnormal half: the result is an integer count of 2^-24 units.
    // mag >= 2^-25 guarantees the input is a normal binary32 here.
    const std::uint32_t mant = (mag & 0x7FFFFFu) | 0x800000u;
    const int shift = 126 - static_cast<int>(mag >> 23);  // in [14, 24]
    std::uint32_t q = mant >> shift;
    const std::uint32_t rem = mant & ((1u << shift) - 1u);
    const std::uint32_t halfway = 1u << (shift - 1);
    if (rem > halfway || (rem == halfway && (q & 1u))) ++q;
    return Half::from_bits(static_cast<std::uint16_t>(sign | q));
}

/// Exact widening: binary16 is a subset of binary32, so this is lossless.
inline float f16_to_f32(Half h) {
    const std::uint32_t sign = static_cast<std::uint32_t>(h.bits & 0x8000u) << 16;
    const std::uint32_t exp5 = (h.bits >> 10) & 0x1Fu;
    const std::uint32_t man = h.bits & 0x3FFu;

    if (exp5 == 0u) {
        if (man == 0u) return std::bit_cast<float>(sign);
        // Subnormal: value = man * 2^-24; renormalize for the binary32 encoding.
        const int top = 31 - std::countl_zero(man);  // in [0, 9]
        const std::uint32_t exp32 = static_cast<std::uint32_t>(103 + top);
        const std::uint32_t man32 = (man << (23 - top)) & 0x7FFFFFu;
        return std::bit_cast<float>(sign | (exp32 << 23) | man32);
    }
    if (exp5 == 31u) return std::bit_cast<float>(sign | 0x7F800000u | (man << 13));
    return std::bit_cast<float>(sign | ((exp5 + 112u) << 23) | (man << 13));
}

/// Lane protocol shared by the fp32 and fp16 rasterization paths: a lane is
/// either a raw float (fp32 mode) or a Half (fp16 mode).
inline float lane_widen(float x) { return x; }
inline float lane_widen(Half h) { return f16_to_f32(h); }

template <class Lane>
inline Lane lane_quantize(float x);
template <>
inline float lane_quantize<float>(float x) { return x; }
template <>
inline Half lane_quantize<Half>(float x) { return f32_to_f16(x); }

}  // namespace gsr
