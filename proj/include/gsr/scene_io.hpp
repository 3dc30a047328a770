#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gsr/types.hpp"

namespace gsr {

/// splitmix64 stream; the fixed generator behind all synthetic scenes so the
/// same (seed, count, extent, scale_range) reproduces bit-identical Gaussians
/// on any platform.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 24 explicit mantissa bits.
    float uniform() { return static_cast<float>(next() >> 40) * 0x1.0p-24f; }

    /// Uniform in [lo, hi).
    float uniform(float lo, float hi) { return lo + (hi - lo) * uniform(); }
};

struct ScaleRange {
    float min = 0.01f;
    float max = 0.05f;
};

/// Binary `.gsb` scene container, little-endian:
/// 16-byte header (magic "GSB1", u32 count, u32 sh_degree, u32 reserved),
/// then per record: mean f32x3, scale f32x3, quat f32x4 (w,x,y,z),
/// opacity f32, sh_dc f32x3, and sh_rest f32x45 iff sh_degree == 3.
std::vector<Gaussian3D> load_scene(const std::string& path);
void save_scene(const std::vector<Gaussian3D>& gaussians, const std::string& path);

/// Flat key=value camera config: view_row0..view_row3 (4 floats each),
/// focal_x, focal_y, width, height, near, far.
Camera load_camera(const std::string& path);
Camera parse_camera(const std::string& text);

/// Deterministic synthetic scene: means uniform in [-extent, extent]^3 pushed
/// in front of the canonical camera (identity view looking down +z), uniform
/// rotations, opacities in [0.2, 0.95], DC colors uniform in [0, 1].
std::vector<Gaussian3D> gen_synthetic_scene(std::uint64_t seed, int count, float extent,
                                            ScaleRange scale_range);

/// Binary PPM (P6, maxval 255); channel byte = nearest-even round of
/// clamp(v, 0, 1) * 255.
std::vector<std::uint8_t> encode_ppm(const ImageBuffer& img);
void write_image(const ImageBuffer& img, const std::string& path);
ImageBuffer read_ppm(const std::string& path);

}  // namespace gsr
