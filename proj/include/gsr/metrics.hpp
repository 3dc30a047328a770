#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "gsr/binning.hpp"
#include "gsr/types.hpp"

namespace gsr {

/// Identical images report this instead of an infinite PSNR.
inline constexpr double kPsnrCap = 99.0;

/// 10*log10(1 / MSE) over [0,1]-valued images (peak 1.0).
double psnr(const ImageBuffer& a, const ImageBuffer& b);

struct MaxDiff {
    float value = 0.0f;
    int x = 0;
    int y = 0;
    int channel = 0;
};

/// Largest per-channel absolute difference and its first row-major location.
MaxDiff max_abs_diff(const ImageBuffer& a, const ImageBuffer& b);

/// Gaussian-loading reuse achieved by group-level entry merging.
struct ReuseReport {
    std::uint64_t n_total = 0;  // tile-level appearances (sum of mask popcounts)
    std::uint64_t n_group = 0;  // group-level entries
    double load_reduction = 0.0;  // 1 - n_group / n_total
    std::array<std::uint64_t, 17> mask_popcount_hist{};  // index = popcount, 1..16
};

/// LoadReduction = 1 - n_group / n_total over a group-entry list.
ReuseReport load_reduction(const std::vector<KeyedEntry>& entries);

/// Serialized entry economics: (payload bytes, mask bytes, overhead fraction).
struct EntryOverhead {
    std::size_t payload_bytes = 0;
    std::size_t mask_bytes = 0;
    double overhead = 0.0;
};
EntryOverhead entry_overhead(const GroupConfig& cfg);

/// Operation counters emitted per render; hardware-independent proxies for
/// the rasterizer's work.
struct OpReport {
    std::uint64_t fragment_ops = 0;      // emulated m16n16k16 block issues
    std::uint64_t chunk_loads = 0;       // staged Gaussian chunks
    std::uint64_t skipped_pairs = 0;     // mask-filtered (Gaussian, tile) pairs
    std::uint64_t used_lanes = 0;        // productive multiply lanes
    std::uint64_t total_lanes = 0;       // issued multiply lanes (16x16x16 per op)

    double padding_waste() const {
        return total_lanes ? 1.0 - static_cast<double>(used_lanes) / static_cast<double>(total_lanes)
                           : 0.0;
    }

    OpReport& operator+=(const OpReport& o) {
        fragment_ops += o.fragment_ops;
        chunk_loads += o.chunk_loads;
        skipped_pairs += o.skipped_pairs;
        used_lanes += o.used_lanes;
        total_lanes += o.total_lanes;
        return *this;
    }
};

}  // namespace gsr
