#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "gsr/projection.hpp"

namespace gsr {

inline constexpr int kTileSize = 16;

/// Tile-group layout over an image. Groups are group_h x group_w blocks of
/// neighboring 16x16 tiles; a 1x1 group reduces to plain per-tile binning.
struct GroupConfig {
    int group_h = 2;
    int group_w = 2;
    int image_width = 0;
    int image_height = 0;

    static GroupConfig square(int g, int image_width, int image_height);

    int tiles_x() const { return (image_width + kTileSize - 1) / kTileSize; }
    int tiles_y() const { return (image_height + kTileSize - 1) / kTileSize; }
    int groups_x() const { return (tiles_x() + group_w - 1) / group_w; }
    int groups_y() const { return (tiles_y() + group_h - 1) / group_h; }
    int group_count() const { return groups_x() * groups_y(); }
    int tiles_per_group() const { return group_h * group_w; }

    void validate() const;
};

/// Inclusive tile-coordinate rectangle; empty() when no tiles are covered.
struct TileRect {
    int min_x = 0, min_y = 0, max_x = -1, max_y = -1;
    bool empty() const { return max_x < min_x || max_y < min_y; }
};

/// One Gaussian's appearance in one tile group. The mask has bit
/// (local_row * group_w + local_col) set per overlapped member tile.
struct GroupEntry {
    std::uint32_t gaussian_index = 0;
    float depth = 0.0f;
    std::uint32_t mask = 0;
};

struct KeyedEntry {
    std::uint32_t group_id = 0;
    GroupEntry entry;
};

/// Flat (group ID, depth)-sorted entry array with per-group ranges.
struct SortedGroupLists {
    std::vector<GroupEntry> entries;
    std::vector<std::uint32_t> offsets;  // group_count + 1 prefix offsets

    std::uint32_t group_begin(int group) const { return offsets[group]; }
    std::uint32_t group_end(int group) const { return offsets[group + 1]; }
};

/// Tiles intersecting the splat's AABB [mean - radius, mean + radius],
/// clipped to the image's tile grid.
TileRect tiles_overlapped(const ProjectedGaussian& p, const GroupConfig& cfg);

/// Emits one entry per (Gaussian, overlapped group), merging the Gaussian's
/// member-tile appearances into the entry's bit mask. Output order is by
/// Gaussian index, then group id.
std::vector<KeyedEntry> build_group_entries(const std::vector<ProjectedGaussian>& projected,
                                            const GroupConfig& cfg);

/// Stable sort under the key (group_id << 32) | f32_bits(depth); equal keys
/// keep ascending gaussian_index. Depths must be positive and finite.
SortedGroupLists sort_entries(std::vector<KeyedEntry> entries, const GroupConfig& cfg);

/// Serialized entry record for the stats/overhead tooling: mean2d as 2 x f16,
/// (conic a, b, c, opacity) as 4 x f16, gaussian id u32 -- 16 payload bytes --
/// plus the mask as one u8.
inline constexpr std::size_t kEntryPayloadBytes = 16;
inline constexpr std::size_t kEntryMaskBytes = 1;
std::array<std::uint8_t, kEntryPayloadBytes + kEntryMaskBytes> serialize_group_entry(
    const GroupEntry& entry, const ProjectedGaussian& p);

}  // namespace gsr
