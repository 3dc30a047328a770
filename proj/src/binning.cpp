#include "gsr/binning.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "gsr/half.hpp"

namespace gsr {

GroupConfig GroupConfig::square(int g, int image_width, int image_height) {
    GroupConfig cfg;
    cfg.group_h = g;
    cfg.group_w = g;
    cfg.image_width = image_width;
    cfg.image_height = image_height;
    cfg.validate();
    return cfg;
}

void GroupConfig::validate() const {
    if (image_width <= 0 || image_height <= 0)
        throw ValidationError("GroupConfig: image dimensions must be positive");
    const bool square_ok = group_h == group_w && (group_h == 1 || group_h == 2 || group_h == 4);
    if (!square_ok)
        throw ValidationError("GroupConfig: supported group sizes are 1x1, 2x2, 4x4");
    if (group_h * group_w > 32)
        throw ValidationError("GroupConfig: mask must fit one 32-bit word");
}

TileRect tiles_overlapped(const ProjectedGaussian& p, const GroupConfig& cfg) {
    const float r = static_cast<float>(p.radius);
    TileRect rect;
    rect.min_x = static_cast<int>(std::floor((p.mean2d.x() - r) / kTileSize));
    rect.max_x = static_cast<int>(std::floor((p.mean2d.x() + r) / kTileSize));
    rect.min_y = static_cast<int>(std::floor((p.mean2d.y() - r) / kTileSize));
    rect.max_y = static_cast<int>(std::floor((p.mean2d.y() + r) / kTileSize));
    rect.min_x = std::max(rect.min_x, 0);
    rect.min_y = std::max(rect.min_y, 0);
    rect.max_x = std::min(rect.max_x, cfg.tiles_x() - 1);
    rect.max_y = std::min(rect.max_y, cfg.tiles_y() - 1);
    return rect;
}

std::vector<KeyedEntry> build_group_entries(const std::vector<ProjectedGaussian>& projected,
                                            const GroupConfig& cfg) {
    cfg.validate();
    std::vector<KeyedEntry> out;
    for (std::uint32_t i = 0; i < projected.size(); ++i) {
        const TileRect rect = tiles_overlapped(projected[i], cfg);
        if (rect.empty()) continue;
        const int g_min_x = rect.min_x / cfg.group_w, g_max_x = rect.max_x / cfg.group_w;
        const int g_min_y = rect.min_y / cfg.group_h, g_max_y = rect.max_y / cfg.group_h;
        for (int gy = g_min_y; gy <= g_max_y; ++gy) {
            for (int gx = g_min_x; gx <= g_max_x; ++gx) {
                std::uint32_t mask = 0;
                const int ty0 = std::max(rect.min_y, gy * cfg.group_h);
                const int ty1 = std::min(rect.max_y, gy * cfg.group_h + cfg.group_h - 1);
                const int tx0 = std::max(rect.min_x, gx * cfg.group_w);
                const int tx1 = std::min(rect.max_x, gx * cfg.group_w + cfg.group_w - 1);
                for (int ty = ty0; ty <= ty1; ++ty)
                    for (int tx = tx0; tx <= tx1; ++tx)
                        mask |= 1u << ((ty - gy * cfg.group_h) * cfg.group_w +
                                       (tx - gx * cfg.group_w));
                KeyedEntry e;
                e.group_id = static_cast<std::uint32_t>(gy * cfg.groups_x() + gx);
                e.entry = {i, projected[i].depth, mask};
                out.push_back(e);
            }
        }
    }
    return out;
}

SortedGroupLists sort_entries(std::vector<KeyedEntry> entries, const GroupConfig& cfg) {
    cfg.validate();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const float d = entries[i].entry.depth;
        if (!std::isfinite(d) || d < 0.0f)
            throw ValidationError("sort_entries: entry " + std::to_string(i) +
                                  " has non-finite or negative depth");
    }
    // Positive-float bit patterns sort like the values, so one 64-bit
    // integer key realizes (group ID, depth) order.
    auto key = [](const KeyedEntry& e) {
        return (static_cast<std::uint64_t>(e.group_id) << 32) |
               std::bit_cast<std::uint32_t>(e.entry.depth);
    };
    std::stable_sort(entries.begin(), entries.end(),
                     [&key](const KeyedEntry& a, const KeyedEntry& b) { return key(a) < key(b); });

    SortedGroupLists lists;
    lists.entries.reserve(entries.size());
    lists.offsets.assign(static_cast<std::size_t>(cfg.group_count()) + 1, 0);
    for (const auto& e : entries) ++lists.offsets[e.group_id + 1];
    for (std::size_t g = 1; g < lists.offsets.size(); ++g) lists.offsets[g] += lists.offsets[g - 1];
    for (const auto& e : entries) lists.entries.push_back(e.entry);
    return lists;
}

std::array<std::uint8_t, kEntryPayloadBytes + kEntryMaskBytes> serialize_group_entry(
    const GroupEntry& entry, const ProjectedGaussian& p) {
    if (entry.mask > 0xFFu)
        throw ValidationError("serialize_group_entry: mask wider than the one-byte mask field");
    std::array<std::uint8_t, kEntryPayloadBytes + kEntryMaskBytes> out{};
    auto put16 = [&out](std::size_t at, std::uint16_t v) {
        out[at] = static_cast<std::uint8_t>(v);
        out[at + 1] = static_cast<std::uint8_t>(v >> 8);
    };
    put16(0, f32_to_f16(p.mean2d.x()).bits);
    put16(2, f32_to_f16(p.mean2d.y()).bits);
    put16(4, f32_to_f16(p.conic_a).bits);
    put16(6, f32_to_f16(p.conic_b).bits);
    put16(8, f32_to_f16(p.conic_c).bits);
    put16(10, f32_to_f16(p.opacity).bits);
    const std::uint32_t id = entry.gaussian_index;
    out[12] = static_cast<std::uint8_t>(id);
    out[13] = static_cast<std::uint8_t>(id >> 8);
    out[14] = static_cast<std::uint8_t>(id >> 16);
    out[15] = static_cast<std::uint8_t>(id >> 24);
    out[16] = static_cast<std::uint8_t>(entry.mask);  // mask field is one byte wide
    return out;
}

}  // namespace gsr
