#include "gsr/metrics.hpp"

#include <bit>
#include <cmath>

namespace gsr {

namespace {

void require_same_shape(const ImageBuffer& a, const ImageBuffer& b, const char* who) {
    if (a.width != b.width || a.height != b.height)
        throw ValidationError(std::string(who) + ": image dimensions differ");
}

}  // namespace

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
    require_same_shape(a, b, "psnr");
    double se = 0.0;
    for (std::size_t i = 0; i < a.rgb.size(); ++i) {
        const double d = static_cast<double>(a.rgb[i]) - static_cast<double>(b.rgb[i]);
        se += d * d;
    }
    if (se == 0.0) return kPsnrCap;
    const double mse = se / static_cast<double>(a.rgb.size());
    return 10.0 * std::log10(1.0 / mse);
}

MaxDiff max_abs_diff(const ImageBuffer& a, const ImageBuffer& b) {
    require_same_shape(a, b, "max_abs_diff");
    MaxDiff best;
    for (std::size_t i = 0; i < a.rgb.size(); ++i) {
        const float d = std::fabs(a.rgb[i] - b.rgb[i]);
        if (d > best.value) {
            best.value = d;
            const std::size_t px = i / 3;
            best.x = static_cast<int>(px % a.width);
            best.y = static_cast<int>(px / a.width);
            best.channel = static_cast<int>(i % 3);
        }
    }
    return best;
}

ReuseReport load_reduction(const std::vector<KeyedEntry>& entries) {
    if (entries.empty())
        throw ValidationError("load_reduction: empty entry list has an undefined ratio");
    ReuseReport r;
    r.n_group = entries.size();
    for (const auto& e : entries) {
        const int pc = std::popcount(e.entry.mask);
        r.n_total += static_cast<std::uint64_t>(pc);
        if (pc >= 1 && pc <= 16) ++r.mask_popcount_hist[pc];
    }
    r.load_reduction = 1.0 - static_cast<double>(r.n_group) / static_cast<double>(r.n_total);
    return r;
}

EntryOverhead entry_overhead(const GroupConfig& cfg) {
    cfg.validate();
    if (cfg.group_h * cfg.group_w > 8)
        throw ValidationError("entry_overhead: mask needs " +
                              std::to_string(cfg.group_h * cfg.group_w) +
                              " bits, wider than the one-byte mask field");
    EntryOverhead e;
    e.payload_bytes = kEntryPayloadBytes;
    e.mask_bytes = kEntryMaskBytes;
    e.overhead = static_cast<double>(e.mask_bytes) / static_cast<double>(e.payload_bytes);
    return e;
}

}  // namespace gsr
