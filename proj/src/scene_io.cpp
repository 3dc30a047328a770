#include "gsr/scene_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace gsr {

namespace {

constexpr char kMagic[4] = {'G', 'S', 'B', '1'};
constexpr size_t kHeaderBytes = 16;
constexpr size_t kBaseRecordFloats = 14;  // mean 3 + scale 3 + quat 4 + opacity 1 + dc 3

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}

void put_f32(std::vector<std::uint8_t>& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

std::uint32_t get_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float get_f32(const std::uint8_t* p) { return std::bit_cast<float>(get_u32(p)); }

/// Renormalizes only when the norm has drifted; keeps already-unit quaternions
/// bit-stable so save/load round-trips are exact.
void renormalize_quat(Eigen::Quaternionf& q, size_t record) {
    const float n = q.norm();
    if (!(n > 0.0f) || !std::isfinite(n))
        throw ValidationError("scene record " + std::to_string(record) +
                              ": quaternion has non-finite or zero norm");
    if (std::fabs(n - 1.0f) > 1e-6f) q.coeffs() /= n;
}

}  // namespace

std::vector<Gaussian3D> load_scene(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open scene file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());

    if (bytes.size() < kHeaderBytes)
        throw FormatError(path + ": truncated header at byte offset " +
                          std::to_string(bytes.size()) + " (need 16)");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw FormatError(path + ": bad magic at byte offset 0");

    const std::uint32_t count = get_u32(&bytes[4]);
    const std::uint32_t degree = get_u32(&bytes[8]);
    if (degree != 0 && degree != 3)
        throw FormatError(path + ": unsupported sh_degree at byte offset 8");

    const size_t record_floats = kBaseRecordFloats + (degree == 3 ? kShRestCoeffs : 0);
    const size_t record_bytes = record_floats * 4;
    const size_t need = kHeaderBytes + static_cast<size_t>(count) * record_bytes;
    if (bytes.size() < need)
        throw FormatError(path + ": truncated payload at byte offset " +
                          std::to_string(bytes.size()) + " (need " + std::to_string(need) + ")");

    std::vector<Gaussian3D> out;
    out.reserve(count);
    const std::uint8_t* p = bytes.data() + kHeaderBytes;
    for (std::uint32_t i = 0; i < count; ++i, p += record_bytes) {
        Gaussian3D g;
        g.mean = {get_f32(p), get_f32(p + 4), get_f32(p + 8)};
        g.scale = {get_f32(p + 12), get_f32(p + 16), get_f32(p + 20)};
        const float qw = get_f32(p + 24), qx = get_f32(p + 28), qy = get_f32(p + 32),
                    qz = get_f32(p + 36);
        g.rotation = Eigen::Quaternionf(qw, qx, qy, qz);
        g.opacity = get_f32(p + 40);
        g.sh_dc = {get_f32(p + 44), get_f32(p + 48), get_f32(p + 52)};
        if (degree == 3) {
            std::array<float, kShRestCoeffs> rest;
            for (int k = 0; k < kShRestCoeffs; ++k) rest[k] = get_f32(p + 56 + 4 * k);
            g.sh_rest = rest;
        }

        if (!(g.opacity >= 0.0f && g.opacity <= 1.0f))
            throw ValidationError(path + ": scene record " + std::to_string(i) +
                                  ": opacity outside [0,1]");
        if (!g.mean.allFinite() || !g.scale.allFinite())
            throw ValidationError(path + ": scene record " + std::to_string(i) +
                                  ": non-finite mean or scale");
        if (!(g.scale.minCoeff() > 0.0f))
            throw ValidationError(path + ": scene record " + std::to_string(i) +
                                  ": non-positive scale");
        renormalize_quat(g.rotation, i);
        out.push_back(std::move(g));
    }
    return out;
}

void save_scene(const std::vector<Gaussian3D>& gaussians, const std::string& path) {
    bool any_rest = false, all_rest = true;
    for (const auto& g : gaussians) {
        any_rest |= g.sh_rest.has_value();
        all_rest &= g.sh_rest.has_value();
    }
    if (any_rest && !all_rest)
        throw ValidationError("save_scene: mixed sh_rest presence across records");
    const std::uint32_t degree = (any_rest && !gaussians.empty()) ? 3u : 0u;

    std::vector<std::uint8_t> bytes;
    bytes.reserve(kHeaderBytes + gaussians.size() * (kBaseRecordFloats + (degree ? 45 : 0)) * 4);
    bytes.insert(bytes.end(), kMagic, kMagic + 4);
    put_u32(bytes, static_cast<std::uint32_t>(gaussians.size()));
    put_u32(bytes, degree);
    put_u32(bytes, 0u);  // reserved

    for (const auto& g : gaussians) {
        for (int k = 0; k < 3; ++k) put_f32(bytes, g.mean[k]);
        for (int k = 0; k < 3; ++k) put_f32(bytes, g.scale[k]);
        put_f32(bytes, g.rotation.w());
        put_f32(bytes, g.rotation.x());
        put_f32(bytes, g.rotation.y());
        put_f32(bytes, g.rotation.z());
        put_f32(bytes, g.opacity);
        for (int k = 0; k < 3; ++k) put_f32(bytes, g.sh_dc[k]);
        if (degree == 3)
            for (float v : *g.sh_rest) put_f32(bytes, v);
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("write failed: " + path);
}

namespace {

std::vector<float> parse_floats(const std::string& value, const std::string& key, size_t expect) {
    std::istringstream ss(value);
    std::vector<float> out;
    float f;
    while (ss >> f) out.push_back(f);
    if (out.size() != expect)
        throw FormatError("camera key '" + key + "': expected " + std::to_string(expect) +
                          " numbers, got " + std::to_string(out.size()));
    return out;
}

}  // namespace

Camera parse_camera(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    bool have[10] = {};
    const char* keys[10] = {"view_row0", "view_row1", "view_row2", "view_row3", "focal_x",
                            "focal_y",   "width",     "height",    "near",      "far"};
    Camera cam;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("camera config: missing '=' in line: " + line);
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        int idx = -1;
        for (int k = 0; k < 10; ++k)
            if (key == keys[k]) idx = k;
        if (idx < 0) throw FormatError("camera config: unknown key '" + key + "'");
        have[idx] = true;
        if (idx < 4) {
            const auto row = parse_floats(value, key, 4);
            for (int c = 0; c < 4; ++c) cam.view(idx, c) = row[c];
        } else {
            const auto v = parse_floats(value, key, 1);
            switch (idx) {
                case 4: cam.focal_x = v[0]; break;
                case 5: cam.focal_y = v[0]; break;
                case 6: cam.width = static_cast<int>(v[0]); break;
                case 7: cam.height = static_cast<int>(v[0]); break;
                case 8: cam.near = v[0]; break;
                case 9: cam.far = v[0]; break;
            }
        }
    }
    for (int k = 0; k < 10; ++k)
        if (!have[k]) throw FormatError(std::string("camera config: missing key '") + keys[k] + "'");

    if (!(cam.near > 0.0f) || !(cam.near < cam.far))
        throw ValidationError("camera config: require 0 < near < far");
    if (cam.width <= 0 || cam.height <= 0)
        throw ValidationError("camera config: require positive width/height");
    if (!(cam.focal_x > 0.0f) || !(cam.focal_y > 0.0f))
        throw ValidationError("camera config: require positive focals");
    const Eigen::Matrix3f r = cam.rotation();
    const float dev = (r.transpose() * r - Eigen::Matrix3f::Identity()).norm();
    if (!(dev <= 1e-4f))
        throw ValidationError("camera config: view rotation block not orthonormal (|R^T R - I|_F = " +
                              std::to_string(dev) + ")");
    return cam;
}

Camera load_camera(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open camera file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_camera(ss.str());
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

std::vector<Gaussian3D> gen_synthetic_scene(std::uint64_t seed, int count, float extent,
                                            ScaleRange scale_range) {
    if (count < 0) throw ValidationError("gen_synthetic_scene: count must be >= 0");
    if (!(extent > 0.0f)) throw ValidationError("gen_synthetic_scene: extent must be > 0");
    if (!(scale_range.min > 0.0f) || !(scale_range.min <= scale_range.max))
        throw ValidationError("gen_synthetic_scene: require 0 < scale_min <= scale_max");

    SplitMix64 rng(seed);
    std::vector<Gaussian3D> out;
    out.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        Gaussian3D g;
        g.mean = {rng.uniform(-extent, extent), rng.uniform(-extent, extent),
                  rng.uniform(-extent, extent) + 3.0f * extent};  // in front of the canonical camera
        g.scale = {rng.uniform(scale_range.min, scale_range.max),
                   rng.uniform(scale_range.min, scale_range.max),
                   rng.uniform(scale_range.min, scale_range.max)};
        // Uniform unit quaternion (Shoemake's subgroup method, three uniforms).
        const float u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
        const float s1 = std::sqrt(1.0f - u1), s2 = std::sqrt(u1);
        const float a = 2.0f * static_cast<float>(M_PI) * u2;
        const float b = 2.0f * static_cast<float>(M_PI) * u3;
        g.rotation = Eigen::Quaternionf(s2 * std::cos(b), s1 * std::sin(a), s1 * std::cos(a),
                                        s2 * std::sin(b));
        renormalize_quat(g.rotation, static_cast<size_t>(i));
        g.opacity = rng.uniform(0.2f, 0.95f);
        // Draw the resulting DC color uniformly in [0,1] and store the
        // coefficient that evaluates to it at SH degree 0.
        constexpr float kShC0 = 0.28209479177f;
        for (int c = 0; c < 3; ++c) g.sh_dc[c] = (rng.uniform() - 0.5f) / kShC0;
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<std::uint8_t> encode_ppm(const ImageBuffer& img) {
    std::string header = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                         "\n255\n";
    std::vector<std::uint8_t> bytes(header.begin(), header.end());
    bytes.reserve(bytes.size() + img.rgb.size());
    for (float v : img.rgb) {
        const float c = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
        bytes.push_back(static_cast<std::uint8_t>(std::lrintf(c * 255.0f)));
    }
    return bytes;
}

void write_image(const ImageBuffer& img, const std::string& path) {
    const auto bytes = encode_ppm(img);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("write failed: " + path);
}

ImageBuffer read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open image file: " + path);

    auto next_token = [&in, &path]() {
        std::string tok;
        int c;
        while ((c = in.get()) != EOF) {
            if (c == '#') {  // comment to end of line
                while ((c = in.get()) != EOF && c != '\n') {}
                continue;
            }
            if (std::isspace(c)) {
                if (!tok.empty()) return tok;
                continue;
            }
            tok.push_back(static_cast<char>(c));
        }
        if (tok.empty()) throw FormatError(path + ": truncated PPM header");
        return tok;
    };

    if (next_token() != "P6") throw FormatError(path + ": not a binary P6 PPM");
    const int w = std::stoi(next_token());
    const int h = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (w <= 0 || h <= 0) throw FormatError(path + ": bad PPM dimensions");
    if (maxval != 255) throw FormatError(path + ": unsupported PPM maxval");
    // The header tokenizer consumed exactly one whitespace byte after maxval.

    ImageBuffer img(w, h);
    std::vector<std::uint8_t> raw(img.rgb.size());
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
        throw FormatError(path + ": truncated PPM payload");
    for (size_t i = 0; i < raw.size(); ++i) img.rgb[i] = static_cast<float>(raw[i]) / 255.0f;
    return img;
}

}  // namespace gsr
