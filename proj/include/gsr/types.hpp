#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace gsr {

/// Raised by loaders/parsers on malformed bytes or text.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when well-formed input violates a domain invariant.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kShRestCoeffs = 45;  // degrees 1..3, 15 coefficients x RGB

/// World-space anisotropic Gaussian primitive.
struct Gaussian3D {
    Eigen::Vector3f mean = Eigen::Vector3f::Zero();
    Eigen::Vector3f scale = Eigen::Vector3f::Ones();       // per-axis stddev, > 0
    Eigen::Quaternionf rotation = Eigen::Quaternionf::Identity();  // unit
    float opacity = 1.0f;                                  // in [0, 1]
    Eigen::Vector3f sh_dc = Eigen::Vector3f::Zero();
    std::optional<std::array<float, kShRestCoeffs>> sh_rest;
};

/// Pinhole camera with a row-major world-to-camera transform.
struct Camera {
    Eigen::Matrix4f view = Eigen::Matrix4f::Identity();
    float focal_x = 0.0f;
    float focal_y = 0.0f;
    int width = 0;
    int height = 0;
    float near = 0.0f;
    float far = 0.0f;

    Eigen::Matrix3f rotation() const { return view.topLeftCorner<3, 3>(); }
    Eigen::Vector3f translation() const { return view.topRightCorner<3, 1>(); }
    /// Camera center in world space: -R^T t.
    Eigen::Vector3f position() const { return -(rotation().transpose() * translation()); }
};

/// Row-major RGB accumulation target; values land in [0,1] after finalize().
struct ImageBuffer {
    int width = 0;
    int height = 0;
    std::vector<float> rgb;  // width * height * 3

    ImageBuffer() = default;
    ImageBuffer(int w, int h) : width(w), height(h), rgb(static_cast<size_t>(w) * h * 3, 0.0f) {}

    float* pixel(int x, int y) { return &rgb[(static_cast<size_t>(y) * width + x) * 3]; }
    const float* pixel(int x, int y) const {
        return &rgb[(static_cast<size_t>(y) * width + x) * 3];
    }

    /// Clamps every channel into [0,1].
    void finalize() {
        for (float& v : rgb) v = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
    }
};

}  // namespace gsr
