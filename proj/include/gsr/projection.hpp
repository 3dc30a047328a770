#pragma once

#include <array>
#include <optional>
#include <vector>

#include "gsr/types.hpp"

namespace gsr {

/// Screen-space splat produced by projection: 2D mean in pixel units, the
/// conic (a,b,c) = inverse projected covariance, evaluated color, camera
/// depth, and the integer pixel radius used for tile binning.
struct ProjectedGaussian {
    Eigen::Vector2f mean2d = Eigen::Vector2f::Zero();
    float conic_a = 0.0f;
    float conic_b = 0.0f;
    float conic_c = 0.0f;
    Eigen::Vector3f color = Eigen::Vector3f::Zero();
    float opacity = 0.0f;
    float depth = 0.0f;
    int radius = 0;
};

/// Sigma = R * S * S^T * R^T packed as (xx, xy, xz, yy, yz, zz).
std::array<float, 6> compute_cov3d(const Eigen::Vector3f& scale, const Eigen::Quaternionf& rotation);

/// Keep iff camera depth lies in (near, far) and the projected mean falls
/// inside the image rectangle dilated by a 1.3x guard band.
bool frustum_cull(const Gaussian3D& g, const Camera& cam);

/// Degree-0 or degree-3 real spherical harmonics color, clamped to >= 0.
Eigen::Vector3f eval_sh_color(const Gaussian3D& g, const Eigen::Vector3f& view_dir);

/// Projects one visible Gaussian. Returns nullopt when the dilated 2D
/// covariance is numerically degenerate (det below 1e-12); callers count
/// such drops rather than failing.
std::optional<ProjectedGaussian> project_gaussian(const Gaussian3D& g, const Camera& cam);

struct ProjectionStats {
    std::size_t input = 0;
    std::size_t culled = 0;
    std::size_t dropped_degenerate = 0;
};

/// Culls and projects a whole scene. Output order matches input order for
/// any worker count.
std::vector<ProjectedGaussian> project_scene(const std::vector<Gaussian3D>& scene,
                                             const Camera& cam, int workers,
                                             ProjectionStats* stats = nullptr);

}  // namespace gsr
