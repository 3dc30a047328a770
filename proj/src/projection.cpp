#include "gsr/projection.hpp"

#include <cmath>

#include "gsr/parallel.hpp"

namespace gsr {

namespace {

constexpr float kShC0 = 0.28209479177f;
constexpr float kShC1 = 0.4886025119029199f;
constexpr float kShC2[5] = {1.0925484305920792f, -1.0925484305920792f, 0.31539156525252005f,
                            -1.0925484305920792f, 0.5462742152960396f};
constexpr float kShC3[7] = {-0.5900435899266435f, 2.890611442640554f, -0.4570457994644658f,
                            0.3731763325901154f, -0.4570457994644658f, 1.445305721320277f,
                            -0.5900435899266435f};

// Low-pass dilation added to both diagonals of the projected covariance
// before inversion, and the 3-sigma radius rule; both inherited from the
// reference splatting renderer.
constexpr float kCovDilation = 0.3f;
constexpr float kGuardBand = 1.3f;

Eigen::Vector3f camera_space(const Gaussian3D& g, const Camera& cam) {
    return cam.rotation() * g.mean + cam.translation();
}

Eigen::Vector2f to_pixels(const Eigen::Vector3f& p, const Camera& cam) {
    return {0.5f * static_cast<float>(cam.width) + cam.focal_x * p.x() / p.z(),
            0.5f * static_cast<float>(cam.height) + cam.focal_y * p.y() / p.z()};
}

}  // namespace

std::array<float, 6> compute_cov3d(const Eigen::Vector3f& scale,
                                   const Eigen::Quaternionf& rotation) {
    if (!(scale.minCoeff() > 0.0f)) throw ValidationError("compute_cov3d: non-positive scale");
    const Eigen::Matrix3f r = rotation.toRotationMatrix();
    const Eigen::Matrix3f m = r * scale.asDiagonal();
    const Eigen::Matrix3f sigma = m * m.transpose();
    return {sigma(0, 0), sigma(0, 1), sigma(0, 2), sigma(1, 1), sigma(1, 2), sigma(2, 2)};
}

bool frustum_cull(const Gaussian3D& g, const Camera& cam) {
    const Eigen::Vector3f p = camera_space(g, cam);
    if (!(p.z() > cam.near && p.z() < cam.far)) return false;
    const Eigen::Vector2f px = to_pixels(p, cam);
    const float half_w = 0.5f * static_cast<float>(cam.width);
    const float half_h = 0.5f * static_cast<float>(cam.height);
    return std::fabs(px.x() - half_w) <= kGuardBand * half_w &&
           std::fabs(px.y() - half_h) <= kGuardBand * half_h;
}

Eigen::Vector3f eval_sh_color(const Gaussian3D& g, const Eigen::Vector3f& view_dir) {
    Eigen::Vector3f result = Eigen::Vector3f::Constant(0.5f) + kShC0 * g.sh_dc;
    if (g.sh_rest) {
        const auto& sh = *g.sh_rest;
        auto coeff = [&sh](int i) {  // coefficient i (1-based band index minus one), RGB
            return Eigen::Vector3f(sh[3 * i], sh[3 * i + 1], sh[3 * i + 2]);
        };
        const float x = view_dir.x(), y = view_dir.y(), z = view_dir.z();
        result += -kShC1 * y * coeff(0) + kShC1 * z * coeff(1) - kShC1 * x * coeff(2);
        const float xx = x * x, yy = y * y, zz = z * z;
        const float xy = x * y, yz = y * z, xz = x * z;
        result += kShC2[0] * xy * coeff(3) + kShC2[1] * yz * coeff(4) +
                  kShC2[2] * (2.0f * zz - xx - yy) * coeff(5) + kShC2[3] * xz * coeff(6) +
                  kShC2[4] * (xx - yy) * coeff(7);
        result += kShC3[0] * y * (3.0f * xx - yy) * coeff(8) + kShC3[1] * xy * z * coeff(9) +
                  kShC3[2] * y * (4.0f * zz - xx - yy) * coeff(10) +
                  kShC3[3] * z * (2.0f * zz - 3.0f * xx - 3.0f * yy) * coeff(11) +
                  kShC3[4] * x * (4.0f * zz - xx - yy) * coeff(12) +
                  kShC3[5] * z * (xx - yy) * coeff(13) +
                  kShC3[6] * x * (xx - yy - 3.0f * zz) * coeff(14);
    }
    return result.cwiseMax(0.0f);
}

std::optional<ProjectedGaussian> project_gaussian(const Gaussian3D& g, const Camera& cam) {
    const Eigen::Vector3f p = camera_space(g, cam);
    const float z = p.z();

    const auto c6 = compute_cov3d(g.scale, g.rotation);
    Eigen::Matrix3f sigma;
    sigma << c6[0], c6[1], c6[2], c6[1], c6[3], c6[4], c6[2], c6[4], c6[5];

    Eigen::Matrix<float, 2, 3> jac;
    jac << cam.focal_x / z, 0.0f, -cam.focal_x * p.x() / (z * z),
           0.0f, cam.focal_y / z, -cam.focal_y * p.y() / (z * z);

    const Eigen::Matrix<float, 2, 3> t = jac * cam.rotation();
    Eigen::Matrix2f cov2 = t * sigma * t.transpose();
    cov2(0, 0) += kCovDilation;
    cov2(1, 1) += kCovDilation;

    const float det = cov2(0, 0) * cov2(1, 1) - cov2(0, 1) * cov2(0, 1);
    if (!(det > 1e-12f)) return std::nullopt;  // also rejects NaN

    ProjectedGaussian out;
    out.conic_a = cov2(1, 1) / det;
    out.conic_b = -cov2(0, 1) / det;
    out.conic_c = cov2(0, 0) / det;

    const float mid = 0.5f * (cov2(0, 0) + cov2(1, 1));
    const float lambda_max = mid + std::sqrt(std::max(0.0f, mid * mid - det));
    out.radius = static_cast<int>(std::ceil(3.0f * std::sqrt(lambda_max)));
    if (out.radius < 1) out.radius = 1;

    out.mean2d = to_pixels(p, cam);
    out.depth = z;
    out.opacity = g.opacity;
    out.color = eval_sh_color(g, (g.mean - cam.position()).normalized());
    return out;
}

std::vector<ProjectedGaussian> project_scene(const std::vector<Gaussian3D>& scene,
                                             const Camera& cam, int workers,
                                             ProjectionStats* stats) {
    std::vector<std::optional<ProjectedGaussian>> slots(scene.size());
    std::vector<std::uint8_t> visible(scene.size(), 0);
    parallel_for(scene.size(), workers, [&](std::size_t i) {
        if (!frustum_cull(scene[i], cam)) return;
        visible[i] = 1;
        slots[i] = project_gaussian(scene[i], cam);
    });

    std::vector<ProjectedGaussian> out;
    out.reserve(scene.size());
    ProjectionStats st;
    st.input = scene.size();
    for (std::size_t i = 0; i < scene.size(); ++i) {
        if (!visible[i]) {
            ++st.culled;
        } else if (!slots[i]) {
            ++st.dropped_degenerate;
        } else {
            out.push_back(*slots[i]);
        }
    }
    if (stats) *stats = st;
    return out;
}

}  // namespace gsr
