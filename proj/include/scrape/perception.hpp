#pragma once
#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "scrape/kmeans.hpp"
#include "scrape/material.hpp"
#include "scrape/rng.hpp"

namespace scrape {

// Pinhole camera with a camera-to-world pose. Camera frame follows the usual
// convention: +z forward (depth), +x right, +y down.
struct CameraModel {
    double fx = 400.0, fy = 400.0;   // focal lengths, px
    double cx = 160.0, cy = 120.0;   // principal point, px
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();  // cam -> world
    Eigen::Vector3d position = Eigen::Vector3d::Zero();      // cam origin, world

    // World point of pixel (u, v) at camera depth z.
    Eigen::Vector3d back_project(double u, double v, double z) const {
        Eigen::Vector3d p_cam((u - cx) / fx * z, (v - cy) / fy * z, z);
        return rotation * p_cam + position;
    }
};

struct RgbdFrame {
    int width = 0, height = 0;
    std::vector<std::array<uint8_t, 3>> rgb;   // row-major
    std::vector<float> depth;                  // meters, 0 = invalid
    CameraModel camera;

    int idx(int x, int y) const { return y * width + x; }
};

struct PixelBox {
    int x = 0, y = 0, w = 0, h = 0;
    bool valid() const { return w > 0 && h > 0; }
};

// Wall-plane scene: particles and the tool live on the plane x = wall_x
// (world), parameterized by (y, z). The camera looks down +x at the wall.
struct SyntheticScene {
    VialGeometry geometry;
    std::vector<Eigen::Vector2d> particles;   // (y, z) on the wall plane, m
    double particle_radius = 0.004;           // m
    double vial_half_width = 0.05;            // m, lateral extent of the wall
    double vial_depth_extent = 0.04;          // m; bare glass reads at the back wall

    bool tool_present = false;
    Eigen::Vector2d tool_min{-0.008, 0.08};   // (y, z) lower corner, m
    Eigen::Vector2d tool_max{0.008, 0.22};    // upper corner
    double tool_standoff = 0.01;              // m in front of the wall

    // already-dislodged particles, drawn in the removed color (visualization)
    std::vector<Eigen::Vector2d> removed_particles;
    std::array<uint8_t, 3> removed_color{90, 90, 90};

    std::array<uint8_t, 3> material_color{200, 60, 40};   // reddish, hue ~5
    std::array<uint8_t, 3> tool_color{40, 220, 40};       // green, hue 60 (half scale)
    std::array<uint8_t, 3> wall_color{180, 180, 190};
    std::array<uint8_t, 3> background_color{30, 30, 35};
    double background_depth = 1.0;            // m

    double depth_noise_std = 0.0;             // m
    double artifact_rate = 0.0;               // fraction of pixels corrupted
};

struct RenderOutput {
    RgbdFrame frame;
    std::vector<uint8_t> material_mask;       // ground truth, row-major
    std::vector<uint8_t> tool_mask;
    std::vector<uint8_t> vial_mask;
    PixelBox vial_bbox;
};

// Camera centered on the scraping window at the given standoff distance,
// looking along +x world.
CameraModel default_camera(const VialGeometry& geometry, int width, int height,
                           double standoff = 0.25);

RenderOutput render(const SyntheticScene& scene, const CameraModel& camera,
                    int width, int height, uint64_t seed);

// Retains exactly the depths within one population standard deviation of the
// mean (closed interval), order preserved. Throws on empty input.
std::vector<double> remove_depth_outliers(const std::vector<double>& depths);

struct DepthThreshold {
    double threshold = 0.0;
    std::vector<uint8_t> front;   // per input value: depth <= threshold
};

// threshold = z_min + ratio * (z_max - z_min). Throws on empty input.
DepthThreshold depth_threshold(const std::vector<double>& depths, double ratio);

struct HsvPixel {
    double h = 0.0;   // 0-180 half scale
    double s = 0.0;   // 0-1
    double v = 0.0;   // 0-1
};
HsvPixel rgb_to_hsv(const std::array<uint8_t, 3>& rgb);

inline constexpr double kToolHueCenter = 60.0;   // 0-180 scale
inline constexpr double kToolHueWindow = 20.0;
inline constexpr double kToolSaturationFloor = 0.3;

// First clustering stage: k = 6 in RGB space over the masked pixels; pixels
// whose centroid lands in the green hue window with enough saturation are
// removed. Returns the updated mask.
std::vector<uint8_t> filter_tool_pixels(const RgbdFrame& frame,
                                        const std::vector<uint8_t>& mask,
                                        uint64_t seed);

struct RoiFractions {
    double top = 0.25;
    double side = 0.30;
};

// Removes the top fraction of the height and the side fraction of the width
// from each side. Throws if the result is degenerate.
PixelBox roi_crop(const PixelBox& bbox, const RoiFractions& fractions);

struct ClusterReportEntry {
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();   // world, m
    double coverage_pct = 0.0;                            // % of ROI pixels
};

struct ClusterReport {
    std::array<ClusterReportEntry, 3> clusters;
};

// Second clustering stage: k = 3 over the white pixel coordinates inside the
// ROI; centroids back-projected to world through the camera. Fewer than 3
// white pixels pads the report (last valid centroid, zero coverage).
ClusterReport material_clusters(const RgbdFrame& frame,
                                const std::vector<uint8_t>& mask,
                                const PixelBox& roi, uint64_t seed);

struct PipelineParams {
    double depth_ratio = 0.5;        // Fig.-4 style front/back interpolation
    bool filter_tool = true;
    uint64_t seed = 0;
    double material_saturation_floor = 0.3;   // wall/background are unsaturated
};

// Full localization pipeline on a rendered frame: invalid-depth exclusion,
// one-sigma outlier removal, ratio depth thresholding over the vial mask,
// k = 6 color clustering with optional green-tool removal, and a saturation
// gate separating pigmented material from the bare wall. Returns the
// predicted material mask (row-major, frame sized).
std::vector<uint8_t> predict_material_mask(const RgbdFrame& frame,
                                           const std::vector<uint8_t>& vial_or_tool_mask,
                                           const PipelineParams& params);

struct MetricsReport {
    double accuracy = 0.0, precision = 0.0, recall = 0.0;
    double specificity = 0.0, f1 = 0.0;
    long tp = 0, fp = 0, fn = 0, tn = 0;
};

MetricsReport evaluate(const std::vector<uint8_t>& predicted,
                       const std::vector<uint8_t>& truth);
MetricsReport metrics_from_counts(long tp, long fp, long fn, long tn);

// Frame files: binary P6 portable pixel map for RGB plus a raw depth plane
// ("<path>.depth"): width u32 LE, height u32 LE, then width*height f32 LE.
void save_frame(const std::string& path_prefix, const RgbdFrame& frame);
RgbdFrame load_frame(const std::string& path_prefix);

}  // namespace scrape
