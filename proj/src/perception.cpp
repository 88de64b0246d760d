#include "scrape/perception.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace scrape {

CameraModel default_camera(const VialGeometry& geometry, int width, int height,
                           double standoff) {
    CameraModel cam;
    cam.fx = cam.fy = 1.4 * std::max(width, height);
    cam.cx = width / 2.0;
    cam.cy = height / 2.0;
    // forward = +x world, right = +y world, down = -z world
    cam.rotation.col(0) = Eigen::Vector3d(0, 1, 0);
    cam.rotation.col(1) = Eigen::Vector3d(0, 0, -1);
    cam.rotation.col(2) = Eigen::Vector3d(1, 0, 0);
    double mid_z = 0.5 * (geometry.bottom_z + geometry.rim_z);
    cam.position = Eigen::Vector3d(geometry.wall_x - standoff, 0.0, mid_z);
    return cam;
}

RenderOutput render(const SyntheticScene& scene, const CameraModel& camera,
                    int width, int height, uint64_t seed) {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("render: bad frame size");
    RenderOutput out;
    out.frame.width = width;
    out.frame.height = height;
    out.frame.camera = camera;
    const int n = width * height;
    out.frame.rgb.assign(n, scene.background_color);
    out.frame.depth.assign(n, static_cast<float>(scene.background_depth));
    out.material_mask.assign(n, 0);
    out.tool_mask.assign(n, 0);
    out.vial_mask.assign(n, 0);

    const double wall_depth = scene.geometry.wall_x - camera.position.x();
    const double tool_depth = wall_depth - scene.tool_standoff;
    if (wall_depth <= 0)
        throw std::invalid_argument("render: camera behind the wall");

    int min_x = width, min_y = height, max_x = -1, max_y = -1;
    for (int v = 0; v < height; ++v) {
        for (int u = 0; u < width; ++u) {
            const int i = v * width + u;
            // tool occludes the wall
            if (scene.tool_present) {
                Eigen::Vector3d p = camera.back_project(u + 0.5, v + 0.5, tool_depth);
                if (p.y() >= scene.tool_min.x() && p.y() <= scene.tool_max.x() &&
                    p.z() >= scene.tool_min.y() && p.z() <= scene.tool_max.y()) {
                    out.frame.rgb[i] = scene.tool_color;
                    out.frame.depth[i] = static_cast<float>(tool_depth);
                    out.tool_mask[i] = 1;
                    continue;
                }
            }
            Eigen::Vector3d p = camera.back_project(u + 0.5, v + 0.5, wall_depth);
            bool on_wall = std::abs(p.y()) <= scene.vial_half_width &&
                           p.z() >= scene.geometry.bottom_z &&
                           p.z() <= scene.geometry.rim_z;
            if (!on_wall) continue;
            out.vial_mask[i] = 1;
            // empty glass reads through to the back wall; material and the
            // removed-color overlay sit on the front wall
            out.frame.depth[i] =
                static_cast<float>(wall_depth + scene.vial_depth_extent);
            out.frame.rgb[i] = scene.wall_color;
            for (const Eigen::Vector2d& particle : scene.removed_particles) {
                double dy = p.y() - particle.x();
                double dz = p.z() - particle.y();
                if (dy * dy + dz * dz <= scene.particle_radius * scene.particle_radius) {
                    out.frame.rgb[i] = scene.removed_color;
                    out.frame.depth[i] = static_cast<float>(wall_depth);
                    break;
                }
            }
            for (const Eigen::Vector2d& particle : scene.particles) {
                double dy = p.y() - particle.x();
                double dz = p.z() - particle.y();
                if (dy * dy + dz * dz <= scene.particle_radius * scene.particle_radius) {
                    out.frame.rgb[i] = scene.material_color;
                    out.frame.depth[i] = static_cast<float>(wall_depth);
                    out.material_mask[i] = 1;
                    break;
                }
            }
            min_x = std::min(min_x, u);
            max_x = std::max(max_x, u);
            min_y = std::min(min_y, v);
            max_y = std::max(max_y, v);
        }
    }
    if (max_x >= min_x)
        out.vial_bbox = {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};

    SplitMix64 rng(seed);
    if (scene.depth_noise_std > 0.0) {
        for (float& d : out.frame.depth)
            if (d > 0.0f)
                d += static_cast<float>(scene.depth_noise_std * rng.gaussian());
    }
    if (scene.artifact_rate > 0.0) {
        for (float& d : out.frame.depth) {
            if (rng.uniform01() < scene.artifact_rate) {
                // far out-of-band reading, the kind Eq.-5 filtering removes
                d = static_cast<float>(scene.background_depth +
                                       rng.uniform(0.5, 2.0));
            }
        }
    }
    return out;
}

std::vector<double> remove_depth_outliers(const std::vector<double>& depths) {
    if (depths.empty())
        throw std::invalid_argument("remove_depth_outliers: empty input");
    double mu = std::accumulate(depths.begin(), depths.end(), 0.0) / depths.size();
    double var = 0.0;
    for (double z : depths) var += (z - mu) * (z - mu);
    double sigma = std::sqrt(var / depths.size());
    std::vector<double> kept;
    kept.reserve(depths.size());
    for (double z : depths)
        if (std::abs(z - mu) <= sigma) kept.push_back(z);
    return kept;
}

DepthThreshold depth_threshold(const std::vector<double>& depths, double ratio) {
    if (depths.empty())
        throw std::invalid_argument("depth_threshold: empty input");
    auto [lo, hi] = std::minmax_element(depths.begin(), depths.end());
    DepthThreshold out;
    out.threshold = *lo + ratio * (*hi - *lo);
    out.front.reserve(depths.size());
    for (double z : depths) out.front.push_back(z <= out.threshold ? 1 : 0);
    return out;
}

HsvPixel rgb_to_hsv(const std::array<uint8_t, 3>& rgb) {
    double r = rgb[0] / 255.0, g = rgb[1] / 255.0, b = rgb[2] / 255.0;
    double mx = std::max({r, g, b}), mn = std::min({r, g, b});
    double c = mx - mn;
    HsvPixel out;
    out.v = mx;
    out.s = mx > 0.0 ? c / mx : 0.0;
    double h = 0.0;   // degrees on the full 0-360 scale
    if (c > 0.0) {
        if (mx == r)
            h = 60.0 * std::fmod((g - b) / c + 6.0, 6.0);
        else if (mx == g)
            h = 60.0 * ((b - r) / c + 2.0);
        else
            h = 60.0 * ((r - g) / c + 4.0);
    }
    out.h = h / 2.0;   // half scale, 0-180
    return out;
}

std::vector<uint8_t> filter_tool_pixels(const RgbdFrame& frame,
                                        const std::vector<uint8_t>& mask,
                                        uint64_t seed) {
    std::vector<int> indices;
    for (int i = 0; i < static_cast<int>(mask.size()); ++i)
        if (mask[i]) indices.push_back(i);
    if (indices.empty())
        throw std::invalid_argument("filter_tool_pixels: empty mask");

    const int k = std::min<int>(6, static_cast<int>(indices.size()));
    std::vector<Eigen::VectorXd> points;
    points.reserve(indices.size());
    for (int i : indices) {
        const auto& px = frame.rgb[i];
        Eigen::VectorXd p(3);
        p << px[0], px[1], px[2];
        points.push_back(p);
    }
    KmeansResult km = kmeans(points, k, seed);

    std::vector<uint8_t> tool_centroid(k, 0);
    for (int c = 0; c < k; ++c) {
        std::array<uint8_t, 3> rgb{
            static_cast<uint8_t>(std::clamp(km.centroids[c].x(), 0.0, 255.0)),
            static_cast<uint8_t>(std::clamp(km.centroids[c].y(), 0.0, 255.0)),
            static_cast<uint8_t>(std::clamp(km.centroids[c].z(), 0.0, 255.0))};
        HsvPixel hsv = rgb_to_hsv(rgb);
        if (std::abs(hsv.h - kToolHueCenter) <= kToolHueWindow &&
            hsv.s > kToolSaturationFloor)
            tool_centroid[c] = 1;
    }

    std::vector<uint8_t> out = mask;
    for (size_t j = 0; j < indices.size(); ++j)
        if (tool_centroid[km.assignments[j]]) out[indices[j]] = 0;
    return out;
}

PixelBox roi_crop(const PixelBox& bbox, const RoiFractions& fractions) {
    if (!bbox.valid()) throw std::invalid_argument("roi_crop: invalid bbox");
    int dx = static_cast<int>(bbox.w * fractions.side);
    int dy = static_cast<int>(bbox.h * fractions.top);
    PixelBox out{bbox.x + dx, bbox.y + dy, bbox.w - 2 * dx, bbox.h - dy};
    if (!out.valid()) throw std::invalid_argument("roi_crop: degenerate result");
    return out;
}

ClusterReport material_clusters(const RgbdFrame& frame,
                                const std::vector<uint8_t>& mask,
                                const PixelBox& roi, uint64_t seed) {
    if (!roi.valid()) throw std::invalid_argument("material_clusters: invalid ROI");
    std::vector<Eigen::VectorXd> pixels;   // (u, v) for clustering
    std::vector<int> flat;
    for (int v = roi.y; v < roi.y + roi.h; ++v) {
        for (int u = roi.x; u < roi.x + roi.w; ++u) {
            int i = frame.idx(u, v);
            if (mask[i]) {
                Eigen::VectorXd p(2);
                p << u + 0.5, v + 0.5;
                pixels.push_back(p);
                flat.push_back(i);
            }
        }
    }

    ClusterReport report;
    const double roi_pixels = static_cast<double>(roi.w) * roi.h;
    if (pixels.size() < 3) {
        // degenerate: pad with the last valid centroid, zero coverage
        Eigen::Vector3d last = Eigen::Vector3d::Zero();
        for (size_t j = 0; j < pixels.size(); ++j) {
            double z = frame.depth[flat[j]];
            last = frame.camera.back_project(pixels[j].x(), pixels[j].y(), z);
            report.clusters[j].centroid = last;
            report.clusters[j].coverage_pct = 100.0 / roi_pixels;
        }
        for (size_t j = pixels.size(); j < 3; ++j) {
            report.clusters[j].centroid = last;
            report.clusters[j].coverage_pct = 0.0;
        }
        return report;
    }

    KmeansResult km = kmeans(pixels, 3, seed);
    std::array<long, 3> counts{0, 0, 0};
    std::array<double, 3> depth_sum{0.0, 0.0, 0.0};
    for (size_t j = 0; j < pixels.size(); ++j) {
        int c = km.assignments[j];
        ++counts[c];
        depth_sum[c] += frame.depth[flat[j]];
    }
    Eigen::Vector3d last = Eigen::Vector3d::Zero();
    for (int c = 0; c < 3; ++c) {
        if (counts[c] > 0) {
            // cluster mean depth stands in for c_z at the centroid pixel
            double z = depth_sum[c] / counts[c];
            last = frame.camera.back_project(km.centroids[c].x(),
                                             km.centroids[c].y(), z);
            report.clusters[c].centroid = last;
            report.clusters[c].coverage_pct = 100.0 * counts[c] / roi_pixels;
        } else {
            report.clusters[c].centroid = last;
            report.clusters[c].coverage_pct = 0.0;
        }
    }
    return report;
}

std::vector<uint8_t> predict_material_mask(const RgbdFrame& frame,
                                           const std::vector<uint8_t>& vial_or_tool_mask,
                                           const PipelineParams& params) {
    const int n = frame.width * frame.height;
    if (static_cast<int>(vial_or_tool_mask.size()) != n)
        throw std::invalid_argument("predict_material_mask: mask size mismatch");

    // depth statistics over the candidate region, zeros pre-excluded
    std::vector<double> depths;
    std::vector<int> depth_idx;
    for (int i = 0; i < n; ++i) {
        if (vial_or_tool_mask[i] && frame.depth[i] > 0.0f) {
            depths.push_back(frame.depth[i]);
            depth_idx.push_back(i);
        }
    }
    std::vector<uint8_t> front(n, 0);
    if (!depths.empty()) {
        std::vector<double> kept = remove_depth_outliers(depths);
        if (!kept.empty()) {
            DepthThreshold th = depth_threshold(kept, params.depth_ratio);
            for (size_t j = 0; j < depths.size(); ++j)
                if (std::abs(depths[j]) > 0.0 && depths[j] <= th.threshold)
                    front[depth_idx[j]] = 1;
        }
    }
    bool any = std::any_of(front.begin(), front.end(), [](uint8_t b) { return b; });
    if (!any) return front;

    std::vector<uint8_t> candidates =
        params.filter_tool ? filter_tool_pixels(frame, front, params.seed) : front;

    // second color pass: keep only pigmented clusters (the bare wall and the
    // background are low saturation)
    std::vector<int> indices;
    for (int i = 0; i < n; ++i)
        if (candidates[i]) indices.push_back(i);
    if (indices.empty()) return candidates;

    const int k = std::min<int>(6, static_cast<int>(indices.size()));
    std::vector<Eigen::VectorXd> points;
    points.reserve(indices.size());
    for (int i : indices) {
        Eigen::VectorXd p(3);
        p << frame.rgb[i][0], frame.rgb[i][1], frame.rgb[i][2];
        points.push_back(p);
    }
    KmeansResult km = kmeans(points, k, params.seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<uint8_t> keep_centroid(k, 0);
    for (int c = 0; c < k; ++c) {
        std::array<uint8_t, 3> rgb{
            static_cast<uint8_t>(std::clamp(km.centroids[c].x(), 0.0, 255.0)),
            static_cast<uint8_t>(std::clamp(km.centroids[c].y(), 0.0, 255.0)),
            static_cast<uint8_t>(std::clamp(km.centroids[c].z(), 0.0, 255.0))};
        if (rgb_to_hsv(rgb).s > params.material_saturation_floor)
            keep_centroid[c] = 1;
    }
    std::vector<uint8_t> out(n, 0);
    for (size_t j = 0; j < indices.size(); ++j)
        if (keep_centroid[km.assignments[j]]) out[indices[j]] = 1;
    return out;
}

MetricsReport metrics_from_counts(long tp, long fp, long fn, long tn) {
    MetricsReport m;
    m.tp = tp;
    m.fp = fp;
    m.fn = fn;
    m.tn = tn;
    long total = tp + fp + fn + tn;
    m.accuracy = total > 0 ? static_cast<double>(tp + tn) / total : 0.0;
    m.precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    m.recall = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    m.specificity = (tn + fp) > 0 ? static_cast<double>(tn) / (tn + fp) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

MetricsReport evaluate(const std::vector<uint8_t>& predicted,
                       const std::vector<uint8_t>& truth) {
    if (predicted.size() != truth.size())
        throw std::invalid_argument("evaluate: size mismatch");
    long tp = 0, fp = 0, fn = 0, tn = 0;
    for (size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] && truth[i]) ++tp;
        else if (predicted[i] && !truth[i]) ++fp;
        else if (!predicted[i] && truth[i]) ++fn;
        else ++tn;
    }
    return metrics_from_counts(tp, fp, fn, tn);
}

void save_frame(const std::string& path_prefix, const RgbdFrame& frame) {
    {
        std::ofstream ppm(path_prefix + ".ppm", std::ios::binary);
        if (!ppm) throw std::runtime_error("save_frame: cannot open " + path_prefix);
        ppm << "P6\n" << frame.width << " " << frame.height << "\n255\n";
        for (const auto& px : frame.rgb)
            ppm.write(reinterpret_cast<const char*>(px.data()), 3);
    }
    {
        std::ofstream df(path_prefix + ".depth", std::ios::binary);
        uint32_t w = frame.width, h = frame.height;
        df.write(reinterpret_cast<const char*>(&w), 4);
        df.write(reinterpret_cast<const char*>(&h), 4);
        df.write(reinterpret_cast<const char*>(frame.depth.data()),
                 static_cast<std::streamsize>(frame.depth.size() * sizeof(float)));
    }
}

RgbdFrame load_frame(const std::string& path_prefix) {
    RgbdFrame frame;
    {
        std::ifstream ppm(path_prefix + ".ppm", std::ios::binary);
        if (!ppm) throw std::runtime_error("load_frame: cannot open " + path_prefix);
        std::string magic;
        int maxval = 0;
        ppm >> magic >> frame.width >> frame.height >> maxval;
        if (magic != "P6" || maxval != 255 || frame.width <= 0 || frame.height <= 0)
            throw std::runtime_error("load_frame: bad ppm header");
        ppm.get();   // single whitespace after header
        frame.rgb.resize(static_cast<size_t>(frame.width) * frame.height);
        for (auto& px : frame.rgb)
            ppm.read(reinterpret_cast<char*>(px.data()), 3);
        if (!ppm) throw std::runtime_error("load_frame: truncated ppm");
    }
    {
        std::ifstream df(path_prefix + ".depth", std::ios::binary);
        if (!df) throw std::runtime_error("load_frame: missing depth plane");
        uint32_t w = 0, h = 0;
        df.read(reinterpret_cast<char*>(&w), 4);
        df.read(reinterpret_cast<char*>(&h), 4);
        if (static_cast<int>(w) != frame.width || static_cast<int>(h) != frame.height)
            throw std::runtime_error("load_frame: depth/rgb size mismatch");
        frame.depth.resize(static_cast<size_t>(w) * h);
        df.read(reinterpret_cast<char*>(frame.depth.data()),
                static_cast<std::streamsize>(frame.depth.size() * sizeof(float)));
        if (!df) throw std::runtime_error("load_frame: truncated depth plane");
    }
    return frame;
}

}  // namespace scrape
