#include "condsweep/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "condsweep/errors.hpp"
#include "condsweep/io.hpp"
#include "condsweep/isosurface.hpp"
#include "condsweep/meshtopo.hpp"
#include "condsweep/pointcloud.hpp"

namespace condsweep {

namespace {

std::string format_alpha(double alpha)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", alpha);
    return buf;
}

SweepRecord measure_step(GeneratorBackend& backend, const SweepConfig& config, const PointCloud& a,
                         const PointCloud& b, std::size_t step)
{
    const double alpha =
        step + 1 == config.steps ? 1.0 : static_cast<double>(step) / static_cast<double>(config.steps - 1);
    try {
        const PointCloud cloud = slerp_cloud(a, b, alpha);
        const ConditionVector c = backend.encode(cloud);
        const ScalarGrid grid = decode(backend, c, config.decode_seed, config.grid);
        const TriangleMesh mesh = weld(marching_cubes(grid), 0.0);
        const TopologySummary topo = summarize(mesh);

        if (!config.meshes_dir.empty()) {
            char name[32];
            std::snprintf(name, sizeof(name), "step_%04zu.obj", step);
            write_obj_file(std::filesystem::path(config.meshes_dir) / name, mesh);
        }
        SweepRecord r;
        r.alpha = alpha;
        r.components = topo.components;
        r.watertight_components = topo.watertight_components;
        r.vertices = topo.vertices;
        r.faces = topo.faces;
        r.oracle_components = voxel_components(grid);
        return r;
    } catch (const Error& e) {
        throw Error(e.code(), "alpha=" + format_alpha(alpha) + ": " + e.what());
    }
}

}  // namespace

std::optional<std::size_t> first_persistent_split(std::span<const std::size_t> counts, std::size_t persistence)
{
    if (persistence == 0) {
        throw Error(ErrorCode::InvalidArgument, "persistence must be positive");
    }
    std::size_t run = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        run = counts[i] >= 2 ? run + 1 : 0;
        if (run == persistence) {
            return i + 1 - persistence;
        }
    }
    return std::nullopt;
}

std::optional<double> detect_alpha_star(std::span<const SweepRecord> records, std::size_t persistence)
{
    std::vector<std::size_t> counts;
    counts.reserve(records.size());
    for (const auto& r : records) {
        counts.push_back(r.components);
    }
    if (auto idx = first_persistent_split(counts, persistence)) {
        return records[*idx].alpha;
    }
    return std::nullopt;
}

SweepResult run_sweep(const SweepConfig& config)
{
    auto backend = make_backend(config.backend, config.grid, config.n);
    return run_sweep(config, *backend);
}

SweepResult run_sweep(const SweepConfig& config, GeneratorBackend& backend)
{
    if (config.steps < 2) {
        throw Error(ErrorCode::InvalidArgument, "run_sweep: at least two steps are required");
    }
    config.grid.validate();
    const PointCloud a = fibonacci_sphere(config.n);
    SeededRng rng(config.seed);
    const PointCloud b = perturb_on_sphere(a, config.sigma, rng);
    if (!config.meshes_dir.empty()) {
        std::filesystem::create_directories(config.meshes_dir);
    }

    SweepResult result;
    result.config = config;
    result.records.resize(config.steps);

    unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
    if (!backend.concurrent()) {
        threads = 1;
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, config.steps));

    if (threads <= 1) {
        for (std::size_t s = 0; s < config.steps; ++s) {
            result.records[s] = measure_step(backend, config, a, b, s);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::mutex failure_mutex;
        std::exception_ptr failure;
        std::size_t failed_step = config.steps;
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t s = next++; s < config.steps; s = next++) {
                    try {
                        result.records[s] = measure_step(backend, config, a, b, s);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        // Report the earliest failing step so errors are deterministic.
                        if (s < failed_step) {
                            failed_step = s;
                            failure = std::current_exception();
                        }
                    }
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
    }

    result.alpha_star = detect_alpha_star(result.records, config.persistence);
    std::vector<std::size_t> oracle;
    for (const auto& r : result.records) {
        oracle.push_back(r.oracle_components.value_or(0));
    }
    if (auto idx = first_persistent_split(oracle, config.persistence)) {
        result.oracle_alpha_star = result.records[*idx].alpha;
    }
    return result;
}

ReplicateResult replicate_sweep(const SweepConfig& config, std::span<const std::uint64_t> seeds)
{
    if (seeds.empty()) {
        throw Error(ErrorCode::InvalidArgument, "replicate_sweep: at least one seed is required");
    }
    ReplicateResult out;
    std::vector<double> stars;
    for (auto seed : seeds) {
        SweepConfig c = config;
        c.seed = seed;
        c.decode_seed = seed;
        out.runs.push_back(run_sweep(c));
        if (out.runs.back().alpha_star) {
            stars.push_back(*out.runs.back().alpha_star);
        }
    }
    out.detected = stars.size();
    if (!stars.empty()) {
        std::sort(stars.begin(), stars.end());
        out.alpha_star_min = stars.front();
        out.alpha_star_max = stars.back();
        const std::size_t mid = stars.size() / 2;
        out.alpha_star_median = stars.size() % 2 ? stars[mid] : 0.5 * (stars[mid - 1] + stars[mid]);
    }
    return out;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result)
{
    out << "alpha,components,watertight_components,vertices,faces,oracle_components\n";
    for (const auto& r : result.records) {
        out << format_alpha(r.alpha) << ',' << r.components << ',' << r.watertight_components << ',' << r.vertices
            << ',' << r.faces << ',';
        if (r.oracle_components) {
            out << *r.oracle_components;
        }
        out << '\n';
    }
}

void write_sweep_svg(std::ostream& out, const SweepResult& result)
{
    constexpr double width = 640.0, height = 400.0;
    constexpr double left = 60.0, right = 20.0, top = 20.0, bottom = 50.0;
    std::size_t max_count = 1;
    for (const auto& r : result.records) {
        max_count = std::max(max_count, r.components);
    }
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    auto px = [&](double alpha) { return left + alpha * plot_w; };
    auto py = [&](std::size_t count) { return top + plot_h * (1.0 - static_cast<double>(count) / max_count); };

    char buf[128];
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
    out << "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof(buf), "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n", left,
                  top + plot_h, left + plot_w, top + plot_h);
    out << buf;
    std::snprintf(buf, sizeof(buf), "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n", left,
                  top, left, top + plot_h);
    out << buf;
    for (double tick : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        std::snprintf(buf, sizeof(buf), "<text x=\"%.2f\" y=\"%.2f\" font-size=\"11\" text-anchor=\"middle\">%.2f</text>\n",
                      px(tick), top + plot_h + 16.0, tick);
        out << buf;
    }
    std::snprintf(buf, sizeof(buf), "<text x=\"%.2f\" y=\"%.2f\" font-size=\"11\" text-anchor=\"end\">%zu</text>\n",
                  left - 6.0, top + 4.0, max_count);
    out << buf;
    std::snprintf(buf, sizeof(buf), "<text x=\"%.2f\" y=\"%.2f\" font-size=\"11\" text-anchor=\"end\">0</text>\n",
                  left - 6.0, top + plot_h + 4.0);
    out << buf;
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 10
        << "\" font-size=\"13\" text-anchor=\"middle\">alpha</text>\n";
    out << "<text x=\"16\" y=\"" << top + plot_h / 2 << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << top + plot_h / 2 << ")\">connected components</text>\n";
    out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < result.records.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%s%.2f,%.2f", i ? " " : "", px(result.records[i].alpha),
                      py(result.records[i].components));
        out << buf;
    }
    out << "\"/>\n</svg>\n";
}

}  // namespace condsweep
