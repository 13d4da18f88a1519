// condsweep: command-line front end for the condition sweep toolkit.
//
// Every subcommand is deterministic given its flags and --seed. Flags may also
// be supplied through CONDSWEEP_<FLAG> environment variables (dashes become
// underscores); explicit flags win.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "condsweep/bracket.hpp"
#include "condsweep/encoder.hpp"
#include "condsweep/errors.hpp"
#include "condsweep/generator.hpp"
#include "condsweep/io.hpp"
#include "condsweep/isosurface.hpp"
#include "condsweep/meshtopo.hpp"
#include "condsweep/pointcloud.hpp"
#include "condsweep/subspace.hpp"
#include "condsweep/sweep.hpp"

namespace fs = std::filesystem;
using namespace condsweep;
using json = nlohmann::json;

namespace {

std::string env_name(const std::string& flag)
{
    std::string name = "CONDSWEEP_";
    for (char ch : flag) {
        name += ch == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    }
    return name;
}

template <typename T>
CLI::Option* flag(CLI::App* app, const std::string& name, T& value, const std::string& help)
{
    return app->add_option("--" + name, value, help)->envname(env_name(name))->capture_default_str();
}

// Output helpers: "-" means stdout.
template <typename Writer>
void to_output(const std::string& path, Writer&& write)
{
    if (path == "-") {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
    }
    write(out);
    if (!out) {
        throw Error(ErrorCode::IoError, "write failed: " + path);
    }
}

void write_cloud(const std::string& path, const PointCloud& cloud)
{
    if (path == "-") {
        write_xyz(std::cout, cloud);
        return;
    }
    write_point_cloud_file(path, cloud);
}

void write_conditions(const std::string& path, const std::vector<ConditionVector>& batch)
{
    to_output(path, [&](std::ostream& out) {
        if (batch.size() == 1) {
            write_cvec(out, batch.front());
        } else {
            write_cvbt(out, batch);
        }
    });
}

// The file formats carry no encoder tag; the consuming backend implies it.
std::string encoder_for(const std::string& backend)
{
    if (backend == "density") return kDensityEncoderId;
    if (backend == "balls") return kCoordsEncoderId;
    return backend;
}

struct BackendFlags {
    BackendConfig config;
    std::size_t grid = 64;

    void add(CLI::App* app, bool with_id = true)
    {
        if (with_id) {
            flag(app, "backend", config.id, "density, balls or external")
                ->check(CLI::IsMember({"density", "balls", "external"}));
        }
        flag(app, "grid", grid, "grid resolution G over [-1.25, 1.25]^3");
        flag(app, "tau", config.tau, "density backend threshold");
        flag(app, "radius", config.radius, "balls backend radius (0 = three voxel edges)");
        flag(app, "bandwidth", config.bandwidth, "density kernel bandwidth (0 = 1.5 voxel edges)");
        flag(app, "backend-cmd", config.command, "external backend launch command");
        flag(app, "backend-addr", config.address, "external backend host:port");
        flag(app, "timeout", config.timeout_seconds, "external backend timeout in seconds");
        app->add_flag("--hollow{false},--solid{true}", config.solid, "fill enclosed cavities when decoding")
            ->envname("CONDSWEEP_SOLID");
    }
};

json summary_json(const TopologySummary& s)
{
    return {{"components", s.components}, {"watertight_components", s.watertight_components},
            {"euler", s.euler},           {"area", s.area},
            {"vertices", s.vertices},     {"faces", s.faces}};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"condsweep: conditioning sweeps, point-cloud encoders and PCA shape priors"};
    app.require_subcommand(1);
    std::uint64_t seed = 42;

    auto add_seed = [&](CLI::App* sub) { flag(sub, "seed", seed, "random seed"); };

    // sample-sphere
    auto* sphere = app.add_subcommand("sample-sphere", "Fibonacci points on the unit sphere");
    std::size_t sphere_n = 1000;
    std::string sphere_out = "-";
    flag(sphere, "n", sphere_n, "number of points")->check(CLI::PositiveNumber);
    flag(sphere, "out", sphere_out, "output .xyz or .ply (- for stdout)");
    add_seed(sphere);

    // perturb
    auto* perturb = app.add_subcommand("perturb", "Gaussian perturbation renormalized to the sphere");
    std::string perturb_in;
    std::string perturb_out = "-";
    double perturb_sigma = 0.3;
    flag(perturb, "in", perturb_in, "input point cloud on the unit sphere")->required();
    flag(perturb, "sigma", perturb_sigma, "noise standard deviation")->check(CLI::NonNegativeNumber);
    flag(perturb, "out", perturb_out, "output point cloud");
    add_seed(perturb);

    // interp-sweep
    auto* sweep = app.add_subcommand("interp-sweep", "Slerp sweep recording mesh components per step");
    SweepConfig sweep_cfg;
    BackendFlags sweep_backend;
    std::string sweep_csv = "-";
    std::string sweep_svg;
    std::uint64_t decode_seed = 42;
    flag(sweep, "n", sweep_cfg.n, "points per cloud")->check(CLI::PositiveNumber);
    flag(sweep, "sigma", sweep_cfg.sigma, "perturbation of endpoint B")->check(CLI::NonNegativeNumber);
    flag(sweep, "steps", sweep_cfg.steps, "alpha values including both ends")->check(CLI::Range(2, 1000000));
    flag(sweep, "persistence", sweep_cfg.persistence, "steps a split must persist")->check(CLI::PositiveNumber);
    flag(sweep, "out-csv", sweep_csv, "CSV output (- for stdout)");
    flag(sweep, "out-svg", sweep_svg, "optional SVG plot");
    flag(sweep, "meshes-dir", sweep_cfg.meshes_dir, "optional directory for per-step OBJ meshes");
    flag(sweep, "decode-seed", decode_seed, "seed forwarded to the generator");
    flag(sweep, "threads", sweep_cfg.threads, "worker threads (0 = all cores)");
    sweep_backend.add(sweep);
    add_seed(sweep);

    // sample-surface
    auto* surface = app.add_subcommand("sample-surface", "Area-weighted surface samples of a mesh");
    std::string surface_in;
    std::string surface_out = "-";
    std::size_t surface_points = 2500;
    double half_extent = 1.0;
    flag(surface, "in", surface_in, "input OBJ mesh")->required();
    flag(surface, "points", surface_points, "number of samples")->check(CLI::PositiveNumber);
    flag(surface, "half-extent", half_extent, "scale into this box half-size (0 keeps mesh units)")
        ->check(CLI::NonNegativeNumber);
    flag(surface, "out", surface_out, "output point cloud");
    add_seed(surface);

    // encode
    auto* encode = app.add_subcommand("encode", "Point clouds to condition vectors");
    std::vector<std::string> encode_in;
    std::string encode_out;
    std::string encoder = "density";
    BackendFlags encode_backend;
    flag(encode, "in", encode_in, "input point clouds (several give a CVBT batch)")->required();
    flag(encode, "encoder", encoder, "density, coords or external")
        ->check(CLI::IsMember({"density", "coords", "external"}));
    flag(encode, "out", encode_out, "CVEC or CVBT output")->required();
    encode_backend.add(encode, false);
    add_seed(encode);

    // pca-fit
    auto* fit = app.add_subcommand("pca-fit", "Principal subspace of a condition batch");
    std::vector<std::string> fit_in;
    std::string fit_out;
    std::size_t fit_dim = 100;
    flag(fit, "in", fit_in, "CVBT batch or CVEC files")->required();
    flag(fit, "dim", fit_dim, "maximum number of modes")->check(CLI::PositiveNumber);
    flag(fit, "out", fit_out, "PCAM output")->required();
    add_seed(fit);

    // pca-sample
    auto* sample = app.add_subcommand("pca-sample", "Random conditions from a PCA model");
    std::string sample_model;
    std::string sample_out;
    double beta = 1.0;
    std::size_t sample_count = 32;
    flag(sample, "model", sample_model, "PCAM model")->required();
    flag(sample, "beta", beta, "standard deviation in standardized coordinates")->check(CLI::NonNegativeNumber);
    flag(sample, "count", sample_count, "number of samples")->check(CLI::PositiveNumber);
    flag(sample, "out", sample_out, "CVBT output")->required();
    add_seed(sample);

    // pca-interp
    auto* interp = app.add_subcommand("pca-interp", "Interpolate two conditions inside a PCA subspace");
    std::string interp_model;
    std::string interp_a;
    std::string interp_b;
    std::string interp_out;
    double interp_t = 0.5;
    flag(interp, "model", interp_model, "PCAM model")->required();
    flag(interp, "a", interp_a, "CVEC at t = 0")->required();
    flag(interp, "b", interp_b, "CVEC at t = 1")->required();
    flag(interp, "t", interp_t, "interpolation parameter")->check(CLI::Range(0.0, 1.0));
    flag(interp, "out", interp_out, "CVEC output")->required();
    add_seed(interp);

    // decode
    auto* dec = app.add_subcommand("decode", "Conditions to meshes");
    std::string decode_in;
    std::string decode_out;
    BackendFlags decode_backend;
    flag(dec, "in", decode_in, "CVEC or CVBT input")->required();
    flag(dec, "out", decode_out, "OBJ output, or a directory for batches")->required();
    decode_backend.add(dec);
    add_seed(dec);

    // components
    auto* comps = app.add_subcommand("components", "Topology summary of OBJ meshes, one JSON line each");
    std::vector<std::string> comps_in;
    double quantum = 0.0;
    std::size_t min_faces = 0;
    flag(comps, "in", comps_in, "input OBJ meshes")->required();
    flag(comps, "quantum", quantum, "weld snapping quantum (0 = exact)")->check(CLI::NonNegativeNumber);
    flag(comps, "min-faces", min_faces, "ignore components with fewer faces");
    add_seed(comps);

    // synth-brackets
    auto* brackets = app.add_subcommand("synth-brackets", "Synthetic L-bracket family as OBJ files");
    std::size_t bracket_count = 381;
    std::string bracket_dir;
    flag(brackets, "count", bracket_count, "number of brackets")->check(CLI::PositiveNumber);
    flag(brackets, "out-dir", bracket_dir, "output directory")->required();
    add_seed(brackets);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (*sphere) {
            write_cloud(sphere_out, fibonacci_sphere(sphere_n));
        } else if (*perturb) {
            SeededRng rng(seed);
            PointCloud cloud = read_point_cloud_file(perturb_in);
            write_cloud(perturb_out, perturb_on_sphere(cloud, perturb_sigma, rng));
        } else if (*sweep) {
            sweep_cfg.seed = seed;
            sweep_cfg.decode_seed = decode_seed;
            sweep_cfg.grid = default_grid(sweep_backend.grid);
            sweep_cfg.backend = sweep_backend.config;
            if (!sweep_cfg.meshes_dir.empty()) {
                fs::create_directories(sweep_cfg.meshes_dir);
            }
            const SweepResult result = run_sweep(sweep_cfg);
            to_output(sweep_csv, [&](std::ostream& out) { write_sweep_csv(out, result); });
            if (!sweep_svg.empty()) {
                to_output(sweep_svg, [&](std::ostream& out) { write_sweep_svg(out, result); });
            }
            if (sweep_csv != "-") {
                std::cout << json{{"steps", result.records.size()},
                                  {"alpha_star", optional_json(result.alpha_star)},
                                  {"oracle_alpha_star", optional_json(result.oracle_alpha_star)}}
                                 .dump()
                          << '\n';
            }
        } else if (*surface) {
            SeededRng rng(seed);
            PointCloud cloud = sample_surface(read_obj_file(surface_in), surface_points, rng);
            if (half_extent > 0.0) {
                cloud = scale_to_box(cloud, half_extent);
            }
            write_cloud(surface_out, cloud);
        } else if (*encode) {
            BackendConfig cfg = encode_backend.config;
            cfg.id = encoder == "coords" ? "balls" : encoder;
            const GridSpec grid = default_grid(encode_backend.grid);
            std::vector<ConditionVector> batch;
            std::unique_ptr<GeneratorBackend> backend;
            for (const auto& path : encode_in) {
                const PointCloud cloud = read_point_cloud_file(path);
                if (!backend || (cfg.id == "balls" && backend->declared_cond_dim() != 3 * cloud.size())) {
                    backend = make_backend(cfg, grid, cloud.size());
                }
                batch.push_back(backend->encode(cloud));
            }
            write_conditions(encode_out, batch);
        } else if (*fit) {
            std::vector<ConditionVector> batch;
            for (const auto& path : fit_in) {
                auto part = read_conditions_file(path);
                batch.insert(batch.end(), part.begin(), part.end());
            }
            const PcaModel model = pca_fit(batch, fit_dim);
            to_output(fit_out, [&](std::ostream& out) { write_pcam(out, model); });
            std::vector<double> explained(model.explained.data(), model.explained.data() + model.explained.size());
            std::cout << json{{"k", model.k_train}, {"cond_dim", model.cond_dim()},
                              {"modes", model.mode_count()}, {"explained", explained}}
                             .dump()
                      << '\n';
        } else if (*sample) {
            std::ifstream in(sample_model, std::ios::binary);
            if (!in) {
                throw Error(ErrorCode::IoError, "cannot open " + sample_model);
            }
            const PcaModel model = read_pcam(in);
            SeededRng rng(seed);
            std::vector<ConditionVector> batch;
            for (std::size_t i = 0; i < sample_count; ++i) {
                batch.push_back(reconstruct(model, sample_coords(model, beta, rng)));
            }
            to_output(sample_out, [&](std::ostream& out) { write_cvbt(out, batch); });
        } else if (*interp) {
            std::ifstream in(interp_model, std::ios::binary);
            if (!in) {
                throw Error(ErrorCode::IoError, "cannot open " + interp_model);
            }
            const PcaModel model = read_pcam(in);
            const auto a = read_conditions_file(interp_a);
            const auto b = read_conditions_file(interp_b);
            if (a.size() != 1 || b.size() != 1) {
                throw Error(ErrorCode::InvalidArgument, "pca-interp: --a and --b must hold one condition each");
            }
            to_output(interp_out,
                      [&](std::ostream& out) { write_cvec(out, interpolate(model, a.front(), b.front(), interp_t)); });
        } else if (*dec) {
            const GridSpec grid = default_grid(decode_backend.grid);
            const std::string id = encoder_for(decode_backend.config.id);
            const auto batch = read_conditions_file(decode_in, id);
            // The balls condition encodes its own point count.
            const std::size_t points = batch.empty() ? 0 : batch.front().dim() / 3;
            auto backend = make_backend(decode_backend.config, grid, points);
            auto extract = [&](const ConditionVector& c) {
                return weld(marching_cubes(condsweep::decode(*backend, c, seed, grid)), 0.0);
            };
            if (batch.size() == 1) {
                write_obj_file(decode_out, extract(batch.front()));
            } else {
                fs::create_directories(decode_out);
                char name[32];
                for (std::size_t i = 0; i < batch.size(); ++i) {
                    std::snprintf(name, sizeof(name), "decoded_%04zu.obj", i);
                    write_obj_file(fs::path(decode_out) / name, extract(batch[i]));
                }
            }
        } else if (*comps) {
            for (const auto& path : comps_in) {
                const TriangleMesh mesh = weld(read_obj_file(path), quantum);
                json line = summary_json(summarize(mesh, min_faces));
                line["file"] = path;
                std::cout << line.dump() << '\n';
            }
        } else if (*brackets) {
            fs::create_directories(bracket_dir);
            std::ofstream params(fs::path(bracket_dir) / "params.csv");
            params << "file,hole_radius,fillet,thickness,seed\n";
            char name[32];
            char row[160];
            const auto family = bracket_family(bracket_count, seed);
            for (std::size_t i = 0; i < family.size(); ++i) {
                std::snprintf(name, sizeof(name), "bracket_%04zu.obj", i);
                write_obj_file(fs::path(bracket_dir) / name, synth_bracket(family[i]));
                std::snprintf(row, sizeof(row), "%s,%.17g,%.17g,%.17g,%llu\n", name, family[i].hole_radius,
                              family[i].fillet, family[i].thickness,
                              static_cast<unsigned long long>(family[i].seed));
                params << row;
            }
            if (!params) {
                throw Error(ErrorCode::IoError, "cannot write params.csv");
            }
        }
    } catch (const Error& e) {
        std::cerr << json{{"error", to_string(e.code())}, {"message", e.what()}}.dump() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "InternalError"}, {"message", e.what()}}.dump() << '\n';
        return 1;
    }
    return 0;
}
