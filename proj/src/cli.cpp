#include "mscope/cli.hpp"

#include "mscope/analysis.hpp"
#include "mscope/error.hpp"
#include "mscope/parallel.hpp"
#include "mscope/report.hpp"
#include "mscope/svg.hpp"
#include "mscope/synthetic.hpp"
#include "mscope/tensor_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <map>
#include <optional>
#include <ostream>

namespace mscope {

namespace {

using nlohmann::json;

struct Common {
    std::string format = "csv";
    std::string out;
    std::optional<int> threads;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    cmd->add_option("--out", c.out, "Write results to this file instead of stdout");
    cmd->add_option("--threads", c.threads,
                    "Worker threads (falls back to MANIFOLD_SCOPE_THREADS, then 1); output does not depend on it")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", c.seed, "Seed for every random draw")->capture_default_str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot open " + path + " for writing");
    f << text;
    if (!f) throw DataError("write failure on " + path);
}

void emit(const Common& c, std::ostream& out, const std::string& text) {
    if (c.out.empty())
        out << text;
    else
        write_text(c.out, text);
}

std::string render(const Common& c, const json& doc, const std::string& csv) {
    return c.format == "json" ? report::dump_json(doc) + "\n" : csv;
}

struct ProfileFlags {
    double discard = 0.1;
    std::optional<std::size_t> subsample_id;
    std::optional<std::size_t> subsample_mapc;
    std::optional<std::size_t> k;
};

void add_profile_flags(CLI::App* cmd, ProfileFlags& f) {
    cmd->add_option("--discard", f.discard, "Fraction of the largest TwoNN ratios dropped before the fit")
        ->check(CLI::Range(0.0, 0.4999999))
        ->capture_default_str();
    cmd->add_option("--subsample-id", f.subsample_id, "Points used for TwoNN; whole cloud if smaller");
    cmd->add_option("--subsample-mapc", f.subsample_mapc,
                    "Query points used for CAML; whole cloud if smaller");
    cmd->add_option("--k", f.k, "CAML neighborhood size (default max(2q, q+10), q = d + d(d+1)/2)");
}

ProfileParams profile_params(const ProfileFlags& f, const Common& c, bool keep_spectra) {
    ProfileParams p;
    p.discard_fraction = f.discard;
    p.id_subsample = f.subsample_id;
    p.mapc_subsample = f.subsample_mapc;
    p.k_neighbors = f.k;
    p.seed = c.seed;
    p.threads = resolve_threads(c.threads);
    p.keep_spectra = keep_spectra;
    return p;
}

std::string series_name(const RunManifest& run) {
    return run.model + " " + run.dataset + " h=" + std::to_string(run.horizon) + " seed=" + std::to_string(run.seed);
}

// Parses "kind=sphere,d=2,radius=1,kappa=3:1" into a spec seeded from the defaults.
SynthSpec parse_layer(const std::string& text, const SynthSpec& defaults) {
    SynthSpec spec = defaults;
    std::stringstream ss(text);
    std::string item;
    bool have_kind = false;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ArgumentError("layer spec item '" + item + "' is not key=value");
        const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
        try {
            if (key == "kind") {
                spec.kind = parse_synth_kind(value);
                have_kind = true;
            } else if (key == "d") {
                spec.d = std::stoul(value);
            } else if (key == "ambient") {
                spec.D = std::stoul(value);
            } else if (key == "n") {
                spec.n_points = std::stoul(value);
            } else if (key == "radius") {
                spec.radius = std::stod(value);
            } else if (key == "rho") {
                spec.rho = std::stod(value);
            } else if (key == "seed") {
                spec.seed = std::stoull(value);
            } else if (key == "kappa") {
                spec.kappa.clear();
                std::stringstream ks(value);
                std::string k;
                while (std::getline(ks, k, ':')) spec.kappa.push_back(std::stod(k));
            } else {
                throw ArgumentError("unknown layer spec key '" + key + "'");
            }
        } catch (const std::logic_error& e) {
            if (dynamic_cast<const ArgumentError*>(&e)) throw;
            throw ArgumentError("bad value in layer spec item '" + item + "'");
        }
    }
    if (!have_kind) throw ArgumentError("layer spec '" + text + "' needs kind=...");
    return spec;
}

LayerProfile read_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open profile " + path);
    try {
        return report::profile_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw DataError("profile " + path + " is not valid JSON: " + e.what());
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Intrinsic dimension and curvature profiling of point clouds", "manifold-scope"};
    app.require_subcommand(1, 1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    // id
    Common id_c;
    std::string id_input, id_method = "twonn";
    double id_discard = 0.1, id_cutoff = 0.05;
    std::optional<std::size_t> id_subsample;
    auto* id_cmd = app.add_subcommand("id", "Estimate the intrinsic dimension of one cloud");
    id_cmd->add_option("--input", id_input, "GATM or .npy point cloud")->required();
    id_cmd->add_option("--method", id_method, "Estimator")->check(CLI::IsMember({"twonn", "lpca"}))->capture_default_str();
    id_cmd->add_option("--discard", id_discard, "TwoNN: fraction of the largest ratios dropped before the fit")
        ->check(CLI::Range(0.0, 0.4999999))
        ->capture_default_str();
    id_cmd->add_option("--subsample", id_subsample, "TwoNN: number of points drawn without replacement");
    id_cmd->add_option("--variance-cutoff", id_cutoff, "LPCA: unexplained variance allowed")
        ->check(CLI::Range(1e-12, 0.999999))
        ->capture_default_str();
    add_common(id_cmd, id_c);

    // mapc
    Common mapc_c;
    std::string mapc_input, mapc_spectrum_out;
    std::optional<std::size_t> mapc_d, mapc_k, mapc_subsample;
    double mapc_discard = 0.1;
    auto* mapc_cmd = app.add_subcommand("mapc", "Estimate principal curvatures and MAPC of one cloud");
    mapc_cmd->add_option("--input", mapc_input, "GATM or .npy point cloud")->required();
    mapc_cmd->add_option("--d", mapc_d, "Intrinsic dimension (default: rounded TwoNN estimate)");
    mapc_cmd->add_option("--k", mapc_k, "Neighborhood size (default max(2q, q+10), q = d + d(d+1)/2)");
    mapc_cmd->add_option("--subsample", mapc_subsample, "Number of query points drawn without replacement");
    mapc_cmd->add_option("--discard", mapc_discard, "TwoNN discard fraction used when --d is absent")
        ->check(CLI::Range(0.0, 0.4999999))
        ->capture_default_str();
    mapc_cmd->add_option("--spectrum-out", mapc_spectrum_out,
                         "Write per-point curvatures as a GATM file (one row of d(D-d) values per point)");
    add_common(mapc_cmd, mapc_c);

    // profile
    Common prof_c;
    ProfileFlags prof_f;
    std::string prof_manifest, prof_chart, prof_spectra;
    auto* prof_cmd = app.add_subcommand("profile", "Per-layer ID and MAPC for one run manifest");
    prof_cmd->add_option("--manifest", prof_manifest, "Run manifest JSON")->required();
    add_profile_flags(prof_cmd, prof_f);
    prof_cmd->add_option("--chart", prof_chart, "Write an SVG chart of the profile");
    prof_cmd->add_option("--spectra-dir", prof_spectra, "Write each layer's curvature spectrum as GATM into this directory");
    add_common(prof_cmd, prof_c);

    // aggregate
    Common agg_c;
    std::vector<std::string> agg_profiles;
    std::string agg_chart;
    auto* agg_cmd = app.add_subcommand("aggregate", "Mean and population std of profiles across runs");
    agg_cmd->add_option("--profiles", agg_profiles, "Profile JSON files written by `profile --format json`")->required();
    agg_cmd->add_option("--chart", agg_chart, "Write an SVG chart, one series per horizon");
    add_common(agg_cmd, agg_c);

    // correlate
    Common cor_c;
    ProfileFlags cor_f;
    std::vector<std::string> cor_profiles, cor_manifests;
    auto* cor_cmd = app.add_subcommand("correlate", "Correlate final-layer MAPC with test MSE per dataset");
    auto* cor_p = cor_cmd->add_option("--profiles", cor_profiles, "Profile JSON files");
    auto* cor_m = cor_cmd->add_option("--manifests", cor_manifests, "Run manifests (profiles are computed)");
    cor_p->excludes(cor_m);
    add_profile_flags(cor_cmd, cor_f);
    add_common(cor_cmd, cor_c);

    // hist
    Common hist_c;
    std::string hist_input, hist_chart;
    std::size_t hist_bins = 50;
    std::vector<double> hist_range;
    bool hist_abs = false;
    auto* hist_cmd = app.add_subcommand("hist", "Histogram of a curvature spectrum");
    hist_cmd->add_option("--input", hist_input, "Spectrum GATM file (from `mapc --spectrum-out`)")->required();
    hist_cmd->add_option("--bins", hist_bins, "Number of equal-width bins")->check(CLI::PositiveNumber)->capture_default_str();
    hist_cmd->add_option("--range", hist_range, "lo,hi (values outside are clamped into the end bins)")
        ->delimiter(',')
        ->expected(2);
    hist_cmd->add_flag("--abs", hist_abs, "Histogram |kappa| instead of kappa");
    hist_cmd->add_option("--chart", hist_chart, "Write an SVG bar chart");
    add_common(hist_cmd, hist_c);

    // synth
    Common syn_c;
    SynthSpec syn;
    std::string syn_kind = "hypercube", syn_out, syn_out_dir, syn_dtype = "f64", syn_manifest;
    std::vector<double> syn_kappa;
    std::vector<std::string> syn_layers;
    auto* syn_cmd = app.add_subcommand("synth", "Sample manifolds with known dimension and curvature");
    syn_cmd->add_option("--kind", syn_kind, "hypercube | sphere | quadratic_graph | plane")
        ->check(CLI::IsMember({"hypercube", "sphere", "quadratic_graph", "plane"}))
        ->capture_default_str();
    syn_cmd->add_option("--d", syn.d, "Intrinsic dimension")->capture_default_str();
    syn_cmd->add_option("--ambient", syn.D, "Ambient dimension D")->capture_default_str();
    syn_cmd->add_option("--n", syn.n_points, "Number of points")->capture_default_str();
    syn_cmd->add_option("--radius", syn.radius, "Sphere radius")->capture_default_str();
    syn_cmd->add_option("--kappa", syn_kappa, "Quadratic graph curvatures, comma separated")->delimiter(',');
    syn_cmd->add_option("--rho", syn.rho, "Quadratic graph disc radius")->capture_default_str();
    syn_cmd->add_option("--dtype", syn_dtype, "Stored precision")->check(CLI::IsMember({"f32", "f64"}))->capture_default_str();
    auto* syn_out_opt = syn_cmd->add_option("--out", syn_out, "Output GATM file (single cloud)");
    syn_cmd->add_option("--manifest", syn_manifest, "Also write a one-layer manifest for --out");
    auto* syn_layer_opt = syn_cmd->add_option(
        "--layer", syn_layers,
        "Layer spec for a stack, e.g. kind=sphere,d=2,radius=1 (keys: kind d ambient n radius rho seed kappa=a:b)");
    auto* syn_dir_opt = syn_cmd->add_option("--out-dir", syn_out_dir, "Directory for a layer stack and its manifest.json");
    syn_layer_opt->needs(syn_dir_opt);
    syn_dir_opt->needs(syn_layer_opt);
    syn_out_opt->excludes(syn_dir_opt);
    syn_cmd->add_option("--seed", syn_c.seed, "Seed (stack layer i uses seed + i - 1 unless set)")->capture_default_str();

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (*id_cmd) {
            const PointCloud cloud = load_pointcloud(id_input);
            IdEstimate est;
            if (id_method == "lpca") {
                est = lpca_estimate(cloud, id_cutoff);
            } else {
                TwoNNParams p;
                p.discard_fraction = id_discard;
                p.subsample = id_subsample;
                p.seed = id_c.seed;
                p.threads = resolve_threads(id_c.threads);
                est = twonn_estimate(cloud, p);
            }
            emit(id_c, out, render(id_c, report::to_json(est), report::id_csv(est)));
        } else if (*mapc_cmd) {
            const PointCloud cloud = load_pointcloud(mapc_input);
            MapcParams p;
            p.threads = resolve_threads(mapc_c.threads);
            p.seed = mapc_c.seed;
            p.k_neighbors = mapc_k;
            p.subsample = mapc_subsample;
            std::optional<IdEstimate> id;
            if (mapc_d) {
                p.d = *mapc_d;
            } else {
                TwoNNParams tp;
                tp.discard_fraction = mapc_discard;
                tp.seed = mapc_c.seed;
                tp.threads = p.threads;
                id = twonn_estimate(cloud, tp);
                p.d = caml_dimension(id->d_hat, cloud.dim());
            }
            const auto [est, spectrum] = manifold_mapc(cloud, p);
            if (!mapc_spectrum_out.empty()) {
                RowMatrix m(static_cast<Eigen::Index>(spectrum.n_points()), static_cast<Eigen::Index>(spectrum.width()));
                std::copy(spectrum.values.begin(), spectrum.values.end(), m.data());
                save_pointcloud(PointCloud(std::move(m), "spectrum"), mapc_spectrum_out, DType::F64);
            }
            json doc = report::to_json(est);
            doc["d"] = p.d;
            doc["D"] = cloud.dim();
            if (id) doc["id"] = report::to_json(*id);
            emit(mapc_c, out, render(mapc_c, doc, report::mapc_csv(est, p.d, cloud.dim())));
        } else if (*prof_cmd) {
            const auto manifest = load_manifest(prof_manifest);
            const auto profile = assemble_profile(manifest, profile_params(prof_f, prof_c, !prof_spectra.empty()));
            if (!prof_spectra.empty()) {
                std::filesystem::create_directories(prof_spectra);
                for (const auto& e : profile.entries) {
                    if (!e.spectrum) continue;
                    RowMatrix m(static_cast<Eigen::Index>(e.spectrum->n_points()),
                                static_cast<Eigen::Index>(e.spectrum->width()));
                    std::copy(e.spectrum->values.begin(), e.spectrum->values.end(), m.data());
                    save_pointcloud(PointCloud(std::move(m), e.name),
                                    std::filesystem::path(prof_spectra) /
                                        ("layer_" + std::to_string(e.index) + "_spectrum.gatm"),
                                    DType::F64);
                }
            }
            if (!prof_chart.empty()) {
                svg::Series id_s{series_name(profile.run), {}, {}}, mapc_s{series_name(profile.run), {}, {}};
                for (const auto& e : profile.entries) {
                    if (!e.ok()) continue;
                    id_s.x.push_back(static_cast<double>(e.index));
                    id_s.y.push_back(e.id->d_hat);
                    mapc_s.x.push_back(static_cast<double>(e.index));
                    mapc_s.y.push_back(e.mapc->mapc);
                }
                write_text(prof_chart, svg::profile_chart(profile.run.model + " / " + profile.run.dataset, {id_s}, {mapc_s}));
            }
            for (const auto& e : profile.entries)
                if (!e.ok()) err << "warning: layer " << e.index << " (" << e.name << ") failed: " << e.error << "\n";
            emit(prof_c, out, render(prof_c, report::to_json(profile), report::profile_csv(profile)));
        } else if (*agg_cmd) {
            std::vector<LayerProfile> profiles;
            for (const auto& p : agg_profiles) profiles.push_back(read_profile(p));
            const auto agg = aggregate_runs(profiles);
            if (!agg_chart.empty()) {
                std::map<std::size_t, std::vector<LayerProfile>> by_horizon;
                for (const auto& p : profiles) by_horizon[p.run.horizon].push_back(p);
                std::vector<svg::Series> ids, mapcs;
                for (const auto& [h, group] : by_horizon) {
                    const auto g = aggregate_runs(group);
                    svg::Series is{"h=" + std::to_string(h), {}, {}}, ms{"h=" + std::to_string(h), {}, {}};
                    for (const auto& l : g.per_layer) {
                        is.x.push_back(static_cast<double>(l.index));
                        is.y.push_back(l.id_mean);
                        ms.x.push_back(static_cast<double>(l.index));
                        ms.y.push_back(l.mapc_mean);
                    }
                    ids.push_back(std::move(is));
                    mapcs.push_back(std::move(ms));
                }
                write_text(agg_chart, svg::profile_chart("aggregate of " + std::to_string(agg.n_runs) + " runs", ids, mapcs));
            }
            emit(agg_c, out, render(agg_c, report::to_json(agg), report::aggregate_csv(agg)));
        } else if (*cor_cmd) {
            std::vector<LayerProfile> runs;
            if (!cor_profiles.empty()) {
                for (const auto& p : cor_profiles) runs.push_back(read_profile(p));
            } else if (!cor_manifests.empty()) {
                const auto params = profile_params(cor_f, cor_c, false);
                for (const auto& m : cor_manifests) runs.push_back(assemble_profile(load_manifest(m), params));
            } else {
                throw ArgumentError("correlate needs --profiles or --manifests");
            }
            const auto rows = mapc_mse_correlation(runs);
            emit(cor_c, out, render(cor_c, report::to_json(rows), report::correlation_csv(rows)));
        } else if (*hist_cmd) {
            const PointCloud spectrum = load_pointcloud(hist_input);
            std::vector<double> values(spectrum.data().data(), spectrum.data().data() + spectrum.data().size());
            if (hist_abs)
                for (double& v : values) v = std::abs(v);
            std::optional<std::pair<double, double>> range;
            if (!hist_range.empty()) range = std::make_pair(hist_range[0], hist_range[1]);
            const auto h = curvature_histogram(values, hist_bins, range);
            if (!hist_chart.empty()) write_text(hist_chart, svg::histogram_chart(spectrum.label(), h));
            emit(hist_c, out, render(hist_c, report::to_json(h), report::histogram_csv(h)));
        } else if (*syn_cmd) {
            syn.kind = parse_synth_kind(syn_kind);
            syn.kappa = syn_kappa;
            syn.seed = syn_c.seed;
            const DType dtype = parse_dtype(syn_dtype);
            if (!syn_layers.empty()) {
                std::vector<SynthSpec> specs;
                for (std::size_t i = 0; i < syn_layers.size(); ++i) {
                    SynthSpec defaults = syn;
                    defaults.seed = syn.seed + i;
                    specs.push_back(parse_layer(syn_layers[i], defaults));
                }
                out << write_layer_stack(layer_stack(specs), syn_out_dir, dtype).string() << "\n";
            } else {
                if (syn_out.empty()) throw ArgumentError("synth needs --out or --layer/--out-dir");
                const auto cloud = sample(syn).cloud;
                save_pointcloud(cloud, syn_out, dtype);
                if (!syn_manifest.empty()) {
                    RunManifest m;
                    m.model = "synthetic";
                    m.dataset = "synthetic";
                    m.seed = static_cast<std::int64_t>(syn.seed);
                    m.layers.push_back({1, std::string(to_string(syn.kind)),
                                        std::filesystem::absolute(syn_out)});
                    save_manifest(m, syn_manifest);
                }
                out << syn_out << "\n";
            }
        }
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitOk;
}

} // namespace mscope
