#include "mscope/analysis.hpp"

#include "mscope/error.hpp"
#include "mscope/parallel.hpp"
#include "mscope/tensor_io.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace mscope {

LayerProfile assemble_profile(const RunManifest& manifest, const ProfileParams& params) {
    LayerProfile profile;
    profile.run = manifest;
    std::size_t loaded = 0;
    for (const auto& layer : manifest.layers) {
        LayerResult entry;
        entry.index = layer.index;
        entry.name = layer.name;
        try {
            const PointCloud cloud = load_pointcloud(layer.file);
            ++loaded;
            entry.n_points = cloud.size();
            entry.ambient_dim = cloud.dim();

            TwoNNParams id_params;
            id_params.discard_fraction = params.discard_fraction;
            if (params.id_subsample && *params.id_subsample < cloud.size()) id_params.subsample = params.id_subsample;
            id_params.seed = params.seed;
            id_params.threads = params.threads;
            entry.id = twonn_estimate(cloud, id_params);

            entry.caml_d = caml_dimension(entry.id->d_hat, cloud.dim());
            MapcParams mapc_params;
            mapc_params.d = entry.caml_d;
            mapc_params.k_neighbors = params.k_neighbors;
            if (params.mapc_subsample && *params.mapc_subsample < cloud.size())
                mapc_params.subsample = params.mapc_subsample;
            mapc_params.seed = params.seed;
            mapc_params.threads = params.threads;
            auto [est, spectrum] = manifold_mapc(cloud, mapc_params);
            entry.mapc = std::move(est);
            if (params.keep_spectra) entry.spectrum = std::move(spectrum);
        } catch (const std::exception& e) {
            entry.error = e.what();
        }
        profile.entries.push_back(std::move(entry));
    }
    if (loaded == 0) throw DataError("no layer of the manifest could be loaded");
    return profile;
}

namespace {

// Mean and population standard deviation.
std::pair<double, double> mean_std(const std::vector<double>& v) {
    const double mean = pairwise_mean(v);
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
    return {mean, std::sqrt(pairwise_mean(sq))};
}

} // namespace

AggregateProfile aggregate_runs(std::span<const LayerProfile> profiles) {
    if (profiles.empty()) throw ArgumentError("aggregate needs at least one profile");
    auto indices = [](const LayerProfile& p) {
        std::vector<std::size_t> out;
        for (const auto& e : p.entries) out.push_back(e.index);
        return out;
    };
    const auto reference = indices(profiles.front());
    for (const auto& p : profiles)
        if (indices(p) != reference) throw DataError("profiles have mismatched layer sets");

    AggregateProfile agg;
    agg.n_runs = profiles.size();
    for (std::size_t l = 0; l < reference.size(); ++l) {
        std::vector<double> ids, mapcs;
        for (const auto& p : profiles) {
            const auto& e = p.entries[l];
            if (!e.ok())
                throw DataError("layer " + std::to_string(e.index) + " failed in run (" + p.run.model + ", " +
                                p.run.dataset + ", seed " + std::to_string(p.run.seed) + "): " + e.error);
            ids.push_back(e.id->d_hat);
            mapcs.push_back(e.mapc->mapc);
        }
        AggregateLayer row;
        row.index = reference[l];
        std::tie(row.id_mean, row.id_std) = mean_std(ids);
        std::tie(row.mapc_mean, row.mapc_std) = mean_std(mapcs);
        agg.per_layer.push_back(row);
    }
    return agg;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ArgumentError("pearson needs equally long inputs");
    if (x.size() < 2) throw ArgumentError("pearson needs at least 2 pairs");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw DataError("zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ArgumentError("linear fit needs at least 2 pairs");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) throw DataError("zero variance");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

std::vector<CorrelationRow> mapc_mse_correlation(std::span<const LayerProfile> runs) {
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const auto& run : runs) {
        if (!run.run.test_mse)
            throw DataError("run (" + run.run.model + ", " + run.run.dataset + ", seed " +
                            std::to_string(run.run.seed) + ") has no test_mse");
        if (run.entries.empty() || !run.entries.back().ok())
            throw DataError("final layer missing or failed for dataset " + run.run.dataset);
        auto& g = groups[run.run.dataset];
        g.first.push_back(run.entries.back().mapc->mapc);
        g.second.push_back(*run.run.test_mse);
    }
    std::vector<CorrelationRow> rows;
    for (const auto& [dataset, xy] : groups) {
        if (xy.first.size() < 2) throw DataError("dataset '" + dataset + "' has fewer than 2 runs");
        CorrelationRow row;
        row.dataset = dataset;
        row.n_runs = xy.first.size();
        row.r = pearson(xy.first, xy.second);
        const auto fit = linear_fit(xy.first, xy.second);
        row.slope = fit.slope;
        row.intercept = fit.intercept;
        rows.push_back(std::move(row));
    }
    return rows;
}

Histogram curvature_histogram(std::span<const double> values, std::size_t n_bins,
                              std::optional<std::pair<double, double>> range) {
    if (n_bins < 1) throw ArgumentError("histogram needs at least one bin");
    if (values.empty()) throw DataError("empty spectrum");

    double lo, hi;
    if (range) {
        std::tie(lo, hi) = *range;
        if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) throw ArgumentError("histogram range must satisfy lo < hi");
    } else {
        const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
        lo = *mn;
        hi = *mx;
        if (lo == hi) {
            const double eps = std::max(1e-9, 1e-9 * std::abs(lo));
            lo -= eps;
            hi += eps;
        }
    }

    Histogram h;
    h.bin_edges.resize(n_bins + 1);
    const double width = (hi - lo) / static_cast<double>(n_bins);
    for (std::size_t i = 0; i < n_bins; ++i) h.bin_edges[i] = lo + width * static_cast<double>(i);
    h.bin_edges[n_bins] = hi;
    h.counts.assign(n_bins, 0);

    const auto last = static_cast<std::ptrdiff_t>(n_bins) - 1;
    for (double v : values) {
        if (!std::isfinite(v)) throw DataError("non-finite value in spectrum");
        const double pos = std::clamp(std::ceil((v - lo) / width) - 1.0, 0.0, static_cast<double>(last));
        auto bin = static_cast<std::ptrdiff_t>(pos);
        while (bin > 0 && v <= h.bin_edges[static_cast<std::size_t>(bin)]) --bin;
        while (bin < last && v > h.bin_edges[static_cast<std::size_t>(bin) + 1]) ++bin;
        ++h.counts[static_cast<std::size_t>(bin)];
    }
    h.total = values.size();
    return h;
}

} // namespace mscope
