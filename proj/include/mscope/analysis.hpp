#pragma once

#include "mscope/curvature.hpp"
#include "mscope/id_estimators.hpp"
#include "mscope/manifest.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mscope {

/// One layer of a run. A failed layer keeps its slot with `error` set.
struct LayerResult {
    std::size_t index = 0;
    std::string name;
    std::size_t n_points = 0;
    std::size_t ambient_dim = 0;
    std::optional<IdEstimate> id;
    std::size_t caml_d = 0;
    std::optional<MapcEstimate> mapc;
    std::optional<CurvatureSpectrum> spectrum;
    std::string error;

    bool ok() const { return id.has_value() && mapc.has_value(); }
};

struct LayerProfile {
    RunManifest run;
    std::vector<LayerResult> entries;
};

struct ProfileParams {
    double discard_fraction = 0.1;
    /// Caps on the point counts; clouds smaller than the cap are used whole.
    std::optional<std::size_t> id_subsample;
    std::optional<std::size_t> mapc_subsample;
    std::optional<std::size_t> k_neighbors;
    std::uint64_t seed = 0;
    int threads = 1;
    bool keep_spectra = false;
};

/// TwoNN then CAML (with the rounded TwoNN dimension) for every manifest layer, in order.
LayerProfile assemble_profile(const RunManifest& manifest, const ProfileParams& params = {});

struct AggregateLayer {
    std::size_t index = 0;
    double id_mean = 0.0;
    double id_std = 0.0;
    double mapc_mean = 0.0;
    double mapc_std = 0.0;
};

struct AggregateProfile {
    std::vector<AggregateLayer> per_layer;
    std::size_t n_runs = 0;
};

/// Per-layer mean and population standard deviation across runs.
AggregateProfile aggregate_runs(std::span<const LayerProfile> profiles);

/// Sample Pearson correlation coefficient.
double pearson(std::span<const double> x, std::span<const double> y);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

struct CorrelationRow {
    std::string dataset;
    std::size_t n_runs = 0;
    double r = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
};

/// Correlates final-layer MAPC (x) with test MSE (y) per dataset, pooling
/// horizons and seeds. Rows are ordered by dataset name.
std::vector<CorrelationRow> mapc_mse_correlation(std::span<const LayerProfile> runs);

/// Equal-width bins; bin i covers (edge_i, edge_{i+1}] and the first bin also holds its lower edge.
struct Histogram {
    std::vector<double> bin_edges;
    std::vector<std::size_t> counts;
    std::size_t total = 0;
};

/// With an explicit range, values outside it are clamped into the end bins.
/// Without one the observed range is used, widened when degenerate.
Histogram curvature_histogram(std::span<const double> values, std::size_t n_bins,
                              std::optional<std::pair<double, double>> range = std::nullopt);

inline Histogram curvature_histogram(const CurvatureSpectrum& spectrum, std::size_t n_bins,
                                     std::optional<std::pair<double, double>> range = std::nullopt) {
    return curvature_histogram(std::span<const double>(spectrum.values), n_bins, range);
}

} // namespace mscope
