#include "mscope/report.hpp"

#include "mscope/error.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace mscope::report {

using nlohmann::json;

std::string number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void emit(const json& j, int indent, int depth, std::string& out) {
    const std::string pad = indent >= 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string close_pad = indent >= 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const char* nl = indent >= 0 ? "\n" : "";
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{";
        out += nl;
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) {
                out += ",";
                out += nl;
            }
            first = false;
            out += pad + json(it.key()).dump() + (indent >= 0 ? ": " : ":");
            emit(it.value(), indent, depth + 1, out);
        }
        out += nl + close_pad + "}";
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += "[";
        out += nl;
        bool first = true;
        for (const auto& v : j) {
            if (!first) {
                out += ",";
                out += nl;
            }
            first = false;
            out += pad;
            emit(v, indent, depth + 1, out);
        }
        out += nl + close_pad + "]";
        return;
    }
    case json::value_t::number_float: {
        const double v = j.get<double>();
        // JSON has no NaN/Inf literals.
        out += std::isfinite(v) ? number(v) : "null";
        return;
    }
    default:
        out += j.dump();
    }
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

} // namespace

std::string dump_json(const json& doc, int indent) {
    std::string out;
    emit(doc, indent, 0, out);
    return out;
}

json to_json(const IdEstimate& est) {
    return {{"method", std::string(to_string(est.method))},
            {"d_hat", est.d_hat},
            {"n_used", est.n_used},
            {"n_discarded", est.n_discarded},
            {"fit_rmse", est.fit_rmse}};
}

json to_json(const MapcEstimate& est, bool per_point) {
    json j = {{"mapc", est.mapc},
              {"spanned_mapc", est.spanned_mapc},
              {"n_points_used", est.n_points_used},
              {"n_points_skipped", est.n_points_skipped}};
    if (per_point) j["per_point_mapc"] = est.per_point_mapc;
    return j;
}

json to_json(const RunManifest& run) {
    json j = {{"model", run.model},
              {"dataset", run.dataset},
              {"lookback", run.lookback},
              {"horizon", run.horizon},
              {"seed", run.seed}};
    j["epoch"] = run.epoch ? json(*run.epoch) : json(nullptr);
    j["test_mse"] = optional_number(run.test_mse);
    return j;
}

json to_json(const LayerProfile& profile) {
    json layers = json::array();
    for (const auto& e : profile.entries) {
        json l = {{"index", e.index}, {"name", e.name}, {"status", e.ok() ? "ok" : "failed"}};
        l["n_points"] = e.n_points;
        l["ambient_dim"] = e.ambient_dim;
        l["id"] = e.id ? to_json(*e.id) : json(nullptr);
        l["caml_d"] = e.caml_d;
        l["mapc"] = e.mapc ? to_json(*e.mapc) : json(nullptr);
        if (!e.ok()) l["error"] = e.error;
        layers.push_back(std::move(l));
    }
    return {{"run", to_json(profile.run)}, {"layers", std::move(layers)}};
}

json to_json(const AggregateProfile& agg) {
    json layers = json::array();
    for (const auto& l : agg.per_layer)
        layers.push_back({{"index", l.index},
                          {"id", l.id_mean},
                          {"id_std", l.id_std},
                          {"mapc", l.mapc_mean},
                          {"mapc_std", l.mapc_std}});
    return {{"n_runs", agg.n_runs}, {"layers", std::move(layers)}};
}

json to_json(const std::vector<CorrelationRow>& rows) {
    json out = json::array();
    for (const auto& r : rows)
        out.push_back({{"dataset", r.dataset},
                       {"n_runs", r.n_runs},
                       {"r", r.r},
                       {"slope", r.slope},
                       {"intercept", r.intercept}});
    return out;
}

json to_json(const Histogram& h) {
    return {{"bin_edges", h.bin_edges}, {"counts", h.counts}, {"total", h.total}};
}

LayerProfile profile_from_json(const json& doc) {
    try {
        LayerProfile p;
        const auto& run = doc.at("run");
        p.run.model = run.at("model").get<std::string>();
        p.run.dataset = run.at("dataset").get<std::string>();
        p.run.lookback = run.at("lookback").get<std::size_t>();
        p.run.horizon = run.at("horizon").get<std::size_t>();
        p.run.seed = run.at("seed").get<std::int64_t>();
        if (run.contains("epoch") && !run["epoch"].is_null()) p.run.epoch = run["epoch"].get<std::size_t>();
        if (run.contains("test_mse") && !run["test_mse"].is_null()) p.run.test_mse = run["test_mse"].get<double>();
        for (const auto& l : doc.at("layers")) {
            LayerResult e;
            e.index = l.at("index").get<std::size_t>();
            e.name = l.at("name").get<std::string>();
            e.n_points = l.value("n_points", std::size_t{0});
            e.ambient_dim = l.value("ambient_dim", std::size_t{0});
            e.caml_d = l.value("caml_d", std::size_t{0});
            if (l.contains("id") && !l["id"].is_null()) {
                const auto& id = l["id"];
                IdEstimate est;
                est.method = id.at("method").get<std::string>() == "lpca" ? IdMethod::Lpca : IdMethod::TwoNN;
                est.d_hat = id.at("d_hat").get<double>();
                est.n_used = id.at("n_used").get<std::size_t>();
                est.n_discarded = id.at("n_discarded").get<std::size_t>();
                est.fit_rmse = id.at("fit_rmse").get<double>();
                e.id = est;
            }
            if (l.contains("mapc") && !l["mapc"].is_null()) {
                const auto& m = l["mapc"];
                MapcEstimate est;
                est.mapc = m.at("mapc").get<double>();
                est.spanned_mapc = m.value("spanned_mapc", 0.0);
                est.n_points_used = m.at("n_points_used").get<std::size_t>();
                est.n_points_skipped = m.at("n_points_skipped").get<std::size_t>();
                e.mapc = std::move(est);
            }
            e.error = l.value("error", std::string{});
            p.entries.push_back(std::move(e));
        }
        return p;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed profile JSON: ") + e.what());
    }
}

std::string id_csv(const IdEstimate& est) {
    return "method,d_hat,n_used,n_discarded,fit_rmse\n" + std::string(to_string(est.method)) + "," +
           number(est.d_hat) + "," + std::to_string(est.n_used) + "," + std::to_string(est.n_discarded) + "," +
           number(est.fit_rmse) + "\n";
}

std::string mapc_csv(const MapcEstimate& est, std::size_t d, std::size_t ambient_dim) {
    return "d,D,mapc,spanned_mapc,n_points_used,n_points_skipped\n" + std::to_string(d) + "," +
           std::to_string(ambient_dim) + "," + number(est.mapc) + "," + number(est.spanned_mapc) + "," +
           std::to_string(est.n_points_used) + "," + std::to_string(est.n_points_skipped) + "\n";
}

std::string profile_csv(const LayerProfile& profile) {
    std::string out = "index,id,id_std,mapc,mapc_std\n";
    for (const auto& e : profile.entries) {
        const double nan = std::nan("");
        out += std::to_string(e.index) + "," + number(e.id ? e.id->d_hat : nan) + "," + number(e.id ? 0.0 : nan) +
               "," + number(e.mapc ? e.mapc->mapc : nan) + "," + number(e.mapc ? 0.0 : nan) + "\n";
    }
    return out;
}

std::string aggregate_csv(const AggregateProfile& agg) {
    std::string out = "index,id,id_std,mapc,mapc_std\n";
    for (const auto& l : agg.per_layer)
        out += std::to_string(l.index) + "," + number(l.id_mean) + "," + number(l.id_std) + "," +
               number(l.mapc_mean) + "," + number(l.mapc_std) + "\n";
    return out;
}

std::string correlation_csv(const std::vector<CorrelationRow>& rows) {
    std::string out = "dataset,n_runs,r,slope,intercept\n";
    for (const auto& r : rows)
        out += r.dataset + "," + std::to_string(r.n_runs) + "," + number(r.r) + "," + number(r.slope) + "," +
               number(r.intercept) + "\n";
    return out;
}

std::string histogram_csv(const Histogram& h) {
    std::string out = "bin,lo,hi,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        out += std::to_string(i) + "," + number(h.bin_edges[i]) + "," + number(h.bin_edges[i + 1]) + "," +
               std::to_string(h.counts[i]) + "\n";
    return out;
}

} // namespace mscope::report
