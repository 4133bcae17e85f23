#pragma once

#include "mscope/analysis.hpp"

#include <string>
#include <vector>

namespace mscope::svg {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

/// Single-panel line chart with axis ticks and a legend.
std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<Series>& series);

/// ID (top) and MAPC (bottom) against layer index, one series per run group.
std::string profile_chart(const std::string& title, const std::vector<Series>& id_series,
                          const std::vector<Series>& mapc_series);

std::string histogram_chart(const std::string& title, const Histogram& h);

} // namespace mscope::svg
