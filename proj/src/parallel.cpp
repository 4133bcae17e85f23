#include "mscope/parallel.hpp"

#include "mscope/error.hpp"

#include <cstdlib>
#include <string>

namespace mscope {

int resolve_threads(std::optional<int> requested) {
    if (requested) {
        if (*requested < 1) throw ArgumentError("thread count must be at least 1");
        return *requested;
    }
    if (const char* env = std::getenv("MANIFOLD_SCOPE_THREADS"); env && *env) {
        char* end = nullptr;
        const long value = std::strtol(env, &end, 10);
        if (*end != '\0' || value < 1)
            throw ArgumentError(std::string("invalid MANIFOLD_SCOPE_THREADS value '") + env + "'");
        return static_cast<int>(value);
    }
    return 1;
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

} // namespace mscope
