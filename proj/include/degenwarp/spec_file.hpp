#pragma once

#include <optional>
#include <string>

#include "degenwarp/models.hpp"
#include "degenwarp/warp.hpp"

namespace degenwarp {

/// A metric loaded from a JSON spec document.
struct MetricSpec {
    MetricField metric;
    std::optional<WarpedProduct> warped;
    std::optional<ModelSpec> model;
};

/// Throws SpecError carrying a JSON pointer to the offending key.
MetricSpec load_spec_text(const std::string& text);
MetricSpec load_spec_file(const std::string& path);

} // namespace degenwarp
