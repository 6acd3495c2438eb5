// SPDX-License-Identifier: MIT
#include "gudr/builtin_models.hpp"

#include "gudr/errors.hpp"

namespace gudr {

bool is_builtin_model(std::string_view name) noexcept { return name == "y1" || name == "y2" || name == "y3"; }

BuiltinModel builtin_model(std::string_view name, std::optional<std::size_t> dim, double sigma) {
    if (name == "y1" || name == "y2") {
        const bool first = name == "y1";
        const std::size_t d = first ? 2 : 3;
        if (dim && *dim != d) {
            throw DimensionError(std::string(name) + " has fixed dimension " + std::to_string(d));
        }
        std::string expr = first ? "1/(1 + x1^4 + 2*x2^2 + x2^4)" : "exp(1 + 0.5*x1^2 + 0.5*x2^2 + 0.5*x3^2)";
        ModelGraph g = parse_model(expr, d);
        InputSpace in = InputSpace::iid(Distribution::normal(first ? 2.0 : 3.0, sigma), d);
        return {std::string(name), std::move(expr), std::move(g), std::move(in)};
    }
    if (name == "y3") {
        if (!dim || *dim == 0) throw DimensionError("y3 requires a dimension >= 1");
        std::string expr = "exp(1";
        for (std::size_t i = 1; i <= *dim; ++i) expr += " + 0.5*x" + std::to_string(i) + "^2";
        expr += ")";
        ModelGraph g = parse_model(expr, *dim);
        InputSpace in = InputSpace::iid(Distribution::normal(3.0, 1.0), *dim);
        return {"y3", std::move(expr), std::move(g), std::move(in)};
    }
    throw UnknownModel(std::string(name));
}

}  // namespace gudr
