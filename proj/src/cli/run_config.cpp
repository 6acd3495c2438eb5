// SPDX-License-Identifier: MIT
#include "gudr/builtin_models.hpp"
#include "gudr/cli.hpp"
#include "gudr/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace gudr::cli {
namespace {

using nlohmann::json;

template <typename T>
T get_field(const json& obj, const char* field) {
    try {
        return obj.at(field).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(field, std::string("invalid value (") + e.what() + ")");
    }
}

std::size_t get_count(const json& obj, const char* field) {
    const json& v = obj.at(field);
    if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(field, "expected a non-negative integer");
    return v.get<std::size_t>();
}

json settings_json(const MomentReport& r) {
    json s = json::object();
    if (r.settings.k) s["k"] = *r.settings.k;
    if (r.settings.n) s["n"] = *r.settings.n;
    if (r.settings.seed) s["seed"] = *r.settings.seed;
    s["max_order"] = r.settings.max_order;
    if (r.settings.taylor_order != 0) s["taylor_order"] = r.settings.taylor_order;
    return s;
}

}  // namespace

RunConfig parse_config_json(const std::string& text) {
    json obj;
    try {
        obj = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("not valid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ConfigError("config", "expected a JSON object");

    static const char* const known[] = {"model", "expr", "dim", "inputs", "method", "k", "n",
                                        "seed", "max_order", "sigma", "output", "format"};
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* name : known) ok = ok || item.key() == name;
        if (!ok) throw ConfigError(item.key(), "unknown field");
    }

    RunConfig c;
    if (obj.contains("model") && obj.contains("expr")) throw ConfigError("model", "give either model or expr, not both");
    if (obj.contains("model")) c.model = get_field<std::string>(obj, "model");
    if (obj.contains("expr")) c.model = get_field<std::string>(obj, "expr");
    if (obj.contains("dim")) c.dim = get_count(obj, "dim");
    if (obj.contains("inputs")) {
        const json& v = obj.at("inputs");
        if (v.is_string()) {
            c.inputs = v.get<std::string>();
        } else if (v.is_array()) {
            std::string joined;
            for (const json& item : v) {
                if (!item.is_string()) throw ConfigError("inputs", "expected distribution literals");
                if (!joined.empty()) joined += ",";
                joined += item.get<std::string>();
            }
            c.inputs = joined;
        } else {
            throw ConfigError("inputs", "expected a string or an array of strings");
        }
    }
    if (obj.contains("method")) c.method = get_field<std::string>(obj, "method");
    if (obj.contains("k")) c.k = get_count(obj, "k");
    if (obj.contains("n")) c.n = get_count(obj, "n");
    if (obj.contains("seed")) c.seed = get_field<std::uint64_t>(obj, "seed");
    if (obj.contains("max_order")) c.max_order = get_field<int>(obj, "max_order");
    if (obj.contains("sigma")) c.sigma = get_field<double>(obj, "sigma");
    if (obj.contains("output")) c.output = get_field<std::string>(obj, "output");
    if (obj.contains("format")) c.format = get_field<std::string>(obj, "format");
    return c;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_json(text.str());
}

ResolvedModel resolve_model(const RunConfig& config) {
    if (config.model.empty()) throw ConfigError("model", "a built-in model name or an expression is required");

    std::optional<InputSpace> inputs;
    if (config.inputs) {
        try {
            inputs = InputSpace::parse(*config.inputs);
        } catch (const InvalidArgument& e) {
            throw ConfigError("inputs", e.what());
        }
    }

    if (is_builtin_model(config.model)) {
        const double sigma = config.sigma.value_or(kDefaultSigma);
        if (!(sigma > 0.0)) throw ConfigError("sigma", "must be positive");
        if (config.model != "y3" && config.dim && *config.dim != (config.model == "y1" ? 2u : 3u)) {
            throw ConfigError("dim", "model " + config.model + " has a fixed dimension");
        }
        if (config.model == "y3" && !config.dim) throw ConfigError("dim", "model y3 needs dim");
        if (config.model == "y3" && config.dim == 0u) throw ConfigError("dim", "must be >= 1");
        BuiltinModel m = builtin_model(config.model, config.dim, sigma);
        if (inputs) {
            if (inputs->dim() != m.inputs.dim()) {
                throw ConfigError("inputs", "expected " + std::to_string(m.inputs.dim()) + " distributions, got " +
                                                std::to_string(inputs->dim()));
            }
            m.inputs = *inputs;
        }
        return ResolvedModel{m.name, m.expression, std::move(m.graph), std::move(m.inputs)};
    }

    if (config.sigma) throw ConfigError("sigma", "only applies to the built-in models");
    if (config.dim == 0u) throw ConfigError("dim", "must be >= 1");
    if (!inputs) throw ConfigError("inputs", "expression models need an input list");
    if (config.dim && inputs->dim() != *config.dim) {
        throw ConfigError("inputs", "expected " + std::to_string(*config.dim) + " distributions, got " +
                                        std::to_string(inputs->dim()));
    }
    ModelGraph graph = parse_model(config.model, inputs->dim());
    return ResolvedModel{"expr", config.model, std::move(graph), std::move(*inputs)};
}

MomentReport run_estimate(const RunConfig& config, const ResolvedModel& model) {
    Method method;
    try {
        method = parse_method(config.method);
    } catch (const InvalidArgument& e) {
        throw ConfigError("method", e.what());
    }
    if (config.max_order < 2 || config.max_order > 8) throw ConfigError("max_order", "must be between 2 and 8");
    if (config.format != "json" && config.format != "csv") throw ConfigError("format", "expected json or csv");

    switch (method) {
        case Method::Udr:
        case Method::Gudr:
        case Method::FullGrid:
            if (!config.k) throw ConfigError("k", "required for method " + config.method);
            if (*config.k < 1 || *config.k > kMaxQuadraturePoints) {
                throw ConfigError("k", "must be between 1 and " + std::to_string(kMaxQuadraturePoints));
            }
            return run_method(method, model.graph, model.inputs, *config.k, 0, config.max_order);
        case Method::MonteCarlo:
            if (!config.n) throw ConfigError("n", "required for method mc");
            if (!config.seed) throw ConfigError("seed", "required for method mc");
            if (*config.n < 2) throw ConfigError("n", "must be >= 2");
            return run_method(method, model.graph, model.inputs, *config.n, *config.seed, config.max_order);
        case Method::Sosm:
        case Method::Tosm:
            return run_method(method, model.graph, model.inputs, 0, 0, config.max_order);
    }
    throw ConfigError("method", "unsupported");
}

std::string report_to_json(const MomentReport& r, const ResolvedModel& model, const RunConfig& config) {
    json j;
    j["method"] = method_name(r.method);
    j["model"] = {{"name", model.label}, {"expression", model.expression}, {"dim", model.inputs.dim()}};
    json inputs = json::array();
    for (const Distribution& d : model.inputs.dims()) inputs.push_back(d.to_string());
    j["inputs"] = inputs;
    j["settings"] = settings_json(r);
    j["mean"] = r.mean;
    j["std"] = r.std;
    json central = json::object();
    for (const auto& [order, value] : r.central_moments) central[std::to_string(order)] = value;
    j["central_moments"] = central;
    j["ledger"] = {{"function_evals", r.cost.function_evals},
                   {"gradient_evals", r.cost.gradient_evals},
                   {"hessian_evals", r.cost.hessian_evals},
                   {"third_order_evals", r.cost.third_order_evals},
                   {"ad_sweeps", r.cost.ad_sweeps},
                   {"dim", r.cost.dim},
                   {"paper_equivalent_evals", r.cost.paper_equivalent_evals()},
                   {"wall_time_s", r.cost.wall_time},
                   {"eval_wall_time_s", r.cost.eval_wall_time}};
    if (r.standard_error) j["standard_error"] = *r.standard_error;
    j["variance_clamped"] = r.variance_clamped;
    json cfg = json::object();
    cfg["method"] = config.method;
    cfg["max_order"] = config.max_order;
    if (config.k) cfg["k"] = *config.k;
    if (config.n) cfg["n"] = *config.n;
    if (config.seed) cfg["seed"] = *config.seed;
    if (config.sigma) cfg["sigma"] = *config.sigma;
    j["config"] = cfg;
    return j.dump(2) + "\n";
}

std::string report_to_csv(const MomentReport& r) {
    std::ostringstream out;
    out << "quantity,value\n";
    out << "method," << method_name(r.method) << "\n";
    out << "mean," << format_double(r.mean) << "\n";
    out << "std," << format_double(r.std) << "\n";
    for (const auto& [order, value] : r.central_moments) {
        out << "central_moment_" << order << "," << format_double(value) << "\n";
    }
    out << "function_evals," << r.cost.function_evals << "\n";
    out << "gradient_evals," << r.cost.gradient_evals << "\n";
    out << "hessian_evals," << r.cost.hessian_evals << "\n";
    out << "third_order_evals," << r.cost.third_order_evals << "\n";
    out << "paper_equiv_evals," << format_double(r.cost.paper_equivalent_evals()) << "\n";
    out << "wall_time," << format_double(r.cost.wall_time) << "\n";
    return out.str();
}

std::string format_double(double value) {
    // Shortest text that parses back to the same double.
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

}  // namespace gudr::cli
