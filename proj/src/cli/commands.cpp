// SPDX-License-Identifier: MIT
#include "gudr/builtin_models.hpp"
#include "gudr/cli.hpp"
#include "gudr/errors.hpp"
#include "gudr/grid_eval.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

namespace gudr::cli {
namespace {

double rel_error(double estimate, double reference) {
    const double diff = std::abs(estimate - reference);
    return reference != 0.0 ? diff / std::abs(reference) : diff;
}

MomentReport run_reference(const ReferenceSpec& ref, const ModelGraph& graph, const InputSpace& inputs) {
    if (ref.kind == ReferenceSpec::Kind::MonteCarlo) return monte_carlo_moments(graph, inputs, ref.n, ref.seed);
    return full_grid_reference(graph, inputs, ref.k);
}

std::size_t parse_count(const std::string& text, const std::string& what) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty() || text[0] == '-') {
        throw ConfigError("reference", "bad " + what + " '" + text + "'");
    }
    return static_cast<std::size_t>(v);
}

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double std_of(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : xs) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace

MomentReport run_method(Method method, const ModelGraph& graph, const InputSpace& inputs, std::size_t level,
                        std::uint64_t seed, int max_order, const EstimatorOptions& options) {
    switch (method) {
        case Method::Udr: return udr_moments(graph, inputs, level, max_order, options);
        case Method::Gudr: return gudr_moments(graph, inputs, level, max_order, options);
        case Method::Sosm: return taylor_moments(graph, inputs, 2, max_order, options);
        case Method::Tosm: return taylor_moments(graph, inputs, 3, max_order, options);
        case Method::MonteCarlo: return monte_carlo_moments(graph, inputs, level, seed, max_order);
        case Method::FullGrid: return full_grid_reference(graph, inputs, level, max_order, options);
    }
    throw InvalidArgument("unsupported method");
}

ReferenceSpec parse_reference(const std::string& text) {
    ReferenceSpec ref;
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    if (head == "fullgrid" && colon != std::string::npos) {
        ref.kind = ReferenceSpec::Kind::FullGrid;
        ref.k = parse_count(text.substr(colon + 1), "k");
        if (ref.k < 1 || ref.k > kMaxQuadraturePoints) throw ConfigError("reference", "k out of range");
        return ref;
    }
    if (head == "mc" && colon != std::string::npos) {
        const auto second = text.find(':', colon + 1);
        if (second == std::string::npos) throw ConfigError("reference", "expected mc:N:SEED");
        ref.kind = ReferenceSpec::Kind::MonteCarlo;
        ref.n = parse_count(text.substr(colon + 1, second - colon - 1), "n");
        ref.seed = parse_count(text.substr(second + 1), "seed");
        if (ref.n < 2) throw ConfigError("reference", "n must be >= 2");
        return ref;
    }
    throw ConfigError("reference", "expected fullgrid:K or mc:N:SEED, got '" + text + "'");
}

ReferenceSpec default_reference(std::size_t dim) {
    ReferenceSpec ref;
    ref.k = dim <= 2 ? 40 : 25;
    return ref;
}

std::vector<SigmaRow> sigma_sweep(const SigmaSweepOptions& options) {
    if (options.model != "y1" && options.model != "y2") throw ConfigError("model", "sigma sweeps run on y1 or y2");
    if (options.sigmas.empty()) throw ConfigError("sigmas", "need at least one value");
    std::vector<SigmaRow> rows;
    for (double sigma : options.sigmas) {
        if (!(sigma >= 0.0)) throw ConfigError("sigmas", "values must be >= 0");
        auto push = [&](Method m, const char* qoi, double est, double ref, double cost) {
            rows.push_back(SigmaRow{options.model, sigma, m, qoi, est, ref, rel_error(est, ref), cost});
        };

        if (sigma == 0.0) {
            // Point-mass inputs: every method collapses to one evaluation at the mean.
            const BuiltinModel m = builtin_model(options.model, std::nullopt, 1.0);
            const double f_mu = m.graph.evaluate(m.inputs.mean_vector());
            for (Method method : options.methods) {
                push(method, "mean", f_mu, f_mu, 1.0);
                push(method, "std", 0.0, 0.0, 1.0);
            }
            continue;
        }

        const BuiltinModel m = builtin_model(options.model, std::nullopt, sigma);
        const ReferenceSpec ref_spec = options.reference.value_or(default_reference(m.inputs.dim()));
        const MomentReport ref = run_reference(ref_spec, m.graph, m.inputs);
        for (Method method : options.methods) {
            const MomentReport r = run_method(method, m.graph, m.inputs, options.k, 0);
            const double cost = r.cost.paper_equivalent_evals();
            push(method, "mean", r.mean, ref.mean, cost);
            push(method, "std", r.std, ref.std, cost);
        }
    }
    return rows;
}

void write_sigma_csv(std::ostream& out, const std::vector<SigmaRow>& rows) {
    out << "model,sigma,method,qoi,estimate,reference,rel_error,paper_equiv_evals\n";
    for (const SigmaRow& r : rows) {
        out << r.model << ',' << format_double(r.sigma) << ',' << method_name(r.method) << ',' << r.qoi << ','
            << format_double(r.estimate) << ',' << format_double(r.reference) << ',' << format_double(r.rel_error)
            << ',' << format_double(r.paper_equiv_evals) << '\n';
    }
}

std::vector<DimRow> dim_sweep(const DimSweepOptions& options) {
    if (options.repeats == 0) throw ConfigError("repeats", "must be >= 1");
    if (options.k < 1 || options.k > kMaxQuadraturePoints) throw ConfigError("k", "out of range");
    using Clock = std::chrono::steady_clock;
    std::vector<DimRow> rows;
    for (std::size_t d : options.dims) {
        if (d == 0) throw ConfigError("dims", "values must be >= 1");
        const BuiltinModel model = builtin_model("y3", d);
        const std::vector<QuadratureRule1D> rules = model.inputs.rules(options.k);
        const std::vector<double> mu = model.inputs.mean_vector();
        for (Method method : options.methods) {
            DimRow row;
            row.d = d;
            row.method = method;
            if (method != Method::Udr && method != Method::Gudr && method != Method::FullGrid) {
                throw ConfigError("methods", "dimension sweeps support udr, gudr and fullgrid");
            }
            const TensorGrid grid(rules);
            if (method == Method::FullGrid && grid.total_points() > options.budget) {
                row.skipped = true;
                rows.push_back(row);
                continue;
            }

            CostLedger last;
            auto run_once = [&]() -> double {
                CostLedger ledger;
                ledger.dim = d;
                const auto start = Clock::now();
                if (method == Method::Udr) {
                    (void)univariate_values(model.graph, mu, rules, ledger);
                } else if (method == Method::Gudr) {
                    (void)univariate_curves(model.graph, mu, rules, ledger);
                } else {
                    GridEvalOptions ge;
                    ge.allow_streaming = true;
                    (void)evaluate_graph_on_grid(model.graph, grid, ge);
                    ledger.function_evals = grid.total_points();
                }
                const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
                last = ledger;
                return elapsed;
            };

            (void)run_once();  // warm-up, discarded
            std::vector<double> times;
            times.reserve(options.repeats);
            for (std::size_t rep = 0; rep < options.repeats; ++rep) times.push_back(run_once());

            row.function_evals = last.function_evals;
            row.gradient_evals = last.gradient_evals;
            row.hessian_evals = last.hessian_evals;
            row.paper_equiv_evals = last.paper_equivalent_evals();
            row.wall_time_mean = mean_of(times);
            row.wall_time_std = std_of(times, row.wall_time_mean);
            rows.push_back(row);
        }
    }
    return rows;
}

void write_dim_csv(std::ostream& out, const std::vector<DimRow>& rows) {
    out << "d,method,function_evals,gradient_evals,hessian_evals,paper_equiv_evals,wall_time_mean,wall_time_std\n";
    for (const DimRow& r : rows) {
        out << r.d << ',' << method_name(r.method) << ',';
        if (r.skipped) {
            out << "skipped,skipped,skipped,skipped,skipped,skipped\n";
            continue;
        }
        out << r.function_evals << ',' << r.gradient_evals << ',' << r.hessian_evals << ','
            << format_double(r.paper_equiv_evals) << ',' << format_double(r.wall_time_mean) << ','
            << format_double(r.wall_time_std) << '\n';
    }
}

std::vector<ConvergeRow> convergence_study(const ConvergeOptions& options) {
    const ResolvedModel model = resolve_model(options.model);
    const ReferenceSpec ref_spec = options.reference.value_or(default_reference(model.inputs.dim()));
    const MomentReport ref = run_reference(ref_spec, model.graph, model.inputs);

    std::vector<ConvergeRow> rows;
    auto push = [&](const MomentReport& r, std::size_t level) {
        const double cost = r.cost.paper_equivalent_evals();
        rows.push_back(ConvergeRow{r.method, level, "mean", r.mean, ref.mean, rel_error(r.mean, ref.mean), cost});
        rows.push_back(ConvergeRow{r.method, level, "std", r.std, ref.std, rel_error(r.std, ref.std), cost});
    };
    for (Method method : options.methods) {
        if (method == Method::MonteCarlo) {
            for (std::size_t n : options.ns) push(run_method(method, model.graph, model.inputs, n, options.seed), n);
        } else if (method == Method::Sosm || method == Method::Tosm) {
            const MomentReport r = run_method(method, model.graph, model.inputs, 0, 0);
            push(r, r.settings.k.value_or(0));
        } else {
            for (std::size_t k : options.ks) push(run_method(method, model.graph, model.inputs, k, 0), k);
        }
    }
    return rows;
}

void write_converge_csv(std::ostream& out, const std::vector<ConvergeRow>& rows) {
    out << "method,level,qoi,estimate,reference,rel_error,paper_equiv_evals\n";
    for (const ConvergeRow& r : rows) {
        out << method_name(r.method) << ',' << r.level << ',' << r.qoi << ',' << format_double(r.estimate) << ','
            << format_double(r.reference) << ',' << format_double(r.rel_error) << ','
            << format_double(r.paper_equiv_evals) << '\n';
    }
}

}  // namespace gudr::cli
