// SPDX-License-Identifier: MIT
// gudr: moment estimation front end.
//
//   gudr estimate --model y2 --sigma 0.2 --method gudr --k 9
//   gudr sweep-sigma --model y1 --sigmas 0.1,0.2,0.3
//   gudr sweep-dim --dims 2,3,4 --repeats 50
//   gudr converge --model y1 --methods udr,gudr --ks 3,5,9,19

#include "gudr/cli.hpp"
#include "gudr/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace gudr;
using namespace gudr::cli;

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
    std::vector<Method> out;
    for (const std::string& name : names) {
        try {
            out.push_back(parse_method(name));
        } catch (const InvalidArgument& e) {
            throw ConfigError("methods", e.what());
        }
    }
    return out;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("output", "cannot write '" + path + "'");
    out << text;
}

// Flags shared by estimate and converge.
struct ModelFlags {
    std::string model, expr, inputs;
    std::size_t dim = 0;
    double sigma = 0.0;

    void add(CLI::App& cmd) {
        cmd.add_option("--model", model, "Built-in model: y1, y2 or y3");
        cmd.add_option("--expr", expr, "Model expression over x1..xd");
        cmd.add_option("--dim", dim, "Input dimension");
        cmd.add_option("--inputs", inputs, "Comma-separated laws, e.g. \"N(0,1),U(-1,1)\"");
        cmd.add_option("--sigma", sigma, "Input std for y1/y2");
    }

    void apply(const CLI::App& cmd, RunConfig& c) const {
        if (cmd.count("--model") && cmd.count("--expr")) throw ConfigError("model", "give either --model or --expr");
        if (cmd.count("--model")) c.model = model;
        if (cmd.count("--expr")) c.model = expr;
        if (cmd.count("--dim")) c.dim = dim;
        if (cmd.count("--inputs")) c.inputs = inputs;
        if (cmd.count("--sigma")) c.sigma = sigma;
    }
};

int run(int argc, char** argv) {
    CLI::App app{"Statistical moments of model outputs by gradient-enhanced dimension reduction"};
    app.require_subcommand(1);

    // estimate
    CLI::App* est = app.add_subcommand("estimate", "Estimate output moments with one method");
    ModelFlags est_model;
    est_model.add(*est);
    std::string config_path, method = "gudr", output, format = "json";
    std::size_t k = 0, n = 0;
    std::uint64_t seed = 0;
    int max_order = 2;
    est->add_option("--config", config_path, "JSON file with the run configuration");
    est->add_option("--method", method, "udr|gudr|sosm|tosm|mc|fullgrid");
    est->add_option("--k", k, "Quadrature points per axis");
    est->add_option("--n", n, "Monte Carlo sample count");
    est->add_option("--seed", seed, "Monte Carlo seed");
    est->add_option("--max-order", max_order, "Highest central moment reported");
    est->add_option("--output", output, "Output file (default stdout)");
    est->add_option("--format", format, "json or csv");

    // sweep-sigma
    CLI::App* ss = app.add_subcommand("sweep-sigma", "Relative errors across input standard deviations");
    std::string ss_model = "y1", ss_reference, ss_output;
    std::vector<double> sigmas;
    std::vector<std::string> ss_methods{"udr", "gudr", "sosm", "tosm"};
    std::size_t ss_k = 19;
    ss->add_option("--model", ss_model, "y1 or y2");
    ss->add_option("--sigmas", sigmas, "Comma-separated sigma values")->delimiter(',');
    ss->add_option("--methods", ss_methods, "Comma-separated methods")->delimiter(',');
    ss->add_option("--k", ss_k, "Quadrature points per axis");
    ss->add_option("--reference", ss_reference, "fullgrid:K or mc:N:SEED");
    ss->add_option("--output", ss_output, "CSV file (default stdout)");

    // sweep-dim
    CLI::App* sd = app.add_subcommand("sweep-dim", "Evaluation cost and time of y3 across dimensions");
    DimSweepOptions sd_opts;
    std::vector<std::string> sd_methods{"udr", "gudr", "fullgrid"};
    std::string sd_output;
    sd->add_option("--dims", sd_opts.dims, "Comma-separated dimensions")->delimiter(',');
    sd->add_option("--methods", sd_methods, "udr, gudr, fullgrid")->delimiter(',');
    sd->add_option("--k", sd_opts.k, "Quadrature points per axis");
    sd->add_option("--repeats", sd_opts.repeats, "Timed runs per row");
    sd->add_option("--budget", sd_opts.budget, "Largest full grid evaluated");
    sd->add_option("--output", sd_output, "CSV file (default stdout)");

    // converge
    CLI::App* cv = app.add_subcommand("converge", "Relative error against evaluation cost");
    ModelFlags cv_model;
    cv_model.add(*cv);
    ConvergeOptions cv_opts;
    std::vector<std::string> cv_methods{"udr", "gudr"};
    std::string cv_reference, cv_output;
    cv->add_option("--methods", cv_methods, "Comma-separated methods")->delimiter(',');
    cv->add_option("--ks", cv_opts.ks, "Quadrature levels")->delimiter(',');
    cv->add_option("--ns", cv_opts.ns, "Monte Carlo sample counts")->delimiter(',');
    cv->add_option("--seed", cv_opts.seed, "Monte Carlo seed");
    cv->add_option("--reference", cv_reference, "fullgrid:K or mc:N:SEED");
    cv->add_option("--output", cv_output, "CSV file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (*est) {
        RunConfig c;
        if (!config_path.empty()) c = load_config_file(config_path);
        est_model.apply(*est, c);
        if (est->count("--method")) c.method = method;
        if (est->count("--k")) c.k = k;
        if (est->count("--n")) c.n = n;
        if (est->count("--seed")) c.seed = seed;
        if (est->count("--max-order")) c.max_order = max_order;
        if (est->count("--output")) c.output = output;
        if (est->count("--format")) c.format = format;
        const ResolvedModel model = resolve_model(c);
        const MomentReport report = run_estimate(c, model);
        emit(c.format == "csv" ? report_to_csv(report) : report_to_json(report, model, c), c.output);
    } else if (*ss) {
        SigmaSweepOptions opts;
        opts.model = ss_model;
        opts.sigmas = sigmas;
        if (opts.sigmas.empty()) {
            opts.sigmas = ss_model == "y2" ? std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5}
                                           : std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
        }
        opts.methods = parse_methods(ss_methods);
        opts.k = ss_k;
        if (!ss_reference.empty()) opts.reference = parse_reference(ss_reference);
        std::ostringstream out;
        write_sigma_csv(out, sigma_sweep(opts));
        emit(out.str(), ss_output);
    } else if (*sd) {
        sd_opts.methods = parse_methods(sd_methods);
        std::ostringstream out;
        write_dim_csv(out, dim_sweep(sd_opts));
        emit(out.str(), sd_output);
    } else if (*cv) {
        cv_model.apply(*cv, cv_opts.model);
        cv_opts.methods = parse_methods(cv_methods);
        if (!cv_reference.empty()) cv_opts.reference = parse_reference(cv_reference);
        std::ostringstream out;
        write_converge_csv(out, convergence_study(cv_opts));
        emit(out.str(), cv_output);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const gudr::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return gudr::cli::kExitConfig;
    } catch (const gudr::InvalidArgument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return gudr::cli::kExitConfig;
    } catch (const gudr::MemoryBudgetExceeded& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return gudr::cli::kExitConfig;
    } catch (const gudr::ModelError& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return gudr::cli::kExitConfig;
    } catch (const gudr::EvaluationError& e) {
        std::cerr << "evaluation error: " << e.what() << "\n";
        return gudr::cli::kExitModel;
    }
}
