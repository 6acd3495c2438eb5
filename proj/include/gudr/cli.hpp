// SPDX-License-Identifier: MIT
#pragma once

#include "gudr/estimators.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gudr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitModel = 3;

/// Invalid run configuration. `field()` names the offending setting.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct RunConfig {
    /// Built-in model name (y1, y2, y3) or expression text.
    std::string model;
    std::optional<std::size_t> dim;
    /// Comma-separated distribution literals, e.g. "N(0,1),U(-1,1)".
    std::optional<std::string> inputs;
    std::string method = "gudr";
    std::optional<std::size_t> k;
    std::optional<std::size_t> n;
    std::optional<std::uint64_t> seed;
    int max_order = 2;
    /// Input std for the built-in models.
    std::optional<double> sigma;
    std::string output;
    std::string format = "json";
};

/// Parses a single JSON object with the RunConfig field names.
RunConfig parse_config_json(const std::string& text);
RunConfig load_config_file(const std::string& path);

/// A model resolved to a graph plus its input space.
struct ResolvedModel {
    std::string label;
    std::string expression;
    ModelGraph graph;
    InputSpace inputs;
};

/// Validates the config and resolves model and inputs. Throws ConfigError.
ResolvedModel resolve_model(const RunConfig& config);

/// Validates method-specific fields and runs the estimator.
MomentReport run_estimate(const RunConfig& config, const ResolvedModel& model);

std::string report_to_json(const MomentReport& report, const ResolvedModel& model, const RunConfig& config);
std::string report_to_csv(const MomentReport& report);

/// Reference for relative errors: "fullgrid:K" or "mc:N:SEED".
struct ReferenceSpec {
    enum class Kind { FullGrid, MonteCarlo } kind = Kind::FullGrid;
    std::size_t k = 0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
};
ReferenceSpec parse_reference(const std::string& text);
/// Full grid with k = 40 in 2-D and k = 25 otherwise.
ReferenceSpec default_reference(std::size_t dim);

struct SigmaSweepOptions {
    std::string model = "y1";
    std::vector<double> sigmas;
    std::vector<Method> methods{Method::Udr, Method::Gudr, Method::Sosm, Method::Tosm};
    std::size_t k = 5;
    std::optional<ReferenceSpec> reference;
};

struct SigmaRow {
    std::string model;
    double sigma = 0.0;
    Method method = Method::Udr;
    std::string qoi;
    double estimate = 0.0;
    double reference = 0.0;
    double rel_error = 0.0;
    double paper_equiv_evals = 0.0;
};

std::vector<SigmaRow> sigma_sweep(const SigmaSweepOptions& options);
void write_sigma_csv(std::ostream& out, const std::vector<SigmaRow>& rows);

struct DimSweepOptions {
    std::vector<std::size_t> dims{2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<Method> methods{Method::Udr, Method::Gudr, Method::FullGrid};
    std::size_t k = 5;
    std::size_t repeats = 200;
    /// Largest k^d a full-grid row may traverse; larger rows are skipped.
    std::uint64_t budget = 1'000'000;
};

struct DimRow {
    std::size_t d = 0;
    Method method = Method::Udr;
    bool skipped = false;
    std::uint64_t function_evals = 0;
    std::uint64_t gradient_evals = 0;
    std::uint64_t hessian_evals = 0;
    double paper_equiv_evals = 0.0;
    /// Seconds spent evaluating the model and its derivatives, per run.
    double wall_time_mean = 0.0;
    double wall_time_std = 0.0;
};

/// Times the evaluation stage only (slices, curves, or the full grid pass);
/// the k^d combination is not part of a row.
std::vector<DimRow> dim_sweep(const DimSweepOptions& options);
void write_dim_csv(std::ostream& out, const std::vector<DimRow>& rows);

struct ConvergeOptions {
    RunConfig model;
    std::vector<Method> methods{Method::Udr, Method::Gudr};
    std::vector<std::size_t> ks{3, 5, 9, 19};
    std::vector<std::size_t> ns{100, 1000, 10000, 100000};
    std::uint64_t seed = 1;
    std::optional<ReferenceSpec> reference;
};

struct ConvergeRow {
    Method method = Method::Udr;
    /// k for quadrature methods, n for Monte Carlo.
    std::size_t level = 0;
    std::string qoi;
    double estimate = 0.0;
    double reference = 0.0;
    double rel_error = 0.0;
    double paper_equiv_evals = 0.0;
};

std::vector<ConvergeRow> convergence_study(const ConvergeOptions& options);
void write_converge_csv(std::ostream& out, const std::vector<ConvergeRow>& rows);

/// Runs one method with a uniform level argument (k, or n for Monte Carlo).
MomentReport run_method(Method method, const ModelGraph& graph, const InputSpace& inputs, std::size_t level,
                        std::uint64_t seed, int max_order = 2, const EstimatorOptions& options = {});

/// Number formatting shared by the CSV writers (round-trip precision).
std::string format_double(double value);

}  // namespace gudr::cli
