#pragma once

// Experiment driver: runs a (model × variant × (t, s) [× corruption]) grid
// with seeded repeats over an SBM preset or a file dataset, aggregates
// mean/std accuracy per cell, and serializes reports as CSV or markdown.
// Also hosts the command-line entry point.
//
// Seeding contract (all randomness flows from base_seed):
//   - repeat-level draws shared by every cell — the SBM graph, the 70/30
//     split, and the corruption mask — use seed base_seed + r for repeat r,
//     so cells compete on identical data;
//   - cell-level draws — eigensolver starting vectors and parameter
//     initialization — use (base_seed ^ fnv1a(cell_id)) + r, where cell_id
//     names the cell ("model=gcn|variant=ILE|t=1|s=-0.5|corr=0.3").
// Cells therefore never depend on each other or on worker scheduling.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ile/errors.hpp"
#include "ile/nn.hpp"

namespace ile {

enum class Variant { None, Adjacency, ILE };

const char* variant_name(Variant v);
// Parses "none" / "adjacency" / "ile" (case-insensitive); throws
// InvalidConfig.
Variant variant_from_name(const std::string& name);

struct DatasetSource {
  // Exactly one of the two forms: a generator preset ("community" or
  // "core-periphery") with its node count, or file paths.
  std::string preset;
  std::int32_t n = 0;
  std::string edge, features, labels;
};

// nn hyperparameter overrides; unset fields keep the per-architecture
// defaults from nn::default_config.
struct NetOverrides {
  std::optional<std::int32_t> layers, hidden_dim, epochs;
  std::optional<double> lr, weight_decay, gin_epsilon;
};

struct GridConfig {
  DatasetSource dataset;
  std::vector<nn::Arch> models{nn::Arch::GCN, nn::Arch::MLP, nn::Arch::GIN,
                               nn::Arch::SAGE};
  std::vector<Variant> variants{Variant::None, Variant::Adjacency,
                                Variant::ILE};
  std::vector<double> s_values{-1.0, -0.5, 0.0, 0.5, 1.0};
  std::vector<double> t_values{-1.0, -0.5, 0.5, 1.0};  // t = 0 omitted
  std::int32_t k = 8;
  std::int32_t repeats = 5;
  std::vector<double> corruption_ratios;  // empty: no corruption pass
  double corruption_sigma = 1.0;
  std::uint64_t base_seed = 0;
  double tol = 1e-8;
  // When false, runtime_ms is reported as 0 so reports from identical
  // configs are byte-identical regardless of machine or worker count.
  bool record_runtime = true;
  NetOverrides net;
};

// Parses the JSON form of GridConfig (schema mirrors the struct; the
// overrides live under "nn").  Unknown keys, unknown names, and
// out-of-range values throw InvalidConfig; malformed JSON throws
// ParseError.  load_grid_config reads the file first (IoError).
GridConfig parse_grid_config(const std::string& json_text);
GridConfig load_grid_config(const std::string& path);

struct ReportRow {
  std::string model;                 // nn::arch_name
  std::string variant;               // "None" | "Adjacency" | "ILE"
  std::optional<double> t, s;        // ILE cells only
  std::optional<double> corruption;  // present when the config lists ratios
  double mean_acc = 0.0;             // population mean/std over repeats
  double std_acc = 0.0;
  std::vector<double> per_seed_accs;
  double runtime_ms = 0.0;
  std::string error;  // nonempty marks a failed cell (mean/std are NaN)
};

struct ExperimentReport {
  std::string dataset;  // human-readable source tag for the markdown title
  std::vector<ReportRow> rows;
};

// Evaluates every grid cell on `threads` workers (0 = hardware concurrency).
// Row order is fixed: corruption level, then model, then variant, with ILE
// cells sweeping s (outer) and t (inner) in config order.  A failing cell
// is recorded in its row's `error`; dataset-level problems (unloadable
// files, corruption without features, missing labels) throw.
ExperimentReport run_grid(const GridConfig& cfg, std::int32_t threads = 0);

// CSV columns: model,variant,t,s,corruption,mean_acc,std_acc,seeds,runtime_ms
// with absent optionals left empty, per-seed accuracies joined by ';', and a
// failed cell's seeds column holding "!" + its error message (commas and
// newlines replaced by spaces).  Doubles print in shortest round-trip form.
std::string report_to_csv(const ExperimentReport& report);
// Per corruption level: a table with one row per (model, variant[, s]) and
// one column per t value, cells formatted as "mean (std)" in percent.
std::string report_to_markdown(const ExperimentReport& report);
// Inverse of report_to_csv; throws ParseError on malformed input.
std::vector<ReportRow> parse_report_csv(const std::string& csv_text);

enum class ReportFormat { Csv, Markdown };

// Writes the chosen rendering to `path`; throws IoError.
void emit_report(const ExperimentReport& report, const std::string& path,
                 ReportFormat format);

// Command-line entry point (subcommands embed, sbm, train, grid, select).
// Returns 0 on success, 1 on usage errors (synopsis goes to standard
// error), 2 on runtime errors.
int cli(int argc, const char* const* argv);

}  // namespace ile
