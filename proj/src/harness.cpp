#include "ile/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "ile/dataset.hpp"
#include "ile/embedding.hpp"
#include "ile/rng.hpp"
#include "ile/sbm.hpp"
#include "ile/select.hpp"

namespace ile {
namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(
                        static_cast<unsigned char>(c)));
  return s;
}

std::string fmt_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double_field(const std::string& text, std::int32_t line) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ParseError("bad numeric field '" + text + "'", line);
  }
  return v;
}

}  // namespace

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::None:
      return "None";
    case Variant::Adjacency:
      return "Adjacency";
    case Variant::ILE:
      return "ILE";
  }
  return "?";
}

Variant variant_from_name(const std::string& name) {
  const std::string n = lower(name);
  if (n == "none") return Variant::None;
  if (n == "adjacency") return Variant::Adjacency;
  if (n == "ile") return Variant::ILE;
  throw InvalidConfig("unknown variant '" + name +
                      "' (expected None, Adjacency, or ILE)");
}

// ---------------------------------------------------------------------------
// GridConfig JSON

namespace {

using nlohmann::json;

void require_keys(const json& j, const char* where,
                  std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) {
      throw InvalidConfig(std::string("unknown ") + where + " field '" +
                          it.key() + "'");
    }
  }
}

double get_finite(const json& j, const std::string& key) {
  if (!j.is_number()) {
    throw InvalidConfig("field '" + key + "' must be a number");
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) {
    throw InvalidConfig("field '" + key + "' must be finite");
  }
  return v;
}

std::int32_t get_int_min(const json& j, const std::string& key,
                         std::int32_t min) {
  if (!j.is_number_integer()) {
    throw InvalidConfig("field '" + key + "' must be an integer");
  }
  const std::int64_t v = j.get<std::int64_t>();
  if (v < min || v > INT32_MAX) {
    throw InvalidConfig("field '" + key + "' must be an integer >= " +
                        std::to_string(min));
  }
  return static_cast<std::int32_t>(v);
}

std::vector<double> get_double_list(const json& j, const std::string& key) {
  if (!j.is_array()) {
    throw InvalidConfig("field '" + key + "' must be an array of numbers");
  }
  std::vector<double> out;
  for (const json& e : j) out.push_back(get_finite(e, key));
  return out;
}

}  // namespace

GridConfig parse_grid_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("grid config: ") + e.what(), 0);
  }
  if (!j.is_object()) throw InvalidConfig("grid config must be an object");
  require_keys(j, "grid config",
               {"dataset", "models", "variants", "s_values", "t_values", "k",
                "repeats", "corruption_ratios", "corruption_sigma",
                "base_seed", "tol", "record_runtime", "nn"});
  if (!j.contains("dataset")) {
    throw InvalidConfig("grid config requires a 'dataset' field");
  }

  GridConfig cfg;
  const json& ds = j["dataset"];
  if (!ds.is_object()) throw InvalidConfig("'dataset' must be an object");
  require_keys(ds, "dataset", {"preset", "n", "edge", "features", "labels"});
  if (ds.contains("preset")) {
    if (ds.contains("edge") || ds.contains("features") ||
        ds.contains("labels")) {
      throw InvalidConfig("'dataset' takes either a preset or file paths, "
                          "not both");
    }
    cfg.dataset.preset = ds["preset"].get<std::string>();
    if (cfg.dataset.preset != "community" &&
        cfg.dataset.preset != "core-periphery") {
      throw InvalidConfig("unknown preset '" + cfg.dataset.preset +
                          "' (expected community or core-periphery)");
    }
    if (!ds.contains("n")) throw InvalidConfig("preset dataset requires 'n'");
    cfg.dataset.n = get_int_min(ds["n"], "n", 2);
  } else if (ds.contains("edge")) {
    cfg.dataset.edge = ds["edge"].get<std::string>();
    if (ds.contains("features")) {
      cfg.dataset.features = ds["features"].get<std::string>();
    }
    if (ds.contains("labels")) {
      cfg.dataset.labels = ds["labels"].get<std::string>();
    }
  } else {
    throw InvalidConfig("'dataset' requires a preset or an edge file");
  }

  if (j.contains("models")) {
    if (!j["models"].is_array() || j["models"].empty()) {
      throw InvalidConfig("'models' must be a nonempty array");
    }
    cfg.models.clear();
    for (const json& m : j["models"]) {
      try {
        cfg.models.push_back(nn::arch_from_name(m.get<std::string>()));
      } catch (const InvalidArgument& e) {
        throw InvalidConfig(e.what());
      }
    }
  }
  if (j.contains("variants")) {
    if (!j["variants"].is_array() || j["variants"].empty()) {
      throw InvalidConfig("'variants' must be a nonempty array");
    }
    cfg.variants.clear();
    for (const json& v : j["variants"]) {
      cfg.variants.push_back(variant_from_name(v.get<std::string>()));
    }
  }
  if (j.contains("s_values")) cfg.s_values = get_double_list(j["s_values"], "s_values");
  if (j.contains("t_values")) cfg.t_values = get_double_list(j["t_values"], "t_values");
  const bool has_ile = std::find(cfg.variants.begin(), cfg.variants.end(),
                                 Variant::ILE) != cfg.variants.end();
  if (has_ile && (cfg.s_values.empty() || cfg.t_values.empty())) {
    throw InvalidConfig("the ILE variant requires nonempty s_values and "
                        "t_values");
  }
  if (j.contains("k")) cfg.k = get_int_min(j["k"], "k", 1);
  if (j.contains("repeats")) cfg.repeats = get_int_min(j["repeats"], "repeats", 1);
  if (j.contains("corruption_ratios")) {
    cfg.corruption_ratios = get_double_list(j["corruption_ratios"],
                                            "corruption_ratios");
    for (double r : cfg.corruption_ratios) {
      if (r < 0.0 || r > 1.0) {
        throw InvalidConfig("corruption ratios must lie in [0, 1]");
      }
    }
  }
  if (j.contains("corruption_sigma")) {
    cfg.corruption_sigma = get_finite(j["corruption_sigma"], "corruption_sigma");
    if (cfg.corruption_sigma < 0.0) {
      throw InvalidConfig("'corruption_sigma' must be >= 0");
    }
  }
  if (j.contains("base_seed")) {
    const json& b = j["base_seed"];
    if (!b.is_number_integer() ||
        (b.is_number_integer() && !b.is_number_unsigned() &&
         b.get<std::int64_t>() < 0)) {
      throw InvalidConfig("'base_seed' must be a non-negative integer");
    }
    cfg.base_seed = b.get<std::uint64_t>();
  }
  if (j.contains("tol")) {
    cfg.tol = get_finite(j["tol"], "tol");
    if (cfg.tol <= 0.0) throw InvalidConfig("'tol' must be positive");
  }
  if (j.contains("record_runtime")) {
    if (!j["record_runtime"].is_boolean()) {
      throw InvalidConfig("'record_runtime' must be a boolean");
    }
    cfg.record_runtime = j["record_runtime"].get<bool>();
  }
  if (j.contains("nn")) {
    const json& net = j["nn"];
    if (!net.is_object()) throw InvalidConfig("'nn' must be an object");
    require_keys(net, "nn", {"layers", "hidden_dim", "epochs", "lr",
                             "weight_decay", "gin_epsilon"});
    if (net.contains("layers")) {
      cfg.net.layers = get_int_min(net["layers"], "layers", 1);
    }
    if (net.contains("hidden_dim")) {
      cfg.net.hidden_dim = get_int_min(net["hidden_dim"], "hidden_dim", 1);
    }
    if (net.contains("epochs")) {
      cfg.net.epochs = get_int_min(net["epochs"], "epochs", 1);
    }
    if (net.contains("lr")) {
      cfg.net.lr = get_finite(net["lr"], "lr");
      if (*cfg.net.lr <= 0.0) throw InvalidConfig("'lr' must be positive");
    }
    if (net.contains("weight_decay")) {
      cfg.net.weight_decay = get_finite(net["weight_decay"], "weight_decay");
      if (*cfg.net.weight_decay < 0.0) {
        throw InvalidConfig("'weight_decay' must be >= 0");
      }
    }
    if (net.contains("gin_epsilon")) {
      cfg.net.gin_epsilon = get_finite(net["gin_epsilon"], "gin_epsilon");
    }
  }
  return cfg;
}

GridConfig load_grid_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open grid config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_grid_config(ss.str());
}

// ---------------------------------------------------------------------------
// run_grid

namespace {

struct CellSpec {
  nn::Arch arch = nn::Arch::GCN;
  Variant variant = Variant::None;
  std::optional<double> t, s, corruption;
  std::size_t level = 0;  // index into the corruption levels (0 when none)
  std::string id;         // the documented cell identifier
};

std::string cell_identifier(const CellSpec& c) {
  std::string id = std::string("model=") + nn::arch_name(c.arch) +
                   "|variant=" + variant_name(c.variant);
  if (c.t) id += "|t=" + fmt_double(*c.t) + "|s=" + fmt_double(*c.s);
  if (c.corruption) id += "|corr=" + fmt_double(*c.corruption);
  return id;
}

nn::ModelConfig cell_model_config(const GridConfig& cfg, nn::Arch arch) {
  nn::ModelConfig mc = nn::default_config(arch);
  if (cfg.net.layers) mc.layers = *cfg.net.layers;
  if (cfg.net.hidden_dim) mc.hidden_dim = *cfg.net.hidden_dim;
  if (cfg.net.epochs) mc.epochs = *cfg.net.epochs;
  if (cfg.net.lr) mc.lr = *cfg.net.lr;
  if (cfg.net.weight_decay) mc.weight_decay = *cfg.net.weight_decay;
  if (cfg.net.gin_epsilon) mc.gin_epsilon = *cfg.net.gin_epsilon;
  return mc;
}

Mat ones_column(std::int32_t n) {
  Mat x(n, 1);
  for (std::int32_t i = 0; i < n; ++i) x(i, 0) = 1.0;
  return x;
}

}  // namespace

ExperimentReport run_grid(const GridConfig& cfg, std::int32_t threads) {
  const bool from_preset = !cfg.dataset.preset.empty();

  // Repeat-level data, shared by every cell: graphs (re-drawn per repeat for
  // presets), labels, splits, and per-level corrupted feature matrices.
  std::vector<Graph> graphs;
  std::vector<std::vector<std::int32_t>> labels;
  std::vector<Split> splits;
  std::optional<Dataset> file_ds;
  // features[level][repeat]; empty when the dataset has no features
  std::vector<std::vector<Mat>> features;

  ExperimentReport report;
  if (from_preset) {
    if (!cfg.corruption_ratios.empty()) {
      throw InvalidConfig("corruption_ratios require node features, and "
                          "preset datasets have none");
    }
    report.dataset = cfg.dataset.preset + "(n=" +
                     std::to_string(cfg.dataset.n) + ")";
    for (std::int32_t r = 0; r < cfg.repeats; ++r) {
      const std::uint64_t sr = cfg.base_seed + static_cast<std::uint64_t>(r);
      SbmSpec spec = cfg.dataset.preset == "community"
                         ? community_preset(cfg.dataset.n, sr)
                         : core_periphery_preset(cfg.dataset.n, sr);
      LabeledGraph lg = generate(spec);
      splits.push_back(split_70_30(lg.graph.num_vertices(), sr));
      graphs.push_back(std::move(lg.graph));
      labels.push_back(std::move(lg.labels));
    }
  } else {
    file_ds = load_dataset(cfg.dataset.edge, cfg.dataset.features,
                           cfg.dataset.labels);
    if (file_ds->labels.empty()) {
      throw MissingLabelsError("grid experiments need a label file");
    }
    for (std::int32_t l : file_ds->labels) {
      if (l < 0) {
        throw MissingLabelsError("grid experiments need a label for every "
                                 "node");
      }
    }
    report.dataset = file_ds->name;
    if (!cfg.corruption_ratios.empty()) {
      if (!file_ds->features) {
        throw InvalidConfig("corruption_ratios require node features");
      }
      features.resize(cfg.corruption_ratios.size());
      for (std::size_t level = 0; level < cfg.corruption_ratios.size();
           ++level) {
        for (std::int32_t r = 0; r < cfg.repeats; ++r) {
          features[level].push_back(corrupt_features(
              *file_ds->features, cfg.corruption_ratios[level],
              cfg.corruption_sigma,
              cfg.base_seed + static_cast<std::uint64_t>(r)));
        }
      }
    }
    for (std::int32_t r = 0; r < cfg.repeats; ++r) {
      splits.push_back(split_70_30(file_ds->graph.num_vertices(),
                                   cfg.base_seed +
                                       static_cast<std::uint64_t>(r)));
    }
  }

  std::vector<CellSpec> cells;
  const std::size_t n_levels =
      cfg.corruption_ratios.empty() ? 1 : cfg.corruption_ratios.size();
  for (std::size_t level = 0; level < n_levels; ++level) {
    for (nn::Arch arch : cfg.models) {
      for (Variant v : cfg.variants) {
        CellSpec base;
        base.arch = arch;
        base.variant = v;
        base.level = level;
        if (!cfg.corruption_ratios.empty()) {
          base.corruption = cfg.corruption_ratios[level];
        }
        if (v == Variant::ILE) {
          for (double s : cfg.s_values) {
            for (double t : cfg.t_values) {
              CellSpec c = base;
              c.t = t;
              c.s = s;
              c.id = cell_identifier(c);
              cells.push_back(std::move(c));
            }
          }
        } else {
          base.id = cell_identifier(base);
          cells.push_back(std::move(base));
        }
      }
    }
  }

  report.rows.resize(cells.size());
  auto eval_cell = [&](std::size_t ci) {
    const CellSpec& cell = cells[ci];
    ReportRow& row = report.rows[ci];
    row.model = nn::arch_name(cell.arch);
    row.variant = variant_name(cell.variant);
    row.t = cell.t;
    row.s = cell.s;
    row.corruption = cell.corruption;
    const std::uint64_t cell_base = cfg.base_seed ^ rng::fnv1a(cell.id);
    const auto started = std::chrono::steady_clock::now();
    try {
      for (std::int32_t r = 0; r < cfg.repeats; ++r) {
        const std::uint64_t cell_seed =
            cell_base + static_cast<std::uint64_t>(r);
        const Graph& g =
            from_preset ? graphs[static_cast<std::size_t>(r)] : file_ds->graph;
        const std::vector<std::int32_t>& lab =
            from_preset ? labels[static_cast<std::size_t>(r)]
                        : file_ds->labels;
        const Mat* base_feats = nullptr;
        if (!features.empty()) {
          base_feats = &features[cell.level][static_cast<std::size_t>(r)];
        } else if (!from_preset && file_ds->features) {
          base_feats = &*file_ds->features;
        }

        Mat x;
        if (cell.variant == Variant::None) {
          x = base_feats ? *base_feats : ones_column(g.num_vertices());
        } else {
          Embedding emb =
              cell.variant == Variant::Adjacency
                  ? compute_adjacency_embedding(g, cfg.k, cfg.tol, cell_seed)
                  : compute_ile(g, *cell.t, *cell.s, cfg.k, cfg.tol,
                                cell_seed);
          x = augment_features(base_feats, emb);
        }

        std::int32_t num_classes = 0;
        for (std::int32_t l : lab) num_classes = std::max(num_classes, l + 1);
        nn::ModelConfig mc = cell_model_config(cfg, cell.arch);
        mc.seed = cell_seed;
        Split split = splits[static_cast<std::size_t>(r)];
        nn::Model model = nn::build_model(mc, x.cols, num_classes, g);
        nn::TrainReport tr = nn::train(model, x, lab, split, mc);
        row.per_seed_accs.push_back(tr.test_accuracy);
      }
      double mean = 0.0;
      for (double a : row.per_seed_accs) mean += a;
      mean /= cfg.repeats;
      double var = 0.0;
      for (double a : row.per_seed_accs) var += (a - mean) * (a - mean);
      row.mean_acc = mean;
      row.std_acc = std::sqrt(var / cfg.repeats);
    } catch (const std::exception& e) {
      row.error = e.what();
      row.mean_acc = std::nan("");
      row.std_acc = std::nan("");
      row.per_seed_accs.clear();
    }
    if (cfg.record_runtime) {
      row.runtime_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - started)
                           .count();
    }
  };

  std::size_t workers = threads > 0
                            ? static_cast<std::size_t>(threads)
                            : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, cells.size());
  if (workers <= 1) {
    for (std::size_t ci = 0; ci < cells.size(); ++ci) eval_cell(ci);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t ci = next.fetch_add(1); ci < cells.size();
             ci = next.fetch_add(1)) {
          eval_cell(ci);
        }
      });
    }
    for (std::thread& th : pool) th.join();
  }
  return report;
}

// ---------------------------------------------------------------------------
// Report serialization

namespace {

constexpr const char* kCsvHeader =
    "model,variant,t,s,corruption,mean_acc,std_acc,seeds,runtime_ms";

std::string sanitize_error(std::string msg) {
  for (char& c : msg) {
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  }
  return msg;
}

std::string opt_field(const std::optional<double>& v) {
  return v ? fmt_double(*v) : std::string();
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string pct_cell(const ReportRow& row) {
  if (!row.error.empty()) return "error";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f (%.2f)", row.mean_acc * 100.0,
                row.std_acc * 100.0);
  return buf;
}

std::string md_row(const std::vector<std::string>& cells) {
  std::string line;
  for (const std::string& c : cells) line += "| " + c + " ";
  return line + "|\n";
}

}  // namespace

std::string report_to_csv(const ExperimentReport& report) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const ReportRow& r : report.rows) {
    out += r.model + "," + r.variant + "," + opt_field(r.t) + "," +
           opt_field(r.s) + "," + opt_field(r.corruption) + ",";
    out += fmt_double(r.mean_acc) + "," + fmt_double(r.std_acc) + ",";
    if (!r.error.empty()) {
      out += "!" + sanitize_error(r.error);
    } else {
      for (std::size_t i = 0; i < r.per_seed_accs.size(); ++i) {
        if (i) out += ";";
        out += fmt_double(r.per_seed_accs[i]);
      }
    }
    out += "," + fmt_double(r.runtime_ms) + "\n";
  }
  return out;
}

std::vector<ReportRow> parse_report_csv(const std::string& csv_text) {
  std::istringstream ss(csv_text);
  std::string line;
  if (!std::getline(ss, line) || line != kCsvHeader) {
    throw ParseError("missing report header", 1);
  }
  std::vector<ReportRow> rows;
  std::int32_t lineno = 1;
  while (std::getline(ss, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f = split_fields(line, ',');
    if (f.size() != 9) {
      throw ParseError("expected 9 fields, got " + std::to_string(f.size()),
                       lineno);
    }
    ReportRow r;
    r.model = f[0];
    r.variant = f[1];
    if (!f[2].empty()) r.t = parse_double_field(f[2], lineno);
    if (!f[3].empty()) r.s = parse_double_field(f[3], lineno);
    if (!f[4].empty()) r.corruption = parse_double_field(f[4], lineno);
    r.mean_acc = parse_double_field(f[5], lineno);
    r.std_acc = parse_double_field(f[6], lineno);
    if (!f[7].empty()) {
      if (f[7][0] == '!') {
        r.error = f[7].substr(1);
      } else {
        for (const std::string& a : split_fields(f[7], ';')) {
          r.per_seed_accs.push_back(parse_double_field(a, lineno));
        }
      }
    }
    r.runtime_ms = parse_double_field(f[8], lineno);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string report_to_markdown(const ExperimentReport& report) {
  std::string out;
  if (!report.dataset.empty()) out += "# " + report.dataset + "\n\n";

  // t columns in first-appearance order across the whole report
  std::vector<double> ts;
  for (const ReportRow& r : report.rows) {
    if (r.t && std::find(ts.begin(), ts.end(), *r.t) == ts.end()) {
      ts.push_back(*r.t);
    }
  }

  // corruption sections in first-appearance order (one unlabeled section
  // when the column is absent)
  std::vector<std::optional<double>> levels;
  for (const ReportRow& r : report.rows) {
    if (std::find(levels.begin(), levels.end(), r.corruption) ==
        levels.end()) {
      levels.push_back(r.corruption);
    }
  }
  if (levels.empty()) levels.push_back(std::nullopt);

  for (std::size_t li = 0; li < levels.size(); ++li) {
    if (li) out += "\n";
    if (levels[li]) {
      out += "## corruption = " + fmt_double(*levels[li]) + "\n\n";
    }

    std::vector<std::string> header = {"model", "variant", "s", "acc"};
    for (double t : ts) header.push_back("t=" + fmt_double(t));
    out += md_row(header);
    std::string sep;
    for (std::size_t i = 0; i < header.size(); ++i) sep += "|---";
    out += sep + "|\n";

    // one line per (model, variant, s); ILE lines spread across t columns
    std::vector<std::string> keys;
    std::vector<std::vector<std::string>> lines;
    for (const ReportRow& r : report.rows) {
      if (r.corruption != levels[li]) continue;
      const std::string key =
          r.model + "|" + r.variant + "|" + (r.s ? fmt_double(*r.s) : "");
      auto it = std::find(keys.begin(), keys.end(), key);
      std::size_t at;
      if (it == keys.end()) {
        keys.push_back(key);
        lines.emplace_back(header.size());
        at = lines.size() - 1;
        lines[at][0] = r.model;
        lines[at][1] = r.variant;
        lines[at][2] = r.s ? fmt_double(*r.s) : "—";
      } else {
        at = static_cast<std::size_t>(it - keys.begin());
      }
      if (r.t) {
        const std::size_t col =
            4 + static_cast<std::size_t>(
                    std::find(ts.begin(), ts.end(), *r.t) - ts.begin());
        lines[at][col] = pct_cell(r);
      } else {
        lines[at][3] = pct_cell(r);
      }
    }
    for (const std::vector<std::string>& cells : lines) out += md_row(cells);
  }
  return out;
}

void emit_report(const ExperimentReport& report, const std::string& path,
                 ReportFormat format) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open report file '" + path + "'");
  f << (format == ReportFormat::Csv ? report_to_csv(report)
                                    : report_to_markdown(report));
  if (!f.good()) throw IoError("failed writing report file '" + path + "'");
}

// ---------------------------------------------------------------------------
// CLI

namespace {

struct CliDataset {
  Graph graph;
  std::vector<std::int32_t> labels;
  std::optional<Mat> features;
};

CliDataset build_cli_dataset(const std::string& preset, std::int32_t n,
                             const std::string& edge,
                             const std::string& feature_path,
                             const std::string& label_path,
                             std::uint64_t seed) {
  CliDataset out;
  if (!preset.empty()) {
    SbmSpec spec = preset == "community" ? community_preset(n, seed)
                                         : core_periphery_preset(n, seed);
    LabeledGraph lg = generate(spec);
    out.graph = std::move(lg.graph);
    out.labels = std::move(lg.labels);
  } else {
    Dataset ds = load_dataset(edge, feature_path, label_path);
    out.graph = std::move(ds.graph);
    out.labels = std::move(ds.labels);
    out.features = std::move(ds.features);
  }
  return out;
}

void write_text_or_stdout(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw IoError("cannot open output file '" + path + "'");
  f << text;
  if (!f.good()) throw IoError("failed writing '" + path + "'");
}

int usage_error(const CLI::App& app, const std::string& msg) {
  std::cerr << msg << "\n\n" << app.help();
  return 1;
}

}  // namespace

int cli(int argc, const char* const* argv) {
  CLI::App app{"interpolated Laplacian embeddings toolkit"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  double tol = 1e-8;
  std::int32_t threads = 0;
  app.add_option("--seed", seed, "master seed")->capture_default_str();
  app.add_option("--tol", tol, "eigensolver tolerance")
      ->capture_default_str();
  app.add_option("--threads", threads, "worker threads (0 = all cores)")
      ->capture_default_str();

  // embed
  CLI::App* embed = app.add_subcommand(
      "embed", "spectral embedding of an edge-list graph");
  embed->fallthrough();
  std::string em_edge, em_out;
  double em_t = 0.0, em_s = 0.0;
  std::int32_t em_k = 0;
  embed->add_option("--edge", em_edge, "edge list file")->required();
  embed->add_option("--t", em_t, "degree coefficient")->required();
  embed->add_option("--s", em_s, "adjacency coefficient")->required();
  embed->add_option("--k", em_k, "embedding dimension")->required();
  embed->add_option("--out", em_out,
                    "output CSV (stdout when omitted; a .json sidecar is "
                    "written next to a file)");

  // sbm
  CLI::App* sbm = app.add_subcommand("sbm", "draw a seeded SBM preset");
  sbm->fallthrough();
  std::string sb_preset, sb_prefix = "sbm";
  std::int32_t sb_n = 0;
  bool sb_shuffle = false;
  sbm->add_option("--preset", sb_preset, "community or core-periphery")
      ->required()
      ->check(CLI::IsMember({"community", "core-periphery"}));
  sbm->add_option("--n", sb_n, "node count")->required();
  sbm->add_option("--out-prefix", sb_prefix,
                  "writes <prefix>.edges and <prefix>.labels.csv")
      ->capture_default_str();
  sbm->add_flag("--shuffle", sb_shuffle, "relabel nodes by a seeded shuffle");

  // train
  CLI::App* train = app.add_subcommand(
      "train", "single training run reported as JSON");
  train->fallthrough();
  std::string tr_preset, tr_edge, tr_features, tr_labels, tr_out;
  std::string tr_model, tr_variant = "ile";
  std::int32_t tr_n = 0, tr_k = 8;
  double tr_t = 0.0, tr_s = 0.0;
  std::int32_t tr_epochs = 0, tr_hidden = 0, tr_layers = 0;
  double tr_lr = 0.0, tr_wd = 0.0;
  train->add_option("--preset", tr_preset, "SBM preset dataset")
      ->check(CLI::IsMember({"community", "core-periphery"}));
  train->add_option("--n", tr_n, "preset node count");
  train->add_option("--edge", tr_edge, "edge list file");
  train->add_option("--features", tr_features, "feature CSV");
  train->add_option("--labels", tr_labels, "label CSV");
  train->add_option("--model", tr_model, "gcn, mlp, gin, or sage")
      ->required()
      ->check(CLI::IsMember({"gcn", "mlp", "gin", "sage"}, CLI::ignore_case));
  train->add_option("--variant", tr_variant, "none, adjacency, or ile")
      ->check(CLI::IsMember({"none", "adjacency", "ile"}, CLI::ignore_case));
  train->add_option("--t", tr_t, "ILE degree coefficient");
  train->add_option("--s", tr_s, "ILE adjacency coefficient");
  train->add_option("--k", tr_k, "embedding dimension")
      ->capture_default_str();
  train->add_option("--epochs", tr_epochs, "training epochs");
  train->add_option("--hidden-dim", tr_hidden, "hidden width");
  train->add_option("--layers", tr_layers, "model depth");
  train->add_option("--lr", tr_lr, "learning rate");
  train->add_option("--weight-decay", tr_wd, "weight decay");
  train->add_option("--out", tr_out, "JSON output path (stdout when omitted)");

  // grid
  CLI::App* grid = app.add_subcommand("grid", "run a GridConfig experiment");
  grid->fallthrough();
  std::string gr_config, gr_out, gr_format = "csv";
  grid->add_option("--config", gr_config, "GridConfig JSON file")->required();
  grid->add_option("--out", gr_out, "report path (stdout when omitted)");
  grid->add_option("--format", gr_format, "csv or markdown")
      ->check(CLI::IsMember({"csv", "markdown"}))
      ->capture_default_str();

  // select
  CLI::App* select = app.add_subcommand(
      "select", "hyperparameter selection (scree, correlation, cv)");
  select->fallthrough();
  std::string se_method, se_preset, se_edge, se_features, se_labels, se_out;
  std::string se_model = "gcn";
  std::int32_t se_n = 0, se_k = 8, se_folds = 5, se_epochs = 0;
  double se_t = 0.0, se_s = 0.0;
  std::vector<double> se_tvals, se_svals;
  select->add_option("--method", se_method, "scree, correlation, or cv")
      ->required()
      ->check(CLI::IsMember({"scree", "correlation", "cv"}));
  select->add_option("--preset", se_preset, "SBM preset dataset")
      ->check(CLI::IsMember({"community", "core-periphery"}));
  select->add_option("--n", se_n, "preset node count");
  select->add_option("--edge", se_edge, "edge list file");
  select->add_option("--features", se_features, "feature CSV");
  select->add_option("--labels", se_labels, "label CSV");
  select->add_option("--t", se_t, "scree: family t");
  select->add_option("--s", se_s, "scree: family s");
  select->add_option("--k", se_k, "embedding dimension / scree k_max")
      ->capture_default_str();
  select->add_option("--t-values", se_tvals, "grid t values")
      ->delimiter(',');
  select->add_option("--s-values", se_svals, "grid s values")
      ->delimiter(',');
  select->add_option("--folds", se_folds, "cv folds")->capture_default_str();
  select->add_option("--model", se_model, "cv model architecture")
      ->check(CLI::IsMember({"gcn", "mlp", "gin", "sage"}, CLI::ignore_case));
  select->add_option("--epochs", se_epochs, "cv training epochs");
  select->add_option("--out", se_out, "score table CSV (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (app.got_subcommand(embed)) {
      Graph g = read_edge_list_file(em_edge);
      Embedding emb = compute_ile(g, em_t, em_s, em_k, tol, seed);
      if (em_out.empty()) {
        write_embedding_csv(emb, std::cout);
      } else {
        write_embedding_csv_file(emb, em_out);
        write_embedding_sidecar_file(emb, tol, seed, em_out + ".json");
      }
      return 0;
    }

    if (app.got_subcommand(sbm)) {
      SbmSpec spec = sb_preset == "community"
                         ? community_preset(sb_n, seed)
                         : core_periphery_preset(sb_n, seed);
      LabeledGraph lg = generate(spec);
      if (sb_shuffle) lg = shuffle_nodes(lg, rng::mix(seed, 1));
      write_edge_list_file(lg.graph, sb_prefix + ".edges");
      write_labels_csv_file(lg.labels, sb_prefix + ".labels.csv");
      std::cout << sb_prefix << ".edges: " << lg.graph.num_vertices()
                << " nodes, " << lg.graph.num_edges() << " edges ("
                << lg.meta << ")\n";
      return 0;
    }

    if (app.got_subcommand(train)) {
      if (tr_preset.empty() == tr_edge.empty()) {
        return usage_error(*train,
                           "train needs exactly one of --preset or --edge");
      }
      const Variant variant = variant_from_name(tr_variant);
      if (variant == Variant::ILE &&
          (!train->count("--t") || !train->count("--s"))) {
        return usage_error(*train, "the ile variant needs --t and --s");
      }
      CliDataset data = build_cli_dataset(tr_preset, tr_n, tr_edge,
                                          tr_features, tr_labels, seed);
      if (data.labels.empty()) {
        throw MissingLabelsError("training needs labels");
      }
      const Mat* base = data.features ? &*data.features : nullptr;
      Mat x;
      if (variant == Variant::None) {
        x = base ? *base : ones_column(data.graph.num_vertices());
      } else {
        Embedding emb =
            variant == Variant::Adjacency
                ? compute_adjacency_embedding(data.graph, tr_k, tol, seed)
                : compute_ile(data.graph, tr_t, tr_s, tr_k, tol, seed);
        x = augment_features(base, emb);
      }
      nn::ModelConfig mc = nn::default_config(nn::arch_from_name(tr_model));
      if (train->count("--epochs")) mc.epochs = tr_epochs;
      if (train->count("--hidden-dim")) mc.hidden_dim = tr_hidden;
      if (train->count("--layers")) mc.layers = tr_layers;
      if (train->count("--lr")) mc.lr = tr_lr;
      if (train->count("--weight-decay")) mc.weight_decay = tr_wd;
      mc.seed = seed;
      std::int32_t num_classes = 0;
      for (std::int32_t l : data.labels) {
        num_classes = std::max(num_classes, l + 1);
      }
      Split split = split_70_30(data.graph.num_vertices(), seed);
      nn::Model model = nn::build_model(mc, x.cols, num_classes, data.graph);
      nn::TrainReport rep = nn::train(model, x, data.labels, split, mc);
      nlohmann::json j = {{"model", nn::arch_name(mc.arch)},
                          {"variant", variant_name(variant)},
                          {"test_accuracy", rep.test_accuracy},
                          {"train_accuracy", rep.train_accuracy},
                          {"initial_loss", rep.initial_loss},
                          {"final_loss", rep.final_loss},
                          {"epochs_run", rep.epochs_run},
                          {"seed", rep.seed}};
      if (variant == Variant::ILE) {
        j["t"] = tr_t;
        j["s"] = tr_s;
        j["k"] = tr_k;
      }
      write_text_or_stdout(j.dump(2) + "\n", tr_out);
      return 0;
    }

    if (app.got_subcommand(grid)) {
      GridConfig cfg = load_grid_config(gr_config);
      ExperimentReport rep = run_grid(cfg, threads);
      const std::string text = gr_format == "csv" ? report_to_csv(rep)
                                                  : report_to_markdown(rep);
      write_text_or_stdout(text, gr_out);
      return 0;
    }

    if (app.got_subcommand(select)) {
      if (se_preset.empty() == se_edge.empty()) {
        return usage_error(*select,
                           "select needs exactly one of --preset or --edge");
      }
      CliDataset data = build_cli_dataset(se_preset, se_n, se_edge,
                                          se_features, se_labels, seed);
      std::string text;
      if (se_method == "scree") {
        if (!select->count("--t") || !select->count("--s")) {
          return usage_error(*select, "scree needs --t and --s");
        }
        Embedding emb =
            compute_ile(data.graph, se_t, se_s, se_k, tol, seed);
        const std::int32_t elbow = scree_elbow(emb.eigenvalues, se_k);
        text = "index,value\n";
        for (std::size_t i = 0; i < emb.eigenvalues.size(); ++i) {
          text += std::to_string(i + 1) + "," +
                  fmt_double(emb.eigenvalues[i]) + "\n";
        }
        text += "# chosen k=" + std::to_string(elbow) + "\n";
      } else {
        if (se_tvals.empty() || se_svals.empty()) {
          return usage_error(*select,
                             "correlation and cv need --t-values and "
                             "--s-values");
        }
        std::vector<std::pair<double, double>> grid_cells;
        for (double s : se_svals) {
          for (double t : se_tvals) grid_cells.emplace_back(t, s);
        }
        SelectionResult r;
        if (se_method == "correlation") {
          r = correlation_screen(data.graph, data.labels, grid_cells, se_k,
                                 seed);
        } else {
          nn::ModelConfig mc =
              nn::default_config(nn::arch_from_name(se_model));
          if (select->count("--epochs")) mc.epochs = se_epochs;
          const Mat* base = data.features ? &*data.features : nullptr;
          r = cross_validate(data.graph, base, data.labels, grid_cells, se_k,
                             se_folds, mc, seed);
        }
        text = "t,s,score\n";
        for (const ScoreCell& c : r.table) {
          text += fmt_double(c.t) + "," + fmt_double(c.s) + "," +
                  fmt_double(c.score) + "\n";
        }
        text += "# chosen t=" + fmt_double(r.chosen_t) +
                " s=" + fmt_double(r.chosen_s) + "\n";
      }
      write_text_or_stdout(text, se_out);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace ile
