#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "logdoc/evalgen.hpp"
#include "logdoc/message_defs.hpp"
#include "logdoc/pipeline.hpp"
#include "logdoc/util.hpp"

namespace fs = std::filesystem;
using namespace logdoc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;  // validation / domain failures
constexpr int kExitUsage = 2;    // usage and I/O problems

struct ParseOpts {
  std::string defs_path;
  std::string input_path;
  std::string out_dir;
  std::string dict_in;
  std::string dict_out;
  std::string input_format = "lines";  // or "corpus" (label<TAB>line)
  std::string annotation = "on";
  std::size_t bootstrap = 10000;
  int window = 4;
  double param_threshold = 0.90;
  double sim_threshold = 0.5;
  int tree_depth = 4;
  int max_children = 100;
};

std::vector<std::string> read_input_lines(const std::string& path, const std::string& format) {
  std::vector<std::string> lines;
  std::istringstream in(read_text_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (format == "corpus") {
      const std::size_t tab = line.find('\t');
      line = tab == std::string::npos ? std::string() : line.substr(tab + 1);
    }
    lines.push_back(line);
  }
  return lines;
}

std::string templates_jsonl(const std::vector<TemplateCluster>& templates) {
  std::string out;
  for (const auto& c : templates) {
    nlohmann::json j;
    j["cluster_id"] = c.cluster_id;
    j["member_count"] = c.member_count;
    j["template"] = c.rendered();
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string assignments_tsv(const std::vector<std::pair<std::size_t, int>>& assignments) {
  std::string out;
  for (const auto& [line_no, cluster] : assignments) {
    out += std::to_string(line_no);
    out += '\t';
    out += std::to_string(cluster);
    out += '\n';
  }
  return out;
}

PipelineConfig pipeline_config(const ParseOpts& opts, bool annotation) {
  PipelineConfig cfg;
  cfg.bootstrap_count = opts.bootstrap;
  cfg.annotation_enabled = annotation;
  cfg.window = opts.window;
  cfg.miner.tree_depth = opts.tree_depth;
  cfg.miner.max_children = opts.max_children;
  cfg.miner.sim_threshold = opts.sim_threshold;
  cfg.miner.param_match_threshold = opts.param_threshold;
  return cfg;
}

int run_parse_like(const ParseOpts& opts, bool annotation) {
  DefinitionStore defs;
  if (annotation && !opts.defs_path.empty()) defs = load_definitions(opts.defs_path);

  LoadedStores preload{ValueDictionary{}, SignatureStore{0}};
  if (!opts.dict_in.empty()) preload = load_stores(opts.dict_in);

  Pipeline pipeline(pipeline_config(opts, annotation), &defs, std::move(preload));
  const auto lines = read_input_lines(opts.input_path, opts.input_format);
  const RunReport report = pipeline.run_stream(lines);

  const fs::path out_dir(opts.out_dir);
  fs::create_directories(out_dir);
  write_text_file_atomic(out_dir / "templates.jsonl", templates_jsonl(report.templates));
  write_text_file_atomic(out_dir / "assignments.tsv", assignments_tsv(report.assignments));
  write_text_file_atomic(out_dir / "report.txt", report.to_text());
  if (annotation) {
    const fs::path dict_path =
        opts.dict_out.empty() ? out_dir / "dict.json" : fs::path(opts.dict_out);
    save_stores(dict_path, pipeline.dictionary(), pipeline.signatures());
  }

  std::cout << report.to_text();
  return kExitOk;
}

int run_validate(const std::string& defs_path) {
  const DefinitionStore store = load_definitions(defs_path);
  std::cout << store.size() << " definitions ok\n";
  return kExitOk;
}

int run_generate(const std::string& defs_path, const std::string& out_path, std::size_t n,
                 std::uint64_t seed, double noise_rate, std::size_t pool_size) {
  const DefinitionStore defs = load_definitions(defs_path);
  GeneratorConfig cfg;
  cfg.noise_rate = noise_rate;
  cfg.value_model.pool_size = pool_size;
  const auto corpus = generate_corpus(defs, n, seed, cfg);
  write_corpus(out_path, corpus);
  std::cout << "wrote " << corpus.size() << " lines to " << out_path << "\n";
  return kExitOk;
}

int run_eval(const std::string& labels_path, const std::string& assignments_path,
             const std::string& granularity) {
  auto labels = read_labels(labels_path);
  std::vector<std::string> joined_labels;
  std::vector<int> clusters;
  std::istringstream in(read_text_file(assignments_path));
  std::string line;
  std::size_t line_count = 0;
  while (std::getline(in, line)) {
    ++line_count;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      std::cerr << "assignments line " << line_count << ": expected line_no<TAB>cluster_id\n";
      return kExitUsage;
    }
    std::size_t line_no = 0;
    int cluster = 0;
    try {
      line_no = std::stoull(line.substr(0, tab));
      cluster = std::stoi(line.substr(tab + 1));
    } catch (const std::exception&) {
      std::cerr << "assignments line " << line_count << ": malformed numbers\n";
      return kExitUsage;
    }
    if (line_no < 1 || line_no > labels.size()) {
      std::cerr << "assignment for line " << line_no << " has no label (labels file has "
                << labels.size() << " lines)\n";
      return kExitUsage;
    }
    std::string label = labels[line_no - 1];
    if (granularity == "message-id") label = label.substr(0, label.find('/'));
    joined_labels.push_back(std::move(label));
    clusters.push_back(cluster);
  }
  const PairwiseCounts counts = pairwise_counts(joined_labels, clusters);
  const Metrics m = metrics(counts);
  std::printf("pairs over %zu assigned lines: tp=%llu fp=%llu fn=%llu%s\n",
              joined_labels.size(), static_cast<unsigned long long>(counts.tp),
              static_cast<unsigned long long>(counts.fp),
              static_cast<unsigned long long>(counts.fn),
              m.degenerate ? " (degenerate denominator reported as 1.0)" : "");
  std::printf("precision=%.6f\n", m.precision);
  std::printf("recall=%.6f\n", m.recall);
  std::printf("f_measure=%.6f\n", m.f_measure);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"logdoc: documentation-driven log parsing and template mining"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read option defaults from an INI file");

  ParseOpts parse_opts;
  std::string generate_defs, generate_out = "corpus.tsv";
  std::size_t generate_n = 1000;
  std::uint64_t generate_seed = 1;
  double generate_noise = 0.0;
  std::size_t generate_pool = 160;
  std::string eval_labels, eval_assignments, eval_granularity = "resolved";
  std::string validate_defs;

  auto* validate = app.add_subcommand("validate", "load and validate a definitions file");
  validate->add_option("defs,--defs", validate_defs, "definitions json file")
      ->required()
      ->check(CLI::ExistingFile);

  auto* parse = app.add_subcommand("parse", "parse a log stream and mine templates");
  parse->add_option("defs,--defs", parse_opts.defs_path, "definitions json file")
      ->required()
      ->check(CLI::ExistingFile);
  parse->add_option("input,--input", parse_opts.input_path, "newline-delimited log file")
      ->required()
      ->check(CLI::ExistingFile);
  parse->add_option("out-dir,--out-dir", parse_opts.out_dir, "output directory")->required();
  parse->add_option("--dict-in", parse_opts.dict_in, "dictionary/signature file to preload")
      ->check(CLI::ExistingFile);
  parse->add_option("--dict-out", parse_opts.dict_out, "write dictionary/signatures here");
  parse->add_option("--bootstrap", parse_opts.bootstrap, "record-only lines before mining");
  parse->add_option("--window", parse_opts.window, "profile window size");
  parse->add_option("--param-threshold", parse_opts.param_threshold,
                    "token/parameter cosine match threshold");
  parse->add_option("--sim-threshold", parse_opts.sim_threshold, "cluster similarity threshold");
  parse->add_option("--tree-depth", parse_opts.tree_depth, "prefix tree depth");
  parse->add_option("--max-children", parse_opts.max_children, "prefix tree fan-out cap");
  parse->add_option("--annotation", parse_opts.annotation, "on|off")
      ->check(CLI::IsMember({"on", "off"}));
  parse->add_option("--input-format", parse_opts.input_format, "lines|corpus")
      ->check(CLI::IsMember({"lines", "corpus"}));

  auto* generate = app.add_subcommand("generate", "generate a labeled synthetic corpus");
  generate->add_option("defs,--defs", generate_defs, "definitions json file")
      ->required()
      ->check(CLI::ExistingFile);
  generate->add_option("out,--out", generate_out, "corpus output file (label<TAB>line)");
  generate->add_option("-n,--count", generate_n, "number of lines");
  generate->add_option("--seed", generate_seed, "generator seed");
  generate->add_option("--noise-rate", generate_noise, "per-line mutation probability");
  generate->add_option("--pool-size", generate_pool, "distinct values per pool");

  auto* eval = app.add_subcommand("eval", "pairwise metrics of assignments against labels");
  eval->add_option("labels,--labels", eval_labels, "corpus or label file")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("assignments,--assignments", eval_assignments,
                   "line_no<TAB>cluster_id file")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--granularity", eval_granularity, "resolved|message-id")
      ->check(CLI::IsMember({"resolved", "message-id"}));

  auto* baseline = app.add_subcommand(
      "baseline", "mine raw tokens with annotation disabled (plain Drain comparison)");
  baseline->add_option("input,--input", parse_opts.input_path, "newline-delimited log file")
      ->required()
      ->check(CLI::ExistingFile);
  baseline->add_option("out-dir,--out-dir", parse_opts.out_dir, "output directory")->required();
  baseline->add_option("--bootstrap", parse_opts.bootstrap, "lines to skip before mining");
  baseline->add_option("--sim-threshold", parse_opts.sim_threshold,
                       "cluster similarity threshold");
  baseline->add_option("--tree-depth", parse_opts.tree_depth, "prefix tree depth");
  baseline->add_option("--max-children", parse_opts.max_children, "prefix tree fan-out cap");
  baseline->add_option("--input-format", parse_opts.input_format, "lines|corpus")
      ->check(CLI::IsMember({"lines", "corpus"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*validate) return run_validate(validate_defs);
    if (*parse) return run_parse_like(parse_opts, parse_opts.annotation == "on");
    if (*generate)
      return run_generate(generate_defs, generate_out, generate_n, generate_seed,
                          generate_noise, generate_pool);
    if (*eval) return run_eval(eval_labels, eval_assignments, eval_granularity);
    if (*baseline) return run_parse_like(parse_opts, false);
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
