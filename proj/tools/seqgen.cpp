// Command-line front end: campaign generation, instruction translation,
// candidate evaluation, corpus metrics, and a plain-text report.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "seqgen/corpus.hpp"
#include "seqgen/http_client.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw seqgen::CorpusError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw seqgen::CorpusError("cannot write " + path);
  out << content;
  if (!out) throw seqgen::CorpusError("write failed for " + path);
}

seqgen::CorpusFile load_corpus(const std::string& path) {
  return seqgen::corpus_from_text(read_file(path));
}

seqgen::ClientFactory make_factory(const std::string& provider) {
  if (provider == "template") return {};  // run_campaign defaults to the template client
  if (provider == "http") {
    auto proto = std::make_shared<seqgen::translation::HttpClient>(
        seqgen::translation::HttpClient::from_env());
    return [proto](const seqgen::Program&) {
      return std::make_unique<seqgen::translation::HttpClient>(*proto);
    };
  }
  throw seqgen::CorpusError("unknown provider: " + provider + " (expected template|http)");
}

// Candidate streams are JSONL: one {"id": ..., "source": ...} per line.
std::map<std::string, std::string> read_candidates(const std::string& path) {
  std::map<std::string, std::string> out;
  std::istringstream in(read_file(path));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = seqgen::json::parse(line);
      out[j.at("id").get<std::string>()] = j.at("source").get<std::string>();
    } catch (const seqgen::json::exception& e) {
      throw seqgen::CorpusError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void print_stats(const seqgen::metrics::CorpusStats& stats) {
  std::cout << std::fixed << std::setprecision(4);
  std::cout << "mean api calls:      " << stats.mean_api_call_count << "\n"
            << "mean path depth:     " << stats.mean_path_depth << "\n"
            << "mean binding count:  " << stats.mean_binding_count << "\n"
            << "mean instr words:    " << stats.mean_instruction_length_words << "\n"
            << "mean code words:     " << stats.mean_code_length_words << "\n"
            << "final ATC:           "
            << (stats.atc_series.empty() ? 0.0 : stats.atc_series.back().second) << "\n";
}

int cmd_generate(const std::string& config_path, const std::string& scenario,
                 const std::string& seed_str, int programs, int n_steps,
                 const std::string& coverage, bool translate, bool no_split,
                 const std::string& out_path) {
  seqgen::CampaignConfig cfg;
  if (!config_path.empty())
    cfg = seqgen::campaign_config_from_json(seqgen::json::parse(read_file(config_path)));
  if (!scenario.empty()) cfg.scenario = scenario;
  if (!seed_str.empty()) cfg.seed = std::stoull(seed_str);
  if (programs >= 0) cfg.programs_per_scenario = programs;
  if (n_steps > 0) cfg.n_steps = n_steps;
  if (!coverage.empty()) cfg.coverage = seqgen::coverage_mode_from_name(coverage);
  if (translate) cfg.translate = true;
  if (no_split) cfg.enable_split = false;

  auto result = seqgen::run_campaign(cfg, cfg.translate ? make_factory(cfg.provider)
                                                        : seqgen::ClientFactory{});
  for (const auto& s : result.skipped) std::cerr << "dead end: " << s << "\n";

  auto file = seqgen::corpus_of(cfg, result);
  write_file(out_path, seqgen::corpus_to_text(file));
  std::cout << "wrote " << out_path << ": " << file.entries.size() << " entries ("
            << result.skipped.size() << " skipped)\n";
  if (file.entries.empty()) {
    std::cerr << "no entries generated\n";
    return 1;
  }
  print_stats(seqgen::corpus_stats_of(file));
  return 0;
}

int cmd_translate(const std::string& corpus_path, const std::string& out_path,
                  const std::string& provider) {
  auto file = load_corpus(corpus_path);
  if (file.entries.empty()) {
    std::cerr << "no entries\n";
    return 1;
  }
  const std::string chosen = provider.empty() ? file.config.provider : provider;
  auto errors = seqgen::translate_corpus(file, make_factory(chosen));
  for (const auto& e : errors) std::cerr << "translation failed: " << e << "\n";
  file.config.translate = true;
  file.config.provider = chosen;
  const std::string dest = out_path.empty() ? corpus_path : out_path;
  write_file(dest, seqgen::corpus_to_text(file));
  std::cout << "wrote " << dest << ": " << file.entries.size() - errors.size() << "/"
            << file.entries.size() << " entries translated\n";
  return 0;
}

int cmd_evaluate(const std::string& corpus_path, const std::string& candidates_path,
                 const std::string& out_path, const std::string& report_path) {
  auto file = load_corpus(corpus_path);
  auto candidates = read_candidates(candidates_path);
  auto run = seqgen::evaluate_corpus(file, candidates);
  for (const auto& id : run.missing) std::cerr << "missing candidate: " << id << "\n";

  std::string lines;
  for (const auto& v : run.verdicts) lines += seqgen::canonical_dump(seqgen::eval::verdict_to_json(v)) + "\n";
  if (!out_path.empty()) write_file(out_path, lines);

  auto report = seqgen::eval::aggregate(run.verdicts);
  const auto rj = seqgen::eval::report_to_json(report);
  if (!report_path.empty()) write_file(report_path, seqgen::canonical_dump(rj) + "\n");
  std::cout << seqgen::canonical_dump(rj) << "\n";
  return run.verdicts.empty() ? 1 : 0;
}

int cmd_metrics(const std::string& corpus_path, const std::string& stats_path,
                const std::string& curve_path) {
  auto file = load_corpus(corpus_path);
  if (file.entries.empty()) {
    std::cerr << "no entries\n";
    return 1;
  }
  auto stats = seqgen::corpus_stats_of(file);
  write_file(stats_path, seqgen::canonical_dump(seqgen::metrics::corpus_stats_to_json(stats)) + "\n");
  write_file(curve_path, seqgen::metrics::curve_csv(stats.atc_series));
  std::cout << "wrote " << stats_path << " and " << curve_path << "\n";
  print_stats(stats);
  return 0;
}

int cmd_report(const std::string& corpus_path, const std::string& verdicts_path) {
  auto file = load_corpus(corpus_path);
  if (file.entries.empty()) {
    std::cout << "no entries\n";
    return 1;
  }
  int splits = 0, dead = 0, degraded = 0, translated = 0, review = 0;
  for (const auto& e : file.entries) {
    splits += e.split;
    dead += e.dead_branch;
    degraded += e.split_degraded;
    translated += e.instruction.has_value();
    review += e.needs_review;
  }
  std::cout << "scenario:            " << file.config.scenario << "\n"
            << "entries:             " << file.entries.size() << "\n"
            << "splits:              " << splits << " (dead-branch " << dead << ", degraded "
            << degraded << ")\n"
            << "translated:          " << translated << " (needs-review " << review << ")\n";
  print_stats(seqgen::corpus_stats_of(file));

  if (!verdicts_path.empty()) {
    std::istringstream in(read_file(verdicts_path));
    std::string line;
    int total = 0, passes = 0;
    std::map<std::string, int> classes;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto j = seqgen::json::parse(line);
      ++total;
      if (j.at("class") == "pass")
        ++passes;
      else
        ++classes[j.at("class").get<std::string>()];
    }
    std::cout << "verdicts:            " << passes << "/" << total << " pass\n";
    for (const auto& [name, count] : classes)
      std::cout << "  " << std::left << std::setw(18) << (name + ":") << count << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coverage-guided generator and evaluation harness for sequential API-call programs"};
  app.require_subcommand(1);
  int rc = 0;

  auto* gen = app.add_subcommand("generate", "run a generation campaign and write a corpus");
  std::string g_config, g_scenario, g_seed, g_coverage, g_out = "corpus.json";
  int g_programs = -1, g_n = -1;
  bool g_translate = false, g_no_split = false;
  gen->add_option("--config", g_config, "campaign config JSON file");
  gen->add_option("--scenario", g_scenario, "scenario name (session|tensor|mcp)");
  gen->add_option("--seed", g_seed, "campaign seed (uint64)");
  gen->add_option("--programs", g_programs, "programs to generate");
  gen->add_option("--n", g_n, "API calls per execution path");
  gen->add_option("--coverage", g_coverage, "data_dependency|adjacent|off");
  gen->add_flag("--translate", g_translate, "fill instructions during generation");
  gen->add_flag("--no-split", g_no_split, "disable control-flow injection");
  gen->add_option("--out", g_out, "corpus output path");
  gen->callback([&] {
    rc = cmd_generate(g_config, g_scenario, g_seed, g_programs, g_n, g_coverage, g_translate,
                      g_no_split, g_out);
  });

  auto* tr = app.add_subcommand("translate", "fill instructions on an existing corpus");
  std::string t_corpus, t_out, t_provider;
  tr->add_option("--corpus", t_corpus, "corpus file")->required();
  tr->add_option("--out", t_out, "output path (default: overwrite input)");
  tr->add_option("--provider", t_provider, "template|http");
  tr->callback([&] { rc = cmd_translate(t_corpus, t_out, t_provider); });

  auto* ev = app.add_subcommand("evaluate", "grade candidate programs against corpus oracles");
  std::string e_corpus, e_candidates, e_out = "verdicts.jsonl", e_report;
  ev->add_option("--corpus", e_corpus, "corpus file")->required();
  ev->add_option("--candidates", e_candidates, "candidates JSONL ({\"id\",\"source\"} per line)")
      ->required();
  ev->add_option("--out", e_out, "verdict JSONL output path");
  ev->add_option("--report", e_report, "aggregate report JSON output path");
  ev->callback([&] { rc = cmd_evaluate(e_corpus, e_candidates, e_out, e_report); });

  auto* me = app.add_subcommand("metrics", "write corpus stats JSON and ATC curve CSV");
  std::string m_corpus, m_stats = "stats.json", m_curve = "curve.csv";
  me->add_option("--corpus", m_corpus, "corpus file")->required();
  me->add_option("--out", m_stats, "stats JSON output path");
  me->add_option("--curve", m_curve, "ATC curve CSV output path");
  me->callback([&] { rc = cmd_metrics(m_corpus, m_stats, m_curve); });

  auto* re = app.add_subcommand("report", "print a plain-text corpus summary");
  std::string r_corpus, r_verdicts;
  re->add_option("--corpus", r_corpus, "corpus file")->required();
  re->add_option("--verdicts", r_verdicts, "verdict JSONL to summarize");
  re->callback([&] { rc = cmd_report(r_corpus, r_verdicts); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
