#include <charconv>
#include <deque>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli_lib.hpp"
#include "fibrank/error.hpp"
#include "fibrank/io.hpp"
#include "fibrank/version.hpp"

namespace {

using namespace fibrank;
using cli::PipelineConfig;

// epoch seconds or "YYYY-MM-DDTHH:MM:SSZ"
std::int64_t parse_time(const std::string& text) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec == std::errc{} && ptr == text.data() + text.size()) return v;
  try {
    return parse_utc(text);
  } catch (const Error&) {
    throw ConfigError("bad timestamp: " + text);
  }
}

struct PipelineFlags {
  std::string config_path;
  std::string input;
  std::string domains;
  std::string shortener;
  std::string status_file;
  std::string annotation_file;
  std::string out_dir;
  std::string obs_start, obs_end, eval_start, eval_end;
  std::string ratio_start, ratio_end;
  std::vector<std::string> metrics;
  double top_percent = 1.0;
  std::size_t top_n = 0;
  std::string scorer;
  std::string endpoint;
  std::string cache;
  std::uint64_t seed = 1;
  std::uint64_t follower_threshold = 500000;
  std::size_t max_k = 0;
  std::size_t stride = 1;
  unsigned workers = 0;
};

void add_pipeline_options(CLI::App& cmd, PipelineFlags& f) {
  cmd.add_option("-c,--config", f.config_path, "JSON config; flags override it");
  cmd.add_option("-i,--input", f.input, "corpus, line-delimited JSON (.gz ok)");
  cmd.add_option("--domains", f.domains, "low-credibility domain list");
  cmd.add_option("--shortener-map", f.shortener, "short-link TSV for offline expansion");
  cmd.add_option("--status-file", f.status_file, "account status CSV");
  cmd.add_option("--annotation-file", f.annotation_file, "account annotation CSV");
  cmd.add_option("-o,--out-dir", f.out_dir, "artifact directory");
  cmd.add_option("--obs-start", f.obs_start, "observation start (epoch or UTC)");
  cmd.add_option("--obs-end", f.obs_end, "observation end");
  cmd.add_option("--eval-start", f.eval_start, "evaluation start");
  cmd.add_option("--eval-end", f.eval_end, "evaluation end");
  cmd.add_option("--ratio-start", f.ratio_start, "sharing-ratio window start");
  cmd.add_option("--ratio-end", f.ratio_end, "sharing-ratio window end");
  cmd.add_option("--metrics", f.metrics,
                 "ranking metrics (fib, influence, popularity, bot_score)")
      ->delimiter(',');
  auto* percent = cmd.add_option("--top-percent", f.top_percent,
                                 "head size as percent of positive-value accounts");
  cmd.add_option("--top-n", f.top_n, "fixed head size")->excludes(percent);
  cmd.add_option("--scorer", f.scorer, "toxicity scorer: offline-stub, cached, live");
  cmd.add_option("--scorer-endpoint", f.endpoint, "HTTP scorer endpoint");
  cmd.add_option("--toxicity-cache", f.cache, "toxicity cache TSV path");
  cmd.add_option("--seed", f.seed, "seed for seeded subroutines");
  cmd.add_option("--follower-threshold", f.follower_threshold,
                 "prominence cutoff for the crosstab");
  cmd.add_option("--max-k", f.max_k, "scan depth cap (0: shorter ranking)");
  cmd.add_option("--stride", f.stride, "curve export stride");
  cmd.add_option("--workers", f.workers, "worker threads (0: all cores)");
  auto* strict = cmd.add_flag("--strict", "fail on the first malformed line");
  cmd.add_flag("--lenient", "count malformed lines and continue")->excludes(strict);
}

PipelineConfig make_config(const CLI::App& cmd, const PipelineFlags& f) {
  PipelineConfig cfg;
  if (cmd.count("--config")) {
    cfg = PipelineConfig::load(f.config_path);
    cfg.resolve_paths(std::filesystem::path(f.config_path).parent_path().string());
  }
  if (cmd.count("--input")) cfg.input = f.input;
  if (cmd.count("--domains")) cfg.domain_list = f.domains;
  if (cmd.count("--shortener-map")) cfg.shortener_map = f.shortener;
  if (cmd.count("--status-file")) cfg.status_file = f.status_file;
  if (cmd.count("--annotation-file")) cfg.annotation_file = f.annotation_file;
  if (cmd.count("--out-dir")) cfg.out_dir = f.out_dir;
  if (cmd.count("--obs-start")) cfg.split.observation.start = parse_time(f.obs_start);
  if (cmd.count("--obs-end")) cfg.split.observation.end = parse_time(f.obs_end);
  if (cmd.count("--eval-start")) cfg.split.evaluation.start = parse_time(f.eval_start);
  if (cmd.count("--eval-end")) cfg.split.evaluation.end = parse_time(f.eval_end);
  if (cmd.count("--ratio-start")) cfg.ratio_window.start = parse_time(f.ratio_start);
  if (cmd.count("--ratio-end")) cfg.ratio_window.end = parse_time(f.ratio_end);
  if (cmd.count("--metrics")) {
    cfg.metrics.clear();
    for (const auto& name : f.metrics) {
      const auto metric = parse_metric(name);
      if (!metric) throw ConfigError("unknown metric: " + name);
      cfg.metrics.push_back(*metric);
    }
  }
  if (cmd.count("--top-percent")) cfg.top_rule = TopRule::percent_positive(f.top_percent);
  if (cmd.count("--top-n")) cfg.top_rule = TopRule::top_n(f.top_n);
  if (cmd.count("--scorer")) cfg.scorer = f.scorer;
  if (cmd.count("--scorer-endpoint")) cfg.scorer_endpoint = f.endpoint;
  if (cmd.count("--toxicity-cache")) cfg.toxicity_cache = f.cache;
  if (cmd.count("--seed")) cfg.seed = f.seed;
  if (cmd.count("--follower-threshold")) cfg.follower_threshold = f.follower_threshold;
  if (cmd.count("--max-k")) cfg.max_scan_k = f.max_k;
  if (cmd.count("--stride")) cfg.curve_stride = f.stride;
  if (cmd.count("--workers")) cfg.workers = f.workers;
  if (cmd.count("--strict")) cfg.strict = true;
  if (cmd.count("--lenient")) cfg.strict = false;
  return cfg;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"superspreader identification pipeline"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::deque<PipelineFlags> flag_sets;
  std::vector<std::pair<CLI::App*, std::function<void()>>> actions;
  const auto pipeline = [&](const char* name, const char* help,
                            void (*run)(const PipelineConfig&)) {
    CLI::App* cmd = app.add_subcommand(name, help);
    PipelineFlags& f = flag_sets.emplace_back();
    add_pipeline_options(*cmd, f);
    actions.emplace_back(cmd, [cmd, &f, run] { run(make_config(*cmd, f)); });
  };
  pipeline("ingest", "parse, label, split, and export both retweet networks",
           cli::run_ingest);
  pipeline("rank", "compute per-account metrics and rankings", cli::run_rank);
  pipeline("dismantle", "dismantling curves against the optimal oracle",
           cli::run_dismantle);
  pipeline("scan", "prefix CvM scan comparing the first two metrics", cli::run_scan);
  pipeline("characterize", "behavioral profiles of the ranked heads",
           cli::run_characterize);

  GeneratorConfig gen;
  std::string synth_out = "synth";
  bool gzip_corpus = false;
  CLI::App* synth = app.add_subcommand("synth", "generate a corpus with ground truth");
  synth->add_option("--seed", gen.seed, "generator seed");
  synth->add_option("--accounts", gen.n_accounts, "total accounts");
  synth->add_option("--superspreaders", gen.n_superspreaders, "planted superspreaders");
  synth->add_option("--activity-exponent", gen.activity_exponent,
                    "posting heavy-tail exponent");
  synth->add_option("--retweet-exponent", gen.retweet_exponent,
                    "retweet heavy-tail exponent");
  synth->add_option("--domain-count", gen.lowcred_domain_count,
                    "low-credibility domains to mint");
  synth->add_option("--residual", gen.planted_residual,
                    "target evaluation-only mass share");
  synth->add_option("--observation-days", gen.observation_days, "observation length");
  synth->add_option("--evaluation-days", gen.evaluation_days, "evaluation length");
  synth->add_flag("--gzip", gzip_corpus, "gzip the corpus");
  synth->add_option("-o,--out-dir", synth_out, "output directory");
  actions.emplace_back(synth, [&] { cli::run_synth(gen, synth_out, gzip_corpus); });

  cli::StatsRequest req;
  std::string sides = "two-sided";
  std::string method;
  CLI::App* stats = app.add_subcommand("stats", "standalone statistical tests");
  stats->add_option("test", req.test, "cvm, mwu, spearman, or alpha")
      ->required()
      ->check(CLI::IsMember({"cvm", "mwu", "spearman", "alpha"}));
  stats->add_option("--x", req.x_path, "first sample, one value per line");
  stats->add_option("--y", req.y_path, "second sample");
  stats->add_option("--annotations", req.annotations_path, "annotation CSV for alpha");
  stats->add_option("--out", req.out_path, "also write the result JSON here");
  stats->add_option("--sides", sides, "mwu alternative")
      ->check(CLI::IsMember({"two-sided", "less", "greater"}));
  stats->add_option("--method", method, "force the p-value method")
      ->check(CLI::IsMember(
          {"exact", "exact_permutation", "mc", "monte_carlo", "asymptotic"}));
  stats->add_option("--seed", req.options.seed, "Monte-Carlo seed");
  stats->add_option("--mc-rounds", req.options.mc_rounds, "Monte-Carlo rounds");
  actions.emplace_back(stats, [&] {
    if (sides == "less")
      req.sides = Sides::less;
    else if (sides == "greater")
      req.sides = Sides::greater;
    if (method == "exact" || method == "exact_permutation")
      req.options.method = PMethod::exact_permutation;
    else if (method == "mc" || method == "monte_carlo")
      req.options.method = PMethod::monte_carlo;
    else if (method == "asymptotic")
      req.options.method = PMethod::asymptotic;
    std::cout << cli::run_stats(req);
  });

  try {
    app.parse(argc, argv);
    for (const auto& [cmd, run] : actions)
      if (cmd->parsed()) run();
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::exit_code_for(e);
  }
  return 0;
}
