// Copyright 2026 The sketchsynth Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sketchsynth/bench.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitSolution = 0;
constexpr int kExitExhausted = 1;
constexpr int kExitTimeout = 2;
constexpr int kExitInputError = 3;

struct RunStats {
  std::string benchmark;
  std::string variant;
  double wall_seconds = 0;
  long long candidates = 0;
  long long concepts_cached = 0;
  long long tuples_materialized = 0;
  long long clauses_learned = 0;
  long long full_check_rejections = 0;
  long long partial_check_backtracks = 0;
  std::string outcome;
  long long solution_size = 0;
};

RunStats make_stats(const std::string &bench, synth::Variant v, const synth::SynthResult &r) {
  RunStats s;
  s.benchmark = bench;
  s.variant = synth::variant_name(v);
  s.wall_seconds = r.wall_seconds;
  s.candidates = r.counters.candidates;
  s.concepts_cached = r.counters.concepts_cached;
  s.tuples_materialized = r.counters.tuples_materialized;
  s.clauses_learned = r.counters.clauses_learned;
  s.full_check_rejections = r.counters.full_check_rejections;
  s.partial_check_backtracks = r.counters.partial_check_backtracks;
  s.outcome = synth::outcome_name(r.outcome);
  s.solution_size = r.solution_size;
  return s;
}

json stats_json(const RunStats &s) {
  return json{{"benchmark", s.benchmark},
              {"variant", s.variant},
              {"wall_seconds", s.wall_seconds},
              {"candidates", s.candidates},
              {"concepts_cached", s.concepts_cached},
              {"tuples_materialized", s.tuples_materialized},
              {"clauses_learned", s.clauses_learned},
              {"full_check_rejections", s.full_check_rejections},
              {"partial_check_backtracks", s.partial_check_backtracks},
              {"outcome", s.outcome},
              {"solution_size", s.solution_size}};
}

const char *kCsvHeader = "benchmark,variant,outcome,wall_seconds,candidates,concepts_cached,"
                         "tuples_materialized,clauses_learned,full_check_rejections,"
                         "partial_check_backtracks,solution_size";

std::string csv_row(const RunStats &s) {
  std::ostringstream os;
  os << s.benchmark << "," << s.variant << "," << s.outcome << "," << s.wall_seconds << ","
     << s.candidates << "," << s.concepts_cached << "," << s.tuples_materialized << ","
     << s.clauses_learned << "," << s.full_check_rejections << "," << s.partial_check_backtracks
     << "," << s.solution_size;
  return os.str();
}

std::optional<synth::BenchmarkFile> load_benchmark(const std::string &path, synth::Diags &diags) {
  std::ifstream in(path);
  if (!in) {
    diags.push_back({"cannot open " + path});
    return std::nullopt;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  auto bf = synth::parse_benchmark(ss.str(), diags);
  if (bf && bf->name.empty())
    bf->name = fs::path(path).stem().string();
  return bf;
}

void print_diags(const std::string &path, const synth::Diags &diags) {
  for (auto &d : diags)
    std::cerr << path << ":" << d.str() << "\n";
}

struct CommonOpts {
  std::string variant_str = "proph";
  std::uint64_t seed = 1;
  long long size_bound = -1;
  long long cex_int_bound = -1;
  long long cex_list_len = -1;
  int cex_samples = -1;
  long long budget = -1;
  double timeout = 120.0;
};

void apply_overrides(synth::BenchmarkFile &bf, const CommonOpts &o) {
  bf.cfg.seed = o.seed;
  if (o.size_bound >= 0)
    bf.instance.size_bound = o.size_bound;
  if (o.cex_int_bound >= 0)
    bf.cfg.int_bound = o.cex_int_bound;
  if (o.cex_list_len >= 0)
    bf.cfg.list_len = o.cex_list_len;
  if (o.cex_samples >= 0)
    bf.cfg.random_samples = o.cex_samples;
  if (o.budget >= 0)
    bf.cfg.budget = o.budget;
}

int cmd_synth(const std::string &file, const CommonOpts &opts, const std::string &stats_path,
              bool solution_only) {
  auto v = synth::parse_variant(opts.variant_str);
  if (!v) {
    std::cerr << "unknown variant '" << opts.variant_str << "'\n";
    return kExitInputError;
  }
  synth::Diags diags;
  auto bf = load_benchmark(file, diags);
  if (!bf) {
    print_diags(file, diags);
    return kExitInputError;
  }
  apply_overrides(*bf, opts);
  synth::SynthResult res = synth::solve(bf->instance, *v, bf->cfg, opts.timeout, nullptr, &diags);
  if (!diags.empty()) {
    print_diags(file, diags);
    return kExitInputError;
  }
  RunStats stats = make_stats(bf->name, *v, res);
  if (!stats_path.empty()) {
    std::ofstream out(stats_path, std::ios::app);
    out << stats_json(stats).dump() << "\n";
  }
  switch (res.outcome) {
  case synth::SynthResult::Outcome::Solution: {
    if (!solution_only) {
      std::cout << bf->name << ": solution (size " << res.solution_size << ", "
                << res.counters.candidates << " candidates, " << res.wall_seconds << "s)\n";
    }
    for (auto &f : res.solution.fns)
      std::cout << synth::definec_str(f.def) << "\n";
    return kExitSolution;
  }
  case synth::SynthResult::Outcome::Exhausted:
    if (!solution_only)
      std::cout << bf->name << ": space exhausted, no solution (" << res.counters.candidates
                << " candidates, " << res.wall_seconds << "s)\n";
    return kExitExhausted;
  case synth::SynthResult::Outcome::TimedOut:
    if (!solution_only)
      std::cout << bf->name << ": timeout after " << res.wall_seconds << "s ("
                << res.counters.candidates << " candidates)\n";
    return kExitTimeout;
  }
  return kExitInputError;
}

int cmd_bench(const std::string &dir, const CommonOpts &opts, const std::string &variants_str,
              const std::string &csv_path, std::string cactus_path,
              const std::string &stats_path) {
  std::vector<synth::Variant> variants;
  {
    std::stringstream ss(variants_str);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      auto v = synth::parse_variant(tok);
      if (!v) {
        std::cerr << "unknown variant '" << tok << "'\n";
        return kExitInputError;
      }
      variants.push_back(*v);
    }
  }
  if (variants.empty()) {
    std::cerr << "no variants selected\n";
    return kExitInputError;
  }
  std::vector<std::string> files;
  std::error_code ec;
  for (auto &entry : fs::directory_iterator(dir, ec))
    if (entry.path().extension() == ".bench")
      files.push_back(entry.path().string());
  if (ec) {
    std::cerr << "cannot read directory " << dir << "\n";
    return kExitInputError;
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::cerr << "no .bench files in " << dir << "\n";
    return kExitInputError;
  }

  std::vector<RunStats> rows;
  for (const std::string &file : files) {
    synth::Diags diags;
    auto bf = load_benchmark(file, diags);
    if (!bf) {
      print_diags(file, diags);
      return kExitInputError;
    }
    for (synth::Variant v : variants) {
      synth::BenchmarkFile run = *bf;
      apply_overrides(run, opts);
      synth::Diags rdiags;
      synth::SynthResult res = synth::solve(run.instance, v, run.cfg, opts.timeout, nullptr,
                                            &rdiags);
      if (!rdiags.empty()) {
        print_diags(file, rdiags);
        return kExitInputError;
      }
      RunStats s = make_stats(run.name, v, res);
      rows.push_back(s);
      std::cout << s.benchmark << " [" << s.variant << "]: " << s.outcome << " in "
                << s.wall_seconds << "s (" << s.candidates << " candidates, " << s.clauses_learned
                << " clauses)\n";
      if (!stats_path.empty()) {
        std::ofstream out(stats_path, std::ios::app);
        out << stats_json(s).dump() << "\n";
      }
    }
  }

  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    out << kCsvHeader << "\n";
    for (auto &s : rows)
      out << csv_row(s) << "\n";
    if (cactus_path.empty()) {
      fs::path p(csv_path);
      cactus_path = (p.parent_path() / (p.stem().string() + "_cactus.csv")).string();
    }
    std::ofstream cac(cactus_path);
    cac << "variant,time-budget,solved-count\n";
    for (synth::Variant v : variants) {
      std::vector<double> times;
      for (auto &s : rows)
        if (s.variant == synth::variant_name(v) && s.outcome == "solution")
          times.push_back(s.wall_seconds);
      std::sort(times.begin(), times.end());
      cac << synth::variant_name(v) << ",0,0\n";
      for (size_t i = 0; i < times.size(); ++i)
        cac << synth::variant_name(v) << "," << times[i] << "," << (i + 1) << "\n";
      cac << synth::variant_name(v) << "," << opts.timeout << "," << times.size() << "\n";
    }
  }

  int solved = 0, total = 0;
  for (auto &s : rows) {
    ++total;
    if (s.outcome == "solution")
      ++solved;
  }
  std::cout << "solved " << solved << "/" << total << " runs\n";
  return kExitSolution;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"counterexample-guided sketch-filling synthesizer"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string file, dir;
  std::string stats_path, csv_path = "bench_results.csv", cactus_path;
  std::string variants = "nogen,retro,proph";
  bool solution_only = false;

  CLI::App *sc_synth = app.add_subcommand("synth", "synthesize one benchmark");
  sc_synth->add_option("file", file, "benchmark file")->required();
  sc_synth->add_option("--variant", opts.variant_str, "nogen|retro|proph");
  sc_synth->add_option("--seed", opts.seed, "random seed");
  sc_synth->add_option("--size-bound", opts.size_bound, "override the hole-expression size bound");
  sc_synth->add_option("--cex-int-bound", opts.cex_int_bound, "exhaustive integer bound");
  sc_synth->add_option("--cex-list-len", opts.cex_list_len, "exhaustive list length bound");
  sc_synth->add_option("--cex-samples", opts.cex_samples, "random samples per check");
  sc_synth->add_option("--budget", opts.budget, "evaluation step budget");
  sc_synth->add_option("--timeout", opts.timeout, "timeout in seconds");
  sc_synth->add_option("--stats", stats_path, "append a JSON stats record to this file");
  sc_synth->add_flag("--print-solution", solution_only, "print only the solution");

  CLI::App *sc_bench = app.add_subcommand("bench", "run a benchmark suite");
  sc_bench->add_option("dir", dir, "directory of .bench files")->required();
  sc_bench->add_option("--variants", variants, "comma-separated variant list");
  sc_bench->add_option("--seed", opts.seed, "random seed");
  sc_bench->add_option("--timeout", opts.timeout, "per-run timeout in seconds");
  sc_bench->add_option("--csv", csv_path, "write per-run stats rows to this CSV");
  sc_bench->add_option("--cactus", cactus_path, "write the cactus-plot CSV to this path");
  sc_bench->add_option("--stats", stats_path, "append JSON stats records to this file");
  sc_bench->add_option("--cex-int-bound", opts.cex_int_bound, "exhaustive integer bound");
  sc_bench->add_option("--cex-list-len", opts.cex_list_len, "exhaustive list length bound");
  sc_bench->add_option("--cex-samples", opts.cex_samples, "random samples per check");
  sc_bench->add_option("--budget", opts.budget, "evaluation step budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  if (sc_synth->parsed())
    return cmd_synth(file, opts, stats_path, solution_only);
  return cmd_bench(dir, opts, variants, csv_path, cactus_path, stats_path);
}
