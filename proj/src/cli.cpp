// Copyright 2026 The Tripress Authors
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

#include "tripress/cli.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "tripress/error.h"
#include "tripress/generator.h"
#include "tripress/orchestrator.h"
#include "tripress/verifier.h"

namespace tripress {

namespace fs = std::filesystem;

namespace {

struct EncodeOptions {
  uint32_t places = 1;
  std::size_t chunk_size = kDefaultChunkSize;
  std::size_t chunks_per_loop = 1;
  std::vector<std::string> inputs;
  std::string out;
  std::string hosts_file;
  uint32_t rank = 0;
  bool gzip_output = false;
  bool in_memory = false;
  bool skip_bad = false;
  bool metrics_per_loop = false;
  std::optional<uint64_t> shuffle_seed;
  std::string dict_dir;
};

void add_encode_options(CLI::App& cmd, EncodeOptions& o, bool needs_dict) {
  cmd.add_option("--places,-p", o.places, "number of places")
      ->envname("TRIPRESS_PLACES")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--chunk-size", o.chunk_size, "statements per chunk")->check(CLI::PositiveNumber);
  cmd.add_option("--chunks-per-loop", o.chunks_per_loop, "chunks each place takes per loop")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--in", o.inputs, "input N-Triples/N-Quads files (.gz allowed)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd.add_option("--out", o.out, "output directory")->required();
  cmd.add_option("--hosts", o.hosts_file, "host:port list, one process per line (TCP transport)")
      ->check(CLI::ExistingFile);
  cmd.add_option("--rank", o.rank, "this process's line in --hosts");
  cmd.add_flag("--gzip-output", o.gzip_output, "gzip dictionaries and data files");
  cmd.add_flag("--in-memory", o.in_memory, "hold outputs in memory until the run ends");
  cmd.add_flag("--skip-bad", o.skip_bad, "count and skip malformed statements");
  cmd.add_flag("--metrics-per-loop", o.metrics_per_loop, "record counters for every loop");
  cmd.add_option("--shuffle-seed", o.shuffle_seed, "randomize chunk-to-place assignment");
  if (needs_dict) {
    cmd.add_option("--dict", o.dict_dir, "directory of a previous run")
        ->required()
        ->check(CLI::ExistingDirectory);
  }
}

RunConfig make_config(const EncodeOptions& o) {
  RunConfig c;
  c.place_count = o.places;
  c.chunk_size = o.chunk_size;
  c.chunks_per_loop = o.chunks_per_loop;
  for (const auto& in : o.inputs) c.input_paths.emplace_back(in);
  c.output_dir = o.out;
  if (!o.hosts_file.empty()) c.hosts = read_hosts_file(o.hosts_file);
  c.rank = o.rank;
  c.gzip_output = o.gzip_output;
  c.in_memory = o.in_memory;
  c.skip_bad = o.skip_bad;
  c.metrics_per_loop = o.metrics_per_loop;
  c.shuffle_seed = o.shuffle_seed;
  c.existing_dict_dir = o.dict_dir;
  return c;
}

void print_run(std::ostream& out, const RunReport& r) {
  out << emit_report(r.load(), r).table;
  if (r.skipped > 0) out << "skipped malformed statements: " << r.skipped << "\n";
}

std::vector<uint32_t> parse_places_list(const std::string& text) {
  std::vector<uint32_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      long v = std::stol(item);
      if (v < 1) throw std::out_of_range("places");
      out.push_back(static_cast<uint32_t>(v));
    } catch (const std::exception&) {
      throw Error(ErrorKind::kConfig, "bad --places-list entry '" + item + "'");
    }
  }
  if (out.empty()) throw Error(ErrorKind::kConfig, "--places-list is empty");
  return out;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distributed dictionary encoding for RDF statement streams", "tripress"};
  app.require_subcommand(1);

  EncodeOptions enc;
  auto* encode = app.add_subcommand("encode", "encode datasets into ids and dictionaries");
  add_encode_options(*encode, enc, false);

  EncodeOptions upd;
  auto* update = app.add_subcommand("update", "encode new data against existing dictionaries");
  add_encode_options(*update, upd, true);

  EncodeOptions txn;
  std::size_t batch_size = 100;
  uint64_t batches = 10;
  bool parallel = false;
  auto* txn_cmd = app.add_subcommand("txn", "replay small transactional batches");
  add_encode_options(*txn_cmd, txn, true);
  txn_cmd->add_option("--batch-size", batch_size, "statements per batch")->check(CLI::PositiveNumber);
  txn_cmd->add_option("--batches", batches, "number of batches to replay");
  txn_cmd->add_flag("--parallel", parallel, "run one batch per place concurrently");

  std::string decode_dir;
  std::string decode_out;
  auto* decode_cmd = app.add_subcommand("decode", "turn a run back into N-Triples/N-Quads");
  decode_cmd->add_option("dir", decode_dir, "run directory")->required()->check(CLI::ExistingDirectory);
  decode_cmd->add_option("--out", decode_out, "output file (default: stdout)");

  std::string verify_dir;
  auto* verify = app.add_subcommand("verify", "check dictionary consistency of a run");
  verify->add_option("dir", verify_dir, "run directory")->required()->check(CLI::ExistingDirectory);

  GeneratorParams gen_params;
  std::string gen_out;
  std::string gen_arity = "3";
  auto* gen = app.add_subcommand("gen", "generate a Zipf-distributed synthetic dataset");
  gen->add_option("--statements,-n", gen_params.statements, "statement count");
  gen->add_option("--terms,-u", gen_params.distinct_terms, "size of the term universe")
      ->check(CLI::PositiveNumber);
  gen->add_option("--zipf,-s", gen_params.zipf, "Zipf exponent (0 = uniform)");
  gen->add_option("--seed", gen_params.seed, "random seed");
  gen->add_option("--arity", gen_arity, "3, 4 or mixed")
      ->check(CLI::IsMember({"3", "4", "mixed"}));
  gen->add_option("--term-len", gen_params.mean_term_len, "mean term length in bytes");
  gen->add_option("--out", gen_out, "dataset path (.gz to compress)")->required();

  std::vector<std::string> oracle_in;
  std::string oracle_out;
  auto* oracle = app.add_subcommand("oracle-encode", "sequential single-dictionary encoding");
  oracle->add_option("--in", oracle_in, "input files")->required()->check(CLI::ExistingFile);
  oracle->add_option("--out", oracle_out, "output directory")->required();

  std::string stats_dir;
  auto* stats = app.add_subcommand("stats", "print the report of a run");
  stats->add_option("dir", stats_dir, "run directory")->required()->check(CLI::ExistingDirectory);

  std::string places_list = "1,2,4,8";
  std::vector<std::string> bench_in;
  std::string bench_out;
  std::size_t bench_chunk = kDefaultChunkSize;
  std::size_t bench_cpl = 1;
  int bench_repeat = 1;
  auto* bench = app.add_subcommand("bench", "runtime versus number of places");
  bench->add_option("--places-list", places_list, "comma-separated place counts");
  bench->add_option("--in", bench_in, "input files")->required()->check(CLI::ExistingFile);
  bench->add_option("--out", bench_out, "scratch directory (default: temporary)");
  bench->add_option("--chunk-size", bench_chunk)->check(CLI::PositiveNumber);
  bench->add_option("--chunks-per-loop", bench_cpl)->check(CLI::PositiveNumber);
  bench->add_option("--repeat", bench_repeat, "runs per place count; the fastest is kept")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << "\n" << app.help();
    return 1;
  }

  try {
    if (*encode) {
      print_run(out, run_encoding(make_config(enc)));
    } else if (*update) {
      RunConfig c = make_config(upd);
      print_run(out, run_update(c, c.existing_dict_dir));
    } else if (*txn_cmd) {
      RunConfig c = make_config(txn);
      c.parallel_transactions = parallel;
      RawChunkReader reader(c.input_paths, batch_size);
      uint64_t taken = 0;
      auto report = run_transactional(c, [&]() -> std::optional<RawChunk> {
        if (taken >= batches) return std::nullopt;
        ++taken;
        return reader.next();
      });
      char line[120];
      std::snprintf(line, sizeof line, "%8s %12s %12s\n", "batch", "statements", "seconds");
      out << line;
      for (const auto& b : report.batches) {
        std::snprintf(line, sizeof line, "%8llu %12llu %12.6f\n",
                      static_cast<unsigned long long>(b.batch),
                      static_cast<unsigned long long>(b.statements), b.seconds);
        out << line;
      }
      std::snprintf(line, sizeof line, "mean latency %.6f s over %zu batches\n",
                    report.mean_seconds(), report.batches.size());
      out << line;
    } else if (*decode_cmd) {
      if (decode_out.empty()) {
        decode_to_stream(decode_dir, out);
      } else {
        std::ofstream file(decode_out, std::ios::binary | std::ios::trunc);
        if (!file) throw Error(ErrorKind::kIo, "cannot create " + decode_out);
        decode_to_stream(decode_dir, file);
        if (!file) throw Error(ErrorKind::kIo, "write failed on " + decode_out);
      }
    } else if (*verify) {
      ConsistencyReport report = verify_run(verify_dir);
      out << report.summary() << "\n";
      for (const auto& v : report.violations) {
        out << "  " << to_string(v.kind) << ": " << v.detail << "\n";
      }
      return report.ok() ? 0 : 3;
    } else if (*gen) {
      gen_params.arity = gen_arity == "mixed" ? 0 : static_cast<uint8_t>(std::stoi(gen_arity));
      GeneratedStats s = generate(gen_params, gen_out);
      out << nlohmann::json(s).dump(2) << "\n";
    } else if (*oracle) {
      std::vector<fs::path> paths(oracle_in.begin(), oracle_in.end());
      ChunkStream stream(paths, kDefaultChunkSize);
      SequentialEncoding seq;
      while (auto chunk = stream.next()) {
        for (const auto& s : chunk->statements) seq.add(s);
      }
      write_sequential_run(seq, oracle_out);
      out << "statements " << seq.arities.size() << "  distinct terms " << seq.dict.size() << "\n";
    } else if (*stats) {
      std::ifstream in(fs::path(stats_dir) / kReportName);
      if (!in) throw Error(ErrorKind::kIo, "no report.json in " + stats_dir);
      RunReport r = nlohmann::json::parse(in).get<RunReport>();
      print_run(out, r);
      if (!r.error.empty()) out << "run failed: " << r.error << "\n";
    } else if (*bench) {
      auto list = parse_places_list(places_list);
      fs::path scratch = bench_out.empty() ? fs::temp_directory_path() / "tripress-bench"
                                           : fs::path(bench_out);
      char line[160];
      std::snprintf(line, sizeof line, "%8s %12s %10s %16s\n", "places", "seconds", "speedup",
                    "statements/s");
      out << line;
      double base = 0;
      for (uint32_t p : list) {
        double best = 0;
        RunReport last;
        for (int r = 0; r < bench_repeat; ++r) {
          RunConfig c;
          c.place_count = p;
          c.chunk_size = bench_chunk;
          c.chunks_per_loop = bench_cpl;
          c.input_paths.assign(bench_in.begin(), bench_in.end());
          c.output_dir = scratch / ("p" + std::to_string(p));
          c.in_memory = true;
          last = run_encoding(c);
          if (r == 0 || last.seconds < best) best = last.seconds;
        }
        if (base == 0) base = best;
        std::snprintf(line, sizeof line, "%8u %12.3f %10.2f %16.0f\n", p, best, base / best,
                      static_cast<double>(last.statements) / best);
        out << line;
      }
      if (bench_out.empty()) fs::remove_all(scratch);
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const nlohmann::json::exception& e) {
    err << "error: bad report: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace tripress
