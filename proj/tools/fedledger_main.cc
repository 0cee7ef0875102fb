// Copyright 2026 The fedledger Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command line front end:
//   fedledger simulate --config FILE [--seed S] [--out DIR] [--threads N]
//   fedledger gen-data --spec FILE --out CSV
//   fedledger verify-chain EXPORT [--archive DIR]

#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fedledger/config.h"
#include "fedledger/data.h"
#include "fedledger/driver.h"
#include "fedledger/ledger.h"
#include "fedledger/report_io.h"

namespace fs = std::filesystem;

namespace {

// Same stream the simulator uses for its own synthetic data, so gen-data
// output for a given seed equals the dataset `simulate` would generate.
constexpr std::uint64_t kDataStream = 1;

int Simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
             std::optional<std::size_t> threads, const std::string& out_dir) {
  fedledger::SimulationConfig config = fedledger::load_config(config_path);
  if (seed) config.seed = *seed;
  if (threads) config.threads = *threads;
  config.validate();
  const fedledger::SimulationResult result = fedledger::run_simulation(config);
  fedledger::write_outputs(result, out_dir);

  const auto& final_metrics = result.report.final_metrics;
  std::printf("rounds=%zu accuracy=%.4f f1=%.4f chain_height=%llu\n",
              result.report.rounds.size(), final_metrics.accuracy,
              final_metrics.f1,
              static_cast<unsigned long long>(result.chain.height()));
  std::printf("outputs written to %s\n", out_dir.c_str());
  return 0;
}

int GenData(const std::string& spec_path, const std::string& out_path) {
  // The --spec file uses the config syntax; synthetic.*, sim.seed and
  // data.label_column are the keys that matter here.
  const fedledger::SimulationConfig config =
      fedledger::load_config(spec_path);
  config.synthetic.validate();
  fedledger::RngState rng = fedledger::seeded_rng(config.seed, kDataStream);
  const fedledger::LabeledDataset data =
      fedledger::generate_synthetic(config.synthetic, rng);
  const fs::path out(out_path);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  fedledger::write_csv(data, out, config.label_column);
  std::printf("wrote %zu rows x %zu features to %s\n", data.rows(),
              data.dim(), out_path.c_str());
  return 0;
}

int VerifyChain(const std::string& export_path,
                const std::string& archive_dir) {
  const fedledger::Chain chain = fedledger::read_ledger_export(export_path);
  std::optional<fedledger::UpdateArchive> archive;
  if (!archive_dir.empty()) archive = fedledger::UpdateArchive::load(archive_dir);
  const fedledger::ChainVerification check =
      fedledger::verify_chain(chain, archive ? &*archive : nullptr);
  if (!check.valid) {
    std::printf("INVALID at height %llu: %s\n",
                static_cast<unsigned long long>(check.height),
                check.cause.c_str());
    return 1;
  }
  std::printf("OK: %zu blocks, tip height %llu, tip hash %s\n", chain.size(),
              static_cast<unsigned long long>(chain.height()),
              fedledger::to_hex(chain.tip_hash()).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated intrusion-detection training on a hash-chained "
               "ledger"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "Run a simulation");
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  simulate->add_option("--config", config_path, "Config file")
      ->required()
      ->check(CLI::ExistingFile);
  simulate->add_option("--seed", seed, "Override sim.seed");
  simulate->add_option("--threads", threads, "Override sim.threads");
  simulate->add_option("--out", out_dir, "Output directory");

  auto* gen = app.add_subcommand("gen-data", "Write a synthetic dataset");
  std::string spec_path;
  std::string csv_path;
  gen->add_option("--spec", spec_path, "Dataset spec file")
      ->required()
      ->check(CLI::ExistingFile);
  gen->add_option("--out", csv_path, "Output CSV")->required();

  auto* verify = app.add_subcommand("verify-chain", "Verify a ledger export");
  std::string export_path;
  std::string archive_dir;
  verify->add_option("export", export_path, "ledger.export file")
      ->required()
      ->check(CLI::ExistingFile);
  verify->add_option("--archive", archive_dir,
                     "Archive directory to check record digests against")
      ->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return Simulate(config_path, seed, threads, out_dir);
    if (*gen) return GenData(spec_path, csv_path);
    if (*verify) return VerifyChain(export_path, archive_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
