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


#include "fedledger/report_io.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fedledger {
namespace {

namespace fs = std::filesystem;

SimulationResult SmallRun() {
  SimulationConfig c;
  c.synthetic.sample_count = 1000;
  c.synthetic.feature_dim = 4;
  c.node_count = 3;
  c.rounds = 5;
  return run_simulation(c);
}

std::size_t Count(const std::string& s, char c) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), c));
}

TEST(MetricsCsvTest, HeaderAndOneRowPerRound) {
  const SimulationResult r = SmallRun();
  const std::string csv = metrics_csv(r.report);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, kMetricsColumns);
  const std::size_t columns = Count(header, ',') + 1;
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(Count(line, ',') + 1, columns);
    EXPECT_EQ(line.rfind(std::to_string(rows) + ",", 0), 0u);
  }
  EXPECT_EQ(rows, 5);
}

TEST(NodesCsvTest, OneRowPerNodePerRound) {
  const SimulationResult r = SmallRun();
  const std::string csv = nodes_csv(r.report);
  EXPECT_EQ(Count(csv, '\n'), 1u + 5u * 3u);
  EXPECT_EQ(csv.rfind(kNodeColumns, 0), 0u);
}

TEST(SummaryTest, ContainsHeadlineFields) {
  const SimulationResult r = SmallRun();
  const std::string s = summary_text(r);
  for (const char* key : {"final.accuracy = ", "rounds_to_convergence = ",
                          "total_uplink_bytes = ", "chain_tip_hash = ",
                          "sim.rounds = 5"}) {
    EXPECT_NE(s.find(key), std::string::npos) << key;
  }
}

TEST(SvgTest, StandaloneDocuments) {
  const SimulationResult r = SmallRun();
  for (const std::string& svg : {accuracy_svg(r.report), bytes_svg(r.report)}) {
    EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
    EXPECT_NE(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\""), std::string::npos);
    EXPECT_NE(svg.find("<polyline"), std::string::npos);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
  }
  SimulationReport empty;
  EXPECT_NE(accuracy_svg(empty).find("</svg>"), std::string::npos);
}

TEST(WriteOutputsTest, WritesAllArtifacts) {
  const SimulationResult r = SmallRun();
  const fs::path dir = fs::temp_directory_path() / "fedledger_outputs_test";
  fs::remove_all(dir);
  write_outputs(r, dir);
  for (const char* name : {"metrics.csv", "nodes.csv", "summary.txt",
                           "ledger.export", "accuracy.svg", "bytes.svg"}) {
    EXPECT_TRUE(fs::is_regular_file(dir / name)) << name;
  }
  EXPECT_TRUE(fs::is_directory(dir / "archive"));
  EXPECT_EQ(static_cast<std::size_t>(std::distance(
                fs::directory_iterator(dir / "archive"), fs::directory_iterator{})),
            r.archive.size());
  const Chain back = read_ledger_export(dir / "ledger.export");
  const UpdateArchive archive = UpdateArchive::load(dir / "archive");
  EXPECT_TRUE(verify_chain(back, &archive).valid);
  EXPECT_EQ(back.tip_hash(), r.chain.tip_hash());
}

}  // namespace
}  // namespace fedledger
