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

#ifndef FEDLEDGER_REPORT_IO_H_
#define FEDLEDGER_REPORT_IO_H_

#include <filesystem>
#include <string>

#include "fedledger/driver.h"

namespace fedledger {

// Column order of metrics.csv.
inline constexpr const char* kMetricsColumns =
    "round,accuracy,precision,recall,f1,mean_local_loss,uplink_bytes,"
    "uplink_messages,downlink_bytes,ledger_bytes,gas,update_cost,accepted,"
    "rejected,aggregated,approvals,validators,committed,chain_height,"
    "global_digest";

// Column order of nodes.csv (one row per node per round).
inline constexpr const char* kNodeColumns =
    "round,node,poisoner,transmitted,decision,reason,divergence,"
    "anomaly_score,local_loss,reputation,trust,payload_bytes,update_cost";

std::string metrics_csv(const SimulationReport& report);
std::string nodes_csv(const SimulationReport& report);
std::string summary_text(const SimulationResult& result);

// Standalone SVG line charts.
std::string accuracy_svg(const SimulationReport& report);
std::string bytes_svg(const SimulationReport& report);

// Writes metrics.csv, nodes.csv, summary.txt, ledger.export, archive/,
// accuracy.svg and bytes.svg into `dir`, creating it if needed.
void write_outputs(const SimulationResult& result,
                   const std::filesystem::path& dir);

}  // namespace fedledger

#endif  // FEDLEDGER_REPORT_IO_H_
