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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace fedledger {

namespace {

std::string Num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

struct Series {
  std::string label;
  std::string color;
  std::vector<double> y;
};

// Fixed-size chart: x is the round number 1..len, y from 0 to y_max.
std::string LineChart(const std::string& title, const std::string& y_label,
                      const std::vector<Series>& series, double y_max) {
  constexpr double kWidth = 640, kHeight = 400;
  constexpr double kLeft = 80, kRight = 20, kTop = 40, kBottom = 50;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  std::size_t len = 0;
  for (const auto& s : series) len = std::max(len, s.y.size());
  if (!(y_max > 0.0)) y_max = 1.0;
  const double x_span = len > 1 ? static_cast<double>(len - 1) : 1.0;
  auto px = [&](std::size_t i) {
    return kLeft + plot_w * static_cast<double>(i) / x_span;
  };
  auto py = [&](double v) { return kTop + plot_h * (1.0 - v / y_max); };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-size=\"15\">" << title << "</text>\n";

  for (int tick = 0; tick <= 5; ++tick) {
    const double v = y_max * tick / 5.0;
    const double y = py(v);
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << Num(y) << "\" x2=\""
        << kLeft + plot_w << "\" y2=\"" << Num(y)
        << "\" stroke=\"#ddd\"/>\n"
        << "<text x=\"" << kLeft - 6 << "\" y=\"" << Num(y + 4)
        << "\" text-anchor=\"end\">" << Num(v) << "</text>\n";
  }
  const std::size_t x_ticks = std::min<std::size_t>(len, 10);
  for (std::size_t k = 0; k < x_ticks; ++k) {
    const std::size_t i =
        x_ticks > 1 ? k * (len - 1) / (x_ticks - 1) : std::size_t{0};
    svg << "<text x=\"" << Num(px(i)) << "\" y=\"" << kTop + plot_h + 18
        << "\" text-anchor=\"middle\">" << i + 1 << "</text>\n";
  }
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\""
      << kLeft + plot_w << "\" y2=\"" << kTop + plot_h
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">round</text>\n"
      << "<text x=\"18\" y=\"" << kTop + plot_h / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << kTop + plot_h / 2 << ")\">" << y_label << "</text>\n";

  double legend_y = kTop + 10;
  for (const auto& s : series) {
    if (!s.y.empty()) {
      svg << "<polyline fill=\"none\" stroke=\"" << s.color
          << "\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < s.y.size(); ++i) {
        svg << (i ? " " : "") << Num(px(i)) << ',' << Num(py(s.y[i]));
      }
      svg << "\"/>\n";
    }
    svg << "<rect x=\"" << kLeft + plot_w - 150 << "\" y=\"" << legend_y - 9
        << "\" width=\"12\" height=\"4\" fill=\"" << s.color << "\"/>\n"
        << "<text x=\"" << kLeft + plot_w - 132 << "\" y=\"" << legend_y
        << "\">" << s.label << "</text>\n";
    legend_y += 16;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

std::string metrics_csv(const SimulationReport& report) {
  std::ostringstream out;
  out << kMetricsColumns << '\n';
  for (const auto& r : report.rounds) {
    out << r.round << ',' << Num(r.metrics.accuracy) << ','
        << Num(r.metrics.precision) << ',' << Num(r.metrics.recall) << ','
        << Num(r.metrics.f1) << ',' << Num(r.mean_local_loss) << ','
        << r.uplink_bytes << ',' << r.uplink_messages << ','
        << r.downlink_bytes << ',' << r.ledger_bytes << ',' << Num(r.gas)
        << ',' << Num(r.update_cost) << ',' << r.accepted << ','
        << r.rejected << ',' << (r.aggregated ? 1 : 0) << ','
        << r.consensus.approvals << ',' << r.consensus.total << ','
        << (r.consensus.committed ? 1 : 0) << ',' << r.chain_height << ','
        << to_hex(r.global_digest) << '\n';
  }
  return out.str();
}

std::string nodes_csv(const SimulationReport& report) {
  std::ostringstream out;
  out << kNodeColumns << '\n';
  for (const auto& r : report.rounds) {
    for (const auto& n : r.nodes) {
      out << r.round << ',' << n.node_id << ',' << (n.poisoner ? 1 : 0) << ','
          << (n.transmitted ? 1 : 0) << ',';
      if (n.transmitted) {
        out << (n.reason == VerdictReason::kOk ? 1 : 0) << ','
            << to_string(n.reason) << ',' << Num(n.divergence);
      } else {
        out << ",,";
      }
      out << ',' << Num(n.anomaly_score) << ',' << Num(n.local_loss) << ','
          << Num(n.reputation) << ',' << Num(n.trust) << ','
          << n.payload_bytes << ',' << Num(n.update_cost) << '\n';
    }
  }
  return out.str();
}

std::string summary_text(const SimulationResult& result) {
  const auto& rep = result.report;
  std::ostringstream out;
  auto metrics = [&](const char* name, const ClassificationMetrics& m) {
    out << name << ".accuracy = " << Num(m.accuracy) << '\n'
        << name << ".precision = " << Num(m.precision) << '\n'
        << name << ".recall = " << Num(m.recall) << '\n'
        << name << ".f1 = " << Num(m.f1) << '\n';
  };
  out << "rounds = " << rep.rounds.size() << '\n';
  metrics("initial", rep.initial_metrics);
  metrics("final", rep.final_metrics);
  out << "rounds_to_convergence = "
      << (rep.rounds_to_convergence
              ? std::to_string(*rep.rounds_to_convergence)
              : std::string("none"))
      << '\n'
      << "target_accuracy = " << Num(result.config.target_accuracy) << '\n'
      << "total_uplink_bytes = " << rep.total_uplink_bytes << '\n'
      << "total_downlink_bytes = " << rep.total_downlink_bytes << '\n'
      << "total_ledger_bytes = " << rep.total_ledger_bytes << '\n'
      << "total_gas = " << Num(rep.total_gas) << '\n'
      << "committed_blocks = " << rep.committed_blocks << '\n'
      << "chain_height = " << result.chain.height() << '\n'
      << "chain_tip_hash = " << to_hex(result.chain.tip_hash()) << '\n'
      << "final_global_digest = " << to_hex(weights_digest(result.final_weights))
      << '\n'
      << "\n# effective configuration\n"
      << format_config(result.config);
  return out.str();
}

std::string accuracy_svg(const SimulationReport& report) {
  Series acc{"accuracy", "#1f77b4", {}};
  Series f1{"F1", "#ff7f0e", {}};
  for (const auto& r : report.rounds) {
    acc.y.push_back(r.metrics.accuracy);
    f1.y.push_back(r.metrics.f1);
  }
  return LineChart("Global test accuracy per round", "score", {acc, f1}, 1.0);
}

std::string bytes_svg(const SimulationReport& report) {
  Series up{"uplink", "#2ca02c", {}};
  Series down{"downlink", "#9467bd", {}};
  Series ledger{"ledger", "#d62728", {}};
  double y_max = 0.0;
  for (const auto& r : report.rounds) {
    up.y.push_back(static_cast<double>(r.uplink_bytes));
    down.y.push_back(static_cast<double>(r.downlink_bytes));
    ledger.y.push_back(static_cast<double>(r.ledger_bytes));
    y_max = std::max({y_max, up.y.back(), down.y.back(), ledger.y.back()});
  }
  return LineChart("Bytes exchanged per round", "bytes", {up, down, ledger},
                   y_max * 1.05);
}

void write_outputs(const SimulationResult& result,
                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  WriteFile(dir / "metrics.csv", metrics_csv(result.report));
  WriteFile(dir / "nodes.csv", nodes_csv(result.report));
  WriteFile(dir / "summary.txt", summary_text(result));
  write_ledger_export(result.chain, dir / "ledger.export");
  result.archive.save(dir / "archive");
  WriteFile(dir / "accuracy.svg", accuracy_svg(result.report));
  WriteFile(dir / "bytes.svg", bytes_svg(result.report));
}

}  // namespace fedledger
