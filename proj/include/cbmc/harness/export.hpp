#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cbmc/harness/experiments.hpp"

namespace cbmc::harness {

/// One row per record:
/// tick,time,load_mass,rmse,q_d1..7,q1..7,tau1..7,tau_g1..7,kp1..7,kv1..7,w1,w2,
/// fx,fy,fz,tx,ty,tz,brainstem_loss,thalamus_loss
void write_log_csv(const scheduler::RunLog& log, const std::filesystem::path& path);

/// Run summaries, aggregate rows and load events of a report in three files
/// next to each other: <stem>-runs.csv, <stem>-summary.csv, <stem>-events.csv.
/// Also <stem>-meta.csv with the metadata key/value pairs.
std::vector<std::filesystem::path> write_report_csv(const MetricsReport& report, const std::filesystem::path& dir,
                                                    const std::string& stem);

struct PlotSeries {
  std::string name;
  std::vector<double> values;
};

/// Static SVG line chart over x = x0 + i * dx.
std::string svg_line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                          double x0, double dx, const std::vector<PlotSeries>& series);

void write_text(const std::filesystem::path& path, const std::string& text);

/// RMSE(t), mean gains and pattern weights of a log as three SVG files
/// <stem>-rmse.svg, <stem>-gains.svg, <stem>-weights.svg.
std::vector<std::filesystem::path> write_log_plots(const scheduler::RunLog& log, const std::filesystem::path& dir,
                                                   const std::string& stem);

/// "{experiment}-{seed}"
std::string output_stem(const MetricsReport& report);

}  // namespace cbmc::harness
