#include "cbmc/harness/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cbmc::harness {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::ofstream open(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void close(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw Error("write failed: " + path.string());
}

template <typename V>
void put(std::ostream& os, const V& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) os << ',' << num(v[i]);
}

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

}  // namespace

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open(path);
  out << text;
  close(out, path);
}

void write_log_csv(const scheduler::RunLog& log, const std::filesystem::path& path) {
  auto out = open(path);
  out << "tick,time,load_mass,rmse";
  for (const char* g : {"q_d", "q", "tau", "tau_g", "kp", "kv"})
    for (int j = 1; j <= kJoints; ++j) out << ',' << g << j;
  out << ",w1,w2,fx,fy,fz,tx,ty,tz,brainstem_loss,thalamus_loss\n";
  for (const auto& r : log.records) {
    out << r.tick << ',' << num(r.time) << ',' << num(r.load_mass) << ',' << num((r.q_d - r.q).norm());
    put(out, r.q_d);
    put(out, r.q);
    put(out, r.tau);
    put(out, r.tau_g);
    put(out, r.kp);
    put(out, r.kv);
    put(out, r.weights);
    put(out, r.wrench);
    out << ',' << num(r.brainstem_loss) << ',' << num(r.thalamus_loss) << '\n';
  }
  close(out, path);
}

std::vector<std::filesystem::path> write_report_csv(const MetricsReport& rep, const std::filesystem::path& dir,
                                                    const std::string& stem) {
  std::vector<std::filesystem::path> files;

  const auto meta_path = dir / (stem + "-meta.csv");
  auto meta = open(meta_path);
  meta << "key,value\n";
  meta << "experiment," << rep.experiment << "\nseed," << rep.seed << '\n';
  for (const auto& [k, v] : rep.metadata) meta << k << ',' << v << '\n';
  close(meta, meta_path);
  files.push_back(meta_path);

  const auto runs_path = dir / (stem + "-runs.csv");
  auto runs = open(runs_path);
  runs << "trajectory,configuration,mass,repetition,mean_rmse,window_rmse,mean_rmse_p,mean_rmse_o,w2,"
          "kp_mean,kp_std,kv_mean,kv_std,corr_kp_rmse,corr_kv_rmse\n";
  for (const auto& r : rep.runs)
    runs << r.trajectory << ',' << r.configuration << ',' << num(r.mass) << ',' << r.repetition << ','
         << num(r.mean_rmse) << ',' << num(r.window_rmse) << ',' << num(r.mean_rmse_p) << ',' << num(r.mean_rmse_o)
         << ',' << num(r.w2) << ',' << num(r.kp_mean) << ',' << num(r.kp_std) << ',' << num(r.kv_mean) << ','
         << num(r.kv_std) << ',' << num(r.corr_kp_rmse) << ',' << num(r.corr_kv_rmse) << '\n';
  close(runs, runs_path);
  files.push_back(runs_path);

  const auto sum_path = dir / (stem + "-summary.csv");
  auto sum = open(sum_path);
  sum << "configuration,mass,rmse,w2,peaks\n";
  for (const auto& r : rep.rows)
    sum << r.configuration << ',' << num(r.mass) << ',' << num(r.rmse) << ',' << num(r.w2) << ',' << r.peaks << '\n';
  close(sum, sum_path);
  files.push_back(sum_path);

  const auto ev_path = dir / (stem + "-events.csv");
  auto ev = open(ev_path);
  ev << "time,mass_before,mass_after,plateau,peak,excursion,recovery_time,peaks\n";
  for (const auto& e : rep.events)
    ev << num(e.time) << ',' << num(e.mass_before) << ',' << num(e.mass_after) << ',' << num(e.plateau) << ','
       << num(e.peak) << ',' << num(e.excursion) << ',' << num(e.recovery_time) << ',' << e.peaks << '\n';
  close(ev, ev_path);
  files.push_back(ev_path);
  return files;
}

std::string svg_line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                          double x0, double dx, const std::vector<PlotSeries>& series) {
  constexpr double W = 800, H = 360, left = 70, right = 20, top = 36, bottom = 44;
  const double pw = W - left - right, ph = H - top - bottom;

  std::size_t n = 0;
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& s : series) {
    n = std::max(n, s.values.size());
    for (double v : s.values)
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  }
  if (!(hi >= lo)) lo = 0.0, hi = 1.0;
  if (hi == lo) lo -= 0.5, hi += 0.5;
  const double span = n > 1 ? static_cast<double>(n - 1) * dx : 1.0;
  auto px = [&](double x) { return left + pw * (x - x0) / span; };
  auto py = [&](double y) { return top + ph * (1.0 - (y - lo) / (hi - lo)); };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
     << xml_escape(title) << "</text>\n"
     << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double y = lo + (hi - lo) * k / 4.0, x = x0 + span * k / 4.0;
    os << "<text x=\"" << left - 6 << "\" y=\"" << num(py(y) + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(y) << "</text>\n"
       << "<text x=\"" << num(px(x)) << "\" y=\"" << H - bottom + 16
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << num(x) << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 8
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(x_label) << "</text>\n"
     << "<text x=\"16\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 16 " << top + ph / 2
     << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(y_label)
     << "</text>\n";

  const std::size_t stride = std::max<std::size_t>(1, n / 1500);
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    const auto& v = series[s].values;
    for (std::size_t i = 0; i < v.size(); i += stride)
      if (std::isfinite(v[i])) os << num(px(x0 + static_cast<double>(i) * dx)) << ',' << num(py(v[i])) << ' ';
    os << "\"/>\n";
    os << "<text x=\"" << left + 8 << "\" y=\"" << top + 14 + 14 * s << "\" fill=\"" << color
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(series[s].name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<std::filesystem::path> write_log_plots(const scheduler::RunLog& log, const std::filesystem::path& dir,
                                                   const std::string& stem) {
  const std::size_t n = log.size();
  PlotSeries rmse{"RMSE", std::vector<double>(n)}, kp{"mean kp", std::vector<double>(n)},
      kv{"mean kv", std::vector<double>(n)}, w1{"w1 (light)", std::vector<double>(n)},
      w2{"w2 (heavy)", std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = log.records[i];
    rmse.values[i] = (r.q_d - r.q).norm();
    kp.values[i] = r.kp.mean();
    kv.values[i] = r.kv.mean();
    w1.values[i] = r.weights[0];
    w2.values[i] = r.weights[1];
  }
  std::vector<std::filesystem::path> files{dir / (stem + "-rmse.svg"), dir / (stem + "-gains.svg"),
                                           dir / (stem + "-weights.svg")};
  write_text(files[0], svg_line_plot("Joint RMSE", "time (s)", "rad", 0.0, log.dt, {rmse}));
  write_text(files[1], svg_line_plot("Mean gains", "time (s)", "gain", 0.0, log.dt, {kp, kv}));
  write_text(files[2], svg_line_plot("Pattern weights", "time (s)", "weight", 0.0, log.dt, {w1, w2}));
  return files;
}

std::string output_stem(const MetricsReport& report) { return report.experiment + "-" + std::to_string(report.seed); }

}  // namespace cbmc::harness
