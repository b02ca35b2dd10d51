#include "cbmc/harness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cbmc/arm/dynamics.hpp"

namespace cbmc::harness {

namespace {

double finish_mean(Series& s) {
  s.mean = s.values.empty() ? 0.0 : mean_of(s.values, 0, s.values.size());
  return s.mean;
}

}  // namespace

Series joint_rmse(const scheduler::RunLog& log) {
  Series s;
  s.values.reserve(log.size());
  for (const auto& r : log.records) s.values.push_back((r.q_d - r.q).norm());
  finish_mean(s);
  return s;
}

Eigen::Vector3d pitch_yaw_roll(const Eigen::Matrix3d& R) {
  const double pitch = std::asin(std::clamp(-R(2, 0), -1.0, 1.0));
  const double yaw = std::atan2(R(1, 0), R(0, 0));
  const double roll = std::atan2(R(2, 1), R(2, 2));
  return {pitch, yaw, roll};
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

CartesianErrors cartesian_rmse(const scheduler::RunLog& log, const arm::ArmModel& model) {
  CartesianErrors out;
  out.position.values.reserve(log.size());
  out.orientation.values.reserve(log.size());
  for (const auto& r : log.records) {
    const auto want = arm::forward_kinematics(model, r.q_d);
    const auto have = arm::forward_kinematics(model, r.q);
    out.position.values.push_back((want.position - have.position).norm());
    const Eigen::Vector3d a = pitch_yaw_roll(want.rotation), b = pitch_yaw_roll(have.rotation);
    double sq = 0.0;
    for (int k = 0; k < 3; ++k) sq += std::pow(wrap_angle(a[k] - b[k]), 2);
    out.orientation.values.push_back(std::sqrt(sq));
  }
  finish_mean(out.position);
  finish_mean(out.orientation);
  return out;
}

double mean_of(const std::vector<double>& x, std::size_t begin, std::size_t end) {
  end = std::min(end, x.size());
  if (begin >= end) throw Error("mean_of: empty range");
  double s = 0.0;
  for (std::size_t i = begin; i < end; ++i) s += x[i];
  return s / static_cast<double>(end - begin);
}

double median_of(const std::vector<double>& x, std::size_t begin, std::size_t end) {
  end = std::min(end, x.size());
  if (begin >= end) throw Error("median_of: empty range");
  std::vector<double> v(x.begin() + static_cast<std::ptrdiff_t>(begin), x.begin() + static_cast<std::ptrdiff_t>(end));
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double upper = v[mid];
  return 0.5 * (upper + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw Error("correlation: series must have equal length >= 2");
  const double ma = mean_of(a, 0, a.size()), mb = mean_of(b, 0, b.size());
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

std::vector<double> moving_average(const std::vector<double>& x, std::size_t width) {
  if (width == 0) throw Error("moving_average: width must be positive");
  std::vector<double> out(x.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    acc += x[i];
    if (i >= width) acc -= x[i - width];
    out[i] = acc / static_cast<double>(std::min(i + 1, width));
  }
  return out;
}

std::vector<std::size_t> detect_peaks(const std::vector<double>& x, std::size_t begin, std::size_t end,
                                      double fraction) {
  end = std::min(end, x.size());
  std::vector<std::size_t> peaks;
  if (end < begin + 3) return peaks;
  const auto [lo, hi] = std::minmax_element(x.begin() + static_cast<std::ptrdiff_t>(begin),
                                            x.begin() + static_cast<std::ptrdiff_t>(end));
  const double need = fraction * (*hi - *lo);
  if (!(*hi > *lo)) return peaks;

  for (std::size_t i = begin + 1; i + 1 < end; ++i) {
    if (!(x[i] > x[i - 1])) continue;
    // flat tops count once, at their first sample
    std::size_t j = i;
    while (j + 1 < end && x[j + 1] == x[i]) ++j;
    if (j + 1 >= end || !(x[j + 1] < x[i])) continue;

    double left_min = x[i];
    for (std::size_t k = i; k-- > begin;) {
      if (x[k] > x[i]) break;
      left_min = std::min(left_min, x[k]);
    }
    double right_min = x[i];
    for (std::size_t k = j + 1; k < end; ++k) {
      if (x[k] > x[i]) break;
      right_min = std::min(right_min, x[k]);
    }
    if (x[i] - std::max(left_min, right_min) >= need) peaks.push_back(i);
    i = j;
  }
  return peaks;
}

std::optional<std::size_t> settle_index(const std::vector<double>& x, std::size_t begin, std::size_t end,
                                        double threshold, std::size_t dwell) {
  end = std::min(end, x.size());
  std::size_t run = 0;
  for (std::size_t i = begin; i < end; ++i) {
    run = x[i] <= threshold ? run + 1 : 0;
    if (run >= dwell) return i + 1 - dwell;
  }
  return std::nullopt;
}

}  // namespace cbmc::harness
