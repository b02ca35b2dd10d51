#pragma once

#include <optional>
#include <vector>

#include "cbmc/scheduler.hpp"

namespace cbmc::harness {

struct Series {
  std::vector<double> values;
  double mean = 0.0;
};

/// RMSE(t) = sqrt(sum_i (q_d,i - q_i)^2) per record, and its mean.
Series joint_rmse(const scheduler::RunLog& log);

/// Z-Y-X Euler angles of R = Rz(yaw) Ry(pitch) Rx(roll), returned as
/// (pitch, yaw, roll).
Eigen::Vector3d pitch_yaw_roll(const Eigen::Matrix3d& R);

/// Difference wrapped to (-pi, pi].
double wrap_angle(double a);

struct CartesianErrors {
  Series position;     // RMSE_p(t), m
  Series orientation;  // RMSE_o(t), rad
};

/// End-effector errors through forward kinematics of q_d and q.
CartesianErrors cartesian_rmse(const scheduler::RunLog& log, const arm::ArmModel& model);

double mean_of(const std::vector<double>& x, std::size_t begin, std::size_t end);
double median_of(const std::vector<double>& x, std::size_t begin, std::size_t end);

/// Pearson correlation; 0 when either side is constant.
double correlation(const std::vector<double>& a, const std::vector<double>& b);

/// Trailing moving average over `width` samples (shorter at the start).
std::vector<double> moving_average(const std::vector<double>& x, std::size_t width);

/// Local maxima of x in [begin, end) whose topographic prominence (measured
/// inside the window) is at least `fraction` of the window's max - min.
std::vector<std::size_t> detect_peaks(const std::vector<double>& x, std::size_t begin, std::size_t end,
                                      double fraction = 0.2);

/// First index i >= begin such that x stays <= threshold on [i, i + dwell).
/// Empty when the series never settles before `end`.
std::optional<std::size_t> settle_index(const std::vector<double>& x, std::size_t begin, std::size_t end,
                                        double threshold, std::size_t dwell);

}  // namespace cbmc::harness
