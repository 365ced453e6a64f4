// Copyright 2026 The Inertia Authors
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

#include "inertia/sim.h"

#include <algorithm>
#include <exception>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include "inertia/errors.h"

namespace inertia {
namespace {

// stream tags keep the per-sample rng streams of different generators apart
constexpr std::uint64_t kGridTag = 0x67726964;
constexpr std::uint64_t kRandomTag = 0x72616e64;
constexpr std::uint64_t kTrajectoryTag = 0x7472616a;

// Runs job(i) for i in [0, count) on `workers` threads, contiguous chunks.
template <typename Job>
void ParallelFor(std::size_t count, int workers, const Job& job) {
  const std::size_t w = std::max(1, workers);
  if (w == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(w);
  const std::size_t chunk = (count + w - 1) / w;
  for (std::size_t t = 0; t < w; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&job, &errors, t, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) job(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& thread : threads) thread.join();
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
}

Dataset Collect(std::vector<std::optional<SteadySample>>& slots, std::size_t extra_rejected) {
  Dataset out;
  out.rejected = extra_rejected;
  out.samples.reserve(slots.size());
  for (auto& slot : slots) {
    if (slot) {
      out.samples.push_back(std::move(*slot));
    } else {
      ++out.rejected;
    }
  }
  return out;
}

Eigen::VectorXd DirectionVector(int n, unsigned bits) {
  Eigen::VectorXd dir(n);
  for (int j = 0; j < n; ++j) dir[j] = (bits >> j) & 1u ? -1.0 : 1.0;
  return dir;
}

Eigen::VectorXd ExternalTorque(const ArmModel& arm, const Eigen::VectorXd& q,
                               const ObjectSpec& obj) {
  const auto frames = ForwardKinematics(arm, q, LimitPolicy::kIgnore);
  return StaticJointTorques(arm, frames, ObjectWrench(arm, frames, obj));
}

}  // namespace

void ValidateController(const ControllerSpec& c, int n) {
  auto check = [n](const Eigen::VectorXd& v, const char* name) {
    if (v.size() != n) {
      throw ConfigError(std::string("controller.") + name + " must have one entry per joint");
    }
    if (!v.allFinite()) throw ConfigError(std::string("controller.") + name + " must be finite");
  };
  check(c.kp, "kp");
  check(c.friction_coulomb, "friction_coulomb");
  check(c.friction_position_gain, "friction_position_gain");
  check(c.encoder_noise_sd, "encoder_noise_sd");
  check(c.sensor_bias, "sensor_bias");
  if ((c.kp.array() <= 0.0).any()) throw ConfigError("controller.kp must be positive");
  if ((c.encoder_noise_sd.array() < 0.0).any() || c.sensor_noise_sd < 0.0) {
    throw ConfigError("noise standard deviations must be non-negative");
  }
}

Eigen::VectorXd FrictionMagnitude(const ControllerSpec& c, const Eigen::VectorXd& q) {
  return c.friction_coulomb.array() + c.friction_position_gain.array() * q.array().sin().abs();
}

SteadySample SteadyState(const ArmModel& arm, const ControllerSpec& controller,
                         const Eigen::VectorXd& q_d, const Eigen::VectorXd& rot_dir,
                         const NamedObject& object, Rng& rng,
                         const SteadyStateOptions& options) {
  const int n = arm.n_joints();
  if (q_d.size() != n || rot_dir.size() != n) {
    throw DataError("steady state: q_d and rot_dir must have one entry per joint");
  }
  for (int j = 0; j < n; ++j) {
    if (rot_dir[j] != 1.0 && rot_dir[j] != -1.0) {
      throw DataError("steady state: rot_dir entries must be +1 or -1");
    }
  }
  if (!WithinJointLimits(arm, q_d)) throw DataError("steady state: q_d outside joint limits");

  const Eigen::ArrayXd inv_kp = controller.kp.array().inverse();
  Eigen::VectorXd q = q_d;
  bool converged = false;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Eigen::VectorXd load = ExternalTorque(arm, q, object.spec) +
                                 rot_dir.cwiseProduct(FrictionMagnitude(controller, q));
    const Eigen::VectorXd next = q_d.array() - inv_kp * load.array();
    const double step = (next - q).cwiseAbs().maxCoeff();
    q = next;
    if (step < options.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "steady state did not converge within " << options.max_iterations
        << " iterations (kp too small for the load stiffness?) at q_d = [" << q_d.transpose()
        << "]";
    throw NumericalError(msg.str());
  }

  SteadySample s;
  s.q_d = q_d;
  s.rot_dir = rot_dir;
  s.object_id = object.name;
  s.object = object.spec;
  const auto frames = ForwardKinematics(arm, q, LimitPolicy::kIgnore);
  s.tag_pose = frames[TagFrame(arm)];
  s.tau_true = StaticJointTorques(arm, frames, ObjectWrench(arm, frames, object.spec));
  s.tau_g = StaticJointTorques(arm, frames, Wrench{});

  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd encoder_noise(n), sensor_noise(n);
  for (int j = 0; j < n; ++j) encoder_noise[j] = controller.encoder_noise_sd[j] * normal(rng);
  for (int j = 0; j < n; ++j) sensor_noise[j] = controller.sensor_noise_sd * normal(rng);
  s.tau_sensor_raw = s.tau_true + rot_dir.cwiseProduct(FrictionMagnitude(controller, q)) +
                     controller.sensor_bias + sensor_noise;
  s.q = q + encoder_noise;
  return s;
}

std::vector<Eigen::VectorXd> PlanningGridPositions(const ArmModel& arm, const GridSpec& grid) {
  const int n = arm.n_joints();
  if (!(grid.step > 0.0)) throw ConfigError("planning grid step must be positive");
  std::vector<Eigen::Vector2d> ranges = grid.ranges;
  if (ranges.empty()) {
    for (const JointSpec& joint : arm.joints) ranges.emplace_back(joint.lower, joint.upper);
  }
  if (static_cast<int>(ranges.size()) != n) {
    throw ConfigError("planning grid needs one range per joint");
  }
  std::vector<int> counts(n);
  for (int j = 0; j < n; ++j) {
    const double span = ranges[j][1] - ranges[j][0];
    const double cells = span / grid.step;
    const double rounded = std::round(cells);
    if (span < 0.0 || std::abs(cells - rounded) > 1e-6) {
      throw ConfigError("planning grid step must divide joint range " + std::to_string(j + 1));
    }
    counts[j] = static_cast<int>(rounded) + 1;
  }
  std::vector<Eigen::VectorXd> positions;
  std::vector<int> index(n, 0);
  while (true) {
    Eigen::VectorXd q(n);
    for (int j = 0; j < n; ++j) q[j] = ranges[j][0] + index[j] * grid.step;
    if (IsFeasible(arm, q)) positions.push_back(q);
    int j = n - 1;
    while (j >= 0 && ++index[j] == counts[j]) index[j--] = 0;
    if (j < 0) break;
  }
  if (positions.empty()) throw ConfigError("planning grid is empty after feasibility filtering");
  return positions;
}

Dataset GeneratePlanningGrid(const ArmModel& arm, const ControllerSpec& controller,
                             const std::vector<NamedObject>& objects, const GridSpec& grid,
                             const GenerationOptions& options) {
  const int n = arm.n_joints();
  ValidateController(controller, n);
  const auto positions = PlanningGridPositions(arm, grid);
  const std::size_t n_dirs = std::size_t{1} << n;
  const std::size_t total = objects.size() * positions.size() * n_dirs;
  std::vector<std::optional<SteadySample>> slots(total);
  ParallelFor(total, options.workers, [&](std::size_t i) {
    const std::size_t object = i / (positions.size() * n_dirs);
    const std::size_t rest = i % (positions.size() * n_dirs);
    const std::size_t position = rest / n_dirs;
    const unsigned bits = static_cast<unsigned>(rest % n_dirs);
    Rng rng = StreamRng(options.seed, kGridTag, i);
    try {
      slots[i] = SteadyState(arm, controller, positions[position], DirectionVector(n, bits),
                             objects[object], rng);
    } catch (const NumericalError&) {
    }
  });
  return Collect(slots, 0);
}

Dataset GenerateRandomSamples(const ArmModel& arm, const ControllerSpec& controller,
                              const std::vector<NamedObject>& objects,
                              std::size_t count_per_object, const GenerationOptions& options) {
  const int n = arm.n_joints();
  ValidateController(controller, n);
  const std::size_t total = objects.size() * count_per_object;
  std::vector<std::optional<SteadySample>> slots(total);
  std::vector<std::size_t> infeasible(total, 0);
  ParallelFor(total, options.workers, [&](std::size_t i) {
    const NamedObject& object = objects[i / count_per_object];
    Rng rng = StreamRng(options.seed, kRandomTag, i);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::VectorXd q_d(n);
    for (int attempt = 0;; ++attempt) {
      for (int j = 0; j < n; ++j) {
        const JointSpec& joint = arm.joints[j];
        q_d[j] = joint.lower + (joint.upper - joint.lower) * unit(rng);
      }
      if (IsFeasible(arm, q_d)) break;
      ++infeasible[i];
      if (attempt > 10000) throw ConfigError("feasible region too small to sample");
    }
    Eigen::VectorXd dir(n);
    for (int j = 0; j < n; ++j) dir[j] = unit(rng) < 0.5 ? 1.0 : -1.0;
    try {
      slots[i] = SteadyState(arm, controller, q_d, dir, object, rng);
    } catch (const NumericalError&) {
    }
  });
  return Collect(slots, std::accumulate(infeasible.begin(), infeasible.end(), std::size_t{0}));
}

Dataset GenerateTrajectory(const ArmModel& arm, const ControllerSpec& controller,
                           const TrajectorySpec& spec, const GenerationOptions& options) {
  const int n = arm.n_joints();
  ValidateController(controller, n);
  std::size_t total = 0;
  for (const auto& segment : spec.segments) total += segment.samples;
  if (total == 0) throw ConfigError("trajectory has no samples");
  std::vector<Eigen::Vector2d> ranges = spec.ranges;
  if (ranges.empty()) {
    for (const JointSpec& joint : arm.joints) {
      const double mid = 0.5 * (joint.lower + joint.upper);
      const double half = 0.4 * (joint.upper - joint.lower);
      ranges.emplace_back(mid - half, mid + half);
    }
  }
  if (static_cast<int>(ranges.size()) != n) throw ConfigError("trajectory needs one range per joint");

  std::vector<const NamedObject*> object_at(total);
  std::size_t k = 0;
  for (const auto& segment : spec.segments) {
    for (std::size_t s = 0; s < segment.samples; ++s) object_at[k++] = &segment.object;
  }
  std::vector<std::optional<SteadySample>> slots(total);
  ParallelFor(total, options.workers, [&](std::size_t i) {
    Eigen::VectorXd q_d(n), dir(n);
    const double t = static_cast<double>(i);
    for (int j = 0; j < n; ++j) {
      // incommensurate per-joint frequencies so windows span varied postures
      const double omega = 2.0 * M_PI * (1.0 + 0.37 * j) / spec.period_samples;
      const double phase = 0.9 * j;
      const double mid = 0.5 * (ranges[j][0] + ranges[j][1]);
      const double amp = 0.5 * (ranges[j][1] - ranges[j][0]);
      q_d[j] = mid + amp * std::sin(omega * t + phase);
      dir[j] = std::cos(omega * t + phase) >= 0.0 ? 1.0 : -1.0;
    }
    Rng rng = StreamRng(options.seed, kTrajectoryTag, i);
    try {
      slots[i] = SteadyState(arm, controller, q_d, dir, *object_at[i], rng);
    } catch (const NumericalError&) {
    }
  });
  Dataset out = Collect(slots, 0);
  if (out.rejected != 0) throw NumericalError("trajectory contains non-converged samples");
  return out;
}

std::vector<std::vector<std::size_t>> MakeInferenceWindows(
    const std::vector<std::size_t>& pool, std::size_t window, std::size_t draws, WindowMode mode,
    Rng& rng) {
  if (window == 0) throw DataError("window size must be positive");
  if (window > pool.size()) {
    throw DataError("window of " + std::to_string(window) + " exceeds pool of " +
                    std::to_string(pool.size()) + " samples");
  }
  std::vector<std::vector<std::size_t>> windows;
  if (mode == WindowMode::kTrajectory) {
    for (std::size_t start = 0; start + window <= pool.size(); ++start) {
      windows.emplace_back(pool.begin() + start, pool.begin() + start + window);
    }
    return windows;
  }
  windows.reserve(draws);
  if (window == pool.size()) {
    windows.assign(draws, pool);
    return windows;
  }
  std::vector<std::size_t> scratch = pool;
  for (std::size_t d = 0; d < draws; ++d) {
    // partial Fisher-Yates: first `window` entries become the draw
    for (std::size_t i = 0; i < window; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, scratch.size() - 1);
      std::swap(scratch[i], scratch[pick(rng)]);
    }
    windows.emplace_back(scratch.begin(), scratch.begin() + window);
  }
  return windows;
}

}  // namespace inertia
