#include "sagat/dmp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sagat/errors.hpp"

namespace sagat {

void Trajectory::validate() const {
  if (samples.size() < 10) throw ValidationError("trajectory needs >= 10 samples");
  if (dt <= 0.0) throw ValidationError("trajectory dt must be positive");
  if (samples.front().t < 0.0) throw ValidationError("trajectory time must be >= 0");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double step = samples[i].t - samples[i - 1].t;
    if (step <= 0.0) throw ValidationError("trajectory time must be strictly increasing");
    if (std::abs(step - dt) > 1e-9) throw ValidationError("trajectory sampling must be uniform");
  }
}

void Trajectory::to_csv(std::ostream& out) const {
  out << "t,x,z,theta\n";
  char line[160];
  for (const TimedPose& s : samples) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g\n", s.t, s.pose.x, s.pose.z,
                  s.pose.theta);
    out << line;
  }
}

Trajectory Trajectory::from_csv(std::istream& in) {
  Trajectory traj;
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,x,z,theta", 0) != 0) {
    throw ValidationError("trajectory CSV must start with header `t,x,z,theta`");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double t, x, z, theta;
    if (std::sscanf(line.c_str(), "%lg,%lg,%lg,%lg", &t, &x, &z, &theta) != 4) {
      throw ValidationError("malformed trajectory CSV row: " + line);
    }
    traj.samples.push_back({t, Pose2(x, z, theta)});
  }
  if (traj.samples.size() >= 2) traj.dt = traj.samples[1].t - traj.samples[0].t;
  traj.validate();
  return traj;
}

void Trajectory::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  to_csv(out);
}

Trajectory Trajectory::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open for reading: " + path);
  return from_csv(in);
}

void DmpPolicy::validate() const {
  for (const DmpDimension& d : dims) {
    if (d.basis_count < 5) throw ValidationError("basis_count must be >= 5");
    if (static_cast<int>(d.weights.size()) != d.basis_count) {
      throw ValidationError("weight count must equal basis_count");
    }
    if (d.gains.alpha_y <= 0.0 || d.gains.alpha_s <= 0.0) {
      throw ValidationError("DMP gains must be positive");
    }
    if (std::abs(d.gains.beta_y - d.gains.alpha_y / 4.0) > 1e-9) {
      throw ValidationError("beta_y must equal alpha_y/4");
    }
    if (d.tau_ref <= 0.0) throw ValidationError("tau_ref must be positive");
  }
}

std::vector<double> unwrap_angles(const std::vector<double>& wrapped) {
  std::vector<double> out;
  out.reserve(wrapped.size());
  if (wrapped.empty()) return out;
  out.push_back(wrapped.front());
  for (std::size_t i = 1; i < wrapped.size(); ++i) {
    out.push_back(out.back() + wrap_angle(wrapped[i] - wrapped[i - 1]));
  }
  return out;
}

namespace {

constexpr double kDegenerateSpan = 1e-9;

struct BasisSet {
  std::vector<double> centers;
  std::vector<double> widths;

  BasisSet(int count, double alpha_s) {
    centers.resize(count);
    widths.resize(count);
    for (int i = 0; i < count; ++i) {
      // Centers equally spaced in time, mapped through the canonical system.
      centers[i] = std::exp(-alpha_s * static_cast<double>(i) / (count - 1));
    }
    // Widths from neighbor spacing, so temporal resolution stays uniform
    // across the exponentially decaying phase.
    for (int i = 0; i < count; ++i) {
      const double spacing =
          (i + 1 < count) ? centers[i] - centers[i + 1] : centers[i - 1] - centers[i];
      widths[i] = 2.0 / (spacing * spacing);
    }
  }

  // Normalized basis combination, gated by the phase.
  double forcing(const std::vector<double>& weights, double s) const {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      const double d = s - centers[i];
      const double psi = std::exp(-widths[i] * d * d);
      num += psi * weights[i];
      den += psi;
    }
    if (den < 1e-300) return 0.0;
    return s * num / den;
  }
};

DmpDimension fit_dimension(const std::vector<double>& y, double dt, double tau,
                           int basis_count) {
  DmpDimension dim;
  dim.basis_count = basis_count;
  dim.tau_ref = tau;
  dim.start_ref = y.front();
  dim.goal_ref = y.back();
  dim.weights.assign(basis_count, 0.0);

  const double span = dim.goal_ref - dim.start_ref;
  if (std::abs(span) < kDegenerateSpan) {
    dim.degenerate = true;
    return dim;
  }

  const std::size_t n = y.size();
  std::vector<double> yd(n), ydd(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0) {
      yd[i] = (y[1] - y[0]) / dt;
    } else if (i == n - 1) {
      yd[i] = (y[n - 1] - y[n - 2]) / dt;
    } else {
      yd[i] = (y[i + 1] - y[i - 1]) / (2.0 * dt);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0) {
      ydd[i] = (yd[1] - yd[0]) / dt;
    } else if (i == n - 1) {
      ydd[i] = (yd[n - 1] - yd[n - 2]) / dt;
    } else {
      ydd[i] = (yd[i + 1] - yd[i - 1]) / (2.0 * dt);
    }
  }

  const double alpha_y = dim.gains.alpha_y;
  const double beta_y = dim.gains.beta_y;
  const BasisSet basis(basis_count, dim.gains.alpha_s);

  // Target forcing values at the demo phase samples, normalized by the span.
  std::vector<double> phase(n), target(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    phase[i] = std::exp(-dim.gains.alpha_s * t / tau);
    const double f = tau * tau * ydd[i] -
                     alpha_y * (beta_y * (dim.goal_ref - y[i]) - tau * yd[i]);
    target[i] = f / span;
  }

  for (int b = 0; b < basis_count; ++b) {
    double num = 0.0;
    double den = 1e-12;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = phase[i] - basis.centers[b];
      const double psi = std::exp(-basis.widths[b] * d * d);
      num += psi * phase[i] * target[i];
      den += psi * phase[i] * phase[i];
    }
    dim.weights[b] = num / den;
  }
  return dim;
}

}  // namespace

DmpPolicy fit_dmp(const Trajectory& demo, int basis_count) {
  demo.validate();
  if (basis_count < 5) throw ValidationError("basis_count must be >= 5");

  const std::size_t n = demo.samples.size();
  std::vector<double> x(n), z(n), theta(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = demo.samples[i].pose.x;
    z[i] = demo.samples[i].pose.z;
    theta[i] = demo.samples[i].pose.theta;
  }
  theta = unwrap_angles(theta);

  const double tau = demo.duration() - demo.samples.front().t;
  DmpPolicy policy;
  policy.dims[0] = fit_dimension(x, demo.dt, tau, basis_count);
  policy.dims[1] = fit_dimension(z, demo.dt, tau, basis_count);
  policy.dims[2] = fit_dimension(theta, demo.dt, tau, basis_count);
  policy.validate();
  return policy;
}

Trajectory rollout(const DmpPolicy& policy, const Pose2& start, const Pose2& goal,
                   double duration, double dt) {
  policy.validate();
  if (duration <= 0.0) throw ValidationError("rollout duration must be positive");
  if (dt <= 0.0 || dt > duration / 10.0) {
    throw ValidationError("rollout dt must lie in (0, duration/10]");
  }

  const long steps = std::max<long>(10, std::lround(duration / dt));
  const double h = duration / static_cast<double>(steps);
  const double tau = duration;

  const std::array<double, 3> y0{start.x, start.z, start.theta};
  std::array<double, 3> g{goal.x, goal.z, start.theta + wrap_angle(goal.theta - start.theta)};

  std::array<BasisSet, 3> bases{BasisSet(policy.dims[0].basis_count, policy.dims[0].gains.alpha_s),
                                BasisSet(policy.dims[1].basis_count, policy.dims[1].gains.alpha_s),
                                BasisSet(policy.dims[2].basis_count, policy.dims[2].gains.alpha_s)};

  std::array<double, 3> y = y0;
  std::array<double, 3> v{0.0, 0.0, 0.0};

  const double alpha_phase = policy.dims[0].gains.alpha_s;
  auto phase_at = [&](double t) { return std::exp(-alpha_phase * t / tau); };

  Trajectory traj;
  traj.dt = h;
  traj.samples.reserve(steps + 1);
  traj.samples.push_back({0.0, Pose2(y[0], y[1], y[2])});

  for (long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * h;
    for (int d = 0; d < 3; ++d) {
      const DmpDimension& dim = policy.dims[d];
      const double scale = dim.degenerate ? 0.0 : (g[d] - y0[d]);
      auto accel = [&](double yy, double vv, double s) {
        const double f = scale == 0.0 ? 0.0 : bases[d].forcing(dim.weights, s) * scale;
        return (dim.gains.alpha_y * (dim.gains.beta_y * (g[d] - yy) - vv) + f) / tau;
      };
      auto vel = [&](double vv) { return vv / tau; };

      const double s1 = phase_at(t);
      const double s2 = phase_at(t + 0.5 * h);
      const double s4 = phase_at(t + h);

      const double k1y = vel(v[d]);
      const double k1v = accel(y[d], v[d], s1);
      const double k2y = vel(v[d] + 0.5 * h * k1v);
      const double k2v = accel(y[d] + 0.5 * h * k1y, v[d] + 0.5 * h * k1v, s2);
      const double k3y = vel(v[d] + 0.5 * h * k2v);
      const double k3v = accel(y[d] + 0.5 * h * k2y, v[d] + 0.5 * h * k2v, s2);
      const double k4y = vel(v[d] + h * k3v);
      const double k4v = accel(y[d] + h * k3y, v[d] + h * k3v, s4);

      y[d] += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
      v[d] += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    traj.samples.push_back({static_cast<double>(k + 1) * h, Pose2(y[0], y[1], y[2])});
  }
  return traj;
}

}  // namespace sagat
