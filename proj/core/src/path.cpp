#include "stablescat/path.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "stablescat/errors.hpp"
#include "stablescat/rng.hpp"

namespace stablescat {

namespace {

constexpr std::uint64_t kPathTag = 0x70617468ull;

struct LocalLaw {
  double delta = 0.0;
  double rate = 0.0;   // big-jump intensity
  double sigma = 0.0;  // per-coordinate small-jump sd per unit time
};

LocalLaw local_law(const StableModel& m, double delta) {
  return {delta, big_jump_rate(m, delta), std::sqrt(small_jump_variance_rate(m, delta))};
}

}  // namespace

double Truncation::distance_to_active(const Point& x) const {
  if (active.empty()) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : active) best = std::min(best, std::max(0.0, distance(x, b.center) - b.radius));
  return best;
}

double Truncation::delta_at(const Point& x) const {
  const double dist = distance_to_active(x);
  if (dist <= 0.0) return delta_near;
  return std::clamp(far_fraction * dist, delta_near, std::max(delta_near, delta_far_max));
}

double Interfaces::distance(const Point& x, int d) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : spheres) best = std::min(best, std::abs(stablescat::distance(x, b.center) - b.radius));
  for (const auto& c : cubes) {
    // distance to the cube surface, inside or outside
    double out = 0.0, in = std::numeric_limits<double>::infinity();
    for (int i = 0; i < d; ++i) {
      const double e = std::abs(x[i] - c.center[i]) - 0.5 * c.side;
      if (e > 0.0) out += e * e;
      in = std::min(in, -e);
    }
    best = std::min(best, out > 0.0 ? std::sqrt(out) : std::max(0.0, in));
  }
  return best;
}

PathLedger simulate_path(const StableModel& m, std::uint64_t seed, std::uint64_t path_index,
                         const SimulationOptions& opt) {
  if (opt.horizon < 0.0) throw DomainError("simulate_path: horizon must be nonnegative");
  if (!(opt.truncation.delta_near > 0.0)) throw DomainError("simulate_path: delta must be positive");
  if (!(opt.dt_max > 0.0)) throw DomainError("simulate_path: dt_max must be positive");

  Rng rng(seed, path_index, kPathTag);
  const int d = m.d;
  const double a = m.alpha;
  const Truncation& tr = opt.truncation;

  PathLedger p;
  p.d = d;
  p.horizon = opt.horizon;
  p.exit_radius = opt.exit_radius;
  p.truncation_delta = tr.delta_near;

  const LocalLaw near_law = local_law(m, tr.delta_near);
  double t = 0.0;
  Point x = opt.start;

  auto push = [&](double time, const Point& pos, std::int32_t jump, double delta) {
    p.times.push_back(time);
    p.positions.push_back(pos);
    p.jump_at.push_back(jump);
    p.deltas.push_back(delta);
  };

  double dist = tr.distance_to_active(x);
  LocalLaw law = dist > 0.0 ? local_law(m, tr.delta_at(x)) : near_law;
  push(0.0, x, -1, law.delta);
  if (opt.stop_set && opt.stop_set(x)) {
    p.stopped = true;
    return p;
  }
  if (norm(x) >= opt.exit_radius) {
    p.exited = true;
    return p;
  }

  // candidate point not yet written because it lies far from the active set
  bool have_pending = false;
  double pend_t = 0.0, pend_delta = 0.0;
  Point pend_x{};

  while (t < opt.horizon) {
    const bool inside = dist <= 0.0;
    double dt = opt.dt_max;
    if (inside && !opt.interfaces.empty()) {
      const double b = opt.interfaces.distance(x, d);
      const double local = std::pow(b / (3.0 * law.sigma), 2.0);
      dt = std::min(dt, std::max(opt.interfaces.dt_min, local));
    }
    if (!inside) {
      const double far_dt = std::pow(dist / (6.0 * law.sigma * std::sqrt(double(d))), 2.0);
      dt = std::max(dt, far_dt);
    }
    dt = std::min(dt, opt.horizon - t);

    const double wait = rng.exponential() / law.rate;
    const bool jump = wait < dt;
    const double step = jump ? wait : dt;
    const double sd = law.sigma * std::sqrt(step);
    for (int i = 0; i < d; ++i) x[i] += sd * rng.normal();
    double tn = t + step;
    if (!jump && opt.horizon - tn < 1e-12 * std::max(1.0, opt.horizon)) tn = opt.horizon;
    if (!(tn > t)) tn = std::nextafter(t, std::numeric_limits<double>::infinity());

    std::int32_t jump_id = -1;
    if (jump) {
      JumpEvent ev;
      ev.time = tn;
      ev.pre = x;
      const double r = law.delta * std::pow(rng.uniform(), -1.0 / a);
      const Point u = rng.unit_vector(d);
      x = x + r * u;
      ev.post = x;
      jump_id = std::int32_t(p.jumps.size());
      p.jumps.push_back(ev);
    }
    t = tn;

    const bool exited = norm(x) >= opt.exit_radius;
    const bool stopped = opt.stop_set && opt.stop_set(x);
    const double prev_dist = dist;
    dist = tr.distance_to_active(x);
    law = dist > 0.0 ? local_law(m, tr.delta_at(x)) : near_law;
    const bool keep = opt.full_skeleton || jump || exited || stopped || t >= opt.horizon || dist <= 0.0 || prev_dist <= 0.0;
    if (keep) {
      if (have_pending) push(pend_t, pend_x, -1, pend_delta);
      have_pending = false;
      push(t, x, jump_id, law.delta);
    } else {
      have_pending = true;
      pend_t = t;
      pend_x = x;
      pend_delta = law.delta;
    }
    if (stopped) {
      p.stopped = true;
      break;
    }
    if (exited) {
      p.exited = true;
      break;
    }
  }
  return p;
}

PathLedger simulate_path(const StableModel& m, std::uint64_t seed, double horizon, double exit_radius, double delta,
                         double dt_max, const Point& start) {
  SimulationOptions opt;
  opt.horizon = horizon;
  opt.exit_radius = exit_radius;
  opt.dt_max = dt_max;
  opt.start = start;
  opt.truncation.delta_near = delta;
  return simulate_path(m, seed, 0, opt);
}

namespace {

static_assert(std::endian::native == std::endian::little, "ledger I/O assumes a little-endian host");

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("read_ledger: truncated stream");
  return v;
}

void put_record(std::ostream& os, int d, double time, const Point& x, double flag) {
  put(os, time);
  for (int i = 0; i < d; ++i) put(os, x[i]);
  put(os, flag);
}

}  // namespace

void write_ledger(std::ostream& os, const PathLedger& p) {
  os.write("SLDG", 4);
  put<std::uint32_t>(os, 1);
  put<std::uint32_t>(os, std::uint32_t(p.d));
  put(os, p.horizon);
  put(os, p.exit_radius);
  put(os, p.truncation_delta);
  put<std::uint64_t>(os, std::uint64_t(p.times.size() + p.jumps.size()));
  for (std::size_t i = 0; i < p.times.size(); ++i) {
    if (p.jump_at[i] >= 0) {
      put_record(os, p.d, p.times[i], p.jumps[std::size_t(p.jump_at[i])].pre, 1.0);
      put_record(os, p.d, p.times[i], p.positions[i], 2.0);
    } else {
      put_record(os, p.d, p.times[i], p.positions[i], 0.0);
    }
  }
}

PathLedger read_ledger(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "SLDG", 4) != 0) throw std::runtime_error("read_ledger: bad magic");
  if (get<std::uint32_t>(is) != 1) throw std::runtime_error("read_ledger: unsupported version");
  PathLedger p;
  p.d = int(get<std::uint32_t>(is));
  if (p.d < 1 || p.d > kMaxDim) throw std::runtime_error("read_ledger: bad dimension");
  p.horizon = get<double>(is);
  p.exit_radius = get<double>(is);
  p.truncation_delta = get<double>(is);
  const auto count = get<std::uint64_t>(is);
  Point pre{};
  bool have_pre = false;
  for (std::uint64_t k = 0; k < count; ++k) {
    const double time = get<double>(is);
    Point x{};
    for (int i = 0; i < p.d; ++i) x[i] = get<double>(is);
    const double flag = get<double>(is);
    if (flag == 1.0) {
      pre = x;
      have_pre = true;
      continue;
    }
    std::int32_t jid = -1;
    if (flag == 2.0) {
      if (!have_pre) throw std::runtime_error("read_ledger: post-jump record without pre-jump record");
      jid = std::int32_t(p.jumps.size());
      p.jumps.push_back({time, pre, x});
      have_pre = false;
    }
    p.times.push_back(time);
    p.positions.push_back(x);
    p.jump_at.push_back(jid);
    p.deltas.push_back(p.truncation_delta);
  }
  return p;
}

}  // namespace stablescat
