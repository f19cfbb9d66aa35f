#include "mdres/sweeps.hpp"

#include "../detail/parallel.hpp"
#include "mdres/errors.hpp"

#include <random>

namespace mdres {

namespace {

SweepRow describe(const ScenarioSpec& s, std::string label)
{
  SweepRow r;
  r.label = std::move(label);
  r.water_level = s.domain.max.z();
  r.resistivity = 1.0 / s.sigma;
  r.hole_radius = s.liner && !s.liner->holes.empty() ? s.liner->holes.front().radius : 0.0;
  r.spacing = s.survey.spacing;
  r.center_x = s.survey.center.x();
  r.center_y = s.survey.center.y();
  r.scheme = s.scheme;
  return r;
}

void run_rows(std::vector<SweepRow>& rows, const std::vector<ScenarioSpec>& specs, int jobs)
{
  detail::parallel_for(static_cast<int>(specs.size()), jobs,
                       [&](int i) { rows[i].result = run_scenario(specs[i]); });
}

} // namespace

const char* strategy_name(DepthStrategy s) { return s == DepthStrategy::Interface ? "interface" : "truncated"; }

DepthStrategy parse_strategy(const std::string& name)
{
  if (name == "interface") {
    return DepthStrategy::Interface;
  }
  if (name == "truncated") {
    return DepthStrategy::Truncated;
  }
  throw ConfigError("unknown depth strategy '" + name + "' (expected interface or truncated)");
}

std::vector<SweepRow> depth_sweep(const ScenarioSpec& base, const std::vector<double>& depths,
                                  const std::vector<DepthStrategy>& strategies, int jobs)
{
  const Box& d = base.domain;
  const double top = d.max.z();
  ScenarioSpec common = base;
  common.liner.reset();
  common.crop_below.reset();
  common.threads = 1;
  for (double h : depths) {
    if (!(h > 0.0) || !(h < d.extents().z())) {
      throw InvalidGeometry("liner depth " + std::to_string(h) + " m lies outside the water column");
    }
    common.mesh.required_planes[2].push_back(top - h);
  }

  std::vector<ScenarioSpec> specs;
  std::vector<SweepRow> rows;
  for (double h : depths) {
    for (DepthStrategy st : strategies) {
      ScenarioSpec s = common;
      if (st == DepthStrategy::Interface) {
        LinerSpec l;
        if (base.liner) {
          l.thickness = base.liner->thickness;
          l.sigma = base.liner->sigma;
        }
        l.panels.push_back({2, top - h, {d.min.x(), d.min.y()}, {d.max.x(), d.max.y()}});
        s.liner = l;
      } else {
        s.crop_below = top - h;
      }
      SweepRow r = describe(s, strategy_name(st));
      r.depth = h;
      rows.push_back(std::move(r));
      specs.push_back(std::move(s));
    }
  }
  run_rows(rows, specs, jobs);
  return rows;
}

double snap_to(double value, double step)
{
  if (!(step > 0.0)) {
    return value;
  }
  return std::round(value / step) * step;
}

ScenarioSpec perturbed_scenario(const ScenarioSpec& base, double water_level, double resistivity, double hole_radius,
                                double shift_x, double shift_y)
{
  ScenarioSpec s = base;
  const double old_top = base.domain.max.z();
  const double new_top = old_top + water_level;
  if (!(new_top > base.domain.min.z())) {
    throw InvalidGeometry("water level perturbation empties the domain");
  }
  s.domain.max.z() = new_top;
  const double tol = 1e-9 * std::max(1.0, base.domain.extents().maxCoeff());
  if (s.liner) {
    for (Panel& p : s.liner->panels) {
      if (p.axis == 2) {
        if (p.position >= new_top - tol) {
          throw InvalidGeometry("water level perturbation drops the surface onto a horizontal liner panel");
        }
        continue;
      }
      // vertical panel: in-plane index 1 is z
      if (std::abs(p.hi[1] - old_top) <= tol || p.hi[1] > new_top) {
        p.hi[1] = new_top;
      }
    }
    for (Hole& h : s.liner->holes) {
      h.radius += hole_radius;
      if (!(h.radius > 0.0)) {
        throw InvalidGeometry("hole radius perturbation gives a non-positive radius");
      }
    }
  }
  const double rho = 1.0 / base.sigma + resistivity;
  if (!(rho > 0.0)) {
    throw InvalidGeometry("resistivity perturbation gives a non-positive resistivity");
  }
  s.sigma = 1.0 / rho;
  s.survey.center.x() += shift_x;
  s.survey.center.y() += shift_y;
  return s;
}

std::vector<std::array<double, 5>> uncertainty_samples(const UncertaintySpec& spec)
{
  const std::array<const std::vector<double>*, 5> lists{&spec.water_level, &spec.resistivity, &spec.hole_radius,
                                                        &spec.shift_x, &spec.shift_y};
  const std::array<bool, 5> snapped{true, false, false, true, true};
  for (const auto* l : lists) {
    if (l->empty()) {
      throw ConfigError("uncertainty perturbation lists must not be empty");
    }
  }
  auto finish = [&](std::array<double, 5> t) {
    for (int k = 0; k < 5; ++k) {
      if (snapped[k]) {
        t[k] = snap_to(t[k], spec.snap);
      }
    }
    return t;
  };

  std::vector<std::array<double, 5>> out;
  if (spec.mode == UncertaintySpec::Mode::Factorial) {
    std::array<std::size_t, 5> idx{};
    while (true) {
      std::array<double, 5> t{};
      for (int k = 0; k < 5; ++k) {
        t[k] = (*lists[k])[idx[k]];
      }
      out.push_back(finish(t));
      int k = 4;
      while (k >= 0 && ++idx[k] == lists[k]->size()) {
        idx[k] = 0;
        --k;
      }
      if (k < 0) {
        break;
      }
    }
    return out;
  }

  if (spec.samples < 0) {
    throw ConfigError("sample count must be non-negative");
  }
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < spec.samples; ++i) {
    std::array<double, 5> t{};
    for (int k = 0; k < 5; ++k) {
      const auto [lo, hi] = std::minmax_element(lists[k]->begin(), lists[k]->end());
      t[k] = *lo + (*hi - *lo) * unit(rng);
    }
    out.push_back(finish(t));
  }
  return out;
}

std::vector<SweepRow> uncertainty_sweep(const ScenarioSpec& base, const UncertaintySpec& spec, int jobs)
{
  const auto samples = uncertainty_samples(spec);
  std::vector<ScenarioSpec> specs;
  std::vector<SweepRow> rows;
  const char* label = spec.mode == UncertaintySpec::Mode::Factorial ? "factorial" : "sampled";
  for (const auto& t : samples) {
    ScenarioSpec s = perturbed_scenario(base, t[0], t[1], t[2], t[3], t[4]);
    s.threads = 1;
    SweepRow r = describe(s, label);
    r.shift_x = t[3];
    r.shift_y = t[4];
    rows.push_back(std::move(r));
    specs.push_back(std::move(s));
  }
  run_rows(rows, specs, jobs);
  return rows;
}

Histogram histogram(const std::vector<double>& values, int bins)
{
  if (bins < 1) {
    throw ConfigError("histogram needs at least one bin");
  }
  Histogram h;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  if (values.empty()) {
    h.edges.assign(static_cast<std::size_t>(bins) + 1, 0.0);
    return h;
  }
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  for (int i = 0; i <= bins; ++i) {
    h.edges.push_back(lo + (hi - lo) * i / bins);
  }
  for (double v : values) {
    int b = hi > lo ? static_cast<int>((v - lo) / (hi - lo) * bins) : 0;
    b = std::clamp(b, 0, bins - 1);
    ++h.counts[b];
  }
  return h;
}

} // namespace mdres
