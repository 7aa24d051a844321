#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "mvip/errors.hpp"

namespace mvip {

/// Lorentz actuator sizing parameters, SI units. Defaults follow the
/// published structure table; wire diameter, frame thickness, packing
/// fraction and the yoke clearance are unpublished and configurable.
struct DesignParams {
  double magnet_length = 40.5e-3;    // m
  double magnet_width = 20.5e-3;     // m
  double magnet_thickness = 14e-3;   // m
  double air_gap = 26e-3;            // m
  double stroke = 12e-3;             // m
  double coil_width = 11e-3;         // m
  double coil_length = 64e-3;        // m
  double coil_thickness = 12e-3;     // m
  double turns = 380.0;              // rounded to integer when evaluated
  double wire_diameter = 0.5e-3;     // m
  double frame_thickness = 4e-3;     // m
  double remanence = 1.43;           // T
  double copper_resistivity = 1.7e-8;  // ohm*m
  double copper_density = 8960.0;    // kg/m^3
  double packing_fraction = 0.75;
  double current_max = 2.0;          // A
  double yoke_clearance = 20e-3;     // m; width-budget clearance, not the sensor offset

  /// Coil window inner length/width entering the volume model, taken from
  /// the coil geometry.
  double window_length() const { return coil_length - 2.0 * coil_thickness; }
  double window_width() const { return coil_width; }
};

/// Outer size budget and force floor the design must satisfy.
struct DesignEnvelope {
  double max_width = 65e-3;     // m
  double max_thickness = 55e-3; // m
  double max_height = 70e-3;    // m
  double min_force = 24.0;      // N
};

/// Empirical two-arctangent air-gap flux density.
inline double flux_density(const DesignParams& p) {
  const double wl = p.magnet_width * p.magnet_length;
  const double lw2 = p.magnet_length * p.magnet_length +
                     p.magnet_width * p.magnet_width;
  const double near = p.air_gap;
  const double far = 4.0 * p.magnet_thickness + p.air_gap;
  const double t1 = std::atan(wl / (near * std::sqrt(near * near + lw2)));
  const double t2 = std::atan(wl / (far * std::sqrt(far * far + lw2)));
  return 2.0 * p.remanence / M_PI * (t1 - t2);
}

/// Peak force for an explicitly given flux density.
inline double peak_force(double turns, double flux, double current_max,
                         double magnet_length) {
  return 2.0 * std::round(turns) * flux * current_max * magnet_length;
}

inline double peak_force(const DesignParams& p) {
  return peak_force(p.turns, flux_density(p), p.current_max, p.magnet_length);
}

/// Wound-copper volume from the winding window geometry.
inline double coil_volume(const DesignParams& p) {
  const double window = p.air_gap - p.stroke - p.frame_thickness;
  if (!(window > 0.0)) throw InvalidWindow("air_gap - stroke - frame_thickness must be positive");
  const double d = p.wire_diameter;
  const double n = std::round(p.turns);
  const double layers = n * d / window;
  const double perimeter = p.window_length() + p.window_width() + 4.0 * d;
  return M_PI / 2.0 * d * d * (window / d) *
         (layers * perimeter + n * d * d / window * (layers - 1.0));
}

/// Resistive dissipation at maximum current.
inline double heat(const DesignParams& p) {
  const double d4 = std::pow(p.wire_diameter, 4);
  return 16.0 * p.current_max * p.current_max * p.copper_resistivity *
         coil_volume(p) / (M_PI * M_PI * d4);
}

inline double coil_mass(const DesignParams& p) {
  return p.copper_density * p.packing_fraction * coil_volume(p);
}

/// Per-constraint slack; non-negative entries mean satisfied.
struct FeasibilityReport {
  double thickness_margin = 0.0;  // x2 - (2 t_m + a)
  double width_margin = 0.0;      // x1 - (2 w_m + d1)
  double height_margin = 0.0;     // x3 - l_coil
  double force_margin = 0.0;      // F_max - F_min
  bool feasible() const {
    return thickness_margin >= 0.0 && width_margin >= 0.0 &&
           height_margin >= 0.0 && force_margin >= 0.0;
  }
  double violation() const {
    double v = 0.0;
    for (double m : {thickness_margin, width_margin, height_margin, force_margin})
      if (m < 0.0) v -= m;
    return v;
  }
};

inline FeasibilityReport feasible(const DesignParams& p, const DesignEnvelope& env) {
  FeasibilityReport r;
  r.thickness_margin = env.max_thickness - (2.0 * p.magnet_thickness + p.air_gap);
  r.width_margin = env.max_width - (2.0 * p.magnet_width + p.yoke_clearance);
  r.height_margin = env.max_height - p.coil_length;
  r.force_margin = peak_force(p) - env.min_force;
  return r;
}

/// Tunable fields for the design search.
enum class DesignVar {
  MagnetLength,
  MagnetWidth,
  MagnetThickness,
  AirGap,
  CoilWidth,
  CoilLength,
  Turns,
  Stroke,
};

inline const char* design_var_name(DesignVar v) {
  switch (v) {
    case DesignVar::MagnetLength: return "magnet_length";
    case DesignVar::MagnetWidth: return "magnet_width";
    case DesignVar::MagnetThickness: return "magnet_thickness";
    case DesignVar::AirGap: return "air_gap";
    case DesignVar::CoilWidth: return "coil_width";
    case DesignVar::CoilLength: return "coil_length";
    case DesignVar::Turns: return "turns";
    case DesignVar::Stroke: return "stroke";
  }
  return "?";
}

inline void set_design_var(DesignParams& p, DesignVar v, double value) {
  switch (v) {
    case DesignVar::MagnetLength: p.magnet_length = value; return;
    case DesignVar::MagnetWidth: p.magnet_width = value; return;
    case DesignVar::MagnetThickness: p.magnet_thickness = value; return;
    case DesignVar::AirGap: p.air_gap = value; return;
    case DesignVar::CoilWidth: p.coil_width = value; return;
    case DesignVar::CoilLength: p.coil_length = value; return;
    case DesignVar::Turns: p.turns = value; return;
    case DesignVar::Stroke: p.stroke = value; return;
  }
}

struct DesignBound {
  DesignVar var;
  double lo;
  double hi;
};

struct DesignWeights {
  double flux = 1.0;   // weight on -B (maximize)
  double heat = 1.0;   // weight on Q (minimize)
  double mass = 1.0;   // weight on coil mass (minimize)
};

struct DesignBudget {
  int population = 64;
  int generations = 120;
};

/// One scored design out of the search.
struct RankedDesign {
  DesignParams params;
  double flux = 0.0;
  double heat = 0.0;
  double mass = 0.0;
  double objective = 0.0;  // scalarized, lower is better
  FeasibilityReport report;
};

struct DesignOutcome {
  std::vector<RankedDesign> elites;      // feasible, best first
  std::vector<double> best_per_generation;  // champion objective trace
};

namespace detail {

struct DesignEval {
  double flux = 0.0, heat = 0.0, mass = 0.0, violation = 0.0;
  bool feasible = false;
};

inline DesignEval evaluate_design(const DesignParams& p, const DesignEnvelope& env) {
  DesignEval e;
  e.flux = flux_density(p);
  try {
    e.heat = heat(p);
    e.mass = coil_mass(p);
  } catch (const InvalidWindow&) {
    e.heat = 1e9;
    e.mass = 1e9;
    e.violation = 1e3;
    return e;
  }
  FeasibilityReport r = feasible(p, env);
  e.feasible = r.feasible();
  e.violation = r.violation();
  return e;
}

}  // namespace detail

/// Population search over the scalarized objective
///   w_B * (-B_hat) + w_Q * Q_hat + w_m * m_hat
/// where hats are min-max normalized over the initial population (frozen so
/// the champion trace is monotone under elitism). Infeasible candidates pay
/// a violation penalty. Deterministic for a fixed seed.
inline DesignOutcome optimize(const DesignParams& base, const DesignEnvelope& env,
                              const std::vector<DesignBound>& bounds,
                              const DesignWeights& weights,
                              const DesignBudget& budget, std::uint64_t seed) {
  if (bounds.empty()) throw Config("design bounds must be non-empty");
  for (const auto& b : bounds)
    if (!(b.hi >= b.lo)) throw Config("design bound hi < lo");

  const int dim = static_cast<int>(bounds.size());
  const int pop_n = std::max(budget.population, 4);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  auto make_params = [&](const std::vector<double>& genome) {
    DesignParams p = base;
    for (int i = 0; i < dim; ++i)
      set_design_var(p, bounds[static_cast<size_t>(i)].var, genome[static_cast<size_t>(i)]);
    return p;
  };

  std::vector<std::vector<double>> pop(static_cast<size_t>(pop_n),
                                       std::vector<double>(static_cast<size_t>(dim)));
  for (auto& g : pop)
    for (int i = 0; i < dim; ++i) {
      const auto& b = bounds[static_cast<size_t>(i)];
      g[static_cast<size_t>(i)] = b.lo + uni(rng) * (b.hi - b.lo);
    }

  std::vector<detail::DesignEval> evals(static_cast<size_t>(pop_n));
  for (int i = 0; i < pop_n; ++i)
    evals[static_cast<size_t>(i)] = detail::evaluate_design(make_params(pop[static_cast<size_t>(i)]), env);

  // One normalization frame for the whole run.
  double flux_lo = evals[0].flux, flux_hi = evals[0].flux;
  double heat_lo = evals[0].heat, heat_hi = evals[0].heat;
  double mass_lo = evals[0].mass, mass_hi = evals[0].mass;
  for (const auto& e : evals) {
    flux_lo = std::min(flux_lo, e.flux); flux_hi = std::max(flux_hi, e.flux);
    heat_lo = std::min(heat_lo, e.heat); heat_hi = std::max(heat_hi, e.heat);
    mass_lo = std::min(mass_lo, e.mass); mass_hi = std::max(mass_hi, e.mass);
  }
  auto norm = [](double v, double lo, double hi) {
    return hi > lo ? (v - lo) / (hi - lo) : 0.0;
  };
  auto scalarize = [&](const detail::DesignEval& e) {
    double obj = -weights.flux * norm(e.flux, flux_lo, flux_hi) +
                 weights.heat * norm(e.heat, heat_lo, heat_hi) +
                 weights.mass * norm(e.mass, mass_lo, mass_hi);
    if (!e.feasible) obj += 10.0 + 100.0 * e.violation;
    return obj;
  };

  std::vector<double> scores(static_cast<size_t>(pop_n));
  for (int i = 0; i < pop_n; ++i)
    scores[static_cast<size_t>(i)] = scalarize(evals[static_cast<size_t>(i)]);

  auto tournament = [&]() {
    int a = static_cast<int>(uni(rng) * pop_n) % pop_n;
    int b = static_cast<int>(uni(rng) * pop_n) % pop_n;
    return scores[static_cast<size_t>(a)] <= scores[static_cast<size_t>(b)] ? a : b;
  };

  DesignOutcome out;
  std::vector<std::pair<double, std::vector<double>>> archive;

  for (int gen = 0; gen < budget.generations; ++gen) {
    int champ = 0;
    for (int i = 1; i < pop_n; ++i)
      if (scores[static_cast<size_t>(i)] < scores[static_cast<size_t>(champ)]) champ = i;
    out.best_per_generation.push_back(scores[static_cast<size_t>(champ)]);
    archive.emplace_back(scores[static_cast<size_t>(champ)], pop[static_cast<size_t>(champ)]);

    std::vector<std::vector<double>> next;
    next.reserve(static_cast<size_t>(pop_n));
    next.push_back(pop[static_cast<size_t>(champ)]);  // elitism
    while (static_cast<int>(next.size()) < pop_n) {
      const auto& pa = pop[static_cast<size_t>(tournament())];
      const auto& pb = pop[static_cast<size_t>(tournament())];
      std::vector<double> child(static_cast<size_t>(dim));
      for (int i = 0; i < dim; ++i) {
        const auto& b = bounds[static_cast<size_t>(i)];
        const double mix = uni(rng);
        double v = mix * pa[static_cast<size_t>(i)] + (1.0 - mix) * pb[static_cast<size_t>(i)];
        const double roll = uni(rng);
        if (roll < 0.15) {
          v += gauss(rng) * 0.1 * (b.hi - b.lo);
        } else if (roll < 0.22) {
          v = uni(rng) < 0.5 ? b.lo : b.hi;  // boundary mutation; optima sit on corners
        }
        child[static_cast<size_t>(i)] = std::clamp(v, b.lo, b.hi);
      }
      next.push_back(std::move(child));
    }
    pop = std::move(next);
    for (int i = 0; i < pop_n; ++i) {
      evals[static_cast<size_t>(i)] = detail::evaluate_design(make_params(pop[static_cast<size_t>(i)]), env);
      scores[static_cast<size_t>(i)] = scalarize(evals[static_cast<size_t>(i)]);
    }
  }

  // Collect feasible champions plus the final population, deduplicated.
  for (int i = 0; i < pop_n; ++i)
    archive.emplace_back(scores[static_cast<size_t>(i)], pop[static_cast<size_t>(i)]);
  std::sort(archive.begin(), archive.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first < b.first;
              return a.second < b.second;
            });
  for (const auto& [score, genome] : archive) {
    DesignParams p = make_params(genome);
    p.turns = std::round(p.turns);
    detail::DesignEval e = detail::evaluate_design(p, env);
    if (!e.feasible) continue;
    bool dup = false;
    for (const auto& kept : out.elites) {
      double dist = 0.0;
      for (int i = 0; i < dim; ++i) {
        const auto& b = bounds[static_cast<size_t>(i)];
        const double span = std::max(b.hi - b.lo, 1e-12);
        const double va = genome[static_cast<size_t>(i)];
        double vb = 0.0;
        switch (bounds[static_cast<size_t>(i)].var) {
          case DesignVar::MagnetLength: vb = kept.params.magnet_length; break;
          case DesignVar::MagnetWidth: vb = kept.params.magnet_width; break;
          case DesignVar::MagnetThickness: vb = kept.params.magnet_thickness; break;
          case DesignVar::AirGap: vb = kept.params.air_gap; break;
          case DesignVar::CoilWidth: vb = kept.params.coil_width; break;
          case DesignVar::CoilLength: vb = kept.params.coil_length; break;
          case DesignVar::Turns: vb = kept.params.turns; break;
          case DesignVar::Stroke: vb = kept.params.stroke; break;
        }
        dist = std::max(dist, std::abs(va - vb) / span);
      }
      if (dist < 1e-3) { dup = true; break; }
    }
    if (dup) continue;
    RankedDesign rd;
    rd.params = p;
    rd.flux = e.flux;
    rd.heat = e.heat;
    rd.mass = e.mass;
    rd.objective = score;
    rd.report = feasible(p, env);
    out.elites.push_back(std::move(rd));
    if (out.elites.size() >= 16) break;
  }
  if (out.elites.empty())
    throw NoFeasibleDesign("no feasible design found within budget");
  return out;
}

/// Key-value block per design, human-readable.
inline void write_design_report(const DesignOutcome& outcome, std::ostream& out) {
  char buf[160];
  int rank = 1;
  for (const auto& d : outcome.elites) {
    out << "design " << rank++ << "\n";
    auto kv = [&](const char* k, double v, const char* unit) {
      std::snprintf(buf, sizeof(buf), "  %-18s = %.6g %s\n", k, v, unit);
      out << buf;
    };
    kv("magnet_length", d.params.magnet_length * 1e3, "mm");
    kv("magnet_width", d.params.magnet_width * 1e3, "mm");
    kv("magnet_thickness", d.params.magnet_thickness * 1e3, "mm");
    kv("air_gap", d.params.air_gap * 1e3, "mm");
    kv("coil_width", d.params.coil_width * 1e3, "mm");
    kv("coil_length", d.params.coil_length * 1e3, "mm");
    kv("turns", d.params.turns, "");
    kv("stroke", d.params.stroke * 1e3, "mm");
    kv("flux_density", d.flux, "T");
    kv("peak_force", peak_force(d.params), "N");
    kv("heat", d.heat, "W");
    kv("coil_mass", d.mass * 1e3, "g");
    kv("objective", d.objective, "");
    kv("thickness_margin", d.report.thickness_margin * 1e3, "mm");
    kv("width_margin", d.report.width_margin * 1e3, "mm");
    kv("height_margin", d.report.height_margin * 1e3, "mm");
    kv("force_margin", d.report.force_margin, "N");
    out << "\n";
  }
}

/// Machine-readable table of the same designs.
inline void write_design_table(const DesignOutcome& outcome, std::ostream& out) {
  out << "rank,magnet_length_mm,magnet_width_mm,magnet_thickness_mm,air_gap_mm,"
         "coil_width_mm,coil_length_mm,turns,stroke_mm,flux_T,peak_force_N,"
         "heat_W,coil_mass_g,objective,thickness_margin_mm,width_margin_mm,"
         "height_margin_mm,force_margin_N\n";
  char buf[512];
  int rank = 1;
  for (const auto& d : outcome.elites) {
    std::snprintf(buf, sizeof(buf),
                  "%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,"
                  "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                  rank++, d.params.magnet_length * 1e3, d.params.magnet_width * 1e3,
                  d.params.magnet_thickness * 1e3, d.params.air_gap * 1e3,
                  d.params.coil_width * 1e3, d.params.coil_length * 1e3,
                  d.params.turns, d.params.stroke * 1e3, d.flux,
                  peak_force(d.params), d.heat, d.mass * 1e3, d.objective,
                  d.report.thickness_margin * 1e3, d.report.width_margin * 1e3,
                  d.report.height_margin * 1e3, d.report.force_margin);
    out << buf;
  }
}

}  // namespace mvip
