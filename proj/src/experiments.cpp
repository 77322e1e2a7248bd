#include "smcf/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "smcf/format.hpp"
#include "smcf/parallel.hpp"

namespace smcf {

namespace {

struct SampleSeries {
  std::vector<double> l2_squared;
  std::vector<double> h1_squared;
  bool blew_up = false;
};

// Norm series of one sample; a Newton failure counts as a blow-up.
SampleSeries run_sample(const Scheme& scheme, const FeFunction& u0, const NoiseInput& noise,
                        FunctionalSet functionals) {
  SampleSeries s;
  try {
    auto result = integrate(scheme, u0, noise, [&](std::size_t, const FeFunction& u, const StepReport& rep) {
      if (rep.blowup) return;
      if (functionals.l2_squared) s.l2_squared.push_back(scheme.l2_norm_squared(u.coeffs));
      if (functionals.h1_squared) s.h1_squared.push_back(scheme.h1_seminorm_squared(u.coeffs));
    });
    s.blew_up = result.blowup_step.has_value();
  } catch (const NewtonFailure&) {
    s.blew_up = true;
  }
  return s;
}

struct SeriesAccumulator {
  std::vector<RunningMean> l2;
  std::vector<RunningMean> h1;
  std::size_t blowups = 0;

  explicit SeriesAccumulator(std::size_t points) : l2(points), h1(points) {}

  void add(const SampleSeries& s) {
    for (std::size_t n = 0; n < s.l2_squared.size(); ++n) l2[n].add(s.l2_squared[n]);
    for (std::size_t n = 0; n < s.h1_squared.size(); ++n) h1[n].add(s.h1_squared[n]);
    if (s.blew_up) ++blowups;
  }
};

std::vector<double> time_grid(const SolverConfig& cfg) {
  std::vector<double> t(cfg.num_steps() + 1);
  for (std::size_t n = 0; n < t.size(); ++n) t[n] = static_cast<double>(n) * cfg.tau;
  return t;
}

std::vector<MeanEstimate> estimates(const std::vector<RunningMean>& acc) {
  std::vector<MeanEstimate> out;
  out.reserve(acc.size());
  for (const auto& a : acc) out.push_back(a.estimate());
  return out;
}

void require_samples(std::size_t num_samples) {
  if (num_samples == 0) throw std::invalid_argument("number of samples must be at least 1");
}

std::size_t nested_factor(double tau, double tau_ref) {
  const double ratio = tau / tau_ref;
  const double rounded = std::round(ratio);
  if (!(rounded >= 1.0) || std::abs(ratio - rounded) > 1e-9 * ratio)
    throw std::invalid_argument("convergence_study: tau = " + format_real(tau) +
                                " is not an integer multiple of tau_ref = " + format_real(tau_ref));
  return static_cast<std::size_t>(rounded);
}

double l2_distance(const Scheme& scheme, std::span<const double> a, std::span<const double> b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return std::sqrt(std::max(0.0, scheme.l2_norm_squared(d)));
}

}  // namespace

EnsembleStats run_ensemble(const SolverConfig& cfg, const InitialProfile& profile, std::size_t num_samples,
                           FunctionalSet functionals, unsigned threads) {
  require_samples(num_samples);
  const Scheme scheme(cfg);
  const FeFunction u0 = initial_state(scheme.space(), profile);
  SeriesAccumulator acc(cfg.num_steps() + 1);

  for_each_sample_ordered<SampleSeries>(
      num_samples, threads,
      [&](std::size_t s) { return run_sample(scheme, u0, sample_noise(scheme, s), functionals); },
      [&](std::size_t, SampleSeries& series) { acc.add(series); });

  EnsembleStats stats;
  stats.num_samples = num_samples;
  stats.times = time_grid(cfg);
  if (functionals.l2_squared) stats.l2_squared = estimates(acc.l2);
  if (functionals.h1_squared) stats.h1_squared = estimates(acc.h1);
  stats.blowup_count = acc.blowups;
  return stats;
}

RateTable convergence_study(const SolverConfig& base, const InitialProfile& profile, double tau_ref,
                            std::vector<double> tau_values, std::size_t num_samples, unsigned threads) {
  require_samples(num_samples);
  if (base.noise.is_field())
    throw std::invalid_argument("convergence_study: coupled paths require scalar noise");
  if (tau_values.empty()) throw std::invalid_argument("convergence_study: no tau values");
  std::sort(tau_values.begin(), tau_values.end());
  if (std::adjacent_find(tau_values.begin(), tau_values.end()) != tau_values.end())
    throw std::invalid_argument("convergence_study: duplicate tau values");

  SolverConfig ref_cfg = base;
  ref_cfg.tau = tau_ref;
  ref_cfg.validate();
  std::vector<std::size_t> factors;
  std::vector<Scheme> coarse;
  const Scheme ref_scheme(ref_cfg);
  for (double tau : tau_values) {
    factors.push_back(nested_factor(tau, tau_ref));
    SolverConfig c = base;
    c.tau = tau;
    c.validate();
    coarse.emplace_back(c, ref_scheme.space());
  }
  const std::size_t stride = std::accumulate(factors.begin(), factors.end(), factors.front(),
                                             [](std::size_t a, std::size_t b) { return std::gcd(a, b); });
  const FeFunction u0 = initial_state(ref_scheme.space(), profile);
  const std::size_t levels = tau_values.size();

  struct SampleErrors {
    std::vector<double> errors;
    bool blew_up = false;
  };
  std::vector<RunningMean> acc(levels);
  std::size_t blowups = 0;

  for_each_sample_ordered<SampleErrors>(
      num_samples, threads,
      [&](std::size_t s) {
        SampleErrors out;
        const ScalarPath fine = generate_scalar_path(StreamKey{base.seed, s}, ref_cfg.num_steps(), tau_ref);
        std::vector<std::vector<double>> reference;
        try {
          auto r = integrate(ref_scheme, u0, fine, [&](std::size_t n, const FeFunction& u, const StepReport&) {
            if (n % stride == 0) reference.push_back(u.coeffs);
          });
          if (r.blowup_step) {
            out.blew_up = true;
            return out;
          }
          for (std::size_t l = 0; l < levels; ++l) {
            const std::size_t k = factors[l] / stride;
            double worst = 0.0;
            auto c = integrate(coarse[l], u0, coarsen(fine, factors[l]),
                               [&](std::size_t n, const FeFunction& u, const StepReport&) {
                                 worst = std::max(worst, l2_distance(ref_scheme, reference[n * k], u.coeffs));
                               });
            if (c.blowup_step) {
              out.blew_up = true;
              return out;
            }
            out.errors.push_back(worst);
          }
        } catch (const NewtonFailure&) {
          out.blew_up = true;
        }
        return out;
      },
      [&](std::size_t, SampleErrors& e) {
        if (e.blew_up) {
          ++blowups;
          return;
        }
        for (std::size_t l = 0; l < levels; ++l) acc[l].add(e.errors[l]);
      });

  RateTable table;
  table.tau_ref = tau_ref;
  table.tau_values = tau_values;
  table.num_samples = num_samples;
  table.blowup_count = blowups;
  for (const auto& a : acc) {
    const auto est = a.estimate();
    table.errors.push_back(est.count > 0 ? est.mean : std::numeric_limits<double>::quiet_NaN());
    table.standard_errors.push_back(est.se);
  }
  for (std::size_t l = 0; l + 1 < levels; ++l)
    table.orders.push_back(std::log(table.errors[l + 1] / table.errors[l]) /
                           std::log(tau_values[l + 1] / tau_values[l]));
  return table;
}

DeltaScalingTable delta_scaling_study(const SolverConfig& base, const InitialProfile& profile,
                                      std::vector<double> deltas, double delta_floor,
                                      std::size_t num_samples, unsigned threads) {
  require_samples(num_samples);
  if (deltas.empty()) throw std::invalid_argument("delta_scaling_study: no delta values");
  for (double d : deltas)
    if (!(d >= delta_floor)) throw std::invalid_argument("delta_scaling_study: every delta must be >= delta_floor");

  SolverConfig floor_cfg = base;
  floor_cfg.delta = delta_floor;
  floor_cfg.validate();
  const Scheme floor_scheme(floor_cfg);
  std::vector<Scheme> schemes;
  for (double d : deltas) {
    SolverConfig c = base;
    c.delta = d;
    c.validate();
    schemes.emplace_back(c, floor_scheme.space());
  }
  const FeFunction u0 = initial_state(floor_scheme.space(), profile);
  const std::size_t levels = deltas.size();

  struct SampleGaps {
    std::vector<double> gaps;
    bool blew_up = false;
  };
  std::vector<RunningMean> acc(levels);
  std::size_t blowups = 0;

  for_each_sample_ordered<SampleGaps>(
      num_samples, threads,
      [&](std::size_t s) {
        SampleGaps out;
        const NoiseInput noise = sample_noise(floor_scheme, s);
        std::vector<std::vector<double>> reference;
        try {
          auto r = integrate(floor_scheme, u0, noise, [&](std::size_t, const FeFunction& u, const StepReport&) {
            reference.push_back(u.coeffs);
          });
          if (r.blowup_step) {
            out.blew_up = true;
            return out;
          }
          for (std::size_t l = 0; l < levels; ++l) {
            double worst = 0.0;
            auto c = integrate(schemes[l], u0, noise, [&](std::size_t n, const FeFunction& u, const StepReport&) {
              const double d = l2_distance(floor_scheme, reference[n], u.coeffs);
              worst = std::max(worst, d * d);
            });
            if (c.blowup_step) {
              out.blew_up = true;
              return out;
            }
            out.gaps.push_back(worst);
          }
        } catch (const NewtonFailure&) {
          out.blew_up = true;
        }
        return out;
      },
      [&](std::size_t, SampleGaps& g) {
        if (g.blew_up) {
          ++blowups;
          return;
        }
        for (std::size_t l = 0; l < levels; ++l) acc[l].add(g.gaps[l]);
      });

  DeltaScalingTable table;
  table.delta_floor = delta_floor;
  table.deltas = deltas;
  table.gaps = estimates(acc);
  table.num_samples = num_samples;
  table.blowup_count = blowups;
  std::vector<double> x, y;
  for (std::size_t l = 0; l < levels; ++l) {
    if (deltas[l] > delta_floor && table.gaps[l].mean > 0.0) {
      x.push_back(deltas[l]);
      y.push_back(table.gaps[l].mean);
    }
  }
  table.slope = x.size() >= 2 ? loglog_slope(x, y) : std::numeric_limits<double>::quiet_NaN();
  return table;
}

StabilityCheck stability_study(const SolverConfig& cfg, const InitialProfile& profile, std::size_t num_samples,
                               unsigned threads) {
  require_samples(num_samples);
  const Scheme scheme(cfg);
  const FeFunction u0 = initial_state(scheme.space(), profile);
  const std::size_t points = cfg.num_steps() + 1;
  const double weight = 2.0 * cfg.delta * cfg.tau;

  // Per-sample series are kept until the maximizing step is known.
  std::vector<std::vector<double>> l2(num_samples);
  std::vector<double> dissipation(num_samples, 0.0);
  std::vector<RunningMean> l2_mean(points);
  std::size_t blowups = 0;
  std::vector<bool> alive(num_samples, true);

  for_each_sample_ordered<SampleSeries>(
      num_samples, threads,
      [&](std::size_t s) { return run_sample(scheme, u0, sample_noise(scheme, s), FunctionalSet{}); },
      [&](std::size_t s, SampleSeries& series) {
        if (series.blew_up) {
          ++blowups;
          alive[s] = false;
          return;
        }
        for (std::size_t n = 0; n < points; ++n) l2_mean[n].add(series.l2_squared[n]);
        double sum = 0.0;
        for (double v : series.h1_squared) sum += v;
        dissipation[s] = weight * sum;
        l2[s] = std::move(series.l2_squared);
      });

  StabilityCheck check;
  check.num_samples = num_samples;
  check.blowup_count = blowups;
  check.initial_l2_squared = scheme.l2_norm_squared(u0.coeffs);
  check.rhs = check.initial_l2_squared + cfg.epsilon * cfg.epsilon * cfg.final_time;
  for (std::size_t n = 1; n < points; ++n)
    if (l2_mean[n].estimate().mean > l2_mean[check.argmax_step].estimate().mean) check.argmax_step = n;
  RunningMean lhs;
  for (std::size_t s = 0; s < num_samples; ++s)
    if (alive[s]) lhs.add(l2[s][check.argmax_step] + dissipation[s]);
  const auto est = lhs.estimate();
  check.lhs = est.mean;
  check.lhs_se = est.se;
  return check;
}

EnergySeries energy_study(const SolverConfig& cfg, const InitialProfile& profile, std::size_t num_samples,
                          unsigned threads) {
  const auto stats = run_ensemble(cfg, profile, num_samples, FunctionalSet{false, true}, threads);
  EnergySeries series;
  series.times = stats.times;
  series.num_samples = stats.num_samples;
  series.blowup_count = stats.blowup_count;
  for (const auto& e : stats.h1_squared) series.energy.push_back({0.5 * e.mean, 0.5 * e.se, e.count});
  return series;
}

GrowthClass classify_growth(double ratio, std::size_t blowup_count) {
  if (blowup_count > 0 || !(ratio <= kRapidGrowthRatio)) return GrowthClass::RapidGrowth;
  if (ratio < kDecayRatio) return GrowthClass::Decay;
  return GrowthClass::Bounded;
}

std::string to_string(GrowthClass growth) {
  switch (growth) {
    case GrowthClass::Decay: return "decay";
    case GrowthClass::Bounded: return "bounded";
    case GrowthClass::RapidGrowth: return "rapid-growth";
  }
  return "unknown";
}

ThresholdReport threshold_study(const SolverConfig& base, const std::vector<InitialProfile>& profiles,
                                const std::vector<NoiseModel>& noises, const std::vector<double>& epsilons,
                                std::size_t num_samples, unsigned threads) {
  require_samples(num_samples);
  ThresholdReport report;
  for (const auto& profile : profiles) {
    for (const auto& noise : noises) {
      for (double eps : epsilons) {
        SolverConfig cfg = base;
        cfg.noise = noise;
        cfg.epsilon = eps;
        cfg.validate();
        const Scheme scheme(cfg);
        const FeFunction u0 = initial_state(scheme.space(), profile);
        SeriesAccumulator acc(cfg.num_steps() + 1);

        ThresholdCase c;
        c.profile = profile;
        c.noise = noise;
        c.epsilon = eps;
        c.num_samples = num_samples;
        c.times = time_grid(cfg);
        for_each_sample_ordered<SampleSeries>(
            num_samples, threads,
            [&](std::size_t s) { return run_sample(scheme, u0, sample_noise(scheme, s), FunctionalSet{false, true}); },
            [&](std::size_t s, SampleSeries& series) {
              if (s == 0) c.single_sample = series.h1_squared;
              acc.add(series);
            });
        c.mean_energy = estimates(acc.h1);
        c.blowup_count = acc.blowups;
        c.initial_energy = scheme.h1_seminorm_squared(u0.coeffs);
        c.final_energy = c.mean_energy.back();
        c.final_ratio = c.final_energy.count > 0 ? c.final_energy.mean / c.initial_energy
                                                 : std::numeric_limits<double>::infinity();
        c.growth = classify_growth(c.final_ratio, c.blowup_count);
        report.cases.push_back(std::move(c));
      }
    }
  }
  return report;
}

void write_ensemble_csv(std::ostream& out, const EnsembleStats& stats) {
  out << "t,mean_l2_squared,se_l2_squared,mean_h1_squared,se_h1_squared,count\n";
  for (std::size_t n = 0; n < stats.times.size(); ++n) {
    out << format_real(stats.times[n]);
    std::size_t count = 0;
    for (const auto* series : {&stats.l2_squared, &stats.h1_squared}) {
      if (series->empty()) {
        out << ",,";
      } else {
        out << ',' << format_real((*series)[n].mean) << ',' << format_real((*series)[n].se);
        count = (*series)[n].count;
      }
    }
    out << ',' << count << '\n';
  }
}

// Rows run from the largest tau down; the order on a row compares it with
// the row above.
void write_rate_table_csv(std::ostream& out, const RateTable& table) {
  out << "tau,error,standard_error,order\n";
  const std::size_t levels = table.tau_values.size();
  for (std::size_t k = 0; k < levels; ++k) {
    const std::size_t l = levels - 1 - k;
    out << format_real(table.tau_values[l]) << ',' << format_real(table.errors[l]) << ','
        << format_real(table.standard_errors[l]) << ',';
    if (k > 0) out << format_real(table.orders[l]);
    out << '\n';
  }
}

void write_delta_scaling_csv(std::ostream& out, const DeltaScalingTable& table) {
  out << "delta,mean_sup_squared_gap,standard_error,count,delta_floor,slope\n";
  for (std::size_t l = 0; l < table.deltas.size(); ++l)
    out << format_real(table.deltas[l]) << ',' << format_real(table.gaps[l].mean) << ','
        << format_real(table.gaps[l].se) << ',' << table.gaps[l].count << ',' << format_real(table.delta_floor)
        << ',' << format_real(table.slope) << '\n';
}

void write_stability_csv(std::ostream& out, const StabilityCheck& check) {
  out << "lhs,lhs_standard_error,rhs,initial_l2_squared,argmax_step,samples,blowups\n";
  out << format_real(check.lhs) << ',' << format_real(check.lhs_se) << ',' << format_real(check.rhs) << ','
      << format_real(check.initial_l2_squared) << ',' << check.argmax_step << ',' << check.num_samples << ','
      << check.blowup_count << '\n';
}

void write_energy_csv(std::ostream& out, const EnergySeries& series) {
  out << "t,energy,standard_error,count\n";
  for (std::size_t n = 0; n < series.times.size(); ++n)
    out << format_real(series.times[n]) << ',' << format_real(series.energy[n].mean) << ','
        << format_real(series.energy[n].se) << ',' << series.energy[n].count << '\n';
}

void write_threshold_summary_csv(std::ostream& out, const ThresholdReport& report) {
  out << "case,profile,kappa,noise,num_modes,decay,epsilon,classification,initial_energy,"
         "final_energy_mean,final_energy_se,final_ratio,blowups,samples\n";
  for (std::size_t i = 0; i < report.cases.size(); ++i) {
    const auto& c = report.cases[i];
    out << i << ',' << to_string(c.profile.kind) << ',' << format_real(c.profile.kappa) << ','
        << to_string(c.noise.kind) << ',' << c.noise.num_modes << ',' << format_real(c.noise.decay) << ','
        << format_real(c.epsilon) << ',' << to_string(c.growth) << ',' << format_real(c.initial_energy) << ',';
    if (c.final_energy.count > 0)
      out << format_real(c.final_energy.mean) << ',' << format_real(c.final_energy.se) << ',' << format_real(c.final_ratio);
    else
      out << ",,";
    out << ',' << c.blowup_count << ',' << c.num_samples << '\n';
  }
}

void write_threshold_series_csv(std::ostream& out, const ThresholdReport& report) {
  out << "case,t,single_sample_h1_squared,mean_h1_squared,se_h1_squared,count\n";
  for (std::size_t i = 0; i < report.cases.size(); ++i) {
    const auto& c = report.cases[i];
    for (std::size_t n = 0; n < c.times.size(); ++n) {
      out << i << ',' << format_real(c.times[n]) << ',';
      if (n < c.single_sample.size()) out << format_real(c.single_sample[n]);
      out << ',';
      if (c.mean_energy[n].count > 0)
        out << format_real(c.mean_energy[n].mean) << ',' << format_real(c.mean_energy[n].se);
      else
        out << ',';
      out << ',' << c.mean_energy[n].count << '\n';
    }
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,l2_norm,h1_seminorm,newton_iterations,residual\n";
  for (std::size_t n = 0; n < traj.times.size(); ++n)
    out << format_real(traj.times[n]) << ',' << format_real(traj.l2_norms[n]) << ','
        << format_real(traj.h1_seminorms[n]) << ',' << traj.reports[n].newton_iterations << ','
        << format_real(traj.reports[n].final_residual) << '\n';
}

void write_snapshot_csv(std::ostream& out, const FemSpace& space, const Trajectory& traj) {
  out << "t,x,u\n";
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const auto& u = traj.snapshots[k];
    const std::string t = format_real(traj.snapshot_times[k]);
    for (std::size_t i = 0; i < u.size(); ++i)
      out << t << ',' << format_real(space.dof_coordinate(i)) << ',' << format_real(u[i]) << '\n';
    out << t << ',' << format_real(1.0) << ',' << format_real(u[0]) << '\n';
  }
}

}  // namespace smcf
