#include "smcf/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>
#include <utility>

#include "smcf/format.hpp"

namespace smcf {

namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;
};

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "experiment.kind",      "experiment.samples",     "experiment.seed",       "experiment.output",
      "solver.epsilon",       "solver.delta",           "solver.tau",            "solver.final_time",
      "solver.num_intervals", "solver.degree",          "solver.newton_tol",     "solver.newton_max_iter",
      "solver.blowup_threshold", "solver.snapshot_stride",
      "noise.kind",           "noise.num_modes",        "noise.decay",           "noise.amplitudes",
      "profile.kind",         "profile.kappa",
      "study.tau_ref",        "study.tau_values",       "study.delta_floor",     "study.delta_values",
      "study.epsilon_values"};
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const Entry& e) {
  std::string v = trim(e.value);
  bool root = false;
  if (v.starts_with("sqrt(") && v.ends_with(")")) {
    root = true;
    v = trim(v.substr(5, v.size() - 6));
  }
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError(e.line, key + ": '" + e.value + "' is not a finite real number");
  if (root) {
    if (x < 0.0) throw ConfigError(e.line, key + ": sqrt of a negative number");
    x = std::sqrt(x);
  }
  return x;
}

template <typename Int>
Int parse_integer(const std::string& key, const Entry& e) {
  const std::string v = trim(e.value);
  Int x{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(e.line, key + ": '" + e.value + "' is not a valid integer");
  return x;
}

std::vector<double> parse_real_list(const std::string& key, const Entry& e) {
  std::vector<double> out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(key, Entry{item, e.line}));
  if (out.empty()) throw ConfigError(e.line, key + ": empty list");
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_real(v[i]);
  return s;
}

class Document {
 public:
  explicit Document(const std::string& text) {
    std::istringstream in(text);
    std::string raw, section;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
      ++line;
      const auto hash = raw.find('#');
      const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') throw ConfigError(line, "malformed section header '" + s + "'");
        section = trim(s.substr(1, s.size() - 2));
        static const std::vector<std::string> sections = {"experiment", "solver", "noise", "profile", "study"};
        if (std::find(sections.begin(), sections.end(), section) == sections.end())
          throw ConfigError(line, "unknown section [" + section + "]");
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value', got '" + s + "'");
      if (section.empty()) throw ConfigError(line, "key outside of any section");
      const std::string key = section + "." + trim(s.substr(0, eq));
      const auto& keys = known_keys();
      if (std::find(keys.begin(), keys.end(), key) == keys.end())
        throw ConfigError(line, "unknown key '" + key + "'");
      if (entries_.count(key)) throw ConfigError(line, "duplicate key '" + key + "'");
      const std::string value = trim(s.substr(eq + 1));
      if (value.empty()) throw ConfigError(line, key + ": missing value");
      entries_[key] = Entry{value, line};
    }
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  const Entry& at(const std::string& key) const { return entries_.at(key); }

  void forbid(const std::string& key, const std::string& reason) const {
    if (has(key)) throw ConfigError(at(key).line, "'" + key + "' " + reason);
  }

  double real(const std::string& key, double fallback) const {
    return has(key) ? parse_real(key, at(key)) : fallback;
  }
  template <typename Int>
  Int integer(const std::string& key, Int fallback) const {
    return has(key) ? parse_integer<Int>(key, at(key)) : fallback;
  }
  std::vector<double> list(const std::string& key) const {
    return has(key) ? parse_real_list(key, at(key)) : std::vector<double>{};
  }

 private:
  std::map<std::string, Entry> entries_;
};

const std::vector<std::string> kBaseRequired = {"experiment.kind",  "experiment.samples", "solver.epsilon",
                                                "solver.delta",     "solver.tau",         "solver.final_time"};

std::vector<std::string> required_keys(ExperimentKind kind) {
  std::vector<std::string> req = {"experiment.kind", "solver.final_time"};
  if (kind != ExperimentKind::Trajectory) req.push_back("experiment.samples");
  if (kind == ExperimentKind::Threshold)
    req.push_back("study.epsilon_values");
  else
    req.push_back("solver.epsilon");
  if (kind == ExperimentKind::DeltaScaling) {
    req.push_back("study.delta_floor");
    req.push_back("study.delta_values");
  } else {
    req.push_back("solver.delta");
  }
  if (kind == ExperimentKind::RateTable) {
    req.push_back("study.tau_ref");
    req.push_back("study.tau_values");
  } else {
    req.push_back("solver.tau");
  }
  return req;
}

std::string list_of(const std::vector<std::string>& keys) {
  std::string s;
  for (std::size_t i = 0; i < keys.size(); ++i) s += (i ? ", " : "") + keys[i];
  return s;
}

}  // namespace

ConfigError::ConfigError(std::size_t line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Trajectory: return "trajectory";
    case ExperimentKind::Ensemble: return "ensemble";
    case ExperimentKind::RateTable: return "rate-table";
    case ExperimentKind::DeltaScaling: return "delta-scaling";
    case ExperimentKind::Threshold: return "threshold";
    case ExperimentKind::Energy: return "energy";
    case ExperimentKind::Stability: return "stability";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (auto k : {ExperimentKind::Trajectory, ExperimentKind::Ensemble, ExperimentKind::RateTable,
                 ExperimentKind::DeltaScaling, ExperimentKind::Threshold, ExperimentKind::Energy,
                 ExperimentKind::Stability})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown experiment kind '" + name +
                              "' (expected trajectory, ensemble, rate-table, delta-scaling, threshold, energy "
                              "or stability)");
}

void ExperimentSpec::validate() const {
  solver.validate();
  profile.validate();
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (output.empty()) throw std::invalid_argument("output directory must not be empty");
  switch (kind) {
    case ExperimentKind::RateTable: {
      if (solver.noise.is_field()) throw std::invalid_argument("rate-table requires scalar noise");
      if (tau_values.empty()) throw std::invalid_argument("rate-table needs at least one tau value");
      for (double tau : tau_values) {
        const double ratio = tau / solver.tau;
        if (!(ratio >= 1.0) || std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
          throw std::invalid_argument("tau = " + format_real(tau) + " is not an integer multiple of tau_ref");
        SolverConfig c = solver;
        c.tau = tau;
        c.validate();
      }
      break;
    }
    case ExperimentKind::DeltaScaling:
      if (delta_values.empty()) throw std::invalid_argument("delta-scaling needs at least one delta value");
      for (double d : delta_values)
        if (!(d >= solver.delta)) throw std::invalid_argument("every delta value must be >= delta_floor");
      break;
    case ExperimentKind::Threshold:
      if (epsilon_values.empty()) throw std::invalid_argument("threshold needs at least one epsilon value");
      for (double e : epsilon_values) {
        SolverConfig c = solver;
        c.epsilon = e;
        c.validate();
      }
      break;
    default:
      break;
  }
}

ExperimentSpec parse_config(const std::string& text) {
  const Document doc(text);
  if (!doc.has("experiment.kind"))
    throw ConfigError(0, "missing required fields: " + list_of(kBaseRequired) +
                             " (rate-table takes study.tau_ref and study.tau_values instead of solver.tau, "
                             "delta-scaling takes study.delta_floor and study.delta_values instead of "
                             "solver.delta, threshold takes study.epsilon_values instead of solver.epsilon, "
                             "trajectory has no experiment.samples)");

  ExperimentSpec spec;
  try {
    spec.kind = parse_experiment_kind(doc.at("experiment.kind").value);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(doc.at("experiment.kind").line, e.what());
  }
  const auto kind = spec.kind;
  const std::string kind_name = "is not used by kind " + to_string(kind);

  std::vector<std::string> missing;
  for (const auto& k : required_keys(kind))
    if (!doc.has(k)) missing.push_back(k);
  if (!missing.empty()) throw ConfigError(0, "missing required fields: " + list_of(missing));

  if (kind != ExperimentKind::RateTable) {
    doc.forbid("study.tau_ref", kind_name);
    doc.forbid("study.tau_values", kind_name);
  } else {
    doc.forbid("solver.tau", "is replaced by study.tau_ref for rate-table");
  }
  if (kind != ExperimentKind::DeltaScaling) {
    doc.forbid("study.delta_floor", kind_name);
    doc.forbid("study.delta_values", kind_name);
  } else {
    doc.forbid("solver.delta", "is replaced by study.delta_floor for delta-scaling");
  }
  if (kind != ExperimentKind::Threshold)
    doc.forbid("study.epsilon_values", kind_name);
  else
    doc.forbid("solver.epsilon", "is replaced by study.epsilon_values for threshold");
  if (kind == ExperimentKind::Trajectory) doc.forbid("experiment.samples", kind_name);

  spec.samples = doc.integer<std::size_t>("experiment.samples", 1);
  if (doc.has("experiment.output")) spec.output = doc.at("experiment.output").value;

  auto& s = spec.solver;
  s.seed = doc.integer<std::uint64_t>("experiment.seed", 0);
  s.epsilon = doc.real("solver.epsilon", 0.0);
  s.delta = kind == ExperimentKind::DeltaScaling ? doc.real("study.delta_floor", 0.0) : doc.real("solver.delta", 0.0);
  s.tau = kind == ExperimentKind::RateTable ? doc.real("study.tau_ref", 0.0) : doc.real("solver.tau", 0.0);
  s.final_time = doc.real("solver.final_time", 0.0);
  s.num_intervals = doc.integer<std::size_t>("solver.num_intervals", s.num_intervals);
  s.degree = doc.integer<int>("solver.degree", s.degree);
  s.newton_tol = doc.real("solver.newton_tol", s.newton_tol);
  s.newton_max_iter = doc.integer<int>("solver.newton_max_iter", s.newton_max_iter);
  s.blowup_threshold = doc.real("solver.blowup_threshold", s.blowup_threshold);
  s.snapshot_stride = doc.integer<std::size_t>("solver.snapshot_stride", s.snapshot_stride);

  NoiseModel::Kind noise_kind = NoiseModel::Kind::Scalar;
  if (doc.has("noise.kind")) {
    try {
      noise_kind = parse_noise_kind(doc.at("noise.kind").value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(doc.at("noise.kind").line, e.what());
    }
  }
  switch (noise_kind) {
    case NoiseModel::Kind::Scalar:
      doc.forbid("noise.num_modes", "is not used by scalar noise");
      doc.forbid("noise.decay", "is not used by scalar noise");
      doc.forbid("noise.amplitudes", "is not used by scalar noise");
      s.noise = NoiseModel::scalar();
      break;
    case NoiseModel::Kind::White:
      doc.forbid("noise.decay", "is not used by white noise");
      doc.forbid("noise.amplitudes", "is not used by white noise");
      s.noise = NoiseModel::white(doc.integer<std::size_t>("noise.num_modes", 0));
      break;
    case NoiseModel::Kind::QWiener:
      if (doc.has("noise.amplitudes")) {
        doc.forbid("noise.decay", "cannot be combined with noise.amplitudes");
        auto amps = doc.list("noise.amplitudes");
        if (doc.has("noise.num_modes") && doc.integer<std::size_t>("noise.num_modes", 0) != amps.size())
          throw ConfigError(doc.at("noise.num_modes").line, "noise.num_modes does not match the amplitude count");
        s.noise = NoiseModel::q_wiener(std::move(amps));
      } else {
        std::vector<std::string> miss;
        for (const char* k : {"noise.num_modes", "noise.decay"})
          if (!doc.has(k)) miss.push_back(k);
        if (!miss.empty())
          throw ConfigError(0, "qwiener noise needs noise.amplitudes or both of: " + list_of(miss));
        s.noise = NoiseModel::power_law(doc.integer<std::size_t>("noise.num_modes", 0), doc.real("noise.decay", 0.0));
      }
      break;
  }

  if (doc.has("profile.kind")) {
    try {
      spec.profile.kind = parse_profile_kind(doc.at("profile.kind").value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(doc.at("profile.kind").line, e.what());
    }
  }
  if (spec.profile.kind == InitialProfile::Kind::FracPower)
    spec.profile.kappa = doc.real("profile.kappa", spec.profile.kappa);
  else
    doc.forbid("profile.kappa", "is only used by the fracpower profile");

  spec.tau_values = doc.list("study.tau_values");
  spec.delta_values = doc.list("study.delta_values");
  spec.epsilon_values = doc.list("study.epsilon_values");

  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, std::string("invalid configuration: ") + e.what());
  }
  return spec;
}

std::string serialize(const ExperimentSpec& spec) {
  const auto& s = spec.solver;
  const auto kind = spec.kind;
  std::ostringstream out;
  out << "[experiment]\n";
  out << "kind = " << to_string(kind) << '\n';
  if (kind != ExperimentKind::Trajectory) out << "samples = " << spec.samples << '\n';
  out << "seed = " << s.seed << '\n';
  out << "output = " << spec.output << '\n';

  out << "\n[solver]\n";
  if (kind != ExperimentKind::Threshold) out << "epsilon = " << format_real(s.epsilon) << '\n';
  if (kind != ExperimentKind::DeltaScaling) out << "delta = " << format_real(s.delta) << '\n';
  if (kind != ExperimentKind::RateTable) out << "tau = " << format_real(s.tau) << '\n';
  out << "final_time = " << format_real(s.final_time) << '\n';
  out << "num_intervals = " << s.num_intervals << '\n';
  out << "degree = " << s.degree << '\n';
  out << "newton_tol = " << format_real(s.newton_tol) << '\n';
  out << "newton_max_iter = " << s.newton_max_iter << '\n';
  out << "blowup_threshold = " << format_real(s.blowup_threshold) << '\n';
  out << "snapshot_stride = " << s.snapshot_stride << '\n';

  out << "\n[noise]\n";
  out << "kind = " << to_string(s.noise.kind) << '\n';
  if (s.noise.kind == NoiseModel::Kind::White) {
    out << "num_modes = " << s.noise.num_modes << '\n';
  } else if (s.noise.kind == NoiseModel::Kind::QWiener) {
    if (s.noise.decay != 0.0)
      out << "num_modes = " << s.noise.num_modes << "\ndecay = " << format_real(s.noise.decay) << '\n';
    else
      out << "amplitudes = " << join(s.noise.amplitudes) << '\n';
  }

  out << "\n[profile]\n";
  out << "kind = " << to_string(spec.profile.kind) << '\n';
  if (spec.profile.kind == InitialProfile::Kind::FracPower) out << "kappa = " << format_real(spec.profile.kappa) << '\n';

  if (kind == ExperimentKind::RateTable)
    out << "\n[study]\ntau_ref = " << format_real(s.tau) << "\ntau_values = " << join(spec.tau_values) << '\n';
  if (kind == ExperimentKind::DeltaScaling)
    out << "\n[study]\ndelta_floor = " << format_real(s.delta) << "\ndelta_values = " << join(spec.delta_values)
        << '\n';
  if (kind == ExperimentKind::Threshold) out << "\n[study]\nepsilon_values = " << join(spec.epsilon_values) << '\n';
  return out.str();
}

namespace {

constexpr const char* kSeed = "20240601";

std::string threshold_preset(const std::string& name, const std::string& noise, const std::string& epsilons) {
  return std::string("[experiment]\nkind = threshold\nsamples = 100\nseed = ") + kSeed +
         "\noutput = out/" + name + "\n\n"
         "[solver]\ndelta = 1e-5\ntau = 0.01\nfinal_time = 0.5\nnum_intervals = 50\n\n"
         "[noise]\n" + noise +
         "\n[profile]\nkind = fracpower\nkappa = 0.1\n\n"
         "[study]\nepsilon_values = " + epsilons + "\n";
}

std::string dynamics_preset(const std::string& name, const std::string& profile, const std::string& epsilon) {
  return std::string("[experiment]\nkind = trajectory\nseed = ") + kSeed + "\noutput = out/" + name +
         "\n\n[solver]\nepsilon = " + epsilon +
         "\ndelta = 1e-5\ntau = 1e-5\nfinal_time = 0.1\nnum_intervals = 50\n\n"
         "[profile]\nkind = " + profile + "\n";
}

std::map<std::string, std::string> build_presets() {
  std::map<std::string, std::string> p;
  p["table1"] = std::string("[experiment]\nkind = rate-table\nsamples = 500\nseed = ") + kSeed +
                "\noutput = out/table1\n\n"
                "[solver]\nepsilon = 1\ndelta = 1e-5\nfinal_time = 0.1\nnum_intervals = 50\n\n"
                "[profile]\nkind = sine\n\n"
                "[study]\ntau_ref = 1e-5\ntau_values = 0.0005, 0.001, 0.002, 0.004\n";
  p["stability"] = std::string("[experiment]\nkind = stability\nsamples = 200\nseed = ") + kSeed +
                   "\noutput = out/stability\n\n"
                   "[solver]\nepsilon = 1\ndelta = 1e-5\ntau = 1e-3\nfinal_time = 0.1\nnum_intervals = 50\n\n"
                   "[profile]\nkind = sine\n";
  p["energy"] = std::string("[experiment]\nkind = energy\nsamples = 500\nseed = ") + kSeed +
                "\noutput = out/energy\n\n"
                "[solver]\nepsilon = 1\ndelta = 1e-5\ntau = 1e-3\nfinal_time = 0.1\nnum_intervals = 50\n\n"
                "[profile]\nkind = sine\n";
  p["delta-scaling"] = std::string("[experiment]\nkind = delta-scaling\nsamples = 200\nseed = ") + kSeed +
                       "\noutput = out/delta-scaling\n\n"
                       "[solver]\nepsilon = 1\ntau = 1e-3\nfinal_time = 0.1\nnum_intervals = 50\n\n"
                       "[profile]\nkind = sine\n\n"
                       "[study]\ndelta_floor = 1e-5\ndelta_values = 0.01, 0.005, 0.0025\n";
  p["threshold-colored"] = threshold_preset("threshold-colored", "kind = qwiener\nnum_modes = 20\ndecay = 0.6\n", "0.1, 0.5, sqrt(2)");
  p["threshold-colored-j50"] = threshold_preset("threshold-colored-j50", "kind = qwiener\nnum_modes = 50\ndecay = 1\n", "0.1, 0.5");
  p["threshold-white"] = threshold_preset("threshold-white", "kind = white\n", "0.1, 0.5, sqrt(2)");
  for (const char* profile : {"sine", "zigzag"})
    for (const auto& [suffix, eps] : std::vector<std::pair<std::string, std::string>>{
             {"0.1", "0.1"}, {"1", "1"}, {"sqrt2", "sqrt(2)"}, {"5", "5"}})
    {
      const std::string name = std::string("dynamics-") + profile + "-" + suffix;
      p[name] = dynamics_preset(name, profile, eps);
    }
  return p;
}

const std::map<std::string, std::string>& presets() {
  static const auto p = build_presets();
  return p;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : presets()) names.push_back(name);
  return names;
}

std::string preset_text(const std::string& name) {
  const auto it = presets().find(name);
  if (it == presets().end()) throw ConfigError(0, "unknown preset '" + name + "' (known: " + list_of(preset_names()) + ")");
  return it->second;
}

}  // namespace smcf
