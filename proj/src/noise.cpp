#include "smcf/noise.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "smcf/format.hpp"

namespace smcf {

double standard_normal(const StreamKey& stream, std::uint64_t step, std::uint32_t mode) {
  if (step > 0xFFFFFFFFull) throw std::out_of_range("standard_normal: step index exceeds 2^32");
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(step), mode,
                                static_cast<std::uint32_t>(stream.sample_index),
                                static_cast<std::uint32_t>(stream.sample_index >> 32)};
  const Philox4x32::Key key{static_cast<std::uint32_t>(stream.master_seed),
                            static_cast<std::uint32_t>(stream.master_seed >> 32)};
  const auto r = Philox4x32::generate(ctr, key);
  const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
  const std::uint64_t b = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
  constexpr double kScale = 0x1.0p-53;
  const double u1 = (static_cast<double>(a >> 11) + 1.0) * kScale;  // (0, 1]
  const double u2 = static_cast<double>(b >> 11) * kScale;          // [0, 1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

ScalarPath::ScalarPath(double tau, std::vector<double> cumulative, StreamKey key)
    : tau_(tau), cumulative_(std::move(cumulative)), key_(key) {
  if (!(tau > 0.0)) throw std::invalid_argument("ScalarPath: tau must be positive");
  if (cumulative_.empty() || cumulative_.front() != 0.0)
    throw std::invalid_argument("ScalarPath: cumulative values must start at W(0) = 0");
}

std::vector<double> ScalarPath::increments() const {
  std::vector<double> d(num_steps());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = increment(k);
  return d;
}

ScalarPath generate_scalar_path(const StreamKey& key, std::size_t num_fine_steps, double tau_fine) {
  if (num_fine_steps < 1) throw std::invalid_argument("generate_scalar_path: need at least one step");
  if (!(tau_fine > 0.0)) throw std::invalid_argument("generate_scalar_path: tau must be positive");
  const double scale = std::sqrt(tau_fine);
  std::vector<double> w(num_fine_steps + 1);
  w[0] = 0.0;
  for (std::size_t n = 0; n < num_fine_steps; ++n) w[n + 1] = w[n] + scale * standard_normal(key, n, 0);
  return ScalarPath(tau_fine, std::move(w), key);
}

ScalarPath generate_scalar_path(std::uint64_t seed, std::size_t num_fine_steps, double tau_fine) {
  return generate_scalar_path(StreamKey{seed, 0}, num_fine_steps, tau_fine);
}

ScalarPath coarsen(const ScalarPath& path, std::size_t factor) {
  if (factor < 1 || path.num_steps() % factor != 0)
    throw std::invalid_argument("coarsen: factor " + std::to_string(factor) + " does not divide " +
                                std::to_string(path.num_steps()) + " steps");
  const std::size_t n = path.num_steps() / factor;
  std::vector<double> w(n + 1);
  for (std::size_t k = 0; k <= n; ++k) w[k] = path.cumulative(k * factor);
  return ScalarPath(path.tau() * static_cast<double>(factor), std::move(w), path.key());
}

void write_path_csv(std::ostream& out, const ScalarPath& path) {
  out << "# seed=" << path.key().master_seed << ",sample=" << path.key().sample_index
      << ",tau=" << format_real(path.tau()) << ",count=" << path.num_steps() << '\n';
  out << "step,increment,cumulative\n";
  for (std::size_t k = 0; k < path.num_steps(); ++k)
    out << k << ',' << format_real(path.increment(k)) << ',' << format_real(path.cumulative(k + 1))
        << '\n';
}

ScalarPath read_path_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header.rfind("# ", 0) != 0)
    throw std::runtime_error("read_path_csv: missing header line");
  StreamKey key;
  double tau = 0.0;
  std::size_t count = 0;
  std::istringstream fields(header.substr(2));
  std::string field;
  while (std::getline(fields, field, ',')) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw std::runtime_error("read_path_csv: bad header field " + field);
    const auto name = field.substr(0, eq);
    const auto value = field.substr(eq + 1);
    if (name == "seed") key.master_seed = std::stoull(value);
    else if (name == "sample") key.sample_index = std::stoull(value);
    else if (name == "tau") tau = std::stod(value);
    else if (name == "count") count = std::stoull(value);
    else throw std::runtime_error("read_path_csv: unknown header field " + name);
  }
  std::string line;
  std::getline(in, line);  // column names
  std::vector<double> w{0.0};
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto last = line.rfind(',');
    w.push_back(std::stod(line.substr(last + 1)));
  }
  if (w.size() != count + 1) throw std::runtime_error("read_path_csv: row count does not match header");
  return ScalarPath(tau, std::move(w), key);
}

NoiseModel NoiseModel::scalar() { return NoiseModel{}; }

NoiseModel NoiseModel::power_law(std::size_t num_modes, double decay) {
  NoiseModel m;
  m.kind = Kind::QWiener;
  m.num_modes = num_modes;
  m.decay = decay;
  m.amplitudes.resize(num_modes);
  for (std::size_t j = 1; j <= num_modes; ++j) m.amplitudes[j - 1] = std::pow(static_cast<double>(j), -decay);
  return m;
}

NoiseModel NoiseModel::q_wiener(std::vector<double> amplitudes) {
  NoiseModel m;
  m.kind = Kind::QWiener;
  m.num_modes = amplitudes.size();
  m.amplitudes = std::move(amplitudes);
  return m;
}

NoiseModel NoiseModel::white(std::size_t num_modes) {
  NoiseModel m;
  m.kind = Kind::White;
  m.num_modes = num_modes;
  m.amplitudes.assign(num_modes, 1.0);
  return m;
}

NoiseModel NoiseModel::resolved(std::size_t dof_count) const {
  if (kind == Kind::White && num_modes == 0) return white(dof_count);
  return *this;
}

void NoiseModel::validate() const {
  if (kind == Kind::Scalar) return;
  if (kind == Kind::White && num_modes == 0) return;  // resolved against the space later
  if (num_modes < 1) throw std::invalid_argument("NoiseModel: num_modes must be >= 1");
  if (amplitudes.size() != num_modes)
    throw std::invalid_argument("NoiseModel: amplitude count does not match num_modes");
  for (double a : amplitudes)
    if (!(a >= 0.0) || !std::isfinite(a))
      throw std::invalid_argument("NoiseModel: amplitudes must be finite and nonnegative");
}

std::string to_string(NoiseModel::Kind kind) {
  switch (kind) {
    case NoiseModel::Kind::Scalar: return "scalar";
    case NoiseModel::Kind::QWiener: return "qwiener";
    case NoiseModel::Kind::White: return "white";
  }
  return "unknown";
}

NoiseModel::Kind parse_noise_kind(const std::string& name) {
  if (name == "scalar") return NoiseModel::Kind::Scalar;
  if (name == "qwiener") return NoiseModel::Kind::QWiener;
  if (name == "white") return NoiseModel::Kind::White;
  throw std::invalid_argument("unknown noise model '" + name + "' (expected scalar, qwiener or white)");
}

double sin_pi(double t) {
  double r = std::fmod(t, 2.0);  // exact
  if (r > 1.0) r -= 2.0;
  else if (r < -1.0) r += 2.0;
  // r in [-1, 1]; fold so that integers land on 0.
  if (r > 0.5) r = 1.0 - r;
  else if (r < -0.5) r = -1.0 - r;
  return std::sin(std::numbers::pi * r);
}

double FieldIncrement::evaluate(double x) const {
  double v = 0.0;
  for (std::size_t j = 0; j < mode_increments.size(); ++j)
    v += amplitudes[j] * mode_increments[j] * sin_pi(static_cast<double>(j + 1) * x);
  return std::numbers::sqrt2 * v;
}

FieldIncrement generate_field_increment(const NoiseModel& model, const StreamKey& key,
                                        std::uint64_t step, double tau) {
  if (!model.is_field())
    throw std::invalid_argument("generate_field_increment: model must be qwiener or white");
  if (model.num_modes == 0)
    throw std::invalid_argument("generate_field_increment: white noise mode count not resolved");
  FieldIncrement inc;
  inc.amplitudes = model.amplitudes;
  inc.mode_increments.resize(model.num_modes);
  const double scale = std::sqrt(tau);
  for (std::size_t j = 0; j < model.num_modes; ++j)
    inc.mode_increments[j] = scale * standard_normal(key, step, static_cast<std::uint32_t>(j + 1));
  return inc;
}

}  // namespace smcf
