#include "maglev/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "maglev/constants.hpp"
#include "maglev/errors.hpp"
#include "maglev/trap.hpp"

namespace maglev {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

using UnitList = std::vector<std::pair<const char*, double>>;

struct Dimension {
  const char* name;
  UnitList units;
};

const Dimension kMass{"mass", {{"kg", 1.0}, {"g", 1e-3}, {"mg", 1e-6}, {"ug", 1e-9}, {"ng", 1e-12}}};
const Dimension kLength{"length",
                        {{"m", 1.0}, {"cm", 1e-2}, {"mm", 1e-3}, {"um", 1e-6},
                         {"nm", 1e-9}, {"pm", 1e-12}, {"fm", 1e-15}}};
const Dimension kTime{"time", {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"min", 60.0}}};
const Dimension kFrequency{"frequency", {{"Hz", 1.0}, {"mHz", 1e-3}, {"kHz", 1e3}}};
const Dimension kAngularRate{"angular rate",
                             {{"rad/s", 1.0},
                              {"Hz", constants::two_pi},
                              {"mHz", constants::two_pi * 1e-3},
                              {"kHz", constants::two_pi * 1e3}}};
const Dimension kTemperature{"temperature",
                             {{"K", 1.0}, {"mK", 1e-3}, {"uK", 1e-6}, {"nK", 1e-9}}};
const Dimension kAngle{"angle",
                       {{"rad", 1.0}, {"mrad", 1e-3}, {"urad", 1e-6}, {"nrad", 1e-9},
                        {"deg", constants::pi / 180.0}}};
const Dimension kDensity{"density",
                         {{"kg/m3", 1.0}, {"kg/m^3", 1.0}, {"g/cm3", 1e3},
                          {"g/cm^3", 1e3}}};
const Dimension kMagnetization{"magnetization", {{"A/m", 1.0}, {"kA/m", 1e3}}};
const Dimension kFluxDensity{"flux density", {{"T", 1.0}, {"mT", 1e-3}, {"uT", 1e-6}}};
const Dimension kAccel{"acceleration", {{"m/s^2", 1.0}, {"m/s2", 1.0}}};
const Dimension kVelocity{"velocity", {{"m/s", 1.0}, {"rad/s", 1.0}}};
const Dimension kPressure{"pressure",
                          {{"mbar", 1.0}, {"bar", 1e3}, {"Pa", 1e-2}, {"hPa", 1.0}}};
const Dimension kVoltage{"voltage", {{"V", 1.0}, {"mV", 1e-3}, {"uV", 1e-6}}};
const Dimension kDispAsd{"displacement ASD", {{"m/rtHz", 1.0}}};
const Dimension kAngleAsd{"angle ASD", {{"rad/rtHz", 1.0}, {"urad/rtHz", 1e-6}}};
const Dimension kDispPsd{"displacement PSD", {{"m^2/Hz", 1.0}, {"m2/Hz", 1.0}}};
const Dimension kAnglePsd{"angle PSD", {{"rad^2/Hz", 1.0}, {"rad2/Hz", 1.0}}};
const Dimension kAccelAsd{"acceleration ASD",
                          {{"m/s^2/rtHz", 1.0}, {"(m/s^2)/rtHz", 1.0}}};
const Dimension kAccelPsd{"acceleration PSD",
                          {{"(m/s^2)^2/Hz", 1.0}, {"(m/s2)^2/Hz", 1.0}}};
const Dimension kForceAsd{"force ASD", {{"N/rtHz", 1.0}}};
const Dimension kTorqueAsd{"torque ASD", {{"N*m/rtHz", 1.0}, {"Nm/rtHz", 1.0}}};
const Dimension kMoment{"magnetic moment", {{"A*m^2", 1.0}, {"A*m2", 1.0}}};
const Dimension kInertiaMoment{"moment of inertia", {{"kg*m^2", 1.0}, {"kg*m2", 1.0}}};
const Dimension kSquidAsd{"SQUID flux ASD",
                          {{"phi0/rtHz", 1.0}, {"uphi0/rtHz", 1e-6}}};

[[noreturn]] void fail(const std::string& ctx, const std::string& msg) {
  throw config_error(ctx + ": " + msg);
}

struct QuantityValue {
  double si = 0.0;
  std::string unit;  // suffix as written
};

std::string accepted_units(std::initializer_list<const Dimension*> dims) {
  std::string s;
  for (const Dimension* d : dims) {
    for (const auto& [u, f] : d->units) {
      if (!s.empty()) s += ", ";
      s += u;
    }
  }
  return s;
}

std::optional<QuantityValue> try_parse_quantity(
    const std::string& raw, std::initializer_list<const Dimension*> dims) {
  const std::string value = trim(raw);
  const char* begin = value.c_str();
  char* end = nullptr;
  const double num = std::strtod(begin, &end);
  if (end == begin) return std::nullopt;
  const std::string unit = trim(std::string(end));
  if (unit.empty()) return std::nullopt;
  for (const Dimension* d : dims) {
    for (const auto& [u, factor] : d->units) {
      if (unit == u) return QuantityValue{num * factor, unit};
    }
  }
  return std::nullopt;
}

/// Reader with section/key context baked into every error message.
class View {
 public:
  View(const RawConfig& raw, std::string section)
      : raw_(raw), section_(std::move(section)) {}

  bool has(const std::string& key) const { return raw_.has(section_, key); }

  std::string ctx(const std::string& key) const {
    return "[" + section_ + "] " + key;
  }

  std::string str(const std::string& key) const {
    const std::string* v = raw_.find(section_, key);
    if (!v) fail(ctx(key), "required key missing");
    return trim(*v);
  }

  std::string str_or(const std::string& key, const std::string& def) const {
    return has(key) ? str(key) : def;
  }

  double quantity(const std::string& key,
                  std::initializer_list<const Dimension*> dims) const {
    return quantity_with_unit(key, dims).si;
  }

  QuantityValue quantity_with_unit(
      const std::string& key, std::initializer_list<const Dimension*> dims) const {
    const std::string value = str(key);
    const auto q = try_parse_quantity(value, dims);
    if (!q) {
      fail(ctx(key), "'" + value + "' needs a value with a unit suffix (accepted: " +
                         accepted_units(dims) + ")");
    }
    return *q;
  }

  double quantity_or(const std::string& key,
                     std::initializer_list<const Dimension*> dims,
                     double def) const {
    return has(key) ? quantity(key, dims) : def;
  }

  double number(const std::string& key) const {
    const std::string value = str(key);
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || !trim(std::string(end)).empty()) {
      fail(ctx(key), "'" + value + "' must be a plain (dimensionless) number");
    }
    return v;
  }

  double number_or(const std::string& key, double def) const {
    return has(key) ? number(key) : def;
  }

  long long integer(const std::string& key) const {
    const double v = number(key);
    if (v != std::floor(v)) fail(ctx(key), "must be an integer");
    return static_cast<long long>(v);
  }

  long long integer_or(const std::string& key, long long def) const {
    return has(key) ? integer(key) : def;
  }

  bool flag(const std::string& key, bool def) const {
    if (!has(key)) return def;
    const std::string v = str(key);
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    fail(ctx(key), "'" + v + "' is not a boolean (use on/off)");
  }

  void allow_only(std::initializer_list<const char*> keys) const {
    const auto it = raw_.sections.find(section_);
    if (it == raw_.sections.end()) return;
    for (const auto& [key, value] : it->second) {
      if (std::find_if(keys.begin(), keys.end(), [&](const char* k) {
            return key == k;
          }) == keys.end()) {
        fail(ctx(key), "unknown key");
      }
    }
  }

 private:
  const RawConfig& raw_;
  std::string section_;
};

}  // namespace

bool RawConfig::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

const std::string* RawConfig::find(const std::string& section,
                                   const std::string& key) const {
  const auto s = sections.find(section);
  if (s == sections.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

void RawConfig::set(const std::string& section, const std::string& key,
                    const std::string& value) {
  if (sections.find(section) == sections.end()) section_order.push_back(section);
  auto& sec = sections[section];
  if (sec.find(key) == sec.end()) key_order[section].push_back(key);
  sec[key] = value;
}

RawConfig parse_config_text(const std::string& text, const std::string& origin) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where =
        (origin.empty() ? "config" : origin) + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw config_error(where + ": unterminated [section]");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw config_error(where + ": empty section name");
      if (raw.sections.find(section) == raw.sections.end()) {
        raw.sections[section];
        raw.section_order.push_back(section);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw config_error(where + ": expected 'key = value'");
    }
    if (section.empty()) {
      throw config_error(where + ": key outside any [section]");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw config_error(where + ": empty key");
    if (raw.sections[section].count(key)) {
      throw config_error(where + ": duplicate key '" + key + "'");
    }
    raw.sections[section][key] = value;
    raw.key_order[section].push_back(key);
  }
  return raw;
}

RawConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

namespace {

MagnetSpec resolve_magnet(const RawConfig& raw) {
  View v(raw, "magnet");
  v.allow_only({"mass", "radius", "thickness", "density", "magnetization",
                "residual_flux_density"});
  MagnetSpec spec;
  spec.mass = v.quantity("mass", {&kMass});
  spec.radius = v.quantity("radius", {&kLength});
  spec.thickness = v.quantity("thickness", {&kLength});
  spec.density = v.quantity_or("density", {&kDensity}, 0.0);
  if (v.has("magnetization")) {
    spec.magnetization = v.quantity("magnetization", {&kMagnetization});
  }
  if (v.has("residual_flux_density")) {
    spec.residual_flux_density = v.quantity("residual_flux_density", {&kFluxDensity});
  }
  const MagnetValidation mv = validate(spec);
  if (!mv.ok()) {
    std::string msg = "invalid [magnet]:";
    for (const auto& e : mv.errors) msg += " " + e + ";";
    throw config_error(msg);
  }
  return spec;
}

ModeKind default_kind(const std::string& label) {
  return (label == "alpha" || label == "beta") ? ModeKind::librational
                                               : ModeKind::translational;
}

ModeSpec resolve_mode(const RawConfig& raw, const std::string& section,
                      const std::string& label,
                      const std::optional<MagnetSpec>& magnet) {
  View v(raw, section);
  v.allow_only({"kind", "frequency", "omega0", "quality_factor",
                "bath_temperature", "inertia"});
  ModeSpec mode;
  mode.label = mode_label_from_string(label);
  const std::string kind = v.str_or("kind", "");
  mode.kind = kind.empty() ? default_kind(label)
              : kind == "translational"
                  ? ModeKind::translational
                  : (kind == "librational"
                         ? ModeKind::librational
                         : throw config_error("[" + section + "] kind: '" + kind +
                                              "' must be translational or "
                                              "librational"));
  if (v.has("omega0") == v.has("frequency")) {
    fail("[" + section + "]", "exactly one of frequency / omega0 is required");
  }
  mode.omega0 = v.has("omega0") ? v.quantity("omega0", {&kAngularRate})
                                : v.quantity("frequency", {&kAngularRate});
  mode.quality_factor = v.number("quality_factor");
  mode.bath_temperature = v.quantity_or("bath_temperature", {&kTemperature}, 0.0);
  if (v.has("inertia")) {
    mode.inertia = mode.kind == ModeKind::translational
                       ? v.quantity("inertia", {&kMass})
                       : v.quantity("inertia", {&kInertiaMoment});
  } else if (magnet) {
    mode.inertia = mode.kind == ModeKind::translational
                       ? magnet->mass
                       : moment_of_inertia(*magnet);
  } else {
    fail("[" + section + "]", "inertia required (no [magnet] block to derive it)");
  }
  try {
    require_valid(mode);
  } catch (const std::invalid_argument& e) {
    fail("[" + section + "]", e.what());
  }
  return mode;
}

TableModeFixture resolve_table_mode(const RawConfig& raw, const std::string& section,
                                    const std::string& label,
                                    const MagnetSpec& magnet) {
  View v(raw, section);
  v.allow_only({"frequency", "quality_factor", "reference_temperature",
                "equilibrium_temperature", "feedback_temperature",
                "future_bath_temperature", "detector_noise_asd",
                "future_detector_noise_asd", "squid_floor_asd"});
  TableModeFixture mf;
  mf.mode.label = mode_label_from_string(label);
  mf.mode.kind = default_kind(label);
  mf.mode.omega0 = v.quantity("frequency", {&kAngularRate});
  mf.mode.quality_factor = v.number("quality_factor");
  mf.mode.inertia = mf.mode.kind == ModeKind::translational
                        ? magnet.mass
                        : moment_of_inertia(magnet);
  mf.reference_temperature = v.quantity_or("reference_temperature", {&kTemperature}, 0.0);
  mf.equilibrium_temperature =
      v.quantity_or("equilibrium_temperature", {&kTemperature}, 0.0);
  mf.feedback_temperature = v.quantity_or("feedback_temperature", {&kTemperature}, 0.0);
  mf.future_bath_temperature =
      v.quantity_or("future_bath_temperature", {&kTemperature}, 0.0);
  mf.mode.bath_temperature = mf.equilibrium_temperature;
  if (mf.mode.kind == ModeKind::translational) {
    mf.detector_asd = v.quantity_or("detector_noise_asd", {&kDispAsd}, 0.0);
    mf.future_detector_asd =
        v.quantity_or("future_detector_noise_asd", {&kDispAsd}, 0.0);
  } else {
    mf.detector_asd = v.quantity_or("detector_noise_asd", {&kAngleAsd}, 0.0);
    mf.future_detector_asd =
        v.quantity_or("future_detector_noise_asd", {&kAngleAsd}, 0.0);
  }
  if (v.has("squid_floor_asd")) {
    mf.squid_floor_asd = v.quantity("squid_floor_asd", {&kSquidAsd});
  }
  return mf;
}

const Dimension* paper_dimension(const std::string& row) {
  if (row == "inertia") return &kInertiaMoment;
  if (row == "dipole_moment") return &kMoment;
  if (row.find("force_noise") != std::string::npos) {
    return row.rfind("beta", 0) == 0 ? &kTorqueAsd : &kForceAsd;
  }
  if (row.find("min_temperature") != std::string::npos) return &kTemperature;
  if (row.find("min_phonons") != std::string::npos) return nullptr;  // bare number
  if (row.find("amplitude") != std::string::npos) {
    return row.rfind("beta", 0) == 0 ? &kAngle : &kLength;
  }
  return nullptr;
}

const std::vector<std::string>& paper_rows() {
  static const std::vector<std::string> rows = {
      "inertia",
      "dipole_moment",
      "z_force_noise_equilibrium",
      "z_force_noise_future",
      "z_min_temperature_current",
      "z_min_temperature_future",
      "z_min_phonons_future",
      "z_amplitude_equilibrium",
      "z_amplitude_reference",
      "z_amplitude_feedback",
      "z_min_amplitude_current",
      "z_min_amplitude_future",
      "beta_force_noise_equilibrium",
      "beta_force_noise_future",
      "beta_min_temperature_current",
      "beta_min_temperature_future",
      "beta_min_phonons_future",
      "beta_amplitude_equilibrium",
      "beta_amplitude_reference",
      "beta_amplitude_feedback",
      "beta_min_amplitude_current",
      "beta_min_amplitude_future",
  };
  return rows;
}

std::map<std::string, double> resolve_paper(const RawConfig& raw) {
  std::map<std::string, double> out;
  const auto it = raw.sections.find("paper");
  if (it == raw.sections.end()) return out;
  for (const auto& [key, value] : it->second) {
    const auto& rows = paper_rows();
    if (std::find(rows.begin(), rows.end(), key) == rows.end()) {
      fail("[paper] " + key, "unknown parameter-table row");
    }
    const Dimension* dim = paper_dimension(key);
    if (dim == nullptr) {
      View v(raw, "paper");
      out[key] = v.number(key);
    } else {
      const auto q = try_parse_quantity(value, {dim});
      if (!q) {
        fail("[paper] " + key, "'" + value + "' needs a unit (accepted: " +
                                   accepted_units({dim}) + ")");
      }
      out[key] = q->si;
    }
  }
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

ExperimentConfig resolve_experiment_config(const RawConfig& raw) {
  ExperimentConfig cfg;

  if (raw.sections.count("magnet")) {
    cfg.magnet = resolve_magnet(raw);
    cfg.magnet_warnings = validate(*cfg.magnet).warnings;
  }

  if (raw.sections.count("environment")) {
    View v(raw, "environment");
    v.allow_only({"gravity"});
    cfg.gravity = v.quantity_or("gravity", {&kAccel}, constants::standard_gravity);
  }

  for (const auto& section : raw.section_order) {
    if (section.rfind("mode.", 0) == 0) {
      const std::string label = section.substr(5);
      cfg.modes[label] = resolve_mode(raw, section, label, cfg.magnet);
    }
  }

  if (raw.sections.count("noise")) {
    View v(raw, "noise");
    v.allow_only({"thermal", "vibration_accel_asd", "vibration_accel_psd",
                  "detector_noise_asd", "detector_noise_psd", "seed"});
    cfg.noise.thermal = v.flag("thermal", true);
    if (v.has("vibration_accel_asd") && v.has("vibration_accel_psd")) {
      fail("[noise]", "give vibration noise as ASD or PSD, not both");
    }
    if (v.has("vibration_accel_asd")) {
      const double asd = v.quantity("vibration_accel_asd", {&kAccelAsd});
      cfg.noise.vibration_accel_psd = asd * asd;
    } else {
      cfg.noise.vibration_accel_psd =
          v.quantity_or("vibration_accel_psd", {&kAccelPsd}, 0.0);
    }
    if (v.has("detector_noise_asd") && v.has("detector_noise_psd")) {
      fail("[noise]", "give detector noise as ASD or PSD, not both");
    }
    if (v.has("detector_noise_asd")) {
      const auto q = v.quantity_with_unit("detector_noise_asd",
                                          {&kDispAsd, &kAngleAsd});
      cfg.noise.detector_noise_psd = q.si * q.si;
      cfg.detector_noise_unit = q.unit.find("rad") != std::string::npos ? "rad" : "m";
    } else if (v.has("detector_noise_psd")) {
      const auto q = v.quantity_with_unit("detector_noise_psd",
                                          {&kDispPsd, &kAnglePsd});
      cfg.noise.detector_noise_psd = q.si;
      cfg.detector_noise_unit = q.unit.find("rad") != std::string::npos ? "rad" : "m";
    }
    cfg.noise.seed = static_cast<uint64_t>(v.integer_or("seed", 1));
  }

  if (raw.sections.count("feedback")) {
    View v(raw, "feedback");
    v.allow_only({"mode", "gain", "phase_offset", "bandpass_center",
                  "bandpass_width", "loop_delay"});
    const std::string mode = v.str_or("mode", "off");
    if (mode == "off") {
      cfg.feedback.mode = FeedbackMode::off;
    } else if (mode == "ideal_velocity") {
      cfg.feedback.mode = FeedbackMode::ideal_velocity;
    } else if (mode == "filtered_displacement") {
      cfg.feedback.mode = FeedbackMode::filtered_displacement;
    } else {
      fail("[feedback] mode", "'" + mode +
                                  "' must be off, ideal_velocity or "
                                  "filtered_displacement");
    }
    cfg.feedback.gain = v.number_or("gain", 0.0);
    if (cfg.feedback.gain < 0.0) fail("[feedback] gain", "must be >= 0");
    cfg.feedback.phase_offset = v.quantity_or("phase_offset", {&kAngle}, 0.0);
    cfg.feedback.bandpass_center =
        v.quantity_or("bandpass_center", {&kAngularRate}, 0.0);
    cfg.feedback.bandpass_width =
        v.quantity_or("bandpass_width", {&kAngularRate}, 0.0);
    if (cfg.feedback.mode == FeedbackMode::filtered_displacement &&
        !(cfg.feedback.bandpass_width > 0.0)) {
      fail("[feedback] bandpass_width", "must be > 0 in filtered mode");
    }
    cfg.feedback.loop_delay = v.quantity_or("loop_delay", {&kTime}, 0.0);
  }

  if (raw.sections.count("simulate")) {
    View v(raw, "simulate");
    v.allow_only({"mode", "timestep", "duration", "channels", "format", "x0", "v0"});
    cfg.simulate.mode_label = v.str_or("mode", "z");
    cfg.simulate.timestep = v.quantity_or("timestep", {&kTime}, 0.0);
    cfg.simulate.duration = v.quantity("duration", {&kTime});
    if (v.has("channels")) {
      cfg.simulate.record_true = cfg.simulate.record_measured =
          cfg.simulate.record_feedback = false;
      for (const auto& ch : split_list(v.str("channels"))) {
        if (ch == kTruePosition) {
          cfg.simulate.record_true = true;
        } else if (ch == kMeasuredPosition) {
          cfg.simulate.record_measured = true;
        } else if (ch == kFeedbackForce) {
          cfg.simulate.record_feedback = true;
        } else {
          fail("[simulate] channels", "unknown channel '" + ch + "'");
        }
      }
    }
    cfg.simulate.format = v.str_or("format", "csv");
    if (cfg.simulate.format != "csv" && cfg.simulate.format != "bin" &&
        cfg.simulate.format != "both") {
      fail("[simulate] format", "must be csv, bin or both");
    }
    if (v.has("x0")) cfg.simulate.x0 = v.quantity("x0", {&kLength, &kAngle});
    if (v.has("v0")) cfg.simulate.v0 = v.quantity("v0", {&kVelocity});
  }

  if (raw.sections.count("analyze")) {
    View v(raw, "analyze");
    v.allow_only({"mode", "channel", "segment_length", "rbw", "overlap",
                  "band_center", "band_halfwidth_linewidths",
                  "reference_temperature", "reference_rms", "emit_psd",
                  "emit_plot"});
    cfg.analyze.mode_label = v.str_or("mode", "z");
    cfg.analyze.channel = v.str_or("channel", "measured_position");
    cfg.analyze.segment_length =
        static_cast<size_t>(v.integer_or("segment_length", 0));
    cfg.analyze.target_rbw = v.quantity_or("rbw", {&kFrequency}, 0.0);
    cfg.analyze.overlap = v.number_or("overlap", 0.5);
    cfg.analyze.band_center = v.quantity_or("band_center", {&kFrequency}, 0.0);
    cfg.analyze.band_halfwidth_linewidths =
        v.number_or("band_halfwidth_linewidths", 5.0);
    if (v.has("reference_temperature")) {
      cfg.analyze.reference_temperature =
          v.quantity("reference_temperature", {&kTemperature});
    }
    if (v.has("reference_rms")) {
      cfg.analyze.reference_rms =
          v.quantity("reference_rms", {&kLength, &kAngle, &kVoltage});
    }
    cfg.analyze.emit_psd = v.flag("emit_psd", true);
    cfg.analyze.emit_plot = v.flag("emit_plot", false);
  }

  if (raw.sections.count("coil")) {
    View v(raw, "coil");
    v.allow_only({"turns", "loop_radius", "lateral_offset", "separation",
                  "orientation"});
    CoilGeometry coil;
    coil.turns = static_cast<int>(v.integer("turns"));
    coil.loop_radius = v.quantity("loop_radius", {&kLength});
    coil.lateral_offset = v.quantity("lateral_offset", {&kLength});
    coil.separation = v.quantity("separation", {&kLength});
    const std::string orient = v.str_or("orientation", "perpendicular");
    if (orient == "perpendicular") {
      coil.orientation = CoilOrientation::perpendicular;
    } else if (orient == "parallel") {
      coil.orientation = CoilOrientation::parallel;
    } else {
      fail("[coil] orientation", "must be perpendicular or parallel");
    }
    require_valid(coil);
    cfg.coil = coil;
  }

  if (raw.sections.count("coil.bounds")) {
    View v(raw, "coil.bounds");
    v.allow_only({"x_min", "x_max", "z_min", "z_max", "orientations"});
    CoilBounds bounds;
    bounds.x_min = v.quantity("x_min", {&kLength});
    bounds.x_max = v.quantity("x_max", {&kLength});
    bounds.z_min = v.quantity("z_min", {&kLength});
    bounds.z_max = v.quantity("z_max", {&kLength});
    if (v.has("orientations")) {
      bounds.orientations.clear();
      for (const auto& o : split_list(v.str("orientations"))) {
        if (o == "perpendicular") {
          bounds.orientations.push_back(CoilOrientation::perpendicular);
        } else if (o == "parallel") {
          bounds.orientations.push_back(CoilOrientation::parallel);
        } else {
          fail("[coil.bounds] orientations", "unknown orientation '" + o + "'");
        }
      }
    }
    cfg.coil_optimize.bounds = bounds;
  }

  if (raw.sections.count("coil.optimize")) {
    View v(raw, "coil.optimize");
    v.allow_only({"grid", "emit_map"});
    cfg.coil_optimize.grid = static_cast<int>(v.integer_or("grid", 64));
    cfg.coil_optimize.emit_map = v.flag("emit_map", false);
  }

  const bool has_table_z = raw.sections.count("table.z") > 0;
  const bool has_table_beta = raw.sections.count("table.beta") > 0;
  if (has_table_z != has_table_beta) {
    throw config_error("parameter-table fixtures need both [table.z] and "
                       "[table.beta]");
  }
  if (has_table_z) {
    if (!cfg.magnet) {
      throw config_error("[table.*] sections require a [magnet] block");
    }
    TableFixture fixture;
    fixture.magnet = *cfg.magnet;
    fixture.z = resolve_table_mode(raw, "table.z", "z", *cfg.magnet);
    fixture.beta = resolve_table_mode(raw, "table.beta", "beta", *cfg.magnet);
    if (raw.sections.count("table")) {
      View v(raw, "table");
      v.allow_only({"flux_transfer_ratio"});
      if (v.has("flux_transfer_ratio")) {
        fixture.flux_transfer_ratio = v.number("flux_transfer_ratio");
      }
    }
    fixture.paper = resolve_paper(raw);
    cfg.table = fixture;
  }

  if (raw.sections.count("pressure")) {
    View v(raw, "pressure");
    v.allow_only({"gauge_value", "warm_temperature", "cold_temperature"});
    PressureReading reading;
    reading.gauge_value = v.quantity("gauge_value", {&kPressure});
    reading.warm_temperature = v.quantity("warm_temperature", {&kTemperature});
    reading.cold_temperature = v.quantity("cold_temperature", {&kTemperature});
    cfg.pressure = reading;
  }

  if (raw.sections.count("outputs")) {
    View v(raw, "outputs");
    v.allow_only({"directory", "format"});
    cfg.outputs.directory = v.str_or("directory", ".");
    cfg.outputs.format = v.str_or("format", "text");
    if (cfg.outputs.format != "text" && cfg.outputs.format != "json") {
      fail("[outputs] format", "must be text or json");
    }
  }

  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return resolve_experiment_config(parse_config_file(path));
}

const ModeSpec& required_mode(const ExperimentConfig& config,
                              const std::string& label) {
  const auto it = config.modes.find(label);
  if (it == config.modes.end()) {
    throw config_error("no [mode." + label + "] block in the config");
  }
  return it->second;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string serialize(const ExperimentConfig& cfg) {
  std::string out;
  auto emit = [&](const std::string& s) { out += s + "\n"; };

  if (cfg.magnet) {
    emit("[magnet]");
    emit("mass = " + fmt(cfg.magnet->mass) + " kg");
    emit("radius = " + fmt(cfg.magnet->radius) + " m");
    emit("thickness = " + fmt(cfg.magnet->thickness) + " m");
    if (cfg.magnet->density > 0.0) {
      emit("density = " + fmt(cfg.magnet->density) + " kg/m^3");
    }
    if (cfg.magnet->magnetization) {
      emit("magnetization = " + fmt(*cfg.magnet->magnetization) + " A/m");
    }
    if (cfg.magnet->residual_flux_density) {
      emit("residual_flux_density = " + fmt(*cfg.magnet->residual_flux_density) +
           " T");
    }
    emit("");
  }

  emit("[environment]");
  emit("gravity = " + fmt(cfg.gravity) + " m/s^2");
  emit("");

  for (const auto& [label, mode] : cfg.modes) {
    emit("[mode." + label + "]");
    emit(std::string("kind = ") + to_string(mode.kind));
    emit("omega0 = " + fmt(mode.omega0) + " rad/s");
    emit("quality_factor = " + fmt(mode.quality_factor));
    emit("bath_temperature = " + fmt(mode.bath_temperature) + " K");
    emit("inertia = " + fmt(mode.inertia) +
         (mode.kind == ModeKind::translational ? " kg" : " kg*m^2"));
    emit("");
  }

  emit("[noise]");
  emit(std::string("thermal = ") + (cfg.noise.thermal ? "on" : "off"));
  emit("vibration_accel_psd = " + fmt(cfg.noise.vibration_accel_psd) +
       " (m/s^2)^2/Hz");
  if (cfg.noise.detector_noise_psd > 0.0) {
    const std::string unit = cfg.detector_noise_unit == "rad" ? "rad^2/Hz" : "m^2/Hz";
    emit("detector_noise_psd = " + fmt(cfg.noise.detector_noise_psd) + " " + unit);
  }
  emit("seed = " + std::to_string(cfg.noise.seed));
  emit("");

  emit("[feedback]");
  switch (cfg.feedback.mode) {
    case FeedbackMode::off: emit("mode = off"); break;
    case FeedbackMode::ideal_velocity: emit("mode = ideal_velocity"); break;
    case FeedbackMode::filtered_displacement:
      emit("mode = filtered_displacement");
      break;
  }
  emit("gain = " + fmt(cfg.feedback.gain));
  emit("phase_offset = " + fmt(cfg.feedback.phase_offset) + " rad");
  if (cfg.feedback.bandpass_center > 0.0) {
    emit("bandpass_center = " + fmt(cfg.feedback.bandpass_center) + " rad/s");
  }
  if (cfg.feedback.bandpass_width > 0.0) {
    emit("bandpass_width = " + fmt(cfg.feedback.bandpass_width) + " rad/s");
  }
  emit("loop_delay = " + fmt(cfg.feedback.loop_delay) + " s");
  emit("");

  if (cfg.simulate.duration > 0.0) {
    emit("[simulate]");
    emit("mode = " + cfg.simulate.mode_label);
    if (cfg.simulate.timestep > 0.0) {
      emit("timestep = " + fmt(cfg.simulate.timestep) + " s");
    }
    emit("duration = " + fmt(cfg.simulate.duration) + " s");
    std::string channels;
    if (cfg.simulate.record_true) channels += kTruePosition;
    if (cfg.simulate.record_measured) {
      if (!channels.empty()) channels += ",";
      channels += kMeasuredPosition;
    }
    if (cfg.simulate.record_feedback) {
      if (!channels.empty()) channels += ",";
      channels += kFeedbackForce;
    }
    emit("channels = " + channels);
    emit("format = " + cfg.simulate.format);
    if (cfg.simulate.x0) emit("x0 = " + fmt(*cfg.simulate.x0) + " m");
    if (cfg.simulate.v0) emit("v0 = " + fmt(*cfg.simulate.v0) + " m/s");
    emit("");
  }

  emit("[analyze]");
  emit("mode = " + cfg.analyze.mode_label);
  emit("channel = " + cfg.analyze.channel);
  if (cfg.analyze.segment_length > 0) {
    emit("segment_length = " + std::to_string(cfg.analyze.segment_length));
  }
  if (cfg.analyze.target_rbw > 0.0) {
    emit("rbw = " + fmt(cfg.analyze.target_rbw) + " Hz");
  }
  emit("overlap = " + fmt(cfg.analyze.overlap));
  if (cfg.analyze.band_center > 0.0) {
    emit("band_center = " + fmt(cfg.analyze.band_center) + " Hz");
  }
  emit("band_halfwidth_linewidths = " + fmt(cfg.analyze.band_halfwidth_linewidths));
  if (cfg.analyze.reference_temperature) {
    emit("reference_temperature = " + fmt(*cfg.analyze.reference_temperature) + " K");
  }
  if (cfg.analyze.reference_rms) {
    emit("reference_rms = " + fmt(*cfg.analyze.reference_rms) + " m");
  }
  emit(std::string("emit_psd = ") + (cfg.analyze.emit_psd ? "on" : "off"));
  emit(std::string("emit_plot = ") + (cfg.analyze.emit_plot ? "on" : "off"));
  emit("");

  if (cfg.coil) {
    emit("[coil]");
    emit("turns = " + std::to_string(cfg.coil->turns));
    emit("loop_radius = " + fmt(cfg.coil->loop_radius) + " m");
    emit("lateral_offset = " + fmt(cfg.coil->lateral_offset) + " m");
    emit("separation = " + fmt(cfg.coil->separation) + " m");
    emit(std::string("orientation = ") +
         (cfg.coil->orientation == CoilOrientation::perpendicular ? "perpendicular"
                                                                  : "parallel"));
    emit("");
  }

  if (cfg.coil_optimize.bounds) {
    const auto& b = *cfg.coil_optimize.bounds;
    emit("[coil.bounds]");
    emit("x_min = " + fmt(b.x_min) + " m");
    emit("x_max = " + fmt(b.x_max) + " m");
    emit("z_min = " + fmt(b.z_min) + " m");
    emit("z_max = " + fmt(b.z_max) + " m");
    std::string orients;
    for (const auto o : b.orientations) {
      if (!orients.empty()) orients += ",";
      orients += o == CoilOrientation::perpendicular ? "perpendicular" : "parallel";
    }
    emit("orientations = " + orients);
    emit("");
    emit("[coil.optimize]");
    emit("grid = " + std::to_string(cfg.coil_optimize.grid));
    emit(std::string("emit_map = ") + (cfg.coil_optimize.emit_map ? "on" : "off"));
    emit("");
  }

  if (cfg.table) {
    auto table_mode = [&](const std::string& name, const TableModeFixture& mf) {
      emit("[table." + name + "]");
      emit("frequency = " + fmt(mf.mode.omega0) + " rad/s");
      emit("quality_factor = " + fmt(mf.mode.quality_factor));
      emit("reference_temperature = " + fmt(mf.reference_temperature) + " K");
      emit("equilibrium_temperature = " + fmt(mf.equilibrium_temperature) + " K");
      emit("feedback_temperature = " + fmt(mf.feedback_temperature) + " K");
      emit("future_bath_temperature = " + fmt(mf.future_bath_temperature) + " K");
      const std::string asd_unit =
          mf.mode.kind == ModeKind::translational ? " m/rtHz" : " rad/rtHz";
      if (mf.detector_asd > 0.0) {
        emit("detector_noise_asd = " + fmt(mf.detector_asd) + asd_unit);
      }
      if (mf.future_detector_asd > 0.0) {
        emit("future_detector_noise_asd = " + fmt(mf.future_detector_asd) + asd_unit);
      }
      if (mf.squid_floor_asd) {
        emit("squid_floor_asd = " + fmt(*mf.squid_floor_asd) + " phi0/rtHz");
      }
      emit("");
    };
    table_mode("z", cfg.table->z);
    table_mode("beta", cfg.table->beta);
    if (cfg.table->flux_transfer_ratio) {
      emit("[table]");
      emit("flux_transfer_ratio = " + fmt(*cfg.table->flux_transfer_ratio));
      emit("");
    }
    if (!cfg.table->paper.empty()) {
      emit("[paper]");
      for (const auto& [row, value] : cfg.table->paper) {
        const Dimension* dim = paper_dimension(row);
        std::string unit;
        if (dim != nullptr) unit = std::string(" ") + dim->units.front().first;
        emit(row + " = " + fmt(value) + unit);
      }
      emit("");
    }
  }

  if (cfg.pressure) {
    emit("[pressure]");
    emit("gauge_value = " + fmt(cfg.pressure->gauge_value) + " mbar");
    emit("warm_temperature = " + fmt(cfg.pressure->warm_temperature) + " K");
    emit("cold_temperature = " + fmt(cfg.pressure->cold_temperature) + " K");
    emit("");
  }

  emit("[outputs]");
  emit("directory = " + cfg.outputs.directory);
  emit("format = " + cfg.outputs.format);

  return out;
}

}  // namespace maglev
