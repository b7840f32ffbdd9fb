#include "maglev/timeseries.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace maglev {

namespace {

constexpr char kMagic[8] = {'M', 'A', 'G', 'L', 'E', 'V', 'T', 'S'};

void append_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void append_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void append_f64(std::string& out, double d) {
  uint64_t v;
  std::memcpy(&v, &d, 8);
  append_u64(out, v);
}

struct Reader {
  const std::string& buf;
  size_t pos = 0;
  void need(size_t n) const {
    if (pos + n > buf.size()) throw std::runtime_error("truncated binary time series");
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(uint8_t(buf[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(uint8_t(buf[pos + i])) << (8 * i);
    pos += 8;
    return v;
  }
  double f64() {
    const uint64_t v = u64();
    double d;
    std::memcpy(&d, &v, 8);
    return d;
  }
  std::string str() {
    const uint32_t n = u32();
    need(n);
    std::string s = buf.substr(pos, n);
    pos += n;
    return s;
  }
};

}  // namespace

std::string to_string(SignalUnit unit) {
  switch (unit) {
    case SignalUnit::meter: return "m";
    case SignalUnit::radian: return "rad";
    case SignalUnit::volt: return "V";
  }
  return "?";
}

SignalUnit signal_unit_from_string(const std::string& s) {
  if (s == "m") return SignalUnit::meter;
  if (s == "rad") return SignalUnit::radian;
  if (s == "V") return SignalUnit::volt;
  throw std::invalid_argument("unknown signal unit '" + s + "'");
}

bool TimeSeries::has_channel(const std::string& name) const {
  for (const auto& n : channel_names) {
    if (n == name) return true;
  }
  return false;
}

const std::vector<double>& TimeSeries::channel(const std::string& name) const {
  for (size_t i = 0; i < channel_names.size(); ++i) {
    if (channel_names[i] == name) return channels[i];
  }
  throw std::invalid_argument("time series has no channel '" + name + "'");
}

void TimeSeries::validate() const {
  if (!(sample_rate > 0.0)) throw std::invalid_argument("sample_rate must be > 0");
  if (channel_names.size() != channels.size()) {
    throw std::invalid_argument("channel name/data count mismatch");
  }
  for (const auto& c : channels) {
    if (c.size() != length()) {
      throw std::invalid_argument("channels must have equal length");
    }
  }
}

void atomic_write_text(const std::filesystem::path& path, const std::string& body) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_timeseries_csv(const TimeSeries& ts, const std::filesystem::path& path) {
  ts.validate();
  std::string body;
  body.reserve(ts.length() * (ts.channels.size() + 1) * 22 + 64);
  body += "# unit: " + to_string(ts.unit) + "\n";
  body += "# sample_rate_hz: ";
  char num[40];
  std::snprintf(num, sizeof(num), "%.17g", ts.sample_rate);
  body += num;
  body += "\ntime_s";
  for (const auto& n : ts.channel_names) {
    body += ",";
    body += n;
  }
  body += "\n";
  const double dt = 1.0 / ts.sample_rate;
  for (size_t i = 0; i < ts.length(); ++i) {
    std::snprintf(num, sizeof(num), "%.17g", static_cast<double>(i) * dt);
    body += num;
    for (const auto& c : ts.channels) {
      std::snprintf(num, sizeof(num), ",%.17g", c[i]);
      body += num;
    }
    body += "\n";
  }
  atomic_write_text(path, body);
}

TimeSeries read_timeseries_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  TimeSeries ts;
  ts.sample_rate = 0.0;
  std::string line;
  bool header_done = false;
  double t0 = 0.0, t1 = 0.0;
  size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (line.find("unit") != std::string::npos && colon != std::string::npos) {
        std::string u = line.substr(colon + 1);
        u.erase(0, u.find_first_not_of(" \t"));
        u.erase(u.find_last_not_of(" \t\r") + 1);
        ts.unit = signal_unit_from_string(u);
      } else if (line.find("sample_rate_hz") != std::string::npos &&
                 colon != std::string::npos) {
        ts.sample_rate = std::stod(line.substr(colon + 1));
      }
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    if (!header_done) {
      bool first = true;
      while (std::getline(ss, cell, ',')) {
        if (!cell.empty() && cell.back() == '\r') cell.pop_back();
        if (first) {
          if (cell != "time_s") {
            throw std::runtime_error("CSV header must start with time_s");
          }
          first = false;
        } else {
          ts.channel_names.push_back(cell);
        }
      }
      ts.channels.assign(ts.channel_names.size(), {});
      header_done = true;
      continue;
    }
    size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      const double v = std::stod(cell);
      if (col == 0) {
        if (rows == 0) t0 = v;
        if (rows == 1) t1 = v;
      } else {
        if (col - 1 >= ts.channels.size()) {
          throw std::runtime_error("CSV row has more cells than header columns");
        }
        ts.channels[col - 1].push_back(v);
      }
      ++col;
    }
    ++rows;
  }
  if (!header_done || rows == 0) throw std::runtime_error("empty CSV time series");
  if (ts.sample_rate <= 0.0) {
    if (rows < 2) throw std::runtime_error("cannot infer sample rate from one row");
    ts.sample_rate = 1.0 / (t1 - t0);
  }
  ts.validate();
  return ts;
}

void write_timeseries_bin(const TimeSeries& ts, const std::filesystem::path& path) {
  ts.validate();
  std::string body;
  body.reserve(24 + ts.length() * ts.channels.size() * 8);
  body.append(kMagic, 8);
  append_u32(body, 1);
  append_u32(body, static_cast<uint32_t>(ts.channels.size()));
  append_f64(body, ts.sample_rate);
  append_u64(body, ts.length());
  const std::string unit = to_string(ts.unit);
  append_u32(body, static_cast<uint32_t>(unit.size()));
  body += unit;
  for (const auto& n : ts.channel_names) {
    append_u32(body, static_cast<uint32_t>(n.size()));
    body += n;
  }
  for (const auto& c : ts.channels) {
    for (double v : c) append_f64(body, v);
  }
  atomic_write_text(path, body);
}

TimeSeries read_timeseries_bin(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  if (buf.size() < 8 || std::memcmp(buf.data(), kMagic, 8) != 0) {
    throw std::runtime_error(path.string() + " is not a maglev binary time series");
  }
  Reader r{buf, 8};
  const uint32_t version = r.u32();
  if (version != 1) {
    throw std::runtime_error("unsupported time series version " +
                             std::to_string(version));
  }
  TimeSeries ts;
  const uint32_t nchan = r.u32();
  ts.sample_rate = r.f64();
  const uint64_t samples = r.u64();
  ts.unit = signal_unit_from_string(r.str());
  for (uint32_t i = 0; i < nchan; ++i) ts.channel_names.push_back(r.str());
  ts.channels.assign(nchan, {});
  for (uint32_t i = 0; i < nchan; ++i) {
    ts.channels[i].resize(samples);
    for (uint64_t j = 0; j < samples; ++j) ts.channels[i][j] = r.f64();
  }
  ts.validate();
  return ts;
}

TimeSeries read_timeseries(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char head[8] = {};
  in.read(head, 8);
  in.close();
  if (std::memcmp(head, kMagic, 8) == 0) return read_timeseries_bin(path);
  return read_timeseries_csv(path);
}

}  // namespace maglev
