#pragma once

// CSV/JSON/PGM import and export. Numbers are written with 17 significant
// digits so they round-trip exactly.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "efdkit/benchkit.hpp"
#include "efdkit/errors.hpp"
#include "efdkit/modes.hpp"
#include "efdkit/segmentation.hpp"
#include "efdkit/signal.hpp"
#include "efdkit/tfr.hpp"

namespace efdkit::io {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

inline constexpr double kTimeJitterTolerance = 1e-9;

// One column (values; `rate_hz` required) or two columns (t, value; t must be
// uniform). A non-numeric first line is taken as a header.
inline Signal parse_signal_csv(std::string_view text, std::optional<double> rate_hz) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool first = true;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = detail::trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    std::vector<double> row;
    bool numeric = true;
    for (auto field : detail::split(line, ',')) {
      const auto v = detail::parse_double(field);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw InvalidInput("line " + std::to_string(line_no) + ": not a number");
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size())
      throw InvalidInput("line " + std::to_string(line_no) + ": inconsistent column count");
    rows.push_back(std::move(row));
    if (end == text.size()) break;
  }
  if (rows.empty()) throw InvalidInput("input has no samples");
  const std::size_t cols = rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size());
  if (cols == 1) {
    if (!rate_hz) throw InvalidInput("single-column input needs a sample rate (--rate)");
    for (const auto& r : rows) values.push_back(r[0]);
    return Signal(std::move(values), *rate_hz);
  }
  if (cols != 2) throw InvalidInput("input must have one or two columns");
  if (rows.size() < 2) {
    if (!rate_hz) throw InvalidInput("a single timed sample does not define a sample rate (use --rate)");
    return Signal({rows[0][1]}, *rate_hz);
  }
  const double span = rows.back()[0] - rows.front()[0];
  const double dt = span / static_cast<double>(rows.size() - 1);
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("time column must be increasing");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double expected = rows.front()[0] + dt * static_cast<double>(i);
    if (std::abs(rows[i][0] - expected) > kTimeJitterTolerance * std::max(std::abs(span), dt))
      throw InvalidInput("time column is not uniformly sampled");
    values.push_back(rows[i][1]);
  }
  const double rate = 1.0 / dt;
  if (rate_hz && std::abs(*rate_hz - rate) > 1e-6 * rate)
    throw InvalidInput("--rate disagrees with the time column");
  return Signal(std::move(values), rate);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Signal read_signal_csv(const std::string& path, std::optional<double> rate_hz) {
  return parse_signal_csv(read_file(path), rate_hz);
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << content;
  if (!out) throw InvalidInput("failed writing " + path);
}

// t, then one column per series.
inline std::string series_csv(const std::vector<std::string>& names, const std::vector<std::span<const double>>& cols,
                              double sample_rate_hz) {
  std::string s = "t";
  for (const auto& n : names) s += "," + n;
  s += "\n";
  const std::size_t n = cols.empty() ? 0 : cols.front().size();
  for (std::size_t r = 0; r < n; ++r) {
    s += fmt(static_cast<double>(r) / sample_rate_hz);
    for (const auto& c : cols) s += "," + fmt(c[r]);
    s += "\n";
  }
  return s;
}

inline std::string modes_csv(const ModeSet& ms) {
  std::vector<std::string> names;
  std::vector<std::span<const double>> cols;
  for (std::size_t i = 0; i < ms.modes.size(); ++i) {
    names.push_back("mode" + std::to_string(i + 1));
    cols.push_back(ms.modes[i].samples());
  }
  const double rate = ms.modes.empty() ? 1.0 : ms.modes.front().sample_rate_hz();
  return series_csv(names, cols, rate);
}

inline nlohmann::json segmentation_json(const Segmentation& seg, double sample_rate_hz) {
  return {{"technique", std::string(to_string(seg.technique))},
          {"boundaries_normalized", seg.boundaries},
          {"boundaries_hz", seg.boundaries_hz(sample_rate_hz)}};
}

// nlohmann's default dump prints doubles in shortest round-trip form.
inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline std::string track_csv(const TfrTrack& t) {
  std::string s = "t,amplitude,frequency_hz,degenerate\n";
  for (std::size_t i = 0; i < t.size(); ++i)
    s += fmt(t.time[i]) + "," + fmt(t.inst_amplitude[i]) + "," + fmt(t.inst_frequency_hz[i]) + "," +
         (t.degenerate[i] ? "1" : "0") + "\n";
  return s;
}

// Long form: time, freq, magnitude (non-zero cells only unless `dense`).
inline std::string raster_csv(const TfrRaster& r, bool dense = false) {
  std::string s = "t,freq_hz,magnitude\n";
  const std::size_t nf = r.freq_axis.size();
  for (std::size_t i = 0; i < r.time_axis.size(); ++i)
    for (std::size_t k = 0; k < nf; ++k) {
      const double v = r.magnitude[i * nf + k];
      if (dense || v != 0.0) s += fmt(r.time_axis[i]) + "," + fmt(r.freq_axis[k]) + "," + fmt(v) + "\n";
    }
  return s;
}

// Binary 8-bit PGM; values scaled so the maximum maps to 255. `rows` x `cols`.
inline std::string pgm(const std::vector<double>& values, std::size_t rows, std::size_t cols, bool invert = false) {
  if (values.size() != rows * cols) throw InvalidInput("image dimensions do not match the data");
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, std::abs(v));
  std::string s = "P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n255\n";
  s.reserve(s.size() + values.size());
  for (double v : values) {
    auto px = static_cast<int>(std::lround(peak > 0.0 ? 255.0 * std::abs(v) / peak : 0.0));
    if (invert) px = 255 - px;
    s.push_back(static_cast<char>(static_cast<unsigned char>(px)));
  }
  return s;
}

// Frequency on the vertical axis (high at the top), time left to right.
inline std::string raster_pgm(const TfrRaster& r) {
  const std::size_t nt = r.time_axis.size(), nf = r.freq_axis.size();
  std::vector<double> img(nt * nf);
  for (std::size_t k = 0; k < nf; ++k)
    for (std::size_t i = 0; i < nt; ++i) img[(nf - 1 - k) * nt + i] = r.magnitude[i * nf + k];
  return pgm(img, nf, nt, /*invert=*/true);
}

inline std::string qmap_csv(const QMap& m) {
  std::string s = "a,lambda_r,q,error\n";
  for (std::size_t i = 0; i < m.a_axis.size(); ++i)
    for (std::size_t j = 0; j < m.lambda_axis.size(); ++j) {
      std::string err = m.errors[i * m.lambda_axis.size() + j];
      std::replace(err.begin(), err.end(), ',', ';');
      s += fmt(m.a_axis[i]) + "," + fmt(m.lambda_axis[j]) + "," + std::to_string(m.at(i, j)) + "," + err + "\n";
    }
  return s;
}

// Rows = a (largest at the top), columns = lambda_r; q=1 drawn black.
inline std::string qmap_pgm(const QMap& m) {
  const std::size_t na = m.a_axis.size(), nl = m.lambda_axis.size();
  std::vector<double> img(na * nl);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nl; ++j) img[(na - 1 - i) * nl + j] = m.at(i, j);
  return pgm(img, na, nl, /*invert=*/true);
}

}  // namespace efdkit::io
