#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "scsa/signal.hpp"

namespace scsa {

struct CsvOptions {
  /// Required for the single-column form; ignored when the file carries x.
  std::optional<double> dx{};
  /// Abscissa of the first sample in the single-column form.
  double x0 = 0.0;
};

namespace detail {

inline std::string_view trim(std::string_view v) {
  while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
  while (!v.empty() && (v.back() == ' ' || v.back() == '\t' || v.back() == '\r'))
    v.remove_suffix(1);
  return v;
}

inline bool parse_number(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (*first == '+') ++first; // from_chars rejects a leading plus
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

inline void format_number(std::ostream& os, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v); // shortest round-trip form
  os.write(buf, res.ptr - buf);
}

} // namespace detail

/// Read a signal from CSV: either two columns "x,y" with x uniformly spaced
/// (relative tolerance 1e-6), or one column of y values with the spacing
/// supplied in opts. '#' lines are comments; a non-numeric first row is
/// treated as a header.
template <typename Scalar = double>
Signal<Scalar> read_signal_csv(std::istream& in, const CsvOptions& opts = {}) {
  std::vector<double> xs, ys;
  std::string line;
  int columns = 0;
  bool header_allowed = true;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view v = detail::trim(line);
    if (v.empty() || v.front() == '#') continue;
    const auto fields = detail::split_fields(v);
    if (fields.size() > 2)
      throw CsvFormatError("csv line " + std::to_string(lineno) + ": expected 1 or 2 columns, got " +
                           std::to_string(fields.size()));
    double a = 0, b = 0;
    const bool ok = fields.size() == 2
                        ? detail::parse_number(fields[0], a) && detail::parse_number(fields[1], b)
                        : detail::parse_number(fields[0], a);
    if (!ok) {
      if (header_allowed) {
        header_allowed = false; // one non-numeric row is the header
        continue;
      }
      throw CsvFormatError("csv line " + std::to_string(lineno) + ": cannot parse '" +
                           std::string(v) + "'");
    }
    header_allowed = false;
    if (columns == 0)
      columns = int(fields.size());
    else if (int(fields.size()) != columns)
      throw CsvFormatError("csv line " + std::to_string(lineno) +
                           ": inconsistent column count");
    if (columns == 2) {
      xs.push_back(a);
      ys.push_back(b);
    } else {
      ys.push_back(a);
    }
  }
  if (ys.size() < 3)
    throw TooFewSamples("csv: need at least 3 samples, got " + std::to_string(ys.size()));

  double x0, dx;
  if (columns == 2) {
    const size_t n = xs.size();
    x0 = xs.front();
    dx = (xs.back() - xs.front()) / double(n - 1);
    if (!(dx > 0))
      throw NonPositiveSpacing("csv: x column must be strictly increasing");
    for (size_t i = 0; i + 1 < n; ++i) {
      const double step = xs[i + 1] - xs[i];
      if (std::abs(step - dx) > 1e-6 * std::abs(dx))
        throw NonUniformGrid("csv: x column is not uniformly spaced (step " +
                             std::to_string(step) + " at row " + std::to_string(i + 1) +
                             " vs mean " + std::to_string(dx) + ")");
    }
  } else {
    if (!opts.dx)
      throw CsvFormatError("csv: single-column input requires an explicit dx");
    dx = *opts.dx;
    x0 = opts.x0;
  }

  std::vector<Scalar> samples(ys.size());
  for (size_t i = 0; i < ys.size(); ++i) samples[i] = Scalar(ys[i]);
  return from_samples<Scalar>(Scalar(x0), Scalar(dx), samples);
}

template <typename Scalar = double>
Signal<Scalar> read_signal_csv(const std::filesystem::path& path, const CsvOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw CsvFormatError("cannot open " + path.string());
  return read_signal_csv<Scalar>(in, opts);
}

/// Write "x,y" rows in shortest round-trip decimal form.
template <typename Scalar>
void write_signal_csv(std::ostream& os, const Signal<Scalar>& s) {
  os << "x,y\n";
  for (Index i = 0; i < s.size(); ++i) {
    detail::format_number(os, double(s.x(i)));
    os << ',';
    detail::format_number(os, double(s.samples(i)));
    os << '\n';
  }
}

template <typename Scalar>
void write_signal_csv(const std::filesystem::path& path, const Signal<Scalar>& s) {
  std::ofstream os(path);
  if (!os) throw CsvFormatError("cannot open " + path.string() + " for writing");
  write_signal_csv(os, s);
}

} // namespace scsa
