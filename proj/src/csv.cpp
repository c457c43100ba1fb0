#include "flexseas/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string>
#include <string_view>
#include <system_error>

#include "flexseas/errors.hpp"

namespace flexseas {

std::string format_double(double x) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw DomainError("failed to format a double");
  return std::string(buf, ptr);
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(std::string_view field, int line_no) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ConfigError("line " + std::to_string(line_no) +
                      ": cannot parse number \"" + std::string(field) + "\"");
  }
  return value;
}

}  // namespace

std::string panel_to_csv(const SeasonalPanel& panel) {
  std::string out = "t";
  for (int j = 1; j <= panel.d(); ++j) out += ",season_" + std::to_string(j);
  out += '\n';
  for (int i = 0; i < panel.n(); ++i) {
    out += format_double(panel.t(i));
    for (int j = 0; j < panel.d(); ++j) {
      out += ',';
      out += format_double(panel.y(i, j));
    }
    out += '\n';
  }
  return out;
}

SeasonalPanel panel_from_csv(const std::string& text) {
  std::vector<std::string_view> lines;
  for (std::string_view rest = text; !rest.empty();) {
    const std::size_t pos = rest.find('\n');
    std::string_view line =
        pos == std::string_view::npos ? rest : rest.substr(0, pos);
    rest = pos == std::string_view::npos ? std::string_view{}
                                         : rest.substr(pos + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.size() < 2) throw ConfigError("panel CSV has no data rows");

  const auto header = split(lines[0], ',');
  if (header.empty() || header[0] != "t") {
    throw ConfigError("panel CSV header must start with \"t\"");
  }
  const int d = static_cast<int>(header.size()) - 1;
  for (int j = 1; j <= d; ++j) {
    if (header[static_cast<std::size_t>(j)] !=
        "season_" + std::to_string(j)) {
      throw ConfigError("panel CSV header column " + std::to_string(j + 1) +
                        " must be season_" + std::to_string(j));
    }
  }
  const int n = static_cast<int>(lines.size()) - 1;
  Eigen::MatrixXd y(n, d);
  for (int i = 0; i < n; ++i) {
    const auto fields = split(lines[static_cast<std::size_t>(i) + 1], ',');
    if (static_cast<int>(fields.size()) != d + 1) {
      throw ConfigError("line " + std::to_string(i + 2) + ": expected " +
                        std::to_string(d + 1) + " fields, got " +
                        std::to_string(fields.size()));
    }
    const double t = parse_double(fields[0], i + 2);
    const double expected = static_cast<double>(i + 1) / n;
    if (std::abs(t - expected) > 1e-9) {
      throw ConfigError("line " + std::to_string(i + 2) + ": t=" +
                        std::string(fields[0]) +
                        " is off the implicit grid t_i = i/n (expected " +
                        format_double(expected) + ")");
    }
    for (int j = 0; j < d; ++j) {
      y(i, j) = parse_double(fields[static_cast<std::size_t>(j) + 1], i + 2);
    }
  }
  return SeasonalPanel(std::move(y));
}

std::string fits_to_csv(const std::vector<FitResult>& fits, int d) {
  std::string out = "t";
  for (int j = 0; j <= d; ++j) {
    out += (j == 0) ? ",alpha_hat" : ",beta_" + std::to_string(j) + "_hat";
  }
  for (int j = 0; j <= d; ++j) {
    out += (j == 0) ? ",alpha_prime_hat"
                    : ",beta_" + std::to_string(j) + "_prime_hat";
  }
  out += '\n';
  for (const auto& fit : fits) {
    if (fit.theta_hat.size() != d) {
      throw DimensionError("fit result has " +
                           std::to_string(fit.theta_hat.size()) +
                           " components, expected " + std::to_string(d));
    }
    out += format_double(fit.t);
    for (const auto* vec : {&fit.theta_hat, &fit.theta_prime_hat}) {
      double beta_sum = 0.0;
      for (int j = 0; j < d; ++j) {
        out += ',';
        out += format_double((*vec)(j));
        if (j > 0) beta_sum += (*vec)(j);
      }
      out += ',';
      out += format_double(-beta_sum);  // beta_d from the constraint
    }
    out += '\n';
  }
  return out;
}

std::string rows_to_csv(const std::vector<std::string>& header,
                        const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c > 0) out += ',';
    out += header[c];
  }
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) {
      throw DimensionError("CSV row has " + std::to_string(row.size()) +
                           " fields, header has " +
                           std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace flexseas
