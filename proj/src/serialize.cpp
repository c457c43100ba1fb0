#include "flexseas/serialize.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "flexseas/csv.hpp"
#include "flexseas/errors.hpp"
#include "json.hpp"

namespace flexseas {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path.empty() ? what : path + ": " + what);
}

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const json& expect_object(const json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "expected an object");
  return v;
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) fail(path, "unknown key \"" + item.key() + "\"");
  }
}

const json& require(const json& obj, const std::string& path,
                    const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path, std::string("missing key \"") + key + "\"");
  return *it;
}

const json* optional(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

std::uint64_t as_u64(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    fail(path, "expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

std::vector<double> as_number_list(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Eigen::MatrixXd as_matrix(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) {
    fail(path, "expected a non-empty array of rows");
  }
  const std::size_t rows = v.size();
  std::size_t cols = 0;
  Eigen::MatrixXd m;
  for (std::size_t i = 0; i < rows; ++i) {
    const auto row =
        as_number_list(v[i], path + "[" + std::to_string(i) + "]");
    if (i == 0) {
      cols = row.size();
      if (cols == 0) fail(path, "rows must be non-empty");
      m.resize(static_cast<Eigen::Index>(rows),
               static_cast<Eigen::Index>(cols));
    } else if (row.size() != cols) {
      fail(path, "rows have inconsistent lengths");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
  }
  return m;
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
}

ErrorProcessSpec error_from_json(const json& v, const std::string& path,
                                 std::string* echo) {
  expect_object(v, path);
  const std::string variant =
      as_string(require(v, path, "variant"), child(path, "variant"));
  ErrorProcessSpec spec;
  if (variant == "iid") {
    spec.variant = ErrorVariant::Iid;
    check_keys(v, path, {"variant", "d", "sigma_eps", "law"});
  } else if (variant == "vma_q") {
    spec.variant = ErrorVariant::VmaQ;
    check_keys(v, path, {"variant", "d", "sigma_eps", "theta", "law"});
  } else if (variant == "var_1") {
    spec.variant = ErrorVariant::Var1;
    check_keys(v, path, {"variant", "d", "sigma_eps", "phi", "law"});
  } else {
    fail(child(path, "variant"),
         "expected iid | vma_q | var_1, got \"" + variant + "\"");
  }
  spec.d = as_int(require(v, path, "d"), child(path, "d"));
  spec.sigma_eps =
      as_matrix(require(v, path, "sigma_eps"), child(path, "sigma_eps"));
  if (spec.variant == ErrorVariant::VmaQ) {
    const json& theta = require(v, path, "theta");
    const std::string tpath = child(path, "theta");
    if (!theta.is_array() || theta.empty()) {
      fail(tpath, "expected a non-empty array of matrices");
    }
    for (std::size_t s = 0; s < theta.size(); ++s) {
      spec.theta.push_back(
          as_matrix(theta[s], tpath + "[" + std::to_string(s) + "]"));
    }
  }
  if (spec.variant == ErrorVariant::Var1) {
    spec.phi = as_matrix(require(v, path, "phi"), child(path, "phi"));
  }
  std::string law = "gaussian";
  if (const json* l = optional(v, "law")) {
    law = as_string(*l, child(path, "law"));
  }
  if (law == "gaussian") {
    spec.law = InnovationLaw::Gaussian;
  } else if (law == "rademacher-scaled") {
    spec.law = InnovationLaw::RademacherScaled;
  } else {
    fail(child(path, "law"),
         "expected gaussian | rademacher-scaled, got \"" + law + "\"");
  }
  spec.validate();
  if (echo) {
    *echo = variant + "(d=" + std::to_string(spec.d) + ", " + law + ")";
  }
  return spec;
}

std::vector<std::vector<double>> as_coeff_lists(const json& v,
                                                const std::string& path) {
  if (!v.is_array() || v.empty()) {
    fail(path, "expected a non-empty array of coefficient lists");
  }
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(as_number_list(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

CurveSet curves_from_json(const json& v, const std::string& path,
                          std::string* echo) {
  expect_object(v, path);
  const std::string preset =
      as_string(require(v, path, "preset"), child(path, "preset"));
  if (preset == "linear") {
    check_keys(v, path, {"preset", "d", "alpha", "betas"});
    const int d = as_int(require(v, path, "d"), child(path, "d"));
    std::vector<double> alpha = {2.0, 3.0};
    if (const json* a = optional(v, "alpha")) {
      alpha = as_number_list(*a, child(path, "alpha"));
    }
    std::vector<std::vector<double>> betas;
    if (const json* b = optional(v, "betas")) {
      betas = as_coeff_lists(*b, child(path, "betas"));
    }
    if (echo) *echo = "linear(d=" + std::to_string(d) + ")";
    return make_linear_curves(d, std::move(alpha), std::move(betas));
  }
  if (preset == "trig") {
    check_keys(v, path, {"preset", "d", "amplitude"});
    const int d = as_int(require(v, path, "d"), child(path, "d"));
    double amplitude = 1.0;
    if (const json* a = optional(v, "amplitude")) {
      amplitude = as_number(*a, child(path, "amplitude"));
    }
    if (echo) {
      *echo = "trig(d=" + std::to_string(d) +
              ", amplitude=" + format_double(amplitude) + ")";
    }
    return make_trig_curves(d, amplitude);
  }
  if (preset == "polynomial") {
    check_keys(v, path, {"preset", "alpha", "betas"});
    const auto alpha =
        as_number_list(require(v, path, "alpha"), child(path, "alpha"));
    const auto betas =
        as_coeff_lists(require(v, path, "betas"), child(path, "betas"));
    if (echo) {
      *echo = "polynomial(d=" + std::to_string(betas.size() + 1) + ")";
    }
    return make_polynomial_curves(alpha, betas);
  }
  fail(child(path, "preset"),
       "expected linear | trig | polynomial, got \"" + preset + "\"");
}

}  // namespace

std::uint64_t canonical_json_hash(const std::string& json_text) {
  // nlohmann stores object members sorted by key, so dump() of the parsed
  // document is a canonical rendering; FNV-1a 64 over those bytes.
  const std::string canon = parse_text(json_text).dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

FitRequest parse_fit_config(const std::string& json_text) {
  const json v = parse_text(json_text);
  expect_object(v, "");
  check_keys(v, "",
             {"input", "kernel", "bandwidth", "grid_points",
              "min_denominator"});
  FitRequest req;
  req.input = as_string(require(v, "", "input"), "input");
  req.fit.kernel =
      KernelSpec::from_name(as_string(require(v, "", "kernel"), "kernel"));
  req.fit.h = as_number(require(v, "", "bandwidth"), "bandwidth");
  if (!(req.fit.h > 0.0 && req.fit.h <= 1.0)) {
    fail("bandwidth", "must satisfy 0 < h <= 1");
  }
  if (const json* g = optional(v, "grid_points")) {
    req.grid_points = as_int(*g, "grid_points");
    if (req.grid_points < 2) fail("grid_points", "must be >= 2");
  }
  if (const json* m = optional(v, "min_denominator")) {
    req.fit.min_denominator = as_number(*m, "min_denominator");
    if (!(req.fit.min_denominator > 0.0)) {
      fail("min_denominator", "must be positive");
    }
  }
  return req;
}

SimulateRequest parse_simulate_config(const std::string& json_text) {
  const json v = parse_text(json_text);
  expect_object(v, "");
  check_keys(v, "", {"n", "seed", "curves", "error"});
  const int n = as_int(require(v, "", "n"), "n");
  if (n < 3) fail("n", "must be >= 3");
  const std::uint64_t seed = as_u64(require(v, "", "seed"), "seed");
  std::string curves_echo, error_echo = "none";
  CurveSet curves =
      curves_from_json(require(v, "", "curves"), "curves", &curves_echo);
  std::optional<ErrorProcessSpec> error;
  if (const json* e = optional(v, "error")) {
    error = error_from_json(*e, "error", &error_echo);
    if (error->d != curves.d()) {
      fail("error.d", "error process has d=" + std::to_string(error->d) +
                          " but the curves have d=" +
                          std::to_string(curves.d()));
    }
  }
  return SimulateRequest{n, seed, std::move(curves), std::move(error),
                         std::move(curves_echo), std::move(error_echo)};
}

ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::string& study) {
  const json v = parse_text(json_text);
  expect_object(v, "");
  check_keys(v, "",
             {"curves", "error", "kernel", "n_list", "h_rule", "eval_points",
              "replications", "base_seed"});
  ExperimentConfig cfg;
  cfg.study = study;
  if (const json* c = optional(v, "curves")) {
    cfg.curves = curves_from_json(*c, "curves", &cfg.curves_echo);
  }
  if (const json* e = optional(v, "error")) {
    cfg.error = error_from_json(*e, "error", &cfg.error_echo);
  } else {
    cfg.error_echo = "none";
  }
  cfg.kernel =
      KernelSpec::from_name(as_string(require(v, "", "kernel"), "kernel"));
  const json& nl = require(v, "", "n_list");
  if (!nl.is_array() || nl.empty()) fail("n_list", "expected a non-empty array");
  for (std::size_t i = 0; i < nl.size(); ++i) {
    cfg.n_list.push_back(as_int(nl[i], "n_list[" + std::to_string(i) + "]"));
  }
  const json& hr = expect_object(require(v, "", "h_rule"), "h_rule");
  check_keys(hr, "h_rule", {"fixed", "power_c"});
  const json* fixed = optional(hr, "fixed");
  const json* power = optional(hr, "power_c");
  if ((fixed != nullptr) == (power != nullptr)) {
    fail("h_rule", "expected exactly one of \"fixed\" or \"power_c\"");
  }
  if (fixed) {
    cfg.h_rule.kind = HRule::Kind::Fixed;
    cfg.h_rule.values = as_number_list(*fixed, "h_rule.fixed");
  } else {
    cfg.h_rule.kind = HRule::Kind::Power;
    cfg.h_rule.c = as_number(*power, "h_rule.power_c");
  }
  cfg.eval_points =
      as_number_list(require(v, "", "eval_points"), "eval_points");
  cfg.replications =
      as_int(require(v, "", "replications"), "replications");
  cfg.base_seed = as_u64(require(v, "", "base_seed"), "base_seed");
  cfg.raw_json = v.dump(2);
  cfg.config_hash = canonical_json_hash(json_text);
  cfg.validate();
  return cfg;
}

ErrorProcessSpec parse_error_process(const std::string& json_text,
                                     std::string* echo) {
  return error_from_json(parse_text(json_text), "", echo);
}

CurveSet parse_curves(const std::string& json_text, std::string* echo) {
  return curves_from_json(parse_text(json_text), "", echo);
}

std::string matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows.dump();
}

Eigen::MatrixXd matrix_from_json(const std::string& json_text) {
  return as_matrix(parse_text(json_text), "");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file \"" + path + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file \"" + path + "\"");
  out << content;
  if (!out) throw ConfigError("failed while writing \"" + path + "\"");
}

}  // namespace flexseas
