#include "flexseas/asymptotics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "flexseas/csv.hpp"
#include "flexseas/errors.hpp"
#include "flexseas/numeric.hpp"
#include "json.hpp"

namespace flexseas {

using nlohmann::json;

namespace {

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

[[noreturn]] void rethrow_typed_with_context(const std::exception_ptr& ep,
                                             const std::string& ctx) {
  try {
    std::rethrow_exception(ep);
  } catch (const DegenerateWindow& e) {
    rethrow_with_context(e, ctx);
  } catch (const DomainError& e) {
    rethrow_with_context(e, ctx);
  } catch (const BandwidthError& e) {
    rethrow_with_context(e, ctx);
  } catch (const DimensionError& e) {
    rethrow_with_context(e, ctx);
  } catch (const ConstraintError& e) {
    rethrow_with_context(e, ctx);
  } catch (const ConfigError& e) {
    rethrow_with_context(e, ctx);
  } catch (const SpecError& e) {
    rethrow_with_context(e, ctx);
  } catch (const SummabilityError& e) {
    rethrow_with_context(e, ctx);
  } catch (const Error& e) {
    throw Error(std::string(e.what()) + " " + ctx);
  }
  // Non-library exceptions propagate unchanged.
}

// Runs body(0..reps-1) across up to `threads` workers. Workers pull indices
// from a shared counter; failures land in per-replication slots so the
// error that surfaces (the lowest failing index) is scheduling-independent.
void run_replications(int reps, int threads,
                      const std::function<void(int)>& body) {
  const int workers = std::min(resolve_threads(threads), reps);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(reps));
  std::atomic<int> next{0};
  const auto drain = [&]() {
    while (true) {
      const int r = next.fetch_add(1);
      if (r >= reps) break;
      try {
        body(r);
      } catch (...) {
        errors[static_cast<std::size_t>(r)] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    drain();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int k = 0; k < workers; ++k) pool.emplace_back(drain);
    for (auto& th : pool) th.join();
  }
  for (int r = 0; r < reps; ++r) {
    if (errors[static_cast<std::size_t>(r)]) {
      rethrow_typed_with_context(errors[static_cast<std::size_t>(r)],
                                 "(replication " + std::to_string(r) + ")");
    }
  }
}

Eigen::VectorXd sample_mean(const std::vector<Eigen::VectorXd>& xs) {
  const int dim = static_cast<int>(xs.front().size());
  std::vector<KahanSum> acc(static_cast<std::size_t>(dim));
  for (const auto& x : xs) {
    for (int j = 0; j < dim; ++j) acc[static_cast<std::size_t>(j)].add(x(j));
  }
  Eigen::VectorXd mean(dim);
  for (int j = 0; j < dim; ++j) {
    mean(j) = acc[static_cast<std::size_t>(j)].value() / xs.size();
  }
  return mean;
}

Eigen::MatrixXd sample_covariance(const std::vector<Eigen::VectorXd>& xs) {
  const int dim = static_cast<int>(xs.front().size());
  const Eigen::VectorXd mean = sample_mean(xs);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& x : xs) {
    const Eigen::VectorXd c = x - mean;
    cov.noalias() += c * c.transpose();
  }
  cov /= static_cast<double>(xs.size() - 1);
  return 0.5 * (cov + cov.transpose());
}

// Per-(n, h) replication errors, indexed err[eval_point][replication].
struct PanelErrors {
  std::vector<std::vector<Eigen::VectorXd>> err;
};

PanelErrors run_panel_replications(const ExperimentConfig& cfg, int n,
                                   double h, int threads) {
  const CurveSet& curves = *cfg.curves;
  const int d = curves.d();
  const int reps = cfg.replications;
  const std::size_t points = cfg.eval_points.size();

  Eigen::MatrixXd y0(n, d);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i + 1) / n;
    const double a = curves.alpha(t);
    for (int j = 0; j < d; ++j) y0(i, j) = a + curves.beta(j, t);
  }
  std::vector<Eigen::VectorXd> targets(points);
  for (std::size_t ti = 0; ti < points; ++ti) {
    targets[ti] = curves.theta(cfg.eval_points[ti]);
  }
  FitConfig fc;
  fc.kernel = cfg.kernel;
  fc.h = h;

  PanelErrors out;
  out.err.assign(points, std::vector<Eigen::VectorXd>(
                             static_cast<std::size_t>(reps)));
  run_replications(reps, threads, [&](int r) {
    Eigen::MatrixXd noise;
    if (cfg.error) {
      simulate_into(*cfg.error, n, cfg.base_seed + static_cast<std::uint64_t>(r),
                    noise);
    } else {
      noise = Eigen::MatrixXd::Zero(n, d);
    }
    const SeasonalPanel panel(y0 + noise);
    for (std::size_t ti = 0; ti < points; ++ti) {
      const FitResult fit = fit_at(panel, fc, cfg.eval_points[ti]);
      out.err[ti][static_cast<std::size_t>(r)] = fit.theta_hat - targets[ti];
    }
  });
  return out;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index j = 0; j < v.size(); ++j) out.push_back(v(j));
  return out;
}

MonteCarloReport make_report(const ExperimentConfig& cfg,
                             const std::string& study, int threads) {
  MonteCarloReport rep;
  rep.study = study;
  rep.config_echo = cfg.raw_json;
  rep.config_hash = cfg.config_hash;
  rep.threads_used = resolve_threads(threads);
  return rep;
}

}  // namespace

double HRule::h_for(int idx, int n) const {
  if (kind == Kind::Fixed) return values[static_cast<std::size_t>(idx)];
  return c * std::pow(static_cast<double>(n), -0.2);
}

void ExperimentConfig::validate() const {
  const bool known = study == "bias" || study == "clt" || study == "lemma6" ||
                     study == "rate";
  if (!known) {
    throw ConfigError("unknown study \"" + study +
                      "\" (expected bias | clt | lemma6 | rate)");
  }
  if (n_list.empty()) throw ConfigError("n_list must be non-empty");
  for (int n : n_list) {
    if (n < 3) {
      throw ConfigError("every n must be >= 3, got " + std::to_string(n));
    }
  }
  if (replications < 100) {
    throw ConfigError("replications >= 100 required, got " +
                      std::to_string(replications));
  }
  if (h_rule.kind == HRule::Kind::Fixed) {
    if (h_rule.values.size() != n_list.size()) {
      throw ConfigError("h_rule.fixed needs one bandwidth per n (" +
                        std::to_string(n_list.size()) + "), got " +
                        std::to_string(h_rule.values.size()));
    }
  } else if (!(h_rule.c > 0.0)) {
    throw ConfigError("h_rule.power_c must be positive");
  }
  if (eval_points.empty()) throw ConfigError("eval_points must be non-empty");
  for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
    const int n = n_list[idx];
    const double h = h_rule.h_for(static_cast<int>(idx), n);
    if (!(h > 0.0 && h <= 1.0)) {
      throw ConfigError("bandwidth for n=" + std::to_string(n) + " is " +
                        std::to_string(h) + ", must be in (0, 1]");
    }
    const double reach = h * kernel.support_halfwidth;
    for (double t : eval_points) {
      if (!(std::min(t, 1.0 - t) > reach)) {
        throw ConfigError("eval point t=" + std::to_string(t) +
                          " is not interior for n=" + std::to_string(n) +
                          ", h=" + std::to_string(h) +
                          " (need min(t, 1-t) > h * support)");
      }
    }
  }

  const bool needs_curves = study != "lemma6";
  if (needs_curves) {
    if (!curves) {
      throw ConfigError("the " + study + " study needs a curves object");
    }
    if (!curves->has_second_derivatives()) {
      throw ConfigError(
          "the " + study +
          " study needs curves with analytic second derivatives");
    }
  }
  const bool needs_error = study == "bias" || study == "clt" || study == "lemma6";
  if (needs_error && !error) {
    throw ConfigError("the " + study + " study needs an error process");
  }
  if (curves && error && curves->d() != error->d) {
    throw ConfigError("curves have d=" + std::to_string(curves->d()) +
                      " but the error process has d=" +
                      std::to_string(error->d));
  }
  if (study == "rate") {
    if (n_list.size() < 3) {
      throw ConfigError("the rate study needs at least 3 sample sizes");
    }
    if (h_rule.kind != HRule::Kind::Power) {
      throw ConfigError("the rate study needs the power bandwidth rule");
    }
    const auto [lo, hi] = std::minmax_element(n_list.begin(), n_list.end());
    if (*hi < 10 * *lo) {
      throw ConfigError("the rate study needs n values spanning a decade");
    }
  }
}

double ks_distance_to_normal(std::vector<double> sample) {
  if (sample.empty()) return 0.0;
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double dist = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = normal_cdf(sample[i]);
    dist = std::max(dist, f - static_cast<double>(i) / n);
    dist = std::max(dist, static_cast<double>(i + 1) / n - f);
  }
  return dist;
}

namespace {

struct CentralMoments {
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
};

CentralMoments central_moments(const std::vector<double>& sample) {
  KahanSum mean_acc;
  for (double x : sample) mean_acc.add(x);
  const double mean = mean_acc.value() / sample.size();
  KahanSum m2, m3, m4;
  for (double x : sample) {
    const double c = x - mean;
    m2.add(c * c);
    m3.add(c * c * c);
    m4.add(c * c * c * c);
  }
  const double n = static_cast<double>(sample.size());
  return {m2.value() / n, m3.value() / n, m4.value() / n};
}

}  // namespace

double sample_skewness(const std::vector<double>& sample) {
  if (sample.size() < 2) return 0.0;
  const auto m = central_moments(sample);
  if (m.m2 <= 0.0) return 0.0;
  return m.m3 / std::pow(m.m2, 1.5);
}

double sample_excess_kurtosis(const std::vector<double>& sample) {
  if (sample.size() < 2) return 0.0;
  const auto m = central_moments(sample);
  if (m.m2 <= 0.0) return 0.0;
  return m.m4 / (m.m2 * m.m2) - 3.0;
}

MonteCarloReport run_bias_study(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  if (cfg.study != "bias") {
    throw ConfigError("run_bias_study got a \"" + cfg.study + "\" config");
  }
  MonteCarloReport rep = make_report(cfg, "bias", threads);
  for (std::size_t idx = 0; idx < cfg.n_list.size(); ++idx) {
    const int n = cfg.n_list[idx];
    const double h = cfg.h_rule.h_for(static_cast<int>(idx), n);
    const PanelErrors pe = run_panel_replications(cfg, n, h, threads);
    FitConfig fc;
    fc.kernel = cfg.kernel;
    fc.h = h;
    for (std::size_t ti = 0; ti < cfg.eval_points.size(); ++ti) {
      const auto& errs = pe.err[ti];
      CellStats cs;
      cs.n = n;
      cs.h = h;
      cs.t = cfg.eval_points[ti];
      cs.replications = cfg.replications;
      cs.mean_error = sample_mean(errs);
      cs.bias_theory = theoretical_bias(*cfg.curves, fc, cs.t);
      KahanSum sq;
      for (const auto& e : errs) sq.add((e - cs.mean_error).squaredNorm());
      cs.resid_rms = std::sqrt(
          sq.value() / (static_cast<double>(errs.size()) * cs.mean_error.size()));
      rep.cells.push_back(std::move(cs));
    }
  }
  return rep;
}

MonteCarloReport run_clt_study(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  if (cfg.study != "clt") {
    throw ConfigError("run_clt_study got a \"" + cfg.study + "\" config");
  }
  MonteCarloReport rep = make_report(cfg, "clt", threads);
  const int d = cfg.curves->d();
  const DesignMatrix design = DesignMatrix::build(d);
  const Eigen::MatrixXd sigma0 = longrun_sigma0(*cfg.error);
  const double nu0 = sq_moment(cfg.kernel, 0);
  const Eigen::MatrixXd sigma_theta =
      nu0 * design.A_inv * sigma0 * design.A_inv.transpose();

  for (std::size_t idx = 0; idx < cfg.n_list.size(); ++idx) {
    const int n = cfg.n_list[idx];
    const double h = cfg.h_rule.h_for(static_cast<int>(idx), n);
    const double scale = std::sqrt(static_cast<double>(n) * h);
    const PanelErrors pe = run_panel_replications(cfg, n, h, threads);
    FitConfig fc;
    fc.kernel = cfg.kernel;
    fc.h = h;
    for (std::size_t ti = 0; ti < cfg.eval_points.size(); ++ti) {
      const double t = cfg.eval_points[ti];
      const Eigen::VectorXd bias = theoretical_bias(*cfg.curves, fc, t);
      std::vector<Eigen::VectorXd> z(pe.err[ti].size());
      for (std::size_t r = 0; r < z.size(); ++r) {
        z[r] = scale * (pe.err[ti][r] - bias);
      }
      CellStats cs;
      cs.n = n;
      cs.h = h;
      cs.t = t;
      cs.replications = cfg.replications;
      cs.bias_theory = bias;
      cs.z_cov = sample_covariance(z);
      cs.sigma_theta = sigma_theta;
      for (int j = 0; j < d; ++j) {
        const double sd = std::sqrt(sigma_theta(j, j));
        std::vector<double> comp(z.size());
        int covered = 0;
        for (std::size_t r = 0; r < z.size(); ++r) {
          comp[r] = z[r](j) / sd;
          if (std::abs(comp[r]) <= kNormalQuantile975) ++covered;
        }
        cs.coverage.push_back(static_cast<double>(covered) /
                              static_cast<double>(z.size()));
        cs.skewness.push_back(sample_skewness(comp));
        cs.excess_kurtosis.push_back(sample_excess_kurtosis(comp));
        cs.ks.push_back(ks_distance_to_normal(std::move(comp)));
      }
      rep.cells.push_back(std::move(cs));
    }
  }
  return rep;
}

MonteCarloReport run_lemma6_study(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  if (cfg.study != "lemma6") {
    throw ConfigError("run_lemma6_study got a \"" + cfg.study + "\" config");
  }
  MonteCarloReport rep = make_report(cfg, "lemma6", threads);
  const int d = cfg.error->d;
  const Eigen::MatrixXd limit =
      sq_moment(cfg.kernel, 0) * longrun_sigma0(*cfg.error);

  for (std::size_t idx = 0; idx < cfg.n_list.size(); ++idx) {
    const int n = cfg.n_list[idx];
    const double h = cfg.h_rule.h_for(static_cast<int>(idx), n);
    const double reach = h * cfg.kernel.support_halfwidth;
    const double factor = std::sqrt(h / n);
    const int reps = cfg.replications;
    const std::size_t points = cfg.eval_points.size();

    // b0[t][r] and the squared norm of B_n1 per replication.
    std::vector<std::vector<Eigen::VectorXd>> b0(
        points, std::vector<Eigen::VectorXd>(static_cast<std::size_t>(reps)));
    std::vector<std::vector<double>> b1sq(
        points, std::vector<double>(static_cast<std::size_t>(reps)));
    run_replications(reps, threads, [&](int r) {
      Eigen::MatrixXd noise;
      simulate_into(*cfg.error, n, cfg.base_seed + static_cast<std::uint64_t>(r),
                    noise);
      for (std::size_t ti = 0; ti < points; ++ti) {
        const double t = cfg.eval_points[ti];
        const int lo = std::max(
            0, static_cast<int>(std::floor(n * (t - reach))) - 1);
        const int hi =
            std::min(n - 1, static_cast<int>(std::ceil(n * (t + reach))));
        Eigen::VectorXd s0 = Eigen::VectorXd::Zero(d);
        Eigen::VectorXd s1 = Eigen::VectorXd::Zero(d);
        for (int i = lo; i <= hi; ++i) {
          const double u = static_cast<double>(i + 1) / n - t;
          const double kv = eval_scaled(cfg.kernel, h, u);
          if (kv == 0.0) continue;
          s0 += kv * noise.row(i).transpose();
          s1 += (kv * u) * noise.row(i).transpose();
        }
        b0[ti][static_cast<std::size_t>(r)] = factor * s0;
        b1sq[ti][static_cast<std::size_t>(r)] = (factor * s1).squaredNorm();
      }
    });

    for (std::size_t ti = 0; ti < points; ++ti) {
      CellStats cs;
      cs.n = n;
      cs.h = h;
      cs.t = cfg.eval_points[ti];
      cs.replications = reps;
      cs.b0_cov = sample_covariance(b0[ti]);
      cs.b0_limit = limit;
      KahanSum acc;
      for (double v : b1sq[ti]) acc.add(v);
      cs.b1_mean_sq = acc.value() / reps;
      rep.cells.push_back(std::move(cs));
    }
  }
  return rep;
}

MonteCarloReport run_rate_study(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  if (cfg.study != "rate") {
    throw ConfigError("run_rate_study got a \"" + cfg.study + "\" config");
  }
  MonteCarloReport rep = make_report(cfg, "rate", threads);
  std::vector<double> log_nh, log_rmse;
  for (std::size_t idx = 0; idx < cfg.n_list.size(); ++idx) {
    const int n = cfg.n_list[idx];
    const double h = cfg.h_rule.h_for(static_cast<int>(idx), n);
    const PanelErrors pe = run_panel_replications(cfg, n, h, threads);
    FitConfig fc;
    fc.kernel = cfg.kernel;
    fc.h = h;
    KahanSum total;
    std::size_t count = 0;
    for (std::size_t ti = 0; ti < cfg.eval_points.size(); ++ti) {
      const Eigen::VectorXd bias =
          theoretical_bias(*cfg.curves, fc, cfg.eval_points[ti]);
      KahanSum cell;
      for (const auto& e : pe.err[ti]) cell.add((e - bias).squaredNorm());
      CellStats cs;
      cs.n = n;
      cs.h = h;
      cs.t = cfg.eval_points[ti];
      cs.replications = cfg.replications;
      cs.bias_theory = bias;
      cs.rmse = std::sqrt(cell.value() /
                          (static_cast<double>(pe.err[ti].size()) * bias.size()));
      rep.cells.push_back(std::move(cs));
      total.add(cell.value());
      count += pe.err[ti].size() * static_cast<std::size_t>(bias.size());
    }
    const double rmse = std::sqrt(total.value() / count);
    rep.rmse_by_n.push_back(rmse);
    log_nh.push_back(std::log(n * h));
    log_rmse.push_back(std::log(rmse));
  }

  if (!cfg.error) {
    // Noiseless panels measure only the bias residual; a stochastic-rate
    // slope would be meaningless, so it is skipped and flagged.
    rep.rate_skipped = true;
    return rep;
  }
  const std::size_t m = log_nh.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    mx += log_nh[k];
    my += log_rmse[k];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    sxx += (log_nh[k] - mx) * (log_nh[k] - mx);
    sxy += (log_nh[k] - mx) * (log_rmse[k] - my);
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double resid = log_rmse[k] - fit.intercept - fit.slope * log_nh[k];
    rss += resid * resid;
  }
  fit.stderr_ =
      m > 2 ? std::sqrt(rss / (static_cast<double>(m) - 2.0) / sxx) : 0.0;
  rep.rate = fit;
  return rep;
}

MonteCarloReport run_study(const ExperimentConfig& cfg, int threads) {
  if (cfg.study == "bias") return run_bias_study(cfg, threads);
  if (cfg.study == "clt") return run_clt_study(cfg, threads);
  if (cfg.study == "lemma6") return run_lemma6_study(cfg, threads);
  if (cfg.study == "rate") return run_rate_study(cfg, threads);
  throw ConfigError("unknown study \"" + cfg.study + "\"");
}

std::string MonteCarloReport::to_json() const {
  json j;
  j["study"] = study;
  j["config_hash"] = hash_hex(config_hash);
  j["config"] =
      config_echo.empty() ? json() : json::parse(config_echo);
  json cell_list = json::array();
  for (const auto& cs : cells) {
    json c;
    c["n"] = cs.n;
    c["h"] = cs.h;
    c["t"] = cs.t;
    c["replications"] = cs.replications;
    if (study == "bias") {
      c["mean_error"] = vector_json(cs.mean_error);
      c["bias_theory"] = vector_json(cs.bias_theory);
      c["resid_rms"] = cs.resid_rms;
      c["sqrt_nh_inv"] = 1.0 / std::sqrt(cs.n * cs.h);
    } else if (study == "clt") {
      c["z_cov"] = matrix_json(cs.z_cov);
      c["sigma_theta"] = matrix_json(cs.sigma_theta);
      c["ks"] = cs.ks;
      c["coverage"] = cs.coverage;
      c["skewness"] = cs.skewness;
      c["excess_kurtosis"] = cs.excess_kurtosis;
    } else if (study == "lemma6") {
      c["b0_cov"] = matrix_json(cs.b0_cov);
      c["b0_limit"] = matrix_json(cs.b0_limit);
      c["b1_mean_sq"] = cs.b1_mean_sq;
    } else {
      c["rmse"] = cs.rmse;
    }
    cell_list.push_back(std::move(c));
  }
  j["cells"] = std::move(cell_list);
  if (study == "rate") {
    j["rmse_by_n"] = rmse_by_n;
    j["rate_skipped"] = rate_skipped;
    if (rate) {
      j["rate"] = {{"slope", rate->slope},
                   {"stderr", rate->stderr_},
                   {"intercept", rate->intercept}};
    } else {
      j["rate"] = nullptr;
    }
  }
  return j.dump(2) + "\n";
}

std::string MonteCarloReport::summary_csv() const {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  if (study == "bias") {
    header = {"n", "h", "t", "component", "mean_error", "bias_theory",
              "ratio", "resid_rms"};
    for (const auto& cs : cells) {
      for (Eigen::Index j = 0; j < cs.mean_error.size(); ++j) {
        const double theory = cs.bias_theory(j);
        const double ratio =
            theory != 0.0 ? cs.mean_error(j) / theory
                          : std::numeric_limits<double>::quiet_NaN();
        rows.push_back({static_cast<double>(cs.n), cs.h, cs.t,
                        static_cast<double>(j), cs.mean_error(j), theory,
                        ratio, cs.resid_rms});
      }
    }
  } else if (study == "clt") {
    header = {"n", "h", "t", "component", "z_var", "sigma_theta", "ks",
              "coverage", "skewness", "excess_kurtosis"};
    for (const auto& cs : cells) {
      for (std::size_t j = 0; j < cs.ks.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        rows.push_back({static_cast<double>(cs.n), cs.h, cs.t,
                        static_cast<double>(j), cs.z_cov(jj, jj),
                        cs.sigma_theta(jj, jj), cs.ks[j], cs.coverage[j],
                        cs.skewness[j], cs.excess_kurtosis[j]});
      }
    }
  } else if (study == "lemma6") {
    header = {"n", "h", "t", "row", "col", "b0_cov", "b0_limit",
              "b1_mean_sq"};
    for (const auto& cs : cells) {
      for (Eigen::Index a = 0; a < cs.b0_cov.rows(); ++a) {
        for (Eigen::Index b = 0; b < cs.b0_cov.cols(); ++b) {
          rows.push_back({static_cast<double>(cs.n), cs.h, cs.t,
                          static_cast<double>(a), static_cast<double>(b),
                          cs.b0_cov(a, b), cs.b0_limit(a, b),
                          cs.b1_mean_sq});
        }
      }
    }
  } else {
    // One row per n; cells are laid out n-major, so the first cell of
    // block idx carries that n and h.
    header = {"n", "h", "nh", "rmse"};
    const std::size_t points =
        rmse_by_n.empty() ? 1 : cells.size() / rmse_by_n.size();
    for (std::size_t idx = 0; idx < rmse_by_n.size(); ++idx) {
      const CellStats& cs = cells[idx * points];
      rows.push_back({static_cast<double>(cs.n), cs.h, cs.n * cs.h,
                      rmse_by_n[idx]});
    }
  }
  return rows_to_csv(header, rows);
}

}  // namespace flexseas
