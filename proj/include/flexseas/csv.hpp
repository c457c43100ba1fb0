#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "flexseas/estimator.hpp"
#include "flexseas/model.hpp"

namespace flexseas {

/// Shortest round-trip decimal rendering (std::to_chars).
std::string format_double(double x);

/// Panel layout: header "t,season_1,...,season_d", one row per time point,
/// t = (i+1)/n in the first column.
std::string panel_to_csv(const SeasonalPanel& panel);
SeasonalPanel panel_from_csv(const std::string& text);

/// Fit layout: header
/// "t,alpha_hat,beta_1_hat,...,beta_d_hat,alpha_prime_hat,beta_1_prime_hat,...".
std::string fits_to_csv(const std::vector<FitResult>& fits, int d);

/// Generic helper used by the Monte Carlo summary writers.
std::string rows_to_csv(const std::vector<std::string>& header,
                        const std::vector<std::vector<double>>& rows);

}  // namespace flexseas
