#pragma once

#include "drcvar/auction.hpp"

#include <Eigen/Dense>
#include <filesystem>
#include <string>

namespace drcvar::auction {

/// Parses a deviation history. Accepted headers:
///   customer,call,scheduled,actual   (delta = scheduled - actual)
///   customer,call,delta
/// Customer and call ids are integers; sorted customer ids become columns
/// and sorted call ids rows. Every (customer, call) pair must appear once.
Eigen::MatrixXd parse_history_csv(const std::string& text);
Eigen::MatrixXd read_history_csv(const std::filesystem::path& path);

/// Writes the `customer,call,delta` form with 0-based ids.
std::string format_history_csv(const Eigen::MatrixXd& deviations);

/// Instance file (TOML):
///   D_t = 12.5
///   [customers]
///   r  = [...]
///   pi = [...]
///   [history]
///   path = "history.csv"   # relative to the instance file
AuctionInstance read_instance_toml(const std::filesystem::path& path);

} // namespace drcvar::auction
