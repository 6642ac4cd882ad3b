#pragma once

#include "drcvar/auction.hpp"
#include "drcvar/milp/solution.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace drcvar::auction {

struct TableGrid {
    std::vector<double> gamma;
    std::vector<double> sigma;
    std::vector<double> eta_pi; // must contain 0, the baseline
};

struct TableCell {
    double gamma = 0.0;
    double sigma = 0.0;
    double eta_pi = 0.0;
    milp::SolveStatus status = milp::SolveStatus::IterLimit;
    double rho = 0.0;
    /// 100 * (rho(0) - rho) / rho(0); empty when the baseline rho is zero or
    /// either solve failed.
    std::optional<double> reduction;
};

struct RhoTable {
    TableGrid grid;
    std::vector<TableCell> cells; // sigma-major, then gamma, then eta_pi

    const TableCell& at(std::size_t sigma_index, std::size_t gamma_index, std::size_t eta_index) const;
};

/// Receives every solved cell with its full result, e.g. to write artifacts.
using CellObserver = std::function<void(const TableCell&, const SyntheticSpec&, const AuctionConfig&,
                                        const AuctionResult&)>;

/// Synthetic spec and config for one cell; everything except gamma, sigma and
/// eta_pi comes from the base values.
SyntheticSpec cell_spec(const SyntheticSpec& base, double gamma, double sigma);
AuctionConfig cell_config(const AuctionConfig& base, double eta_pi);

/// For each (gamma, sigma): generate the instance, solve once per eta_pi and
/// report the percent decrease of the shortfall slack rho against eta_pi = 0.
/// A failed solve marks its cell and the run continues.
RhoTable rho_reduction_table(const SyntheticSpec& base, const AuctionConfig& config, const TableGrid& grid,
                             const CellObserver& observer = {});

/// One row per sigma, one column per (gamma, eta_pi), reductions to 0.1.
std::string format_table_markdown(const RhoTable& table);
/// Long form: gamma,sigma,eta_pi,status,rho,reduction_pct
std::string format_table_csv(const RhoTable& table);

} // namespace drcvar::auction
