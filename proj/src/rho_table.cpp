#include "drcvar/rho_table.hpp"

#include "drcvar/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace drcvar::auction {

const TableCell& RhoTable::at(std::size_t sigma_index, std::size_t gamma_index, std::size_t eta_index) const {
    const std::size_t index =
        (sigma_index * grid.gamma.size() + gamma_index) * grid.eta_pi.size() + eta_index;
    return cells.at(index);
}

SyntheticSpec cell_spec(const SyntheticSpec& base, double gamma, double sigma) {
    SyntheticSpec spec = base;
    spec.gamma = gamma;
    spec.sigma = sigma;
    return spec;
}

AuctionConfig cell_config(const AuctionConfig& base, double eta_pi) {
    AuctionConfig config = base;
    config.eta_pi = eta_pi;
    return config;
}

RhoTable rho_reduction_table(const SyntheticSpec& base, const AuctionConfig& config, const TableGrid& grid,
                             const CellObserver& observer) {
    if (grid.gamma.empty() || grid.sigma.empty() || grid.eta_pi.empty())
        throw InputError("table grid needs at least one gamma, sigma and eta_pi value");
    const auto baseline = std::find(grid.eta_pi.begin(), grid.eta_pi.end(), 0.0);
    if (baseline == grid.eta_pi.end()) throw InputError("table grid must include eta_pi = 0 as baseline");
    const auto baseline_index = static_cast<std::size_t>(baseline - grid.eta_pi.begin());

    RhoTable table;
    table.grid = grid;
    for (double sigma : grid.sigma) {
        for (double gamma : grid.gamma) {
            const SyntheticSpec spec = cell_spec(base, gamma, sigma);
            const AuctionInstance instance = generate_synthetic(spec);
            std::vector<TableCell> row;
            for (double eta_pi : grid.eta_pi) {
                TableCell cell;
                cell.gamma = gamma;
                cell.sigma = sigma;
                cell.eta_pi = eta_pi;
                const AuctionConfig cfg = cell_config(config, eta_pi);
                try {
                    const AuctionResult result = solve_auction(instance, cfg);
                    cell.status = result.raw.status;
                    if (result.solution) cell.rho = result.solution->rho.at(1);
                    if (observer) observer(cell, spec, cfg, result);
                } catch (const SolveError&) {
                    cell.status = milp::SolveStatus::IterLimit;
                }
                row.push_back(cell);
            }
            const TableCell& base_cell = row[baseline_index];
            const double scale = std::max(1.0, instance.target);
            for (auto& cell : row) {
                if (cell.status != milp::SolveStatus::Solved || base_cell.status != milp::SolveStatus::Solved)
                    continue;
                if (base_cell.rho <= 1e-9 * scale) continue;
                cell.reduction = cell.eta_pi == 0.0 ? 0.0 : 100.0 * (base_cell.rho - cell.rho) / base_cell.rho;
            }
            table.cells.insert(table.cells.end(), row.begin(), row.end());
        }
    }
    return table;
}

namespace {

std::string percent(double fraction) { return fmt::format("{:g}%", 100.0 * fraction); }

std::string cell_text(const TableCell& cell) {
    if (cell.status != milp::SolveStatus::Solved) return milp::to_string(cell.status);
    if (!cell.reduction) return "N/A";
    // Avoid printing -0.0 for reductions that round to zero.
    const double v = std::abs(*cell.reduction) < 0.05 ? 0.0 : *cell.reduction;
    return fmt::format("{:.1f}", v);
}

} // namespace

std::string format_table_markdown(const RhoTable& table) {
    const auto& g = table.grid;
    std::string out = "| sigma \\ eta_pi |";
    for (double gamma : g.gamma)
        for (double eta : g.eta_pi) out += fmt::format(" gamma={} {:.1f} |", percent(gamma), eta);
    out += "\n|---|";
    for (std::size_t c = 0; c < g.gamma.size() * g.eta_pi.size(); ++c) out += "---|";
    out += '\n';
    for (std::size_t s = 0; s < g.sigma.size(); ++s) {
        out += fmt::format("| {} |", percent(g.sigma[s]));
        for (std::size_t gi = 0; gi < g.gamma.size(); ++gi)
            for (std::size_t e = 0; e < g.eta_pi.size(); ++e) out += ' ' + cell_text(table.at(s, gi, e)) + " |";
        out += '\n';
    }
    return out;
}

std::string format_table_csv(const RhoTable& table) {
    std::string out = "gamma,sigma,eta_pi,status,rho,reduction_pct\n";
    for (const auto& cell : table.cells) {
        const std::string reduction = cell.reduction ? fmt::format("{:.12g}", *cell.reduction) : "NA";
        out += fmt::format("{:g},{:g},{:g},{},{:.12g},{}\n", cell.gamma, cell.sigma, cell.eta_pi,
                           milp::to_string(cell.status), cell.rho, reduction);
    }
    return out;
}

} // namespace drcvar::auction
