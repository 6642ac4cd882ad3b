#include "drcvar/cli.hpp"

#include "drcvar/auction_io.hpp"
#include "drcvar/errors.hpp"
#include "drcvar/milp/lp_file.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <set>
#include <toml.hpp>

namespace drcvar::cli {

namespace fs = std::filesystem;

Mode parse_mode(const std::string& text) {
    if (text == "solve") return Mode::Solve;
    if (text == "table") return Mode::Table;
    if (text == "export") return Mode::Export;
    if (text == "calibrate") return Mode::Calibrate;
    throw InputError(fmt::format("unknown mode '{}' (solve, table, export, calibrate)", text));
}

OutputFormat parse_format(const std::string& text) {
    if (text == "csv") return OutputFormat::Csv;
    if (text == "markdown" || text == "md") return OutputFormat::Markdown;
    throw InputError(fmt::format("unknown format '{}' (csv, markdown)", text));
}

void RunConfig::validate() const {
    if (history_path && !instance_path)
        throw InputError("a history path needs an instance file for bids and prices");
    if (mode == Mode::Table && instance_path)
        throw InputError("table mode draws synthetic instances; drop the instance path");
    if (mode == Mode::Table) {
        if (grid.gamma.empty() || grid.sigma.empty() || grid.eta_pi.empty())
            throw InputError("table mode needs nonempty gamma, sigma and eta_pi grids");
        if (std::find(grid.eta_pi.begin(), grid.eta_pi.end(), 0.0) == grid.eta_pi.end())
            throw InputError("the eta_pi grid must contain the 0 baseline");
    }
    if (mode != Mode::Calibrate && out_dir.empty()) throw InputError("output directory is empty");
    risk::Alpha(auction.alpha0);
    risk::Alpha(auction.alpha1);
    if (!(auction.beta >= 0.0 && auction.beta < 1.0)) throw InputError("beta must lie in [0, 1)");
    if (!(auction.eta_pi >= 0.0)) throw InputError("eta_pi must be >= 0");
    if (auction.node_limit < 1) throw InputError("node_limit must be >= 1");
}

namespace {

void check_keys(const toml::table& table, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, node] : table) {
        (void)node;
        if (!allowed.contains(std::string(key.str())))
            throw InputError(fmt::format("{}: unknown key '{}'", where, key.str()));
    }
}

template <typename T>
void read_value(const toml::table& table, const char* key, T& target, const std::string& where) {
    const auto* node = table.get(key);
    if (!node) return;
    if constexpr (std::is_same_v<T, double>) {
        const auto v = node->value<double>();
        if (!v) throw InputError(fmt::format("{}: '{}' must be a number", where, key));
        target = *v;
    } else if constexpr (std::is_same_v<T, bool>) {
        const auto v = node->value<bool>();
        if (!v) throw InputError(fmt::format("{}: '{}' must be a boolean", where, key));
        target = *v;
    } else if constexpr (std::is_integral_v<T>) {
        const auto v = node->value<std::int64_t>();
        if (!v || *v < 0) throw InputError(fmt::format("{}: '{}' must be a nonnegative integer", where, key));
        target = static_cast<T>(*v);
    } else {
        const auto v = node->value<std::string>();
        if (!v) throw InputError(fmt::format("{}: '{}' must be a string", where, key));
        target = *v;
    }
}

void read_list(const toml::table& table, const char* key, std::vector<double>& target, const std::string& where) {
    const auto* node = table.get(key);
    if (!node) return;
    const auto* arr = node->as_array();
    if (!arr) throw InputError(fmt::format("{}: '{}' must be an array", where, key));
    target.clear();
    for (const auto& item : *arr) {
        const auto v = item.value<double>();
        if (!v) throw InputError(fmt::format("{}: '{}' must hold numbers", where, key));
        target.push_back(*v);
    }
}

const toml::table* sub_table(const toml::table& root, const char* key, const std::string& where) {
    const auto* node = root.get(key);
    if (!node) return nullptr;
    const auto* t = node->as_table();
    if (!t) throw InputError(fmt::format("{}: '{}' must be a table", where, key));
    return t;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
    out << text;
    out.flush();
    if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
}

std::string cell_tag(double gamma, double sigma, double eta_pi) {
    return fmt::format("gamma{:g}_sigma{:g}_eta{:g}", gamma, sigma, eta_pi);
}

} // namespace

RunConfig load_config(const fs::path& path) {
    toml::table root;
    try {
        root = toml::parse_file(path.string());
    } catch (const toml::parse_error& e) {
        throw InputError(fmt::format("{}: {}", path.string(), e.description()));
    }
    const std::string where = path.string();
    const fs::path base = path.parent_path();
    auto resolve = [&](const std::string& p) {
        fs::path q(p);
        return q.is_relative() ? base / q : q;
    };

    RunConfig cfg;
    check_keys(root, {"mode", "out", "format", "seed", "cell_artifacts", "instance", "synthetic", "auction",
                      "radius", "grid", "solver"},
               where);
    std::string text;
    if (root.get("mode")) {
        read_value(root, "mode", text, where);
        cfg.mode = parse_mode(text);
    }
    if (root.get("format")) {
        read_value(root, "format", text, where);
        cfg.format = parse_format(text);
    }
    if (root.get("out")) {
        read_value(root, "out", text, where);
        cfg.out_dir = resolve(text);
    }
    std::uint64_t seed = cfg.synthetic.seed;
    read_value(root, "seed", seed, where);
    cfg.synthetic.seed = cfg.auction.seed = seed;
    read_value(root, "cell_artifacts", cfg.cell_artifacts, where);

    if (const auto* t = sub_table(root, "instance", where)) {
        check_keys(*t, {"path", "history"}, where + " [instance]");
        if (t->get("path")) {
            read_value(*t, "path", text, where);
            cfg.instance_path = resolve(text);
        }
        if (t->get("history")) {
            read_value(*t, "history", text, where);
            cfg.history_path = resolve(text);
        }
    }
    if (const auto* t = sub_table(root, "synthetic", where)) {
        check_keys(*t, {"customers", "gamma", "sigma", "samples", "base_min", "base_max", "target_fraction"},
                   where + " [synthetic]");
        read_value(*t, "customers", cfg.synthetic.customers, where);
        read_value(*t, "gamma", cfg.synthetic.gamma, where);
        read_value(*t, "sigma", cfg.synthetic.sigma, where);
        read_value(*t, "samples", cfg.synthetic.samples, where);
        read_value(*t, "base_min", cfg.synthetic.base_min, where);
        read_value(*t, "base_max", cfg.synthetic.base_max, where);
        read_value(*t, "target_fraction", cfg.synthetic.target_fraction, where);
    }
    if (const auto* t = sub_table(root, "auction", where)) {
        check_keys(*t, {"alpha0", "alpha1", "eta_pi", "support_margin"}, where + " [auction]");
        read_value(*t, "alpha0", cfg.auction.alpha0, where);
        read_value(*t, "alpha1", cfg.auction.alpha1, where);
        read_value(*t, "eta_pi", cfg.auction.eta_pi, where);
        read_value(*t, "support_margin", cfg.auction.support_margin, where);
    }
    if (const auto* t = sub_table(root, "radius", where)) {
        check_keys(*t, {"beta", "c", "epsilon", "xi_max"}, where + " [radius]");
        read_value(*t, "beta", cfg.auction.beta, where);
        read_value(*t, "xi_max", cfg.auction.xi_max, where);
        if (t->get("c")) {
            double c = 0.0;
            read_value(*t, "c", c, where);
            cfg.auction.c_override = c;
        }
        if (t->get("epsilon")) {
            double eps = 0.0;
            read_value(*t, "epsilon", eps, where);
            cfg.auction.epsilon_override = eps;
        }
    }
    if (const auto* t = sub_table(root, "solver", where)) {
        check_keys(*t, {"node_limit"}, where + " [solver]");
        read_value(*t, "node_limit", cfg.auction.node_limit, where);
    }
    if (const auto* t = sub_table(root, "grid", where)) {
        check_keys(*t, {"gamma", "sigma", "eta_pi"}, where + " [grid]");
        read_list(*t, "gamma", cfg.grid.gamma, where);
        read_list(*t, "sigma", cfg.grid.sigma, where);
        read_list(*t, "eta_pi", cfg.grid.eta_pi, where);
    }
    return cfg;
}

auction::AuctionInstance resolve_instance(const RunConfig& config) {
    if (!config.instance_path) return auction::generate_synthetic(config.synthetic);
    auction::AuctionInstance inst = auction::read_instance_toml(*config.instance_path);
    if (config.history_path) {
        inst.deviations = auction::read_history_csv(*config.history_path);
        inst.validate();
    }
    return inst;
}

std::string solution_report(const auction::AuctionResult& result) {
    const auto& terms = result.problem.terms;
    std::string out;
    out += fmt::format("eta = {:.12g}\n", result.problem.eta);
    out += fmt::format("beta = {:.12g}\n", result.calibration.radius.beta);
    out += fmt::format("C = {:.12g}\n", result.calibration.radius.c_constant);
    out += fmt::format("nodes = {}\n", result.raw.nodes);
    if (!result.solution) return out + fmt::format("status = {}\n", milp::to_string(result.raw.status));
    return out + cocontrol::format_report(*result.solution, terms, result.calibration.radius);
}

namespace {

int run_solve(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const auto instance = resolve_instance(config);
    const auto result = auction::solve_auction(instance, config.auction);
    for (const auto& w : result.problem.warnings) err << "warning: " << w << '\n';
    ensure_dir(config.out_dir);
    const fs::path report = config.out_dir / "solution.txt";
    write_text(report, solution_report(result));
    if (!result.solution) {
        err << "error: solve failed with status " << milp::to_string(result.raw.status) << '\n';
        return kExitSolveFailure;
    }
    out << "objective = " << fmt::format("{:.12g}", result.solution->objective) << '\n';
    out << "wrote " << report.string() << '\n';
    return kExitOk;
}

int run_export(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const auto instance = resolve_instance(config);
    const auto problem = auction::build_auction_problem(instance, config.auction);
    for (const auto& w : problem.warnings) err << "warning: " << w << '\n';
    const auto cal = auction::calibrate(problem, config.auction);
    const auto model = cocontrol::build_cocontrol_lp(problem.terms, cal.radius, problem.decision);
    ensure_dir(config.out_dir);
    const fs::path path = config.out_dir / "model.lp";
    milp::write_lp_file(model.lp, path);
    out << "wrote " << path.string() << " (" << model.lp.column_count() << " columns, "
        << model.lp.row_count() << " rows)\n";
    return kExitOk;
}

int run_calibrate(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const auto instance = resolve_instance(config);
    const auto problem = auction::build_auction_problem(instance, config.auction);
    for (const auto& w : problem.warnings) err << "warning: " << w << '\n';
    const auto cal = auction::calibrate(problem, config.auction);
    for (std::size_t i = 0; i < cal.c_per_term.size(); ++i)
        out << fmt::format("C.term.{} = {:.12g}\n", i, cal.c_per_term[i]);
    out << fmt::format("K = {}\n", problem.terms.front().samples.sample_count());
    out << fmt::format("beta = {:.12g}\n", cal.radius.beta);
    out << fmt::format("C = {:.12g}\n", cal.radius.c_constant);
    out << fmt::format("epsilon = {:.12g}\n", cal.radius.epsilon);
    return kExitOk;
}

int run_table(const RunConfig& config, std::ostream& out, std::ostream&) {
    ensure_dir(config.out_dir);
    auction::CellObserver observer;
    if (config.cell_artifacts) {
        observer = [&](const auction::TableCell& cell, const auction::SyntheticSpec&, const auction::AuctionConfig&,
                       const auction::AuctionResult& result) {
            const fs::path dir = config.out_dir / "cells" / cell_tag(cell.gamma, cell.sigma, cell.eta_pi);
            ensure_dir(dir);
            write_text(dir / "solution.txt", solution_report(result));
            milp::write_lp_file(result.model.lp, dir / "model.lp");
        };
    }
    const auto table = auction::rho_reduction_table(config.synthetic, config.auction, config.grid, observer);
    const bool csv = config.format == OutputFormat::Csv;
    const fs::path path = config.out_dir / (csv ? "rho_table.csv" : "rho_table.md");
    write_text(path, csv ? auction::format_table_csv(table) : auction::format_table_markdown(table));
    out << "wrote " << path.string() << '\n';
    for (const auto& cell : table.cells)
        if (cell.status != milp::SolveStatus::Solved) return kExitSolveFailure;
    return kExitOk;
}

} // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        config.validate();
        switch (config.mode) {
        case Mode::Solve: return run_solve(config, out, err);
        case Mode::Export: return run_export(config, out, err);
        case Mode::Calibrate: return run_calibrate(config, out, err);
        case Mode::Table: return run_table(config, out, err);
        }
    } catch (const InputError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const IoError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const BuildError& e) {
        err << "build error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const SolveError& e) {
        err << "solve error: " << e.what() << '\n';
        return kExitSolveFailure;
    }
    return kExitConfigError;
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Distributionally robust CVaR/VaR co-control for demand-response reverse auctions"};
    std::string mode;
    std::string config_path;
    std::string out_dir;
    std::string format;
    std::string instance;
    std::string history;
    std::optional<std::uint64_t> seed;
    std::optional<double> beta;
    std::optional<double> epsilon;
    std::optional<double> c_constant;
    std::optional<int> samples;
    std::optional<int> customers;
    std::optional<long> node_limit;
    std::vector<double> eta_pi;
    std::vector<double> gamma;
    std::vector<double> sigma;
    bool cell_artifacts = false;

    app.add_option("--mode", mode, "solve | table | export | calibrate");
    app.add_option("--config", config_path, "TOML run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "master random seed");
    app.add_option("--beta", beta, "radius confidence parameter in [0, 1)");
    app.add_option("--epsilon", epsilon, "Wasserstein radius; bypasses calibration");
    app.add_option("--c-constant", c_constant, "radius constant C; skips estimation");
    app.add_option("--eta-pi", eta_pi, "penalty fraction(s); a list in table mode")->delimiter(',');
    app.add_option("--gamma", gamma, "bid fraction(s); a list in table mode")->delimiter(',');
    app.add_option("--sigma", sigma, "deviation fraction(s); a list in table mode")->delimiter(',');
    app.add_option("--format", format, "table format: csv | markdown");
    app.add_option("--instance", instance, "instance TOML file");
    app.add_option("--history", history, "history CSV overriding the instance's");
    app.add_option("--samples", samples, "synthetic sample count K");
    app.add_option("--customers", customers, "synthetic customer count N");
    app.add_option("--node-limit", node_limit, "branch-and-bound node budget")->check(CLI::PositiveNumber);
    app.add_flag("--cell-artifacts", cell_artifacts, "table mode: write per-cell LP files and reports");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = load_config(config_path);
        if (!mode.empty()) cfg.mode = parse_mode(mode);
        if (!format.empty()) cfg.format = parse_format(format);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!instance.empty()) cfg.instance_path = instance;
        if (!history.empty()) cfg.history_path = history;
        if (seed) cfg.synthetic.seed = cfg.auction.seed = *seed;
        if (beta) cfg.auction.beta = *beta;
        if (epsilon) cfg.auction.epsilon_override = *epsilon;
        if (c_constant) cfg.auction.c_override = *c_constant;
        if (samples) cfg.synthetic.samples = *samples;
        if (customers) cfg.synthetic.customers = *customers;
        if (node_limit) cfg.auction.node_limit = *node_limit;
        if (cell_artifacts) cfg.cell_artifacts = true;
        auto apply = [&](const std::vector<double>& values, double& scalar, std::vector<double>& list,
                         const char* flag) {
            if (values.empty()) return;
            if (cfg.mode == Mode::Table) {
                list = values;
            } else {
                if (values.size() != 1) throw InputError(fmt::format("{} takes one value outside table mode", flag));
                scalar = values.front();
            }
        };
        apply(eta_pi, cfg.auction.eta_pi, cfg.grid.eta_pi, "--eta-pi");
        apply(gamma, cfg.synthetic.gamma, cfg.grid.gamma, "--gamma");
        apply(sigma, cfg.synthetic.sigma, cfg.grid.sigma, "--sigma");
    } catch (const InputError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    }
    return run(cfg, out, err);
}

} // namespace drcvar::cli
