// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "drcvar/auction.hpp"
#include "drcvar/milp/simplex.hpp"
#include "drcvar/rho_table.hpp"
#include "drcvar/risk_core.hpp"
#include "drcvar/wasserstein.hpp"
#include "support/instances.hpp"

#include <bit>
#include <chrono>
#include <cstdio>
#include <fmt/format.h>
#include <functional>
#include <random>

using namespace drcvar;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Collects |z + rho - b| over every solved instance of the run.
struct IdentityLog {
    long checked = 0;
    long failed = 0;
    double worst = 0.0;

    void record(const std::vector<cocontrol::RiskTerm>& terms, const std::vector<double>& z,
                const std::vector<double>& rho) {
        for (std::size_t i = 1; i < terms.size(); ++i) {
            const double b = *terms[i].bound;
            const double scaled = std::abs(z[i] + rho[i] - b) / std::max(1.0, std::abs(b));
            worst = std::max(worst, scaled);
            ++checked;
            if (scaled > 1e-8) ++failed;
        }
    }
    void record(const std::vector<cocontrol::RiskTerm>& terms, const cocontrol::CoControlSolution& s) {
        record(terms, s.z, s.rho);
    }
};

IdentityLog identity;

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int number, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = Clock::now();
    Outcome o = body();
    const double t = seconds_since(t0);
    const bool in_time = limit_s <= 0.0 || t < limit_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::string timing = limit_s > 0.0 ? fmt::format("{:.1f} s, limit {:.0f} s", t, limit_s) : fmt::format("{:.1f} s", t);
    std::printf("%s %d %s: %s (%s)\n", pass ? "PASS" : "FAIL", number, name.c_str(), o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
}

Outcome cvar_oracle() {
    std::mt19937_64 rng(1001);
    std::uniform_int_distribution<int> size(1, 500);
    std::normal_distribution<double> normal(0.0, 5.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    int checks = 0;
    for (int set = 0; set < 200; ++set) {
        std::vector<double> v(static_cast<std::size_t>(size(rng)));
        for (double& x : v) x = set % 4 == 0 ? std::round(normal(rng)) : (set % 4 == 1 ? std::exp(unit(rng) * 4) : normal(rng));
        const risk::EmpiricalSamples1D s(v);
        for (double a : {0.5, 0.9, 0.95}) {
            worst = std::max(worst, std::abs(risk::empirical_cvar(s, risk::Alpha(a)).cvar - oracle::cvar_sorted_tail(v, a)));
            ++checks;
        }
    }
    return {worst <= 1e-9, fmt::format("max |error| {:.2e} over {} set/alpha pairs", worst, checks)};
}

Outcome saa_reduction() {
    std::mt19937_64 rng(1002);
    std::uniform_int_distribution<int> dim(1, 5);
    std::uniform_int_distribution<int> count(5, 50);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    int bad_status = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto inst = fixture::random_instance(rng, dim(rng), count(rng), 0.9 * unit(rng));
        const auto model = cocontrol::build_cocontrol_lp(inst.terms, {0.0, 0.0, 0.0}, inst.decision);
        const auto raw = cocontrol::solve_model(model);
        const auto ref = fixture::solve_saa_oracle(inst);
        if (raw.status != milp::SolveStatus::Solved || ref.status != oracle::TableauStatus::Optimal) {
            ++bad_status;
            continue;
        }
        const auto sol = cocontrol::extract_solution(model, raw, inst.terms);
        identity.record(inst.terms, sol);
        worst = std::max(worst, rel_diff(sol.objective, ref.objective));
    }
    return {worst <= 1e-6 && bad_status == 0,
            fmt::format("max relative gap {:.2e} on 50 instances, {} unsolved", worst, bad_status)};
}

auction::SyntheticSpec synthetic(int customers, int samples, double gamma, double sigma, std::uint64_t seed) {
    auction::SyntheticSpec s;
    s.customers = customers;
    s.samples = samples;
    s.gamma = gamma;
    s.sigma = sigma;
    s.seed = seed;
    return s;
}

// Every binary assignment, visited in Gray-code order so consecutive LPs
// differ in one bound and each warm-starts from the previous basis.
double enumerate_subsets(const cocontrol::CoControlLp& model, const std::vector<cocontrol::RiskTerm>& terms,
                         int& unsolved) {
    milp::LpModel lp = model.lp;
    const auto& ys = model.layout.y;
    for (int y : ys) lp.set_bounds(y, 0.0, 0.0);
    milp::SimplexOptions opt;
    opt.presolve = false;
    milp::Basis basis;
    double best = std::numeric_limits<double>::infinity();
    const unsigned count = 1u << ys.size();
    for (unsigned i = 0; i < count; ++i) {
        if (i > 0) {
            const int bit = std::countr_zero(i);
            const unsigned gray = i ^ (i >> 1);
            const double v = (gray >> bit) & 1u ? 1.0 : 0.0;
            lp.set_bounds(ys[static_cast<std::size_t>(bit)], v, v);
        }
        auto s = milp::solve_lp(lp, opt, basis.empty() ? nullptr : &basis);
        if (s.status != milp::SolveStatus::Solved) {
            s = milp::solve_lp(lp);
            if (s.status != milp::SolveStatus::Solved) {
                ++unsolved;
                basis = {};
                continue;
            }
        }
        std::vector<double> z, rho;
        for (std::size_t t = 0; t < terms.size(); ++t) {
            z.push_back(s.values[static_cast<std::size_t>(model.layout.z[t])]);
            rho.push_back(model.layout.rho[t] < 0 ? 0.0 : s.values[static_cast<std::size_t>(model.layout.rho[t])]);
        }
        identity.record(terms, z, rho);
        best = std::min(best, s.objective);
        basis = std::move(s.basis);
    }
    return best;
}

Outcome milp_exactness() {
    std::mt19937_64 rng(1003);
    const double levels[] = {0.1, 0.2, 0.3};
    const double etas[] = {0.0, 0.5, 1.0};
    double worst = 0.0;
    int unsolved = 0;
    for (int trial = 0; trial < 25; ++trial) {
        const int k = 8 + trial % 5;
        const auto inst = auction::generate_synthetic(
            synthetic(10, k, levels[trial % 3], levels[(trial / 3) % 3], 500 + static_cast<std::uint64_t>(trial)));
        auction::AuctionConfig cfg;
        cfg.eta_pi = etas[(trial / 9) % 3];
        const auto r = auction::solve_auction(inst, cfg);
        if (!r.solution) {
            ++unsolved;
            continue;
        }
        identity.record(r.problem.terms, *r.solution);
        const double best = enumerate_subsets(r.model, r.problem.terms, unsolved);
        worst = std::max(worst, rel_diff(r.solution->objective, best));
    }
    return {worst <= 1e-6 && unsolved == 0,
            fmt::format("max relative gap {:.2e} on 25 instances (N = 10, K = 8..12, calibrated radius), {} unsolved",
                        worst, unsolved)};
}

Outcome identity_check() {
    return {identity.checked > 0 && identity.failed == 0,
            fmt::format("{} constrained terms checked, worst scaled residual {:.2e}, {} above 1e-8", identity.checked,
                        identity.worst, identity.failed)};
}

constexpr int kTableSamples = 30;

Outcome table_trend() {
    auction::SyntheticSpec base;
    base.samples = kTableSamples;
    auction::AuctionConfig cfg;
    const auction::TableGrid grid{{0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}, {0.0, 0.5, 1.0}};
    const auto table = auction::rho_reduction_table(
        base, cfg, grid,
        [](const auction::TableCell&, const auction::SyntheticSpec&, const auction::AuctionConfig&,
           const auction::AuctionResult& r) {
            if (r.solution) identity.record(r.problem.terms, *r.solution);
        });
    int zero_col_bad = 0, strong_bad = 0, monotone_bad = 0, unsolved = 0, informative = 0;
    double weakest = 100.0;
    for (std::size_t s = 0; s < 3; ++s) {
        for (std::size_t g = 0; g < 3; ++g) {
            for (std::size_t e = 0; e < 3; ++e)
                if (table.at(s, g, e).status != milp::SolveStatus::Solved) ++unsolved;
            const auto& base_cell = table.at(s, g, 0);
            if (!base_cell.reduction || *base_cell.reduction != 0.0) ++zero_col_bad;
            if (!base_cell.reduction) continue;
            ++informative;
            const auto& top = table.at(s, g, 2);
            if (!top.reduction || *top.reduction < 99.0) ++strong_bad;
            if (top.reduction) weakest = std::min(weakest, *top.reduction);
            for (std::size_t e = 1; e < 3; ++e) {
                const auto& lo = table.at(s, g, e - 1);
                const auto& hi = table.at(s, g, e);
                if (!lo.reduction || !hi.reduction || *hi.reduction < *lo.reduction) ++monotone_bad;
            }
        }
    }
    std::fputs(auction::format_table_markdown(table).c_str(), stderr);
    const bool pass = zero_col_bad == 0 && strong_bad == 0 && monotone_bad == 0 && unsolved == 0;
    return {pass, fmt::format("K = {}: {} cells with nonzero baseline, (a) {} bad baseline cells, (b) min reduction at "
                              "eta_pi = 1.0 is {:.1f}%, (c) {} monotonicity breaks, {} unsolved",
                              kTableSamples, informative, zero_col_bad, weakest, monotone_bad, unsolved)};
}

Outcome radius_formulas() {
    bool exact = true;
    double worst_ratio = 0.0;
    for (Eigen::Index k : {1, 2, 3, 10, 17, 100, 1000, 12345}) {
        for (double beta : {0.5, 0.9, 0.95, 0.99}) {
            for (double c : {0.1, 1.0, 7.5}) {
                if (wasserstein::radius(k, 0.0, c).epsilon != 0.0) exact = false;
                const double e1 = wasserstein::radius(k, beta, c).epsilon;
                const double e2 = wasserstein::radius(2 * k, beta, c).epsilon;
                worst_ratio = std::max(worst_ratio, std::abs(e2 * std::sqrt(2.0) - e1) / e1);
            }
        }
    }
    std::mt19937_64 rng(1006);
    double worst_c = 0.0;
    for (int set = 0; set < 20; ++set) {
        const int k = 10 + 9 * set;
        const int n = 1 + set % 6;
        Eigen::MatrixXd data = fixture::uniform_matrix(rng, k, n, -1.0, 1.0) * (0.2 + set);
        const double c = wasserstein::estimate_c(SampleSet(data));
        const double grid = oracle::c_grid_scan(data, 1e-8, 1e6, 10000);
        worst_c = std::max(worst_c, std::abs(c - grid) / grid);
    }
    const bool pass = exact && worst_ratio <= 4.0 * std::numeric_limits<double>::epsilon() && worst_c <= 1e-4;
    return {pass, fmt::format("beta = 0 gives 0: {}, worst sqrt(2) halving error {:.1e}, worst estimate_c vs grid {:.1e} "
                              "on 20 sets",
                              exact ? "yes" : "no", worst_ratio, worst_c)};
}

Outcome chance_constraint() {
    const double levels[] = {0.1, 0.2, 0.3};
    int solved = 0, violations = 0, unsolved = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 27; ++trial) {
        const auto inst = auction::generate_synthetic(
            synthetic(10, 30, levels[trial % 3], levels[(trial / 3) % 3], 700 + static_cast<std::uint64_t>(trial / 9)));
        auction::AuctionConfig cfg;
        cfg.epsilon_override = 0.0;
        cfg.eta_pi = std::array{0.0, 0.5, 1.0}[static_cast<std::size_t>(trial / 9)];
        const auto r = auction::solve_auction(inst, cfg);
        if (!r.solution) {
            ++unsolved;
            continue;
        }
        ++solved;
        identity.record(r.problem.terms, *r.solution);
        const double rate = cocontrol::violation_rate(*r.solution, r.problem.terms, 1);
        worst = std::max(worst, rate);
        if (rate > 1.0 - cfg.alpha1 + 1e-12) {
            ++violations;
            std::fprintf(stderr, "criterion 7: instance %d eta_pi %.1f shortfall frequency %.3f rho %.3g\n", trial,
                         cfg.eta_pi, rate, r.solution->rho[1]);
        }
    }
    return {violations == 0 && unsolved == 0,
            fmt::format("{} auction optima at eps = 0, {} with shortfall frequency above 1 - alpha1 = 0.1 (worst {:.3f}), "
                        "{} unsolved",
                        solved, violations, worst, unsolved)};
}

Outcome robustness_monotonicity() {
    int breaks = 0, instances = 0, unsolved = 0;
    double worst_drop = 0.0;
    auto check = [&](const std::array<double, 3>& objectives) {
        ++instances;
        for (std::size_t i = 1; i < 3; ++i) {
            const double drop = (objectives[i - 1] - objectives[i]) / std::max(1.0, std::abs(objectives[i - 1]));
            worst_drop = std::max(worst_drop, drop);
            if (drop > 1e-8) ++breaks;
        }
    };
    for (int trial = 0; trial < 8; ++trial) {
        const auto inst = auction::generate_synthetic(
            synthetic(10, 12 + trial, 0.1 + 0.1 * (trial % 3), 0.1 + 0.1 * (trial % 2), 900 + static_cast<std::uint64_t>(trial)));
        auction::AuctionConfig cfg;
        cfg.eta_pi = 0.25 * (trial % 3);
        const auto problem = auction::build_auction_problem(inst, cfg);
        const double eps1 = auction::calibrate(problem, cfg).radius.epsilon;
        std::array<double, 3> obj{};
        bool ok = true;
        for (std::size_t i = 0; i < 3; ++i) {
            cfg.epsilon_override = static_cast<double>(i) * eps1;
            const auto r = auction::solve_auction(inst, cfg);
            if (!r.solution) {
                ok = false;
                break;
            }
            identity.record(r.problem.terms, *r.solution);
            obj[i] = r.solution->objective;
        }
        if (ok) check(obj);
        else ++unsolved;
    }
    std::mt19937_64 rng(1008);
    for (int trial = 0; trial < 16; ++trial) {
        const auto inst = fixture::random_instance(rng, 1 + trial % 5, 10 + 2 * trial, 0.05 * trial);
        double c = 0.0;
        for (const auto& t : inst.terms) c = std::max(c, wasserstein::estimate_c(t.samples));
        const double eps1 = wasserstein::radius(inst.terms[0].samples.sample_count(), 0.95, c).epsilon;
        std::array<double, 3> obj{};
        bool ok = true;
        for (std::size_t i = 0; i < 3; ++i) {
            const auto model = cocontrol::build_cocontrol_lp(inst.terms, {0.95, c, static_cast<double>(i) * eps1},
                                                             inst.decision);
            const auto raw = cocontrol::solve_model(model);
            if (raw.status != milp::SolveStatus::Solved) {
                ok = false;
                break;
            }
            const auto sol = cocontrol::extract_solution(model, raw, inst.terms);
            identity.record(inst.terms, sol);
            obj[i] = sol.objective;
        }
        if (ok) check(obj);
        else ++unsolved;
    }
    return {breaks == 0 && unsolved == 0,
            fmt::format("{} instances x eps in {{0, eps1, 2 eps1}}: {} decreases beyond 1e-8 (worst {:.1e}), {} unsolved",
                        instances, breaks, worst_drop, unsolved)};
}

} // namespace

int main() {
    report(1, "CVaR oracle equivalence", 5.0, cvar_oracle);
    report(2, "SAA reduction", 60.0, saa_reduction);
    report(3, "MILP exactness", 600.0, milp_exactness);
    report(5, "table trend", 900.0, table_trend);
    report(6, "radius formulas", 0.0, radius_formulas);
    report(7, "empirical chance constraint", 0.0, chance_constraint);
    report(8, "robustness monotonicity", 0.0, robustness_monotonicity);
    // Last, since it covers every solve above.
    report(4, "slack identity z + rho = b", 0.0, identity_check);
    return failures == 0 ? 0 : 1;
}
