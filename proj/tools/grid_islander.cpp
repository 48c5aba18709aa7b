// grid_islander: split a power grid into islands by node migration.

#include <CLI11.hpp>
#include <cstdlib>
#include <fmt/format.h>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>
#include <string>

#include "islander/analysis.hpp"
#include "islander/errors.hpp"
#include "islander/initpart.hpp"
#include "islander/io.hpp"
#include "islander/migration.hpp"
#include "islander/report.hpp"

namespace {

using namespace islander;
using ojson = nlohmann::ordered_json;

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("grid_islander");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("%^%l%$: %v");
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("GRID_ISLANDER_LOG")) {
        const auto level = spdlog::level::from_str(env);
        // from_str maps unknown names to off
        if (level == spdlog::level::off && std::string(env) != "off")
            spdlog::warn("GRID_ISLANDER_LOG={} is not a log level; keeping warn", env);
        else
            spdlog::set_level(level);
    }
}

Grid read_grid(const std::string& path) {
    Grid grid = load_grid(path);
    for (const auto& w : grid.warnings()) spdlog::info("{}", w);
    spdlog::info("{}: {} buses, {} lines, {} generators", path, grid.size(), grid.edge_count(),
                 grid.generator_count());
    return grid;
}

struct InitSource {
    std::string partition;
    std::string cut_set;
    std::string groups;
    std::optional<std::uint64_t> seed;

    void add_to(CLI::App* cmd) {
        auto* group = cmd->add_option_group("initial partition", "exactly one source of the initial partition");
        group->add_option("--init-partition", partition, "partition JSON {\"0\": [bus, ...], ...}");
        group->add_option("--init-cut-set", cut_set, "cut-set file, one i-j line per edge");
        group->add_option("--init-groups", groups, "generator groups JSON, seeded by tree growth and BFS");
        group->add_option("--init-random-seed", seed, "random connected partition with this seed");
        group->require_option(1);
    }

    Partition make(const Grid& grid, std::optional<std::size_t> n_mu) const {
        if (seed) {
            if (!n_mu) throw InputError("--init-random-seed needs --n-mu");
            return random_partition(grid, *n_mu, *seed);
        }
        Partition part = [&] {
            if (!partition.empty()) return load_partition(grid, partition);
            if (!cut_set.empty()) return from_cut_set(grid, load_cut_set(cut_set));
            return ssrp_bfs(grid, parse_groups(grid, read_text_file(groups)));
        }();
        if (n_mu && *n_mu != part.island_count())
            throw InputError(fmt::format("--n-mu {} but the initial partition has {} islands", *n_mu,
                                         part.island_count()));
        return part;
    }

    ojson describe() const {
        if (seed) return {{"kind", "random"}, {"seed", *seed}};
        if (!partition.empty()) return {{"kind", "partition"}, {"path", partition}};
        if (!cut_set.empty()) return {{"kind", "cut-set"}, {"path", cut_set}};
        return {{"kind", "groups"}, {"path", groups}};
    }
};

const std::map<std::string, EstimatorMode> kEstimators{
    {"simulate", EstimatorMode::simulate}, {"closed-form", EstimatorMode::closed_form}, {"exact", EstimatorMode::exact}};
const std::map<std::string, Integrator> kIntegrators{{"euler", Integrator::euler}, {"rk4", Integrator::rk4}};

void write_trace(const Grid& grid, const TraceSink& trace, const std::string& path) {
    std::string out = "run,t,node,x,xdot\n";
    for (const auto& r : trace.rows) out += fmt::format("{},{},{},{},{}\n", r.run, r.t, grid.label(r.node), r.x, r.xdot);
    write_text_file(path, out);
}

int cmd_import(const std::string& in, const std::string& out) {
    const Grid grid = read_grid(in);
    save_grid(grid, out);
    fmt::print("wrote {} ({} buses, {} lines)\n", out, grid.size(), grid.edge_count());
    return 0;
}

struct RunArgs {
    std::string grid;
    std::optional<std::size_t> n_mu;
    InitSource init;
    std::string estimator = "simulate";
    bool exact_imbalance = false;
    std::string integrator = "euler";
    RunOptions opts;
    std::optional<std::size_t> step_cap;
    bool no_zero_power = false;
    std::string report;
    std::string trajectory;
    std::string trace_csv;
    std::size_t trace_every = 1;
};

int cmd_run(RunArgs& a) {
    const Grid grid = read_grid(a.grid);
    const Partition init = a.init.make(grid, a.n_mu);

    RunOptions opts = a.opts;
    opts.estimator = a.exact_imbalance ? EstimatorMode::exact : kEstimators.at(a.estimator);
    opts.integrator.method = kIntegrators.at(a.integrator);
    opts.step_cap = a.step_cap;
    opts.zero_power_moves = !a.no_zero_power;
    TraceSink trace;
    trace.every = a.trace_every;
    if (!a.trace_csv.empty()) opts.integrator.trace = &trace;

    const RunReport report = run(grid, init, opts);

    if (!a.report.empty()) {
        ojson options{{"grid", a.grid},
                      {"n_mu", init.island_count()},
                      {"init", a.init.describe()},
                      {"estimator", to_string(opts.estimator)},
                      {"integrator", a.integrator},
                      {"dt", opts.integrator.dt},
                      {"eps_ss", opts.integrator.eps_ss},
                      {"eps_dis", opts.integrator.eps_dis},
                      {"eps_sing", opts.eps_sing},
                      {"tolerance", opts.tolerance},
                      {"step_cap", opts.step_cap.value_or(50 * grid.size())},
                      {"zero_power_moves", opts.zero_power_moves}};
        write_text_file(a.report, report_to_json(grid, report, options.dump()));
    }
    if (!a.trajectory.empty()) write_text_file(a.trajectory, trajectory_csv(report));
    if (!a.trace_csv.empty()) write_trace(grid, trace, a.trace_csv);

    fmt::print("K = {} ({})\n", report.steps(), to_string(report.termination));
    fmt::print("J(0) = {:.4f} MW\nJ(K) = {:.4f} MW\nJ*   = {:.4f} MW\n", report.initial_cost(), report.final_cost(),
               report.cost_star);
    fmt::print("P(K) =");
    for (double v : report.final_imbalance().values) fmt::print(" {:.4f}", v);
    fmt::print("\nbound = {:.4f} MW, gap = {:.4f} MW, satisfied = {}\n", report.bound.bound, report.bound.gap,
               report.bound.satisfied);
    fmt::print("cut-set:");
    for (const Edge& e : report.cut_set_final) fmt::print(" {}", format_edge(grid, e));
    fmt::print("\n");
    return 0;
}

int cmd_bound(const std::string& path, std::size_t n_mu) {
    const Grid grid = read_grid(path);
    const BoundReport b = gap_bound(grid, n_mu);
    fmt::print("p_bar  = {:.4f} MW\np_star = {:.4f} MW\nl_star = {}\nbound  = {:.4f} MW\n", b.p_bar, b.p_star,
               b.l_star, b.bound);
    return 0;
}

int cmd_oracle(const std::string& path, std::size_t n_mu, std::size_t cap) {
    const Grid grid = read_grid(path);
    const OracleResult r = brute_force_optimum(grid, n_mu, cap);
    fmt::print("enumerated = {}\noptimal J  = {:.6f} MW\nJ*         = {:.6f} MW\n", r.enumerated_count,
               r.optimal_cost, cost_lower_bound(grid, n_mu));
    for (const auto& part : r.optimal_partitions) {
        fmt::print("argmin:");
        for (const auto& island : part.islands()) {
            fmt::print(" {{");
            for (std::size_t k = 0; k < island.size(); ++k) fmt::print("{}{}", k ? "," : "", grid.label(island[k]));
            fmt::print("}}");
        }
        fmt::print("\n");
    }
    return 0;
}

int cmd_seed(const std::string& path, std::optional<std::size_t> n_mu, const InitSource& init, const std::string& out) {
    const Grid grid = read_grid(path);
    const Partition part = init.make(grid, n_mu);
    const std::string text = dump_partition(grid, part);
    if (out.empty())
        fmt::print("{}", text);
    else
        write_text_file(out, text);
    fmt::print(stderr, "J(0) = {:.4f} MW over {} islands\n", cost_J(grid, part), part.island_count());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Split a power grid into islands by distributed node migration"};
    app.require_subcommand(1);

    std::string import_in, import_out;
    auto* import = app.add_subcommand("import", "convert a MATPOWER case to the native grid JSON");
    import->add_option("case", import_in, "MATPOWER .m file")->required();
    import->add_option("out", import_out, "native grid JSON to write")->required();

    RunArgs ra;
    auto* run_cmd = app.add_subcommand("run", "run the migration process and emit reports");
    run_cmd->add_option("--grid", ra.grid, "grid file (.m for MATPOWER, otherwise native JSON)")->required();
    run_cmd->add_option("--n-mu", ra.n_mu, "number of islands")->check(CLI::Range(2, 1 << 20));
    ra.init.add_to(run_cmd);
    run_cmd->add_option("--estimator", ra.estimator, "simulate | closed-form | exact")
        ->check(CLI::IsMember({"simulate", "closed-form", "exact"}));
    run_cmd->add_flag("--exact-imbalance", ra.exact_imbalance, "shorthand for --estimator exact");
    run_cmd->add_option("--integrator", ra.integrator, "euler | rk4")->check(CLI::IsMember({"euler", "rk4"}));
    run_cmd->add_option("--dt", ra.opts.integrator.dt, "integration step, 0 for 1/(dmax+1)")
        ->check(CLI::NonNegativeNumber);
    run_cmd->add_option("--eps-ss", ra.opts.integrator.eps_ss, "steady-state tolerance")->check(CLI::PositiveNumber);
    run_cmd->add_option("--eps-dis", ra.opts.integrator.eps_dis, "disagreement tolerance in MW")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--eps-sing", ra.opts.eps_sing, "singularity threshold of the rate pair")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--tolerance", ra.opts.tolerance, "MW tolerance of imbalance comparisons")
        ->check(CLI::NonNegativeNumber);
    run_cmd->add_option("--max-iterations", ra.opts.integrator.max_iterations, "iteration cap per consensus run");
    run_cmd->add_option("--step-cap", ra.step_cap, "maximum number of migrations (default 50 n)");
    run_cmd->add_flag("--no-zero-power", ra.no_zero_power, "disable moves of zero-power buses");
    run_cmd->add_option("--report", ra.report, "report JSON path");
    run_cmd->add_option("--trajectory", ra.trajectory, "trajectory CSV path (k,P_1..P_n,J,J_star)");
    run_cmd->add_option("--trace-csv", ra.trace_csv, "consensus trace CSV path (run,t,node,x,xdot)");
    run_cmd->add_option("--trace-every", ra.trace_every, "keep every n-th integration step in the trace")
        ->check(CLI::PositiveNumber);

    std::string bound_grid;
    std::size_t bound_n = 2;
    auto* bound = app.add_subcommand("bound", "print the worst-case gap bound");
    bound->add_option("--grid", bound_grid, "grid file")->required();
    bound->add_option("--n-mu", bound_n, "number of islands")->required()->check(CLI::Range(1, 1 << 20));

    std::string oracle_grid;
    std::size_t oracle_n = 2;
    std::size_t oracle_cap = 14;
    auto* oracle = app.add_subcommand("oracle", "exhaustive optimum for small grids");
    oracle->add_option("--grid", oracle_grid, "grid file")->required();
    oracle->add_option("--n-mu", oracle_n, "number of islands")->required()->check(CLI::Range(1, 1 << 20));
    oracle->add_option("--cap", oracle_cap, "refuse grids with more nodes");

    std::string seed_grid, seed_out;
    std::optional<std::size_t> seed_n;
    InitSource seed_init;
    auto* seed = app.add_subcommand("seed", "build an initial partition and write it as JSON");
    seed->add_option("--grid", seed_grid, "grid file")->required();
    seed->add_option("--n-mu", seed_n, "number of islands")->check(CLI::Range(2, 1 << 20));
    seed_init.add_to(seed);
    seed->add_option("--out", seed_out, "partition JSON path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*import) return cmd_import(import_in, import_out);
        if (*run_cmd) return cmd_run(ra);
        if (*bound) return cmd_bound(bound_grid, bound_n);
        if (*oracle) return cmd_oracle(oracle_grid, oracle_n, oracle_cap);
        if (*seed) return cmd_seed(seed_grid, seed_n, seed_init, seed_out);
    } catch (const InputError& e) {
        spdlog::error("{}", e.what());
        return 2;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 1;
}
