// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fmt/format.h>
#include <functional>
#include <random>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "islander/analysis.hpp"
#include "islander/errors.hpp"
#include "islander/estimator.hpp"
#include "islander/initpart.hpp"
#include "islander/io.hpp"
#include "islander/migration.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace islander;
using Clock = std::chrono::steady_clock;

namespace {

const fs::path kData = ISLANDER_DATA_DIR;

struct Verdict {
    bool pass = true;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

Verdict estimator_exactness() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240601);
    std::size_t instances = 0, well_posed = 0, singular = 0, split = 0, bad = 0;
    double worst = 0.0, worst_formula = 0.0;
    while (well_posed < 500) {
        std::uniform_int_distribution<std::size_t> size(4, 50);
        const Grid g = testkit::random_grid(rng, {.n = size(rng), .extra_edges = 0.3, .p_max = 600.0});
        std::uniform_int_distribution<std::size_t> islands(2, std::min<std::size_t>(4, g.size() / 2));
        const Partition part = random_partition(g, islands(rng), rng());
        const auto boundary = boundary_nodes(g, part);
        std::uniform_int_distribution<std::size_t> pick(0, boundary.size() - 1);
        const BoundaryNode& b = boundary[pick(rng)];
        std::uniform_int_distribution<std::size_t> side(0, b.islands.size());
        const std::size_t s = side(rng);
        const IslandId l = s == b.islands.size() ? part.island_of(b.node) : b.islands[s];
        if (l == part.island_of(b.node) && part.island_size(l) < 2) continue;

        ++instances;
        const DecisionEstimate est = estimate_for_decision(g, part, b.node, l);
        if (est.disagreement || est.aux_components > 1) {
            ++split;
            continue;
        }
        if (!est.estimate.well_posed()) {
            ++singular;
            continue;
        }
        ++well_posed;
        const double truth = island_imbalance(g, part, l);
        const double err = std::abs(est.estimate.power - truth) / (1.0 + std::abs(truth));
        worst = std::max(worst, err);
        worst_formula = std::max(worst_formula, std::abs(est.estimate.power_formula - truth) / (1.0 + std::abs(truth)));
        if (err > 1e-6 || est.estimate.size_rounded != part.island_size(l)) ++bad;
    }
    const double elapsed = seconds_since(t0);
    Verdict v;
    v.pass = bad == 0 && elapsed < 30.0;
    v.detail = fmt::format(
        "{} instances, {} well-posed, {} singular, {} split; {} out of tolerance; max rel err {:.2e} "
        "(unrounded size {:.2e}); {:.1f} s",
        instances, well_posed, singular, split, bad, worst, worst_formula, elapsed);
    return v;
}

Verdict bound_reproduction() {
    const double b2 = gap_bound(58.25, 542.78, 2).bound;
    const double b3 = gap_bound(38.83, 542.78, 3).bound;
    Verdict v;
    v.pass = std::abs(b2 - 213.14) <= 0.01 && std::abs(b3 - 335.97) <= 0.01;
    v.detail = fmt::format("n=2: {:.4f} (want 213.14), n=3: {:.4f} (want 335.97)", b2, b3);
    return v;
}

struct ContractionTally {
    std::size_t runs = 0, normal = 0, zero = 0, violations = 0;

    void add(const RunReport& r) {
        ++runs;
        for (const auto& c : r.contraction) {
            if (c.rule == MigrationRule::normal) {
                ++normal;
                if (!(c.delta < 0.0) || !(c.discriminant < 0.0)) ++violations;
            } else {
                ++zero;
                if (c.delta != 0.0) ++violations;
            }
        }
    }
};

ContractionTally g_contraction;

Verdict oracle_sandwich() {
    std::mt19937_64 rng(777);
    std::size_t runs = 0, optimal = 0, certified = 0, violations = 0, unterminated = 0;
    for (int trial = 0; trial < 120; ++trial) {
        std::uniform_int_distribution<std::size_t> size(6, 12);
        const Grid g = testkit::random_grid(rng, {.n = size(rng), .extra_edges = 0.3, .zero_share = 0.1});
        const std::size_t k = 2 + static_cast<std::size_t>(trial % 2);
        const RunReport r = run(g, random_partition(g, k, rng()));
        g_contraction.add(r);
        ++runs;
        if (r.termination != Termination::converged) {
            ++unterminated;
            continue;
        }
        const OracleResult best = brute_force_optimum(g, k);
        const double jk = r.final_cost();
        if (best.optimal_cost > jk + 1e-9) ++violations;
        if (std::abs(jk - best.optimal_cost) <= 1e-6) ++optimal;
        if (r.certificate.satisfied) {
            ++certified;
            if (!r.bound.satisfied) ++violations;
        }
    }
    Verdict v;
    v.pass = violations == 0 && runs >= 100;
    v.detail = fmt::format("{} runs, {} not converged, {} certified, {} violations; reached the optimum in {}/{} ({:.1f}%)",
                           runs, unterminated, certified, violations, optimal, runs - unterminated,
                           100.0 * static_cast<double>(optimal) / static_cast<double>(runs - unterminated));
    return v;
}

struct IeeeCase {
    const char* grid;
    const char* cut;
    std::size_t n_mu;
    double j_star;
};

const std::vector<IeeeCase> kIeee{
    {"ieee118_opf.m", "ieee118_n2_ssrp_init.txt", 2, 58.25},
    {"ieee118_opf.m", "ieee118_n2_cris_init.txt", 2, 58.25},
    {"ieee118_opf.m", "ieee118_n3_ssrp_init.txt", 3, 38.83},
    {"ieee118_opf.m", "ieee118_n3_kyriacou_init.txt", 3, 38.83},
    {"ieee300_opf.m", "ieee300_n3_ssrp_init.txt", 3, 102.92},
    {"ieee300_opf.m", "ieee300_n3_arbitrary_init.txt", 3, 102.92},
    {"ieee300_opf.m", "ieee300_n4_ssrp_init.txt", 4, 77.187},
    {"ieee300_opf.m", "ieee300_n4_kyriacou_init.txt", 4, 77.187},
};

Verdict ieee_reproduction() {
    Verdict v;
    std::string rows;
    for (const auto& c : kIeee) {
        const Grid g = load_grid(kData / c.grid);
        const Partition init = from_cut_set(g, load_cut_set(kData / "cutsets" / c.cut));
        const RunReport r = run(g, init);
        g_contraction.add(r);
        const bool ok = init.island_count() == c.n_mu && r.termination == Termination::converged &&
                        std::abs(r.final_cost() - c.j_star) <= 0.01 && std::abs(r.cost_star - c.j_star) <= 0.01;
        v.pass = v.pass && ok;
        rows += fmt::format("{}{} K={} J(0)={:.2f} J(K)={:.3f}{}", rows.empty() ? "" : "; ", c.cut, r.steps(),
                            r.initial_cost(), r.final_cost(), ok ? "" : " MISS");
    }
    v.detail = rows;
    return v;
}

Verdict contraction() {
    Verdict v;
    v.pass = g_contraction.violations == 0 && g_contraction.normal > 0;
    v.detail = fmt::format("{} runs, {} normal and {} zero-power events checked, {} violations", g_contraction.runs,
                           g_contraction.normal, g_contraction.zero, g_contraction.violations);
    return v;
}

Verdict performance() {
    const Grid g = load_grid(kData / "ieee300_opf.m");
    struct Start {
        std::string name;
        Partition part;
    };
    const std::vector<Start> starts{
        {"ssrp cut-set", from_cut_set(g, load_cut_set(kData / "cutsets/ieee300_n4_ssrp_init.txt"))},
        {"random seed 1", random_partition(g, 4, 1)},
    };
    Verdict v;
    for (const auto& s : starts) {
        for (EstimatorMode mode : {EstimatorMode::simulate, EstimatorMode::exact}) {
            RunOptions o;
            o.estimator = mode;
            const auto t0 = Clock::now();
            const RunReport r = run(g, s.part, o);
            const double t = seconds_since(t0);
            const double limit = mode == EstimatorMode::exact ? 2.0 : 60.0;
            v.pass = v.pass && t < limit && r.termination == Termination::converged;
            v.detail += fmt::format("{}{} {}: K={} in {:.2f} s (limit {:.0f} s)", v.detail.empty() ? "" : "; ", s.name,
                                    to_string(mode), r.steps(), t, limit);
        }
    }
    return v;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string("GRID_ISLANDER_LOG=off '") + ISLANDER_CLI + "' " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Verdict determinism() {
    const fs::path dir = fs::temp_directory_path() / ("islander_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::string base = "run --grid '" + (kData / "ieee300_opf.m").string() + "' --init-cut-set '" +
                             (kData / "cutsets/ieee300_n3_arbitrary_init.txt").string() + "'";
    const int a = run_cli(base + " --report '" + (dir / "a.json").string() + "' --trajectory '" +
                          (dir / "a.csv").string() + "'");
    const int b = run_cli(base + " --report '" + (dir / "b.json").string() + "' --trajectory '" +
                          (dir / "b.csv").string() + "'");
    Verdict v;
    if (a != 0 || b != 0) {
        v.pass = false;
        v.detail = fmt::format("CLI exit codes {} and {}", a, b);
    } else {
        const std::string ja = read_text_file(dir / "a.json"), jb = read_text_file(dir / "b.json");
        const bool same = ja == jb && read_text_file(dir / "a.csv") == read_text_file(dir / "b.csv");
        v.pass = same;
        v.detail = fmt::format("report {} bytes, {}", ja.size(), same ? "identical" : "DIFFERENT");
    }
    fs::remove_all(dir);
    return v;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Verdict()> check;
    };
    // contraction is judged on the runs made by criteria 3 and 5
    const std::vector<Criterion> criteria{
        {1, "estimator exactness", estimator_exactness}, {2, "bound reproduction", bound_reproduction},
        {3, "oracle sandwich", oracle_sandwich},         {5, "IEEE reproduction", ieee_reproduction},
        {4, "contraction diagnostics", contraction},     {6, "performance", performance},
        {7, "determinism", determinism},
    };
    std::vector<std::pair<int, std::string>> lines;
    bool all = true;
    for (const auto& c : criteria) {
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("threw: ") + e.what();
        }
        all = all && v.pass;
        lines.emplace_back(c.id, fmt::format("criterion {} ({}): {}: {}", c.id, c.name, v.pass ? "PASS" : "FAIL", v.detail));
    }
    std::sort(lines.begin(), lines.end());
    for (const auto& [id, line] : lines) fmt::print("{}\n", line);
    return all ? 0 : 1;
}
