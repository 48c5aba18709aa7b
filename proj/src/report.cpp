#include "islander/report.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "islander/errors.hpp"
#include "islander/io.hpp"

namespace islander {

using ojson = nlohmann::ordered_json;

const char* to_string(MigrationRule rule) noexcept {
    return rule == MigrationRule::normal ? "normal" : "zero-power";
}

const char* to_string(Termination termination) noexcept {
    switch (termination) {
        case Termination::converged: return "converged";
        case Termination::step_cap: return "step-cap";
        case Termination::stalled: return "stalled";
    }
    return "unknown";
}

namespace {

ojson islands_json(const Grid& grid, const std::vector<IslandId>& assignment, std::size_t k) {
    std::vector<std::vector<BusLabel>> islands(k);
    for (NodeId v = 0; v < assignment.size(); ++v) islands[assignment[v]].push_back(grid.label(v));
    ojson out = ojson::object();
    for (std::size_t l = 0; l < k; ++l) out[std::to_string(l)] = islands[l];
    return out;
}

ojson edges_json(const Grid& grid, const std::vector<Edge>& edges) {
    ojson out = ojson::array();
    for (const Edge& e : edges) out.push_back(format_edge(grid, e));
    return out;
}

}  // namespace

std::string report_to_json(const Grid& grid, const RunReport& report, const std::string& options_json) {
    ojson options;
    try {
        options = ojson::parse(options_json);
    } catch (const ojson::parse_error& e) {
        throw InputError(fmt::format("report options are not valid JSON: {}", e.what()));
    }

    ojson doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["options"] = std::move(options);
    doc["node_count"] = grid.size();
    doc["island_count"] = report.island_count;
    doc["termination"] = to_string(report.termination);
    doc["steps"] = report.steps();
    doc["cost_initial"] = report.initial_cost();
    doc["cost_final"] = report.final_cost();
    doc["cost_star"] = report.cost_star;
    doc["imbalance_final"] = report.final_imbalance().values;

    doc["partition_initial"] = islands_json(grid, report.initial_assignment, report.island_count);
    doc["partition_final"] = islands_json(grid, report.final_assignment, report.island_count);
    doc["cut_set_initial"] = edges_json(grid, report.cut_set_initial);
    doc["cut_set_final"] = edges_json(grid, report.cut_set_final);

    ojson trajectory = ojson::array();
    for (const auto& t : report.trajectory)
        trajectory.push_back({{"k", t.k}, {"imbalance", t.imbalance.values}, {"cost", t.cost}});
    doc["trajectory"] = std::move(trajectory);

    ojson events = ojson::array();
    for (const auto& e : report.events) {
        events.push_back({{"step", e.step},
                          {"bus", grid.label(e.node)},
                          {"from", e.from_island},
                          {"to", e.to_island},
                          {"p", e.p},
                          {"from_before", e.from_before},
                          {"to_before", e.to_before},
                          {"from_after", e.from_after},
                          {"to_after", e.to_after},
                          {"rule", to_string(e.rule)}});
    }
    doc["events"] = std::move(events);

    const BoundReport& b = report.bound;
    doc["bound"] = {{"p_bar", b.p_bar}, {"p_star", b.p_star}, {"l_star", b.l_star},
                    {"bound", b.bound}, {"gap", b.gap},       {"satisfied", b.satisfied}};
    doc["neighbor_gap"] = {{"max_gap", report.certificate.max_gap},
                           {"p_bar", report.certificate.p_bar},
                           {"satisfied", report.certificate.satisfied}};

    ojson contraction = ojson::array();
    for (const auto& c : report.contraction) {
        contraction.push_back({{"step", c.step},
                               {"rule", to_string(c.rule)},
                               {"distance_before", c.distance_before},
                               {"distance_after", c.distance_after},
                               {"delta", c.delta},
                               {"discriminant", c.discriminant}});
    }
    doc["contraction"] = std::move(contraction);

    ojson hypothesis = ojson::array();
    for (const auto& h : report.hypothesis)
        hypothesis.push_back({{"k", h.k}, {"triplets", h.triplets}, {"with_margin", h.with_margin}});
    doc["hypothesis"] = std::move(hypothesis);

    doc["estimator"] = {{"consensus_runs", report.estimator.consensus_runs},
                        {"singular_skips", report.estimator.singular_skips},
                        {"disagreements", report.estimator.disagreements},
                        {"structural_fallbacks", report.estimator.structural_fallbacks}};
    return doc.dump(2) + "\n";
}

std::string trajectory_csv(const RunReport& report) {
    std::string out = "k";
    for (std::size_t l = 1; l <= report.island_count; ++l) out += fmt::format(",P_{}", l);
    out += ",J,J_star\n";
    for (const auto& t : report.trajectory) {
        out += std::to_string(t.k);
        for (double v : t.imbalance.values) out += fmt::format(",{}", v);
        out += fmt::format(",{},{}\n", t.cost, report.cost_star);
    }
    return out;
}

}  // namespace islander
