#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "islander/grid.hpp"
#include "islander/partition.hpp"

namespace islander {

// Virtual consensus estimation of island imbalances.
//
// Each node h of a vertex set S runs  x_h' = p_h + sum_{j in N_h cap S} (x_j - x_h)
// from x = 0. On a connected S every rate x_h' converges to mean(p over S).
// A probing node i runs this on an island V_l and on the auxiliary set
// V_l \ {i} (member) or V_l + {i} (neighbour), then solves the two consensus
// rates for P_l and |V_l|.

enum class Integrator { euler, rk4 };

enum class RunStatus { running, steady, disagreement };

const char* to_string(RunStatus status) noexcept;

struct TraceRow {
    std::size_t run = 0;
    double t = 0.0;
    NodeId node = 0;
    double x = 0.0;
    double xdot = 0.0;
};

/// Collects (t, node, x, xdot) samples across runs.
struct TraceSink {
    std::size_t every = 1;  // sample every n-th iteration
    std::vector<TraceRow> rows;
    std::size_t runs = 0;
};

struct IntegratorOptions {
    Integrator method = Integrator::euler;
    /// Steady when every component has max|x_h' - mean| <= eps_ss (1 + |mean|).
    double eps_ss = 1e-9;
    /// Component means further apart than this (MW) flag a disagreement.
    double eps_dis = 1e-6;
    /// 0 picks 1 / (d_max + 1).
    double dt = 0.0;
    std::size_t max_iterations = 20'000'000;
    std::size_t check_every = 4;
    /// Called for every neighbour state read as (reader, source).
    std::function<void(NodeId, NodeId)> on_read;
    TraceSink* trace = nullptr;
};

struct ConsensusRun {
    std::vector<NodeId> vertices;  // ascending
    std::vector<double> x;         // aligned with vertices
    std::vector<double> xdot;
    std::vector<std::size_t> component;  // component index per vertex
    std::vector<double> component_rates;  // mean rate per component
    double t = 0.0;
    double dt = 0.0;
    std::size_t iterations = 0;
    RunStatus status = RunStatus::running;

    std::size_t component_count() const noexcept { return component_rates.size(); }
    bool contains(NodeId node) const;
    /// Rate of one vertex; throws EstimatorError if absent.
    double rate_at(NodeId node) const;
    /// Mean of all rates.
    double mean_rate() const;
};

/// Vertex set of the auxiliary graph: island minus probe, or island plus
/// probe. Throws InputError if the probe is neither a member nor adjacent.
struct AuxiliaryGraph {
    IslandId island = 0;
    NodeId probe = 0;
    bool probe_is_member = false;
    std::vector<NodeId> vertices;  // ascending
    std::vector<Edge> edges;       // induced, ascending
};

AuxiliaryGraph build_auxiliary_graph(const Grid& grid, const Partition& part, IslandId island, NodeId probe);

/// Integrates until every component is steady. Throws EstimatorError on an
/// empty vertex set, non-finite state, or when max_iterations is reached.
ConsensusRun integrate_consensus(const Grid& grid, std::span<const NodeId> vertices,
                                 const IntegratorOptions& opts = {});

/// Closed-form counterpart of integrate_consensus: every rate set to its
/// component mean, x left at zero.
ConsensusRun closed_form_consensus(const Grid& grid, std::span<const NodeId> vertices,
                                   const IntegratorOptions& opts = {});

struct RateEstimate {
    double omega = 0.0;      // island rate, P_l / |V_l|
    double omega_hat = 0.0;  // auxiliary rate
    int sign = 1;            // a_l: -1 when the probe is a member
};

/// Reads the two consensus rates the probe can see in one hop: its own rate
/// when it takes part in a run, otherwise the rate of its lowest-id
/// neighbour in that run. Throws EstimatorError unless both runs are steady.
RateEstimate steady_rates(const Grid& grid, const ConsensusRun& island_run, const ConsensusRun& aux_run,
                          NodeId probe, bool member);

enum class Condition { well_posed, singular };

struct ImbalanceEstimate {
    /// P_l = omega * |V_l|, using the integer-rounded size.
    double power = 0.0;
    /// P_l straight from a_l omega (p_i - omega_hat) / (omega_hat - omega).
    double power_formula = 0.0;
    double size = 0.0;
    std::size_t size_rounded = 0;
    Condition condition = Condition::singular;

    bool well_posed() const noexcept { return condition == Condition::well_posed; }
};

/// Solves the rate pair for P_l and |V_l|. Singular when
/// |omega_hat - omega| <= eps_sing (1 + |omega|). Throws EstimatorError when
/// the recovered size is not within 0.5 of a positive integer.
ImbalanceEstimate estimate_imbalance(const RateEstimate& rates, double probe_power, double eps_sing = 1e-8);

enum class EstimatorMode { simulate, closed_form, exact };

const char* to_string(EstimatorMode mode) noexcept;

struct DecisionEstimate {
    ImbalanceEstimate estimate;
    bool disagreement = false;
    std::size_t aux_components = 1;
};

/// Full probe pipeline for one (node, island) pair: auxiliary graph, the two
/// consensus runs, rate readout and recovery. In `exact` mode the true
/// imbalance and structural connectivity are returned.
DecisionEstimate estimate_for_decision(const Grid& grid, const Partition& part, NodeId probe, IslandId island,
                                       EstimatorMode mode = EstimatorMode::simulate,
                                       const IntegratorOptions& opts = {}, double eps_sing = 1e-8);

}  // namespace islander
