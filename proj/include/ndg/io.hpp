#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ndg/demand.hpp"
#include "ndg/network.hpp"
#include "ndg/scenario.hpp"
#include "ndg/ue.hpp"

namespace ndg::io {

namespace fs = std::filesystem;

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

MobilityNetwork parse_network(const std::string& json_text);
std::string network_to_json(const MobilityNetwork& net);
MobilityNetwork load_network(const fs::path& path);

/// Header `request_id,origin,destination,trips`.
DemandTable parse_demand(const MobilityNetwork& net, const std::string& csv_text);
std::string demand_to_csv(const MobilityNetwork& net, const DemandTable& demand);
DemandTable load_demand(const MobilityNetwork& net, const fs::path& path);

/// State documents list PT edges by id; edges not listed keep the network's
/// existing configuration.
NetworkState parse_state(const MobilityNetwork& net, const std::string& json_text);
std::string state_to_json(const MobilityNetwork& net, const NetworkState& state);

/// Relative network/demand paths resolve against the scenario file's folder.
Scenario load_scenario(const fs::path& path);
Scenario parse_scenario(const std::string& json_text, const fs::path& base_dir);
/// Canonical JSON echo of a scenario (paths replaced by content digests).
std::string scenario_echo(const Scenario& s);

struct Diagnostic {
  enum class Severity { Warning, Error };
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
};

/// Loads and checks a scenario file, or a network/demand pair when no
/// scenario is given. Never throws for input problems; they become errors.
std::vector<Diagnostic> validate(const std::optional<fs::path>& scenario,
                                 const std::optional<fs::path>& network,
                                 const std::optional<fs::path>& demand);

/// %.12g with negative zero folded to 0; throws InvariantError on NaN/inf.
std::string fmt_num(double v);

std::string sha256_hex(const std::string& bytes);

/// CSV renderers. Each row carries the year and the chain it belongs to
/// (stage1, disagreement, baseline, stage2, system_optimal).
struct ReportSet {
  std::string equilibrium;
  std::string strategies;
  std::string coinvest;
  std::string sharing;
  std::string improvement;
  std::string sweep;
  std::string state;
};

std::string equilibrium_header();
std::string strategies_header();
std::string coinvest_header();
std::string sharing_header();
std::string improvement_header();
std::string sweep_header(std::size_t operators);

void append_equilibrium(std::string& out, const Scenario& s, std::size_t year,
                        const std::string& chain, const EquilibriumResult& ne);
void append_strategies(std::string& out, const MobilityNetwork& net, std::size_t year,
                       const std::string& chain, const std::vector<OperatorConfig>& ops,
                       const EquilibriumResult& ne);
void append_coinvest_strategy(std::string& out, const MobilityNetwork& net, std::size_t year,
                              const std::string& chain, const CoInvestResult& co);
void append_coinvest(std::string& out, std::size_t year, const std::string& chain,
                     const CoInvestResult& co);
void append_sharing(std::string& out, const Scenario& s, std::size_t year,
                    const std::string& chain, const SharingOutcome& sh);
void append_improvement(std::string& out, const std::vector<ImprovementRow>& rows);
void append_sweep(std::string& out, const SweepResult& sweep);

/// All reports of a scenario run.
ReportSet scenario_reports(const Scenario& s, const ScenarioResult& r);

std::string ue_flows_csv(const MobilityNetwork& net, const UEResult& r);

struct ManifestInput {
  std::string command;
  std::vector<fs::path> inputs;
  std::string scenario_echo;  // JSON text, may be empty
  std::vector<std::pair<std::string, std::string>> summary;  // key, JSON value text
  std::vector<std::string> notes;
  std::optional<double> wall_clock_s;
};

std::string manifest_json(const ManifestInput& m);

}  // namespace ndg::io
