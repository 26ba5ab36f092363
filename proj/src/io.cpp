#include "ndg/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ndg/errors.hpp"

namespace ndg::io {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw InputError(where + ": expected an object");
  for (const auto& [k, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw InputError(where + ": unknown key '" + k + "'");
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError(where + ": missing key '" + key + "'");
  return *it;
}

double num(const json& v, const std::string& what) {
  if (!v.is_number()) throw InputError(what + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw InputError(what + " must be finite");
  return d;
}

double num_or(const json& obj, const char* key, double fallback, const std::string& where) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : num(*it, where + "." + key);
}

bool flag(const json& v, const std::string& what) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number_integer() && (v.get<int>() == 0 || v.get<int>() == 1)) return v.get<int>() == 1;
  throw InputError(what + " must be a boolean or 0/1");
}

std::string id_of(const json& v, const std::string& what) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw InputError(what + " must be a string or integer id");
}

std::string str(const json& v, const std::string& what) {
  if (!v.is_string()) throw InputError(what + " must be a string");
  return v.get<std::string>();
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(what + ": malformed JSON (" + e.what() + ")");
  }
}

EdgeKind parse_kind(const std::string& s) {
  if (s == "PT") return EdgeKind::PT;
  if (s == "ALT") return EdgeKind::ALT;
  if (s == "TRANSFER") return EdgeKind::Transfer;
  throw InputError("unknown edge kind '" + s + "'");
}

const char* kind_name(EdgeKind k) {
  switch (k) {
    case EdgeKind::PT: return "PT";
    case EdgeKind::ALT: return "ALT";
    case EdgeKind::Transfer: return "TRANSFER";
  }
  return "?";
}

MobilityNetwork network_from(const json& doc) {
  check_keys(doc, {"nodes", "edges"}, "network");
  const auto& jn = require(doc, "nodes", "network");
  const auto& je = require(doc, "edges", "network");
  if (!jn.is_array() || !je.is_array()) throw InputError("network: nodes and edges must be arrays");
  std::vector<Node> nodes;
  for (const auto& n : jn) {
    check_keys(n, {"id", "region", "layer"}, "node");
    Node node;
    node.id = id_of(require(n, "id", "node"), "node id");
    const auto& r = require(n, "region", "node '" + node.id + "'");
    if (!r.is_number_integer()) throw InputError("node '" + node.id + "': region must be 1 or 2");
    node.region = r.get<int>();
    const auto layer = str(require(n, "layer", "node '" + node.id + "'"), "layer");
    if (layer == "PT")
      node.layer = Layer::PT;
    else if (layer == "ALT")
      node.layer = Layer::ALT;
    else
      throw InputError("node '" + node.id + "': unknown layer '" + layer + "'");
    nodes.push_back(std::move(node));
  }
  std::vector<EdgeSpec> edges;
  for (const auto& e : je) {
    check_keys(e,
               {"id", "tail", "head", "kind", "length_km", "existing_available",
                "existing_capacity", "travel_time_h", "substitutes"},
               "edge");
    EdgeSpec s;
    s.id = id_of(require(e, "id", "edge"), "edge id");
    const std::string where = "edge '" + s.id + "'";
    s.tail = id_of(require(e, "tail", where), where + " tail");
    s.head = id_of(require(e, "head", where), where + " head");
    s.kind = parse_kind(str(require(e, "kind", where), where + " kind"));
    s.length_km = num(require(e, "length_km", where), where + " length_km");
    if (auto it = e.find("existing_available"); it != e.end())
      s.existing_available = flag(*it, where + " existing_available");
    s.existing_capacity = num_or(e, "existing_capacity", 0.0, where);
    s.travel_time_h = num_or(e, "travel_time_h", 0.0, where);
    if (auto it = e.find("substitutes"); it != e.end()) {
      if (!it->is_array()) throw InputError(where + ": substitutes must be an array");
      std::vector<std::string> subs;
      for (const auto& x : *it) subs.push_back(id_of(x, where + " substitute"));
      s.substitutes = std::move(subs);
    }
    edges.push_back(std::move(s));
  }
  return MobilityNetwork(std::move(nodes), std::move(edges));
}

json network_json(const MobilityNetwork& net) {
  json doc;
  doc["nodes"] = json::array();
  for (const auto& n : net.nodes())
    doc["nodes"].push_back(
        {{"id", n.id}, {"region", n.region}, {"layer", n.layer == Layer::PT ? "PT" : "ALT"}});
  doc["edges"] = json::array();
  for (const auto& e : net.edges()) {
    json je = {{"id", e.id},
               {"tail", net.node(e.tail).id},
               {"head", net.node(e.head).id},
               {"kind", kind_name(e.kind)},
               {"length_km", e.label.length_km},
               {"existing_available", e.label.available},
               {"existing_capacity", e.label.capacity},
               {"travel_time_h", e.label.travel_time_h}};
    if (e.kind == EdgeKind::PT) {
      json subs = json::array();
      for (auto s : e.substitutes) subs.push_back(net.edge(s).id);
      je["substitutes"] = subs;
    }
    doc["edges"].push_back(std::move(je));
  }
  return doc;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || s.empty()) throw InputError(what + ": not a number: '" + s + "'");
  return v;
}

DemandTable demand_from_json(const MobilityNetwork& net, const json& arr) {
  if (!arr.is_array()) throw InputError("inline demand must be an array");
  std::vector<TravelRequest> reqs;
  for (const auto& r : arr) {
    check_keys(r, {"request_id", "origin", "destination", "trips"}, "demand row");
    TravelRequest t;
    t.id = id_of(require(r, "request_id", "demand row"), "request_id");
    t.origin = net.node_index(id_of(require(r, "origin", t.id), "origin"));
    t.destination = net.node_index(id_of(require(r, "destination", t.id), "destination"));
    t.trips = num(require(r, "trips", t.id), "request '" + t.id + "' trips");
    reqs.push_back(std::move(t));
  }
  return DemandTable(net, std::move(reqs));
}

std::vector<std::size_t> controllable_from(const MobilityNetwork& net, const json& v, int region,
                                           const std::string& who) {
  if (v.is_string()) {
    if (v.get<std::string>() != "region")
      throw InputError(who + ": controllable must be \"region\" or a list of edge ids");
    return region_pt_edges(net, region);
  }
  if (!v.is_array()) throw InputError(who + ": controllable must be \"region\" or a list of edge ids");
  std::set<std::string> ids;
  for (const auto& x : v) ids.insert(id_of(x, who + " controllable edge"));
  std::vector<std::size_t> out;
  for (auto e : net.pt_edges())
    if (ids.count(net.edge(e).id)) out.push_back(e);
  for (const auto& id : ids) {
    const auto e = net.edge_index(id);
    if (net.edge(e).kind != EdgeKind::PT) throw InputError(who + ": edge '" + id + "' is not a PT edge");
    if (net.edge(e).scope == Scope::Crossing)
      throw InputError(who + ": crossing edge '" + id + "' is not controllable in Stage 1");
  }
  return out;
}

}  // namespace

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

MobilityNetwork parse_network(const std::string& json_text) {
  return network_from(parse_json(json_text, "network"));
}

std::string network_to_json(const MobilityNetwork& net) { return network_json(net).dump(2) + "\n"; }

MobilityNetwork load_network(const fs::path& path) {
  try {
    return parse_network(read_text(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

DemandTable parse_demand(const MobilityNetwork& net, const std::string& csv_text) {
  std::istringstream is(csv_text);
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::vector<TravelRequest> reqs;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    const auto cols = split(line, ',');
    if (!header) {
      if (cols != std::vector<std::string>{"request_id", "origin", "destination", "trips"})
        throw InputError("demand header must be request_id,origin,destination,trips");
      header = true;
      continue;
    }
    const std::string where = "demand line " + std::to_string(lineno);
    if (cols.size() != 4) throw InputError(where + ": expected 4 columns");
    TravelRequest r;
    r.id = cols[0];
    r.origin = net.node_index(cols[1]);
    r.destination = net.node_index(cols[2]);
    r.trips = parse_double(cols[3], where);
    reqs.push_back(std::move(r));
  }
  if (!header) throw InputError("demand file is empty");
  return DemandTable(net, std::move(reqs));
}

std::string demand_to_csv(const MobilityNetwork& net, const DemandTable& demand) {
  std::string out = "request_id,origin,destination,trips\n";
  for (const auto& r : demand.requests())
    out += r.id + "," + net.node(r.origin).id + "," + net.node(r.destination).id + "," +
           fmt_num(r.trips) + "\n";
  return out;
}

DemandTable load_demand(const MobilityNetwork& net, const fs::path& path) {
  try {
    return parse_demand(net, read_text(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

NetworkState parse_state(const MobilityNetwork& net, const std::string& json_text) {
  const auto doc = parse_json(json_text, "state");
  check_keys(doc, {"edges"}, "state");
  auto st = NetworkState::from_network(net);
  const auto& arr = require(doc, "edges", "state");
  if (!arr.is_array()) throw InputError("state: edges must be an array");
  for (const auto& e : arr) {
    check_keys(e, {"id", "available", "capacity", "frequency", "new_build"}, "state edge");
    const auto id = id_of(require(e, "id", "state edge"), "state edge id");
    const auto i = net.edge_index(id);
    if (net.edge(i).kind != EdgeKind::PT) throw InputError("state edge '" + id + "' is not PT");
    if (auto it = e.find("available"); it != e.end()) st.avail[i] = flag(*it, id + " available");
    st.cap[i] = num_or(e, "capacity", st.cap[i], id);
    st.frequency[i] = num_or(e, "frequency", st.frequency[i], id);
    if (auto it = e.find("new_build"); it != e.end()) st.new_build[i] = flag(*it, id + " new_build");
    if (st.cap[i] < 0.0 || st.frequency[i] < 0.0)
      throw InputError("state edge '" + id + "': negative capacity or frequency");
    if (!st.avail[i] && st.cap[i] > 0.0)
      throw InputError("state edge '" + id + "': capacity on an unavailable edge");
  }
  return st;
}

std::string state_to_json(const MobilityNetwork& net, const NetworkState& state) {
  std::string out = "{\n  \"edges\": [";
  bool first = true;
  for (auto e : net.pt_edges()) {
    out += first ? "\n" : ",\n";
    first = false;
    out += "    {\"id\": " + json(net.edge(e).id).dump() +
           ", \"available\": " + (state.avail[e] ? "true" : "false") +
           ", \"capacity\": " + fmt_num(state.cap[e]) +
           ", \"frequency\": " + fmt_num(state.frequency[e]) +
           ", \"new_build\": " + (state.new_build[e] ? "true" : "false") + "}";
  }
  out += "\n  ]\n}\n";
  return out;
}

Scenario parse_scenario(const std::string& json_text, const fs::path& base_dir) {
  const auto doc = parse_json(json_text, "scenario");
  check_keys(doc,
             {"name", "network", "demand", "operators", "horizon", "beta_schedule", "sharing",
              "solver", "params", "system_optimal"},
             "scenario");
  Scenario s;
  if (auto it = doc.find("name"); it != doc.end()) s.name = str(*it, "name");

  const auto& jn = require(doc, "network", "scenario");
  if (jn.is_string()) {
    s.sources.push_back(base_dir / jn.get<std::string>());
    s.network = std::make_shared<const MobilityNetwork>(load_network(s.sources.back()));
  }
  else
    s.network = std::make_shared<const MobilityNetwork>(network_from(jn));
  const auto& net = *s.network;

  const auto& jd = require(doc, "demand", "scenario");
  if (jd.is_string()) {
    s.sources.push_back(base_dir / jd.get<std::string>());
    s.demand = load_demand(net, s.sources.back());
  } else {
    s.demand = demand_from_json(net, jd);
  }

  if (auto it = doc.find("params"); it != doc.end()) {
    const auto& p = *it;
    check_keys(p,
               {"value_of_time", "pt_fee", "alt_fee", "pt_speed", "alt_speed", "pt_emission",
                "alt_emission", "kappa", "s_max", "omega", "cost_base", "cost_freq",
                "profit_cost_basis", "alt_flow_rule"},
               "params");
    auto& e = s.econ;
    e.value_of_time = num_or(p, "value_of_time", e.value_of_time, "params");
    e.pt_fee = num_or(p, "pt_fee", e.pt_fee, "params");
    e.alt_fee = num_or(p, "alt_fee", e.alt_fee, "params");
    e.pt_speed = num_or(p, "pt_speed", e.pt_speed, "params");
    e.alt_speed = num_or(p, "alt_speed", e.alt_speed, "params");
    e.pt_emission = num_or(p, "pt_emission", e.pt_emission, "params");
    e.alt_emission = num_or(p, "alt_emission", e.alt_emission, "params");
    auto& d = s.design;
    d.kappa = num_or(p, "kappa", d.kappa, "params");
    d.s_max = num_or(p, "s_max", d.s_max, "params");
    d.omega = num_or(p, "omega", d.omega, "params");
    d.cost_base = num_or(p, "cost_base", d.cost_base, "params");
    d.cost_freq = num_or(p, "cost_freq", d.cost_freq, "params");
    if (auto b = p.find("profit_cost_basis"); b != p.end()) {
      const auto v = str(*b, "profit_cost_basis");
      if (v == "availability")
        d.profit_cost_basis = ProfitCostBasis::Availability;
      else if (v == "new_build")
        d.profit_cost_basis = ProfitCostBasis::NewBuild;
      else
        throw InputError("profit_cost_basis must be availability or new_build");
    }
    if (auto r = p.find("alt_flow_rule"); r != p.end()) {
      const auto v = str(*r, "alt_flow_rule");
      if (v == "per_edge")
        d.alt_flow_rule = AltFlowRule::PerEdge;
      else if (v == "per_request")
        d.alt_flow_rule = AltFlowRule::PerRequest;
      else
        throw InputError("alt_flow_rule must be per_edge or per_request");
    }
  }

  const auto& jops = require(doc, "operators", "scenario");
  if (!jops.is_array() || jops.empty()) throw InputError("operators must be a non-empty array");
  std::vector<double> beta_default;
  std::vector<std::optional<bool>> eps_op;
  for (const auto& jo : jops) {
    check_keys(jo,
               {"id", "region", "weights", "budget", "beta", "epsilon", "controllable",
                "cost_base", "cost_freq"},
               "operator");
    OperatorConfig op;
    op.id = id_of(require(jo, "id", "operator"), "operator id");
    const std::string who = "operator '" + op.id + "'";
    const auto& r = require(jo, "region", who);
    if (!r.is_number_integer()) throw InputError(who + ": region must be 1 or 2");
    op.region = r.get<int>();
    if (auto w = jo.find("weights"); w != jo.end()) {
      check_keys(*w, {"emission", "cost", "profit"}, who + " weights");
      op.weights.emission = num_or(*w, "emission", 1.0, who);
      op.weights.cost = num_or(*w, "cost", 1.0, who);
      op.weights.profit = num_or(*w, "profit", 1.0, who);
    }
    op.budget = num(require(jo, "budget", who), who + " budget");
    op.coinvest_ratio = num_or(jo, "beta", 0.0, who);
    if (auto e = jo.find("epsilon"); e != jo.end())
      eps_op.emplace_back(flag(*e, who + " epsilon"));
    else
      eps_op.emplace_back();
    op.cost_base = num_or(jo, "cost_base", s.design.cost_base, who);
    op.cost_freq = num_or(jo, "cost_freq", s.design.cost_freq, who);
    const json region_default = "region";
    auto c = jo.find("controllable");
    op.controllable = controllable_from(net, c == jo.end() ? region_default : *c, op.region, who);
    op.validate();
    beta_default.push_back(op.coinvest_ratio);
    s.operators.push_back(std::move(op));
  }
  std::map<std::string, std::size_t> op_ix;
  for (std::size_t i = 0; i < s.operators.size(); ++i) op_ix[s.operators[i].id] = i;

  if (auto it = doc.find("horizon"); it != doc.end()) {
    check_keys(*it, {"years", "tau"}, "horizon");
    if (auto y = it->find("years"); y != it->end()) {
      if (!y->is_number_integer() || y->get<long long>() < 1)
        throw InputError("horizon.years must be a positive integer");
      s.years = y->get<std::size_t>();
    }
    s.tau = num_or(*it, "tau", s.tau, "horizon");
  }

  if (auto it = doc.find("beta_schedule"); it != doc.end()) {
    if (!it->is_object()) throw InputError("beta_schedule must map year to operator betas");
    std::map<std::size_t, std::vector<double>> rows;
    for (const auto& [ykey, jb] : it->items()) {
      std::size_t year = 0;
      auto [ptr, ec] = std::from_chars(ykey.data(), ykey.data() + ykey.size(), year);
      if (ec != std::errc() || ptr != ykey.data() + ykey.size() || year < 1)
        throw InputError("beta_schedule key '" + ykey + "' is not a year number");
      if (!jb.is_object()) throw InputError("beta_schedule year " + ykey + " must be an object");
      std::vector<double> row = beta_default;
      for (const auto& [opid, b] : jb.items()) {
        auto f = op_ix.find(opid);
        if (f == op_ix.end()) throw InputError("beta_schedule names unknown operator '" + opid + "'");
        row[f->second] = num(b, "beta for " + opid);
      }
      rows[year] = std::move(row);
    }
    std::vector<double> last = beta_default;
    for (std::size_t y = 1; y <= s.years; ++y) {
      if (auto f = rows.find(y); f != rows.end()) last = f->second;
      s.beta_schedule.push_back(last);
    }
  } else {
    s.beta_schedule.push_back(beta_default);
  }

  s.epsilon.assign(s.operators.size(), true);
  for (std::size_t i = 0; i < eps_op.size(); ++i)
    if (eps_op[i]) s.epsilon[i] = *eps_op[i];
  if (auto it = doc.find("sharing"); it != doc.end()) {
    check_keys(*it, {"weights_mode", "epsilon", "disagreement"}, "sharing");
    if (auto w = it->find("weights_mode"); w != it->end()) {
      const auto v = str(*w, "weights_mode");
      if (v == "symmetric")
        s.weights_mode = WeightsMode::Symmetric;
      else if (v == "contribution")
        s.weights_mode = WeightsMode::Contribution;
      else
        throw InputError("weights_mode must be symmetric or contribution");
    }
    if (auto e = it->find("epsilon"); e != it->end()) {
      if (!e->is_object()) throw InputError("sharing.epsilon must map operator id to 0/1");
      for (const auto& [opid, f] : e->items()) {
        auto ix = op_ix.find(opid);
        if (ix == op_ix.end()) throw InputError("sharing.epsilon names unknown operator '" + opid + "'");
        s.epsilon[ix->second] = flag(f, "epsilon for " + opid);
      }
    }
    if (auto d = it->find("disagreement"); d != it->end()) {
      const auto v = str(*d, "disagreement");
      if (v == "full_budget_ne")
        s.disagreement = DisagreementMode::FullBudgetNe;
      else if (v == "stage1")
        s.disagreement = DisagreementMode::Stage1;
      else
        throw InputError("disagreement must be full_budget_ne or stage1");
    }
  }

  if (auto it = doc.find("solver"); it != doc.end()) {
    check_keys(*it, {"tol_s", "eps_dev", "max_rounds", "max_nodes", "exhaustive_limit"}, "solver");
    s.solver.tol_s = num_or(*it, "tol_s", s.solver.tol_s, "solver");
    s.solver.eps_dev = num_or(*it, "eps_dev", s.solver.eps_dev, "solver");
    auto count = [&](const char* key, std::size_t& out) {
      if (auto v = it->find(key); v != it->end()) {
        if (!v->is_number_integer() || v->get<long long>() < 0)
          throw InputError(std::string("solver.") + key + " must be a non-negative integer");
        out = v->get<std::size_t>();
      }
    };
    count("max_rounds", s.solver.max_rounds);
    count("max_nodes", s.solver.search.max_nodes);
    count("exhaustive_limit", s.solver.search.exhaustive_limit);
    if (s.solver.search.exhaustive_limit > 24)
      throw InputError("solver.exhaustive_limit above 24 is not supported");
  }
  if (auto it = doc.find("system_optimal"); it != doc.end())
    s.system_optimal = flag(*it, "system_optimal");

  s.validate();
  return s;
}

Scenario load_scenario(const fs::path& path) {
  try {
    auto s = parse_scenario(read_text(path), path.parent_path());
    s.sources.insert(s.sources.begin(), path);
    return s;
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string scenario_echo(const Scenario& s) {
  const auto& net = *s.network;
  json doc;
  doc["name"] = s.name;
  doc["network_canonical_sha256"] = sha256_hex(network_to_json(net));
  doc["demand_canonical_sha256"] = sha256_hex(demand_to_csv(net, s.demand));
  json ops = json::array();
  for (std::size_t i = 0; i < s.operators.size(); ++i) {
    const auto& op = s.operators[i];
    json ctrl = json::array();
    for (auto e : op.controllable) ctrl.push_back(net.edge(e).id);
    ops.push_back({{"id", op.id},
                   {"region", op.region},
                   {"weights", {{"emission", op.weights.emission},
                                {"cost", op.weights.cost},
                                {"profit", op.weights.profit}}},
                   {"budget", op.budget},
                   {"epsilon", static_cast<bool>(s.share_flags()[i])},
                   {"cost_base", op.cost_base},
                   {"cost_freq", op.cost_freq},
                   {"controllable", ctrl}});
  }
  doc["operators"] = ops;
  doc["horizon"] = {{"years", s.years}, {"tau", s.tau}};
  doc["beta_schedule"] = s.beta_schedule;
  doc["sharing"] = {{"weights_mode", to_string(s.weights_mode)},
                    {"disagreement", s.disagreement == DisagreementMode::FullBudgetNe
                                         ? "full_budget_ne"
                                         : "stage1"}};
  doc["solver"] = {{"tol_s", s.solver.tol_s},
                   {"eps_dev", s.solver.eps_dev},
                   {"max_rounds", s.solver.max_rounds},
                   {"max_nodes", s.solver.search.max_nodes},
                   {"exhaustive_limit", s.solver.search.exhaustive_limit}};
  const auto& e = s.econ;
  const auto& d = s.design;
  doc["params"] = {
      {"value_of_time", e.value_of_time}, {"pt_fee", e.pt_fee},
      {"alt_fee", e.alt_fee},             {"pt_speed", e.pt_speed},
      {"alt_speed", e.alt_speed},         {"pt_emission", e.pt_emission},
      {"alt_emission", e.alt_emission},   {"kappa", d.kappa},
      {"s_max", d.s_max},                 {"omega", d.omega},
      {"cost_base", d.cost_base},         {"cost_freq", d.cost_freq},
      {"profit_cost_basis",
       d.profit_cost_basis == ProfitCostBasis::Availability ? "availability" : "new_build"},
      {"alt_flow_rule", d.alt_flow_rule == AltFlowRule::PerEdge ? "per_edge" : "per_request"}};
  doc["system_optimal"] = s.system_optimal;
  return doc.dump(2);
}

std::vector<Diagnostic> validate(const std::optional<fs::path>& scenario,
                                 const std::optional<fs::path>& network,
                                 const std::optional<fs::path>& demand) {
  std::vector<Diagnostic> out;
  auto error = [&](const std::string& code, const std::string& msg) {
    out.push_back({Diagnostic::Severity::Error, code, msg});
  };
  try {
    if (scenario) {
      const auto s = load_scenario(*scenario);
      const auto routes = build_routes(*s.network, s.demand);
      (void)routes;
      for (const auto& op : s.operators) {
        const auto cert = convexity_certificate(op, *s.network, s.econ);
        if (cert.holds) continue;
        std::string edges;
        for (const auto& entry : cert.entries) {
          if (entry.holds) continue;
          if (!edges.empty()) edges += ",";
          edges += s.network->edge(entry.edge).id;
        }
        out.push_back({Diagnostic::Severity::Warning, "lemma1_condition_violated",
                       "operator '" + op.id + "': marginal payoff negative on edges " + edges});
      }
    } else if (network) {
      const auto net = load_network(*network);
      if (demand) {
        const auto d = load_demand(net, *demand);
        (void)build_routes(net, d);
      }
    } else {
      error("usage", "nothing to validate: pass a scenario or a network");
    }
  } catch (const InputError& e) {
    error("input_error", e.what());
  } catch (const std::exception& e) {
    error("internal_error", e.what());
  }
  return out;
}

std::string fmt_num(double v) {
  if (!std::isfinite(v)) throw InvariantError("non-finite value in report");
  if (v == 0.0) v = 0.0;  // folds -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw InvariantError("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

// Reports ------------------------------------------------------------------

namespace {

std::string b01(bool b) { return b ? "1" : "0"; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string equilibrium_header() {
  return "year,chain,operator,region,converged,cycle_detected,rounds,certificate_passes,max_gain,"
         "gain,budget_cap,cost,emissions,travel_cost,profit,total,nodes_explored,"
         "inner_iterations,bound_gap,global_optimality_unknown\n";
}

void append_equilibrium(std::string& out, const Scenario& s, std::size_t year,
                        const std::string& chain, const EquilibriumResult& ne) {
  const auto betas =
      chain == "stage1" ? s.betas(year) : std::vector<double>(s.operators.size(), 0.0);
  for (std::size_t i = 0; i < s.operators.size(); ++i) {
    const auto& op = s.operators[i];
    const auto& p = ne.payoffs[i];
    const auto& st = ne.stats[i];
    const double gain = i < ne.certificate.gains.size() ? ne.certificate.gains[i] : 0.0;
    out += std::to_string(year) + "," + chain + "," + csv_field(op.id) + "," +
           std::to_string(op.region) + "," + b01(ne.converged) + "," + b01(ne.cycle_detected) +
           "," + std::to_string(ne.rounds) + "," + b01(ne.certificate.passes) + "," +
           fmt_num(ne.certificate.max_gain) + "," + fmt_num(gain) + "," +
           fmt_num((1.0 - betas[i]) * op.budget) + "," + fmt_num(ne.costs[i]) + "," +
           fmt_num(p.emissions) + "," + fmt_num(p.travel_cost) + "," + fmt_num(p.profit) + "," +
           fmt_num(p.total) + "," + std::to_string(st.nodes_explored) + "," +
           std::to_string(st.inner_iterations) + "," + fmt_num(st.bound_gap) + "," +
           b01(st.global_optimality_unknown) + "\n";
  }
}

std::string strategies_header() { return "year,chain,operator,edge,scope,build,frequency,raise\n"; }

void append_strategies(std::string& out, const MobilityNetwork& net, std::size_t year,
                       const std::string& chain, const std::vector<OperatorConfig>& ops,
                       const EquilibriumResult& ne) {
  for (std::size_t i = 0; i < ops.size(); ++i)
    for (const auto& [e, d] : ne.profile[i].decisions)
      out += std::to_string(year) + "," + chain + "," + csv_field(ops[i].id) + "," +
             csv_field(net.edge(e).id) + "," + to_string(net.edge(e).scope) + "," +
             b01(d.build) + "," + fmt_num(d.frequency) + ",0\n";
}

void append_coinvest_strategy(std::string& out, const MobilityNetwork& net, std::size_t year,
                              const std::string& chain, const CoInvestResult& co) {
  for (auto e : net.pt_edges()) {
    auto b = co.builds.find(e);
    auto r = co.raises.find(e);
    if (b == co.builds.end() && r == co.raises.end()) continue;
    out += std::to_string(year) + "," + chain + ",joint," + csv_field(net.edge(e).id) + "," +
           to_string(net.edge(e).scope) + "," + b01(b != co.builds.end()) + "," +
           fmt_num(co.state.frequency[e]) + "," +
           fmt_num(r != co.raises.end() ? r->second : 0.0) + "\n";
  }
}

std::string coinvest_header() {
  return "year,chain,pooled_budget,cir,spend,total_payoff,builds,raises,nodes_explored,"
         "inner_iterations,bound_gap,global_optimality_unknown\n";
}

void append_coinvest(std::string& out, std::size_t year, const std::string& chain,
                     const CoInvestResult& co) {
  out += std::to_string(year) + "," + chain + "," + fmt_num(co.pooled_budget) + "," +
         fmt_num(co.cir) + "," + fmt_num(co.spend) + "," + fmt_num(co.total_payoff) + "," +
         std::to_string(co.builds.size()) + "," + std::to_string(co.raises.size()) + "," +
         std::to_string(co.stats.nodes_explored) + "," +
         std::to_string(co.stats.inner_iterations) + "," + fmt_num(co.stats.bound_gap) + "," +
         b01(co.stats.global_optimality_unknown) + "\n";
}

std::string sharing_header() {
  return "year,chain,operator,disagreement,stage1_payoff,stage1_cost,pool,weight,share_flag,"
         "allocation,final_payoff,feasible\n";
}

void append_sharing(std::string& out, const Scenario& s, std::size_t year,
                    const std::string& chain, const SharingOutcome& sh) {
  for (std::size_t i = 0; i < s.operators.size(); ++i)
    out += std::to_string(year) + "," + chain + "," + csv_field(s.operators[i].id) + "," +
           fmt_num(sh.disagreement[i]) + "," + fmt_num(sh.stage1_payoff[i]) + "," +
           fmt_num(sh.stage1_cost[i]) + "," + fmt_num(sh.pool[i]) + "," +
           fmt_num(sh.bargaining_weight[i]) + "," + b01(sh.share_flag[i]) + "," +
           fmt_num(sh.allocation[i]) + "," + fmt_num(sh.final_payoff[i]) + "," +
           b01(sh.feasible) + "\n";
}

std::string improvement_header() {
  return "year,d_emissions,d_travel_cost,d_profit,d_total,coinvest_spend,pct_emissions,"
         "pct_travel_cost,pct_profit,pct_total,pct_clamped\n";
}

void append_improvement(std::string& out, const std::vector<ImprovementRow>& rows) {
  auto opt = [](const std::optional<double>& v) { return v ? fmt_num(*v) : std::string(); };
  for (const auto& r : rows)
    out += std::to_string(r.year) + "," + fmt_num(r.d_emissions) + "," +
           fmt_num(r.d_travel_cost) + "," + fmt_num(r.d_profit) + "," + fmt_num(r.d_total) +
           "," + fmt_num(r.coinvest_spend) + "," + opt(r.pct_emissions) + "," +
           opt(r.pct_travel_cost) + "," + opt(r.pct_profit) + "," + opt(r.pct_total) + "," +
           b01(r.pct_clamped) + "\n";
}

std::string sweep_header(std::size_t n) {
  std::string h;
  for (std::size_t i = 1; i <= n; ++i) h += "beta_" + std::to_string(i) + ",";
  h += "cir,f_co";
  for (std::size_t i = 1; i <= n; ++i) h += ",v_" + std::to_string(i);
  for (std::size_t i = 1; i <= n; ++i) h += ",phi_" + std::to_string(i);
  h += ",feasible";
  for (std::size_t i = 1; i <= n; ++i) h += ",rel_gain_" + std::to_string(i);
  for (std::size_t i = 1; i <= n; ++i) h += ",past_set_" + std::to_string(i);
  return h + "\n";
}

void append_sweep(std::string& out, const SweepResult& sweep) {
  for (const auto& r : sweep.rows) {
    std::string line;
    for (double b : r.betas) line += fmt_num(b) + ",";
    line += fmt_num(r.cir) + "," + fmt_num(r.f_co);
    for (double v : r.v) line += "," + fmt_num(v);
    for (double p : r.phi) line += "," + fmt_num(p);
    line += "," + b01(r.feasible);
    for (std::size_t i = 0; i < r.v.size(); ++i)
      line += "," + (r.phi[i] != 0.0 ? fmt_num((r.v[i] - r.phi[i]) / std::abs(r.phi[i])) : "");
    for (std::size_t i = 0; i < r.v.size(); ++i) {
      const auto& set = sweep.set[i];
      line += "," + b01(set && r.betas[i] > *set);
    }
    out += line + "\n";
  }
}

ReportSet scenario_reports(const Scenario& s, const ScenarioResult& r) {
  const auto& net = *s.network;
  ReportSet rep;
  rep.equilibrium = equilibrium_header();
  rep.strategies = strategies_header();
  rep.coinvest = coinvest_header();
  rep.sharing = sharing_header();
  rep.improvement = improvement_header();
  auto chain_out = [&](const std::vector<YearResult>& years, const std::string& prefix) {
    for (const auto& y : years) {
      append_equilibrium(rep.equilibrium, s, y.year, prefix + "stage1", y.stage1);
      append_equilibrium(rep.equilibrium, s, y.year, prefix + "disagreement", y.disagreement);
      append_strategies(rep.strategies, net, y.year, prefix + "stage1", s.operators, y.stage1);
      append_coinvest_strategy(rep.strategies, net, y.year, prefix + "stage2", y.coinvest);
      append_coinvest(rep.coinvest, y.year, prefix + "stage2", y.coinvest);
      append_sharing(rep.sharing, s, y.year, prefix + "sharing", y.sharing);
    }
  };
  chain_out(r.years, "");
  chain_out(r.baseline, "baseline_");
  for (const auto& so : r.system_optimal) {
    append_coinvest_strategy(rep.strategies, net, so.year, "system_optimal", so.design);
    append_coinvest(rep.coinvest, so.year, "system_optimal", so.design);
  }
  append_improvement(rep.improvement, r.improvement);
  if (!r.years.empty()) rep.state = state_to_json(net, r.years.back().coinvest.state);
  return rep;
}

std::string ue_flows_csv(const MobilityNetwork& net, const UEResult& r) {
  std::string out = "edge,kind,flow\n";
  for (std::size_t e = 0; e < net.edge_count(); ++e)
    out += csv_field(net.edge(e).id) + "," + kind_name(net.edge(e).kind) + "," +
           fmt_num(r.flows[e]) + "\n";
  return out;
}

std::string manifest_json(const ManifestInput& m) {
  json doc;
  doc["tool"] = "ndg";
  doc["version"] = "1.0.0";
  doc["command"] = m.command;
  json inputs = json::array();
  for (const auto& p : m.inputs)
    inputs.push_back({{"path", p.generic_string()}, {"sha256", sha256_hex(read_text(p))}});
  doc["inputs"] = inputs;
  if (!m.scenario_echo.empty()) doc["scenario"] = json::parse(m.scenario_echo);
  json summary = json::object();
  for (const auto& [k, v] : m.summary) summary[k] = json::parse(v);
  doc["summary"] = summary;
  doc["notes"] = m.notes;
  if (m.wall_clock_s) doc["wall_clock_s"] = *m.wall_clock_s;
  return doc.dump(2) + "\n";
}

}  // namespace ndg::io
