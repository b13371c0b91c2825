#include "delenox/cppn.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>
#include <unordered_map>
#include <utility>

#include <fmt/format.h>

#include "delenox/error.hpp"

namespace delenox {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::InputX: return "input-x";
    case NodeKind::InputC: return "input-c";
    case NodeKind::Bias: return "bias";
    case NodeKind::Hidden: return "hidden";
    case NodeKind::Output: return "output";
  }
  return "?";
}

std::optional<NodeKind> parse_node_kind(std::string_view name) {
  for (NodeKind kind : {NodeKind::InputX, NodeKind::InputC, NodeKind::Bias, NodeKind::Hidden,
                        NodeKind::Output}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

namespace {

using IndexMap = std::unordered_map<int, std::size_t>;

IndexMap index_nodes(const std::vector<NodeGene>& nodes) {
  IndexMap index;
  index.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) index.emplace(nodes[i].id, i);
  return index;
}

// Kahn's algorithm over node indices. Ties are broken by node order so the
// result is deterministic. Returns fewer than nodes.size() entries on a cycle.
std::vector<std::size_t> topological_order(const std::vector<NodeGene>& nodes,
                                           const std::vector<LinkGene>& links,
                                           const IndexMap& index) {
  std::vector<std::vector<std::size_t>> out(nodes.size());
  std::vector<std::size_t> in_degree(nodes.size(), 0);
  for (const LinkGene& link : links) {
    std::size_t from = index.at(link.from);
    std::size_t to = index.at(link.to);
    out[from].push_back(to);
    ++in_degree[to];
  }
  std::set<std::size_t> ready;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (in_degree[i] == 0) ready.insert(i);
  }
  std::vector<std::size_t> order;
  order.reserve(nodes.size());
  while (!ready.empty()) {
    std::size_t n = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(n);
    for (std::size_t m : out[n]) {
      if (--in_degree[m] == 0) ready.insert(m);
    }
  }
  return order;
}

}  // namespace

std::optional<std::string> find_structural_error(const std::vector<NodeGene>& nodes,
                                                 const std::vector<LinkGene>& links) {
  IndexMap index;
  int counts[5] = {0, 0, 0, 0, 0};
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!index.emplace(nodes[i].id, i).second) {
      return fmt::format("duplicate node id {}", nodes[i].id);
    }
    ++counts[static_cast<int>(nodes[i].kind)];
  }
  if (counts[static_cast<int>(NodeKind::InputX)] != 1) return "expected exactly one input-x node";
  if (counts[static_cast<int>(NodeKind::InputC)] != 1) return "expected exactly one input-c node";
  if (counts[static_cast<int>(NodeKind::Bias)] != 1) return "expected exactly one bias node";
  if (counts[static_cast<int>(NodeKind::Output)] != 1) return "expected exactly one output node";

  std::set<std::pair<int, int>> seen;
  for (const LinkGene& link : links) {
    auto from = index.find(link.from);
    auto to = index.find(link.to);
    if (from == index.end() || to == index.end()) {
      return fmt::format("link {}->{} references a missing node", link.from, link.to);
    }
    if (nodes[to->second].is_input()) {
      return fmt::format("link {}->{} feeds an input node", link.from, link.to);
    }
    if (nodes[from->second].kind == NodeKind::Output) {
      return fmt::format("link {}->{} leaves the output node", link.from, link.to);
    }
    if (!seen.emplace(link.from, link.to).second) {
      return fmt::format("duplicate link {}->{}", link.from, link.to);
    }
  }
  if (topological_order(nodes, links, index).size() != nodes.size()) {
    return "links form a directed cycle";
  }
  return std::nullopt;
}

CppnGenome::CppnGenome(std::vector<NodeGene> nodes, std::vector<LinkGene> links)
    : nodes_(std::move(nodes)), links_(std::move(links)) {
  if (auto error = find_structural_error(nodes_, links_)) {
    throw ContractViolation("invalid CPPN genome: " + *error);
  }
}

std::size_t CppnGenome::hidden_count() const {
  return static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(), [](const NodeGene& n) { return n.kind == NodeKind::Hidden; }));
}

const NodeGene* CppnGenome::find_node(int id) const {
  auto it = std::find_if(nodes_.begin(), nodes_.end(), [id](const NodeGene& n) { return n.id == id; });
  return it == nodes_.end() ? nullptr : &*it;
}

int CppnGenome::output_id() const {
  for (const NodeGene& n : nodes_) {
    if (n.kind == NodeKind::Output) return n.id;
  }
  return -1;  // unreachable for a constructed genome
}

int CppnGenome::next_node_id() const {
  int next = 0;
  for (const NodeGene& n : nodes_) next = std::max(next, n.id + 1);
  return next;
}

int CppnGenome::next_innovation() const {
  int next = 0;
  for (const LinkGene& l : links_) next = std::max(next, l.innovation + 1);
  return next;
}

CppnNetwork::CppnNetwork(const CppnGenome& genome) {
  const auto& nodes = genome.nodes();
  const auto& links = genome.links();
  const IndexMap index = index_nodes(nodes);
  node_count_ = nodes.size();

  std::vector<std::vector<Incoming>> incoming(nodes.size());
  for (const LinkGene& link : links) {
    incoming[index.at(link.to)].push_back({index.at(link.from), link.weight});
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    switch (nodes[i].kind) {
      case NodeKind::InputX: x_slot_ = i; break;
      case NodeKind::InputC: c_slot_ = i; break;
      case NodeKind::Bias: bias_slot_ = i; break;
      case NodeKind::Output: output_slot_ = i; break;
      case NodeKind::Hidden: break;
    }
  }
  for (std::size_t n : topological_order(nodes, links, index)) {
    if (nodes[n].is_input()) continue;
    steps_.push_back({n, nodes[n].activation, incoming_.size(), incoming[n].size()});
    incoming_.insert(incoming_.end(), incoming[n].begin(), incoming[n].end());
  }
}

double CppnNetwork::operator()(double x, double c) const {
  std::vector<double> value(node_count_, 0.0);
  value[x_slot_] = x;
  value[c_slot_] = c;
  value[bias_slot_] = 1.0;
  for (const Step& step : steps_) {
    double sum = 0.0;
    for (std::size_t i = step.first_incoming; i < step.first_incoming + step.incoming_count; ++i) {
      sum += incoming_[i].weight * value[incoming_[i].source];
    }
    value[step.node] = activate(step.activation, sum);
  }
  return value[output_slot_];
}

double evaluate(const CppnGenome& genome, double x, double c) { return CppnNetwork(genome)(x, c); }

CppnGenome random_minimal(Rng& rng) {
  std::vector<NodeGene> nodes = {
      {0, NodeKind::InputX, ActivationKind::Sigmoid},
      {1, NodeKind::InputC, ActivationKind::Sigmoid},
      {2, NodeKind::Bias, ActivationKind::Sigmoid},
      {3, NodeKind::Output, ActivationKind::Sigmoid},
  };
  std::vector<LinkGene> links;
  for (int input = 0; input < 3; ++input) {
    links.push_back({input, 3, uniform(rng, -1.0, 1.0), input});
  }
  nodes[3].activation = kAllActivations[uniform_index(rng, kAllActivations.size())];
  return CppnGenome(std::move(nodes), std::move(links));
}

void MutationParams::validate() const {
  for (double p : {p_add_node, p_add_link, p_change_activation}) {
    if (!(p >= 0.0 && p <= 1.0)) throw ContractViolation("mutation probability outside [0,1]");
  }
  if (!(weight_perturb_magnitude >= 0.0)) {
    throw ContractViolation("weight perturbation magnitude must be non-negative");
  }
}

namespace {

void add_node(std::vector<NodeGene>& nodes, std::vector<LinkGene>& links, int next_id,
              int next_innovation, Rng& rng) {
  const std::size_t victim = uniform_index(rng, links.size());
  const LinkGene old = links[victim];
  const ActivationKind activation = kAllActivations[uniform_index(rng, kAllActivations.size())];
  links.erase(links.begin() + static_cast<std::ptrdiff_t>(victim));
  nodes.push_back({next_id, NodeKind::Hidden, activation});
  links.push_back({old.from, next_id, 1.0, next_innovation});
  links.push_back({next_id, old.to, old.weight, next_innovation + 1});
}

// Candidate (from, to) pairs that are unconnected and keep the graph acyclic.
std::vector<std::pair<int, int>> open_link_slots(const std::vector<NodeGene>& nodes,
                                                 const std::vector<LinkGene>& links) {
  const IndexMap index = index_nodes(nodes);
  std::vector<std::vector<std::size_t>> out(nodes.size());
  std::set<std::pair<int, int>> existing;
  for (const LinkGene& link : links) {
    out[index.at(link.from)].push_back(index.at(link.to));
    existing.emplace(link.from, link.to);
  }

  std::vector<std::pair<int, int>> slots;
  std::vector<char> reach(nodes.size());
  std::vector<std::size_t> stack;
  for (std::size_t t = 0; t < nodes.size(); ++t) {
    if (nodes[t].is_input()) continue;
    // A link s -> t closes a cycle iff s is reachable from t.
    std::fill(reach.begin(), reach.end(), 0);
    stack.assign(1, t);
    reach[t] = 1;
    while (!stack.empty()) {
      std::size_t n = stack.back();
      stack.pop_back();
      for (std::size_t m : out[n]) {
        if (!reach[m]) {
          reach[m] = 1;
          stack.push_back(m);
        }
      }
    }
    for (std::size_t s = 0; s < nodes.size(); ++s) {
      if (reach[s] || nodes[s].kind == NodeKind::Output) continue;
      if (existing.count({nodes[s].id, nodes[t].id})) continue;
      slots.emplace_back(nodes[s].id, nodes[t].id);
    }
  }
  return slots;
}

}  // namespace

MutationOutcome mutate_traced(const CppnGenome& genome, const MutationParams& params, Rng& rng) {
  std::vector<NodeGene> nodes = genome.nodes();
  std::vector<LinkGene> links = genome.links();

  const bool want_node = bernoulli(rng, params.p_add_node);
  const bool want_link = bernoulli(rng, params.p_add_link);
  const bool want_activation = bernoulli(rng, params.p_change_activation);

  bool added_node = false;
  bool added_link = false;
  bool changed_activation = false;

  if (want_node && !links.empty()) {
    add_node(nodes, links, genome.next_node_id(), genome.next_innovation(), rng);
    added_node = true;
  }
  if (want_link) {
    auto slots = open_link_slots(nodes, links);
    if (!slots.empty()) {
      auto [from, to] = slots[uniform_index(rng, slots.size())];
      int innovation = 0;
      for (const LinkGene& l : links) innovation = std::max(innovation, l.innovation + 1);
      links.push_back({from, to, uniform(rng, -1.0, 1.0), innovation});
      added_link = true;
    }
  }
  if (want_activation) {
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!nodes[i].is_input()) eligible.push_back(i);
    }
    NodeGene& node = nodes[eligible[uniform_index(rng, eligible.size())]];
    node.activation = kAllActivations[uniform_index(rng, kAllActivations.size())];
    changed_activation = true;
  }
  if (params.weight_perturb_magnitude > 0.0) {
    const double m = params.weight_perturb_magnitude;
    for (LinkGene& link : links) link.weight += uniform(rng, -m, m);
  }

  return {CppnGenome(std::move(nodes), std::move(links)), added_node, added_link,
          changed_activation};
}

std::string serialize(const CppnGenome& genome) {
  std::string out;
  for (const NodeGene& n : genome.nodes()) {
    out += fmt::format("N {} {} {}\n", n.id, to_string(n.kind),
                       n.is_input() ? std::string_view("none") : to_string(n.activation));
  }
  for (const LinkGene& l : genome.links()) {
    out += fmt::format("L {} {} {} {}\n", l.from, l.to, l.weight, l.innovation);
  }
  return out;
}

namespace {

template <typename T>
T parse_number(const std::string& token, std::size_t line_no) {
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw FormatError(fmt::format("genome line {}: bad number '{}'", line_no, token));
  }
  return value;
}

}  // namespace

CppnGenome parse_genome(std::string_view text) {
  std::vector<NodeGene> nodes;
  std::vector<LinkGene> links;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string tag;
    if (!(fields >> tag) || tag.starts_with('#')) continue;
    if (tag == "N") {
      std::string id, kind, activation;
      if (!(fields >> id >> kind >> activation)) {
        throw FormatError(fmt::format("genome line {}: expected 'N id kind activation'", line_no));
      }
      auto node_kind = parse_node_kind(kind);
      if (!node_kind) throw FormatError(fmt::format("genome line {}: unknown kind '{}'", line_no, kind));
      NodeGene node{parse_number<int>(id, line_no), *node_kind, ActivationKind::Sigmoid};
      if (!node.is_input()) {
        auto act = parse_activation(activation);
        if (!act) {
          throw FormatError(fmt::format("genome line {}: unknown activation '{}'", line_no, activation));
        }
        node.activation = *act;
      }
      nodes.push_back(node);
    } else if (tag == "L") {
      std::string from, to, weight, innovation;
      if (!(fields >> from >> to >> weight >> innovation)) {
        throw FormatError(
            fmt::format("genome line {}: expected 'L from to weight innovation'", line_no));
      }
      links.push_back({parse_number<int>(from, line_no), parse_number<int>(to, line_no),
                       parse_number<double>(weight, line_no),
                       parse_number<int>(innovation, line_no)});
    } else {
      throw FormatError(fmt::format("genome line {}: unknown record '{}'", line_no, tag));
    }
  }
  if (auto error = find_structural_error(nodes, links)) {
    throw FormatError("invalid genome: " + *error);
  }
  return CppnGenome(std::move(nodes), std::move(links));
}

}  // namespace delenox
