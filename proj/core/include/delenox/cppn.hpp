#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "delenox/activation.hpp"
#include "delenox/random.hpp"

namespace delenox {

enum class NodeKind : std::uint8_t { InputX, InputC, Bias, Hidden, Output };

std::string_view to_string(NodeKind kind);
std::optional<NodeKind> parse_node_kind(std::string_view name);

struct NodeGene {
  int id = 0;
  NodeKind kind = NodeKind::Hidden;
  /// Ignored for input and bias nodes.
  ActivationKind activation = ActivationKind::Sigmoid;

  bool is_input() const {
    return kind == NodeKind::InputX || kind == NodeKind::InputC || kind == NodeKind::Bias;
  }
  friend bool operator==(const NodeGene&, const NodeGene&) = default;
};

struct LinkGene {
  int from = 0;
  int to = 0;
  double weight = 0.0;
  int innovation = 0;

  friend bool operator==(const LinkGene&, const LinkGene&) = default;
};

/// Returns a description of the first structural problem found, or nullopt
/// for a well-formed feed-forward CPPN: unique node ids, exactly one x, C,
/// bias and output node, links between existing nodes, no link into an input
/// or out of the output, no duplicate (from, to) pair, no directed cycle.
std::optional<std::string> find_structural_error(const std::vector<NodeGene>& nodes,
                                                 const std::vector<LinkGene>& links);

/// Feed-forward CPPN genotype. Immutable once constructed; the constructor
/// rejects anything find_structural_error() complains about.
class CppnGenome {
 public:
  CppnGenome(std::vector<NodeGene> nodes, std::vector<LinkGene> links);

  const std::vector<NodeGene>& nodes() const { return nodes_; }
  const std::vector<LinkGene>& links() const { return links_; }

  std::size_t hidden_count() const;
  const NodeGene* find_node(int id) const;
  int output_id() const;
  int next_node_id() const;
  int next_innovation() const;

  friend bool operator==(const CppnGenome&, const CppnGenome&) = default;

 private:
  std::vector<NodeGene> nodes_;
  std::vector<LinkGene> links_;
};

/// Genome compiled into topological order for repeated queries.
class CppnNetwork {
 public:
  explicit CppnNetwork(const CppnGenome& genome);

  /// Output activation for query point (x, c); the bias input is fixed at 1.
  double operator()(double x, double c) const;

 private:
  struct Incoming {
    std::size_t source;
    double weight;
  };
  struct Step {
    std::size_t node;
    ActivationKind activation;
    std::size_t first_incoming;
    std::size_t incoming_count;
  };

  std::size_t node_count_ = 0;
  std::size_t x_slot_ = 0;
  std::size_t c_slot_ = 0;
  std::size_t bias_slot_ = 0;
  std::size_t output_slot_ = 0;
  std::vector<Step> steps_;
  std::vector<Incoming> incoming_;
};

double evaluate(const CppnGenome& genome, double x, double c);

/// Zero hidden nodes; x, C and bias each linked to the output with weights
/// drawn from U[-1, 1]; output activation drawn uniformly.
CppnGenome random_minimal(Rng& rng);

struct MutationParams {
  double p_add_node = 0.05;
  double p_add_link = 0.10;
  double p_change_activation = 0.05;
  double weight_perturb_magnitude = 0.1;

  void validate() const;
};

struct MutationOutcome {
  CppnGenome genome;
  bool added_node = false;
  bool added_link = false;
  bool changed_activation = false;
};

/// One mutation event. The three structural operators fire independently with
/// their own probabilities (a draw that cannot apply, e.g. add-link on a fully
/// connected genome, is skipped); every link weight is then perturbed by
/// U[-m, m].
MutationOutcome mutate_traced(const CppnGenome& genome, const MutationParams& params, Rng& rng);

inline CppnGenome mutate(const CppnGenome& genome, const MutationParams& params, Rng& rng) {
  return mutate_traced(genome, params, rng).genome;
}

/// Line format, one gene per line:
///   N <id> <kind> <activation>
///   L <from> <to> <weight> <innovation>
/// Weights are written in shortest round-trip form.
std::string serialize(const CppnGenome& genome);
CppnGenome parse_genome(std::string_view text);

}  // namespace delenox
