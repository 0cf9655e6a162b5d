#ifndef FRONTDOOR_CAUSAL_GRAPH_HPP
#define FRONTDOOR_CAUSAL_GRAPH_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace frontdoor::graph {

enum class NodeKind { Observed, Latent };

struct Node {
    std::string name;
    NodeKind kind = NodeKind::Observed;
};

using NodeSet = std::vector<std::string>;

/// Immutable directed acyclic graph over named nodes. Latent confounders are
/// explicit nodes; there are no bidirected edges.
class Dag {
public:
    Dag() = default;

    /// Validates names, endpoints and acyclicity. Throws frontdoor::Error with
    /// CycleDetected, UnknownNode, DuplicateNode, DuplicateEdge, SelfLoop or
    /// EmptyName.
    static Dag build(const std::vector<Node>& nodes,
                     const std::vector<std::pair<std::string, std::string>>& edges);

    std::size_t size() const noexcept { return nodes_.size(); }
    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const std::vector<std::pair<std::string, std::string>>& edges() const noexcept { return edges_; }

    bool contains(std::string_view name) const;
    /// Throws UnknownNode.
    std::size_t id(std::string_view name) const;
    const Node& node(std::size_t id) const { return nodes_[id]; }
    bool is_latent(std::size_t id) const { return nodes_[id].kind == NodeKind::Latent; }

    const std::vector<std::size_t>& parents(std::size_t id) const { return parents_[id]; }
    const std::vector<std::size_t>& children(std::size_t id) const { return children_[id]; }
    NodeSet children_of(std::string_view name) const;

private:
    std::vector<Node> nodes_;
    std::vector<std::pair<std::string, std::string>> edges_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::vector<std::size_t>> parents_;
    std::vector<std::vector<std::size_t>> children_;
};

inline Dag build_dag(const std::vector<Node>& nodes,
                     const std::vector<std::pair<std::string, std::string>>& edges) {
    return Dag::build(nodes, edges);
}

/// True iff every path between a and b is blocked by c. Uses the
/// reachability (Bayes-ball) formulation, linear in nodes + edges.
bool d_separated(const Dag& g, const NodeSet& a, const NodeSet& b, const NodeSet& c);

/// MAR certificate: indicator independent of the value node given `given`.
bool mar_holds(const Dag& g, std::string_view value_node, std::string_view indicator_node,
               const NodeSet& given);

/// True iff some path joins a and b with every edge incident to a latent node.
/// Both endpoints must be observed (NodeNotObserved otherwise).
bool bidirected_path_exists(const Dag& g, std::string_view a, std::string_view b);

/// Children of x joined to x by a bidirected path, in child order. A latent
/// child always counts, through the edge x -> child itself.
NodeSet confounded_children(const Dag& g, std::string_view x);

/// True iff no child of x is joined to x by a bidirected path.
bool frontdoor_identifiable(const Dag& g, std::string_view x);

/// Plain-text format: `node <name> observed|latent`, `edge <parent> <child>`,
/// `#` comments. Throws GraphParse with the line number on malformed input.
Dag parse_graph(std::string_view text);
Dag load_graph(const std::string& path);
std::string format_graph(const Dag& g);

/// The substantive model: U latent, U->X, U->Y, X->Z, Z->Y.
const Dag& frontdoor_model();
/// The causal model with design: population variables, recorded copies,
/// missingness indicators and sampling indicators.
const Dag& design_model();

std::string_view frontdoor_model_text();
std::string_view design_model_text();

}  // namespace frontdoor::graph

#endif
