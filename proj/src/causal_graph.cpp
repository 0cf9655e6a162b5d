#include "frontdoor/causal_graph.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "frontdoor/error.hpp"

namespace frontdoor::graph {

namespace {

// Returns one directed cycle as a node-name list (first node repeated at the end),
// or empty if the graph is acyclic.
std::vector<std::string> find_cycle(const std::vector<Node>& nodes,
                                    const std::vector<std::vector<std::size_t>>& children) {
    enum class Mark { White, Grey, Black };
    std::vector<Mark> mark(nodes.size(), Mark::White);
    std::vector<std::size_t> stack;
    std::vector<std::string> cycle;

    std::function<bool(std::size_t)> visit = [&](std::size_t v) {
        mark[v] = Mark::Grey;
        stack.push_back(v);
        for (std::size_t w : children[v]) {
            if (mark[w] == Mark::Grey) {
                auto start = std::find(stack.begin(), stack.end(), w);
                for (auto it = start; it != stack.end(); ++it) cycle.push_back(nodes[*it].name);
                cycle.push_back(nodes[w].name);
                return true;
            }
            if (mark[w] == Mark::White && visit(w)) return true;
        }
        stack.pop_back();
        mark[v] = Mark::Black;
        return false;
    };

    for (std::size_t v = 0; v < nodes.size(); ++v) {
        if (mark[v] == Mark::White && visit(v)) break;
    }
    return cycle;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::vector<std::size_t> resolve(const Dag& g, const NodeSet& names) {
    std::vector<std::size_t> ids;
    ids.reserve(names.size());
    for (const auto& n : names) ids.push_back(g.id(n));
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

// Nodes reachable from `sources` along active trails given `given`.
std::vector<bool> reachable(const Dag& g, const std::vector<std::size_t>& sources,
                            const std::vector<bool>& in_given) {
    const std::size_t n = g.size();

    // Ancestors of the conditioning set (inclusive) decide whether colliders open.
    std::vector<bool> ancestor_of_given(in_given);
    std::vector<std::size_t> frontier;
    for (std::size_t v = 0; v < n; ++v)
        if (in_given[v]) frontier.push_back(v);
    while (!frontier.empty()) {
        std::size_t v = frontier.back();
        frontier.pop_back();
        for (std::size_t p : g.parents(v)) {
            if (!ancestor_of_given[p]) {
                ancestor_of_given[p] = true;
                frontier.push_back(p);
            }
        }
    }

    // States are (node, arrived-from-child) = "up", (node, arrived-from-parent) = "down".
    std::vector<bool> visited_up(n, false), visited_down(n, false), result(n, false);
    std::vector<std::pair<std::size_t, bool>> queue;
    for (std::size_t s : sources) queue.emplace_back(s, true);

    while (!queue.empty()) {
        auto [v, up] = queue.back();
        queue.pop_back();
        auto& seen = up ? visited_up : visited_down;
        if (seen[v]) continue;
        seen[v] = true;
        if (!in_given[v]) result[v] = true;

        if (up) {
            if (in_given[v]) continue;
            for (std::size_t p : g.parents(v)) queue.emplace_back(p, true);
            for (std::size_t c : g.children(v)) queue.emplace_back(c, false);
        } else {
            if (!in_given[v]) {
                for (std::size_t c : g.children(v)) queue.emplace_back(c, false);
            }
            if (ancestor_of_given[v]) {
                for (std::size_t p : g.parents(v)) queue.emplace_back(p, true);
            }
        }
    }
    return result;
}

bool latent_path(const Dag& g, std::size_t a, std::size_t b) {
    std::vector<bool> seen(g.size(), false);
    std::vector<std::size_t> frontier{a};
    seen[a] = true;
    while (!frontier.empty()) {
        std::size_t v = frontier.back();
        frontier.pop_back();
        auto step = [&](std::size_t w) {
            if (!g.is_latent(v) && !g.is_latent(w)) return false;
            if (w == b) return true;
            if (!seen[w]) {
                seen[w] = true;
                frontier.push_back(w);
            }
            return false;
        };
        for (std::size_t w : g.parents(v))
            if (step(w)) return true;
        for (std::size_t w : g.children(v))
            if (step(w)) return true;
    }
    return false;
}

}  // namespace

Dag Dag::build(const std::vector<Node>& nodes,
               const std::vector<std::pair<std::string, std::string>>& edges) {
    Dag g;
    g.nodes_ = nodes;
    g.parents_.resize(nodes.size());
    g.children_.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].name.empty()) throw Error(Errc::EmptyName, "node name is empty");
        if (!g.index_.emplace(nodes[i].name, i).second)
            throw Error(Errc::DuplicateNode, "duplicate node '" + nodes[i].name + "'");
    }

    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& [from, to] : edges) {
        std::size_t p = g.id(from);
        std::size_t c = g.id(to);
        if (p == c) throw Error(Errc::SelfLoop, "self-loop on '" + from + "'");
        if (!seen.emplace(p, c).second)
            throw Error(Errc::DuplicateEdge, "duplicate edge " + from + " -> " + to);
        g.parents_[c].push_back(p);
        g.children_[p].push_back(c);
        g.edges_.emplace_back(from, to);
    }

    auto cycle = find_cycle(g.nodes_, g.children_);
    if (!cycle.empty()) throw Error(Errc::CycleDetected, "cycle detected: " + join(cycle, " -> "));
    return g;
}

bool Dag::contains(std::string_view name) const {
    return index_.find(std::string(name)) != index_.end();
}

std::size_t Dag::id(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) throw Error(Errc::UnknownNode, "unknown node '" + std::string(name) + "'");
    return it->second;
}

NodeSet Dag::children_of(std::string_view name) const {
    NodeSet out;
    for (std::size_t c : children_[id(name)]) out.push_back(nodes_[c].name);
    return out;
}

bool d_separated(const Dag& g, const NodeSet& a, const NodeSet& b, const NodeSet& c) {
    auto ia = resolve(g, a);
    auto ib = resolve(g, b);
    auto ic = resolve(g, c);

    std::vector<int> owner(g.size(), 0);
    int tag = 1;
    for (const auto* set : {&ia, &ib, &ic}) {
        for (std::size_t v : *set) {
            if (owner[v] != 0) throw Error(Errc::OverlappingSets, "node '" + g.node(v).name + "' appears in two sets");
            owner[v] = tag;
        }
        ++tag;
    }

    std::vector<bool> in_given(g.size(), false);
    for (std::size_t v : ic) in_given[v] = true;
    auto reach = reachable(g, ia, in_given);
    return std::none_of(ib.begin(), ib.end(), [&](std::size_t v) { return reach[v]; });
}

bool mar_holds(const Dag& g, std::string_view value_node, std::string_view indicator_node,
               const NodeSet& given) {
    return d_separated(g, {std::string(indicator_node)}, {std::string(value_node)}, given);
}

bool bidirected_path_exists(const Dag& g, std::string_view a, std::string_view b) {
    std::size_t ia = g.id(a);
    std::size_t ib = g.id(b);
    for (std::size_t v : {ia, ib}) {
        if (g.is_latent(v)) throw Error(Errc::NodeNotObserved, "node '" + g.node(v).name + "' is latent");
    }
    if (ia == ib) return false;
    return latent_path(g, ia, ib);
}

NodeSet confounded_children(const Dag& g, std::string_view x) {
    std::size_t ix = g.id(x);
    NodeSet out;
    for (std::size_t c : g.children(ix))
        if (latent_path(g, ix, c)) out.push_back(g.node(c).name);
    return out;
}

bool frontdoor_identifiable(const Dag& g, std::string_view x) {
    return confounded_children(g, x).empty();
}

Dag parse_graph(std::string_view text) {
    std::vector<Node> nodes;
    std::vector<std::pair<std::string, std::string>> edges;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::vector<std::string> tok;
        for (std::string t; fields >> t;) tok.push_back(t);
        if (tok.empty()) continue;

        auto fail = [&](const std::string& why) {
            return Error(Errc::GraphParse, "line " + std::to_string(lineno) + ": " + why);
        };
        if (tok[0] == "node") {
            if (tok.size() != 3) throw fail("expected 'node <name> observed|latent'");
            NodeKind kind;
            if (tok[2] == "observed") kind = NodeKind::Observed;
            else if (tok[2] == "latent") kind = NodeKind::Latent;
            else throw fail("unknown node kind '" + tok[2] + "'");
            nodes.push_back({tok[1], kind});
        } else if (tok[0] == "edge") {
            if (tok.size() != 3) throw fail("expected 'edge <parent> <child>'");
            edges.emplace_back(tok[1], tok[2]);
        } else {
            throw fail("unknown declaration '" + tok[0] + "'");
        }
    }
    return Dag::build(nodes, edges);
}

Dag load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::InputMissing, "cannot open graph file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_graph(buf.str());
}

std::string format_graph(const Dag& g) {
    std::string out;
    for (const auto& n : g.nodes())
        out += "node " + n.name + (n.kind == NodeKind::Latent ? " latent\n" : " observed\n");
    for (const auto& [p, c] : g.edges()) out += "edge " + p + " " + c + "\n";
    return out;
}

std::string_view frontdoor_model_text() {
    return R"(# Frontdoor model: X affects Y only through Z; U confounds X and Y.
node U latent
node X observed
node Z observed
node Y observed
edge U X
edge U Y
edge X Z
edge Z Y
)";
}

std::string_view design_model_text() {
    return R"(# Causal model with design for the frontdoor example.
# Population variables are unobserved; X*, Z*, Y* are the recorded values.
node U latent
node X latent
node Z latent
node Y latent
node m_Omega observed
node m_1 observed
node M_X observed
node M_Z observed
node X* observed
node Z* observed
node Y* observed
edge U X
edge U Y
edge X Z
edge Z Y
edge Y M_X
edge Y M_Z
edge m_Omega m_1
edge m_1 X*
edge m_1 Z*
edge m_1 Y*
edge X X*
edge Z Z*
edge Y Y*
edge M_X X*
edge M_Z Z*
)";
}

const Dag& frontdoor_model() {
    static const Dag g = parse_graph(frontdoor_model_text());
    return g;
}

const Dag& design_model() {
    static const Dag g = parse_graph(design_model_text());
    return g;
}

}  // namespace frontdoor::graph
