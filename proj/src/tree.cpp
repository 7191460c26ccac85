#include "rsnell/tree.hpp"

#include "rsnell/errors.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace rsnell {

int ScenarioTree::index_of(const std::string& id) const {
    for (int i = 0; i < node_count(); ++i)
        if (nodes[i].id == id) return i;
    return -1;
}

Vec ScenarioTree::increment(int child) const {
    const TreeNode& c = nodes[child];
    const TreeNode& p = nodes[c.parent];
    Vec d(dim);
    for (int j = 0; j < dim; ++j) d[j] = c.price[j] - p.price[j];
    return d;
}

std::vector<int> ScenarioTree::by_time() const {
    std::vector<int> order(nodes.size());
    for (int i = 0; i < node_count(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return nodes[a].t < nodes[b].t; });
    return order;
}

std::vector<int> ScenarioTree::interior() const {
    std::vector<int> out;
    for (int u : by_time())
        if (!is_terminal(u)) out.push_back(u);
    return out;
}

std::vector<int> ScenarioTree::subtree(int u) const {
    std::vector<int> out{u};
    for (size_t k = 0; k < out.size(); ++k)
        for (int s : nodes[out[k]].succ) out.push_back(s);
    std::stable_sort(out.begin(), out.end(),
                     [&](int a, int b) { return nodes[a].t < nodes[b].t; });
    return out;
}

std::vector<int> ScenarioTree::at_time(int t) const {
    std::vector<int> out;
    for (int i = 0; i < node_count(); ++i)
        if (nodes[i].t == t) out.push_back(i);
    return out;
}

void ScenarioTree::validate() const {
    if (horizon < 1) throw ModelError("tree: horizon must be >= 1");
    if (dim < 1) throw ModelError("tree: dim must be >= 1");
    if (nodes.empty()) throw ModelError("tree: no nodes");

    std::unordered_set<std::string> ids;
    int root_count = 0;
    for (int i = 0; i < node_count(); ++i) {
        const TreeNode& n = nodes[i];
        if (!ids.insert(n.id).second)
            throw ModelError("tree: duplicate node id '" + n.id + "'");
        if (n.t < 0 || n.t > horizon)
            throw ModelError("tree: node '" + n.id + "' has time outside [0, horizon]");
        if (n.parent < 0) {
            ++root_count;
            if (n.t != 0)
                throw ModelError("tree: root '" + n.id + "' must sit at t = 0");
        } else {
            if (n.parent >= node_count())
                throw ModelError("tree: node '" + n.id + "' has dangling parent");
            if (nodes[n.parent].t + 1 != n.t)
                throw ModelError("tree: node '" + n.id + "' breaks successor time = parent time + 1");
            const auto& ps = nodes[n.parent].succ;
            if (std::find(ps.begin(), ps.end(), i) == ps.end())
                throw ModelError("tree: node '" + n.id + "' missing from its parent's successor list");
        }
        if (static_cast<int>(n.price.size()) != dim)
            throw ModelError("tree: node '" + n.id + "' price dimension != dim");
        for (double s : n.price)
            if (!std::isfinite(s))
                throw ModelError("tree: node '" + n.id + "' has non-finite price");
        if (n.t < horizon) {
            if (n.succ.empty())
                throw ModelError("tree: node '" + n.id + "' at t < horizon has no successor");
            if (!(n.dt > 0.0) || !std::isfinite(n.dt))
                throw ModelError("tree: node '" + n.id + "' needs dt > 0");
        } else if (!n.succ.empty()) {
            throw ModelError("tree: node '" + n.id + "' at t = horizon has successors");
        }
        for (int s : n.succ) {
            if (s < 0 || s >= node_count())
                throw ModelError("tree: node '" + n.id + "' has dangling successor");
            if (nodes[s].parent != i)
                throw ModelError("tree: node '" + nodes[s].id + "' disagrees with parent '" + n.id + "'");
        }
    }
    if (root_count != 1) throw ModelError("tree: expected exactly one root");

    int root_idx = root;
    if (root_idx < 0)
        for (int i = 0; i < node_count(); ++i)
            if (nodes[i].parent < 0) root_idx = i;
    std::vector<int> reach = subtree(root_idx);
    if (static_cast<int>(reach.size()) != node_count())
        throw ModelError("tree: not every node is reachable from the root");
}

ScalarProcess make_scalar(const ScenarioTree& tree, double fill) {
    return ScalarProcess(tree.nodes.size(), fill);
}

void check_scalar_total(const ScenarioTree& tree, const ScalarProcess& p,
                        const std::string& what) {
    if (p.size() != tree.nodes.size())
        throw ModelError(what + ": process not total on the tree's nodes");
    for (size_t i = 0; i < p.size(); ++i)
        if (!std::isfinite(p[i]))
            throw ModelError(what + ": non-finite value at node '" + tree.nodes[i].id + "'");
}

} // namespace rsnell
