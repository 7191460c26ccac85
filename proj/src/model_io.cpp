#include "rsnell/model_io.hpp"

#include "rsnell/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <unordered_map>

namespace rsnell {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open file '" + path + "'");
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ModelError("parse error in '" + path + "': " + e.what());
    }
    return j;
}

} // namespace

TreeModel parse_model(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw ModelError(std::string("parse error: ") + e.what());
    }

    if (!j.is_object() || j.value("kind", "") != "tree_model")
        throw ModelError("not a tree_model document (kind mismatch)");

    TreeModel m;
    try {
        m.tree.horizon = j.at("horizon").get<int>();
        m.tree.dim = j.at("dim").get<int>();

        std::unordered_map<std::string, int> index;
        const auto& jnodes = j.at("nodes");
        m.tree.nodes.reserve(jnodes.size());
        for (const auto& jn : jnodes) {
            TreeNode n;
            n.id = jn.at("id").get<std::string>();
            n.t = jn.at("t").get<int>();
            n.price = jn.at("S").get<Vec>();
            if (jn.contains("dt") && !jn.at("dt").is_null())
                n.dt = jn.at("dt").get<double>();
            index[n.id] = static_cast<int>(m.tree.nodes.size());
            m.tree.nodes.push_back(std::move(n));
        }
        // Second pass resolves parent/successor ids to indices.
        int i = 0;
        for (const auto& jn : jnodes) {
            TreeNode& n = m.tree.nodes[i++];
            const auto& jp = jn.at("parent");
            if (jp.is_null()) {
                n.parent = -1;
                m.tree.root = i - 1;
            } else {
                auto it = index.find(jp.get<std::string>());
                if (it == index.end())
                    throw ModelError("node '" + n.id + "' references unknown parent");
                n.parent = it->second;
            }
            for (const auto& js : jn.at("succ")) {
                auto it = index.find(js.get<std::string>());
                if (it == index.end())
                    throw ModelError("node '" + n.id + "' references unknown successor");
                n.succ.push_back(it->second);
            }
        }
        if (m.tree.root < 0) throw ModelError("tree: no root (node with null parent)");
        m.tree.validate();

        m.family.local.resize(m.tree.nodes.size());
        for (const auto& [id, sets] : j.at("local_sets").items()) {
            auto it = index.find(id);
            if (it == index.end())
                throw ModelError("local_sets references unknown node '" + id + "'");
            m.family.insert({it->second, sets.get<std::vector<Vec>>()});
        }
        validate_family(m.tree, m.family);

        m.payoff = make_scalar(m.tree);
        std::vector<bool> seen(m.tree.nodes.size(), false);
        for (const auto& [id, v] : j.at("payoff").items()) {
            auto it = index.find(id);
            if (it == index.end())
                throw ModelError("payoff references unknown node '" + id + "'");
            m.payoff[it->second] = v.get<double>();
            seen[it->second] = true;
        }
        for (size_t u = 0; u < seen.size(); ++u)
            if (!seen[u])
                throw ModelError("payoff missing node '" + m.tree.nodes[u].id + "'");
        check_scalar_total(m.tree, m.payoff, "payoff");
    } catch (const ModelError&) {
        throw;
    } catch (const std::exception& e) {
        throw ModelError(std::string("malformed tree_model: ") + e.what());
    }
    return m;
}

TreeModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

std::string serialize_model(const TreeModel& model) {
    const ScenarioTree& tree = model.tree;
    ordered_json j;
    j["kind"] = "tree_model";
    j["horizon"] = tree.horizon;
    j["dim"] = tree.dim;
    j["nodes"] = ordered_json::array();
    for (const TreeNode& n : tree.nodes) {
        ordered_json jn;
        jn["id"] = n.id;
        jn["t"] = n.t;
        if (n.parent < 0)
            jn["parent"] = nullptr;
        else
            jn["parent"] = tree.nodes[n.parent].id;
        auto succ = ordered_json::array();
        for (int s : n.succ) succ.push_back(tree.nodes[s].id);
        jn["succ"] = std::move(succ);
        jn["S"] = n.price;
        if (!n.succ.empty()) jn["dt"] = n.dt;
        j["nodes"].push_back(std::move(jn));
    }
    ordered_json jsets = ordered_json::object();
    for (size_t u = 0; u < tree.nodes.size(); ++u)
        if (model.family.covers(static_cast<int>(u)))
            jsets[tree.nodes[u].id] = model.family.at(static_cast<int>(u));
    j["local_sets"] = std::move(jsets);
    ordered_json jpay = ordered_json::object();
    for (size_t u = 0; u < tree.nodes.size(); ++u)
        jpay[tree.nodes[u].id] = model.payoff[u];
    j["payoff"] = std::move(jpay);
    return j.dump(2) + "\n";
}

void save_model(const TreeModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ModelError("cannot write file '" + path + "'");
    out << serialize_model(model);
}

std::string peek_kind(const std::string& path) {
    ordered_json j = parse_json_file(path);
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw ModelError("file '" + path + "' carries no kind discriminator");
    return j["kind"].get<std::string>();
}

} // namespace rsnell
