#include "rsnell/families.hpp"

#include "rsnell/errors.hpp"
#include "rsnell/hedging.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace rsnell {

void UVSpec::validate() const {
    if (!(sigma_lo > 0.0) || !(sigma_hi >= sigma_lo))
        throw ModelError("uv spec: need 0 < sigma_lo <= sigma_hi");
    if (steps < 1) throw ModelError("uv spec: steps must be >= 1");
    if (!(dt > 0.0)) throw ModelError("uv spec: dt must be > 0");
    if (!(s0 > 0.0)) throw ModelError("uv spec: s0 must be > 0");
    if (move_grid < 3 || move_grid % 2 == 0)
        throw ModelError("uv spec: move_grid must be an odd count >= 3");
}

void LevySpec::validate() const {
    if (triplets.empty()) throw ModelError("levy spec: need at least one triplet");
    if (steps < 1) throw ModelError("levy spec: steps must be >= 1");
    if (!(dt > 0.0)) throw ModelError("levy spec: dt must be > 0");
    for (const auto& th : triplets) {
        if (th.diffusion < 0.0) throw ModelError("levy spec: diffusion c must be >= 0");
        for (const auto& [size, rate] : th.jumps) {
            (void)size;
            if (rate < 0.0) throw ModelError("levy spec: jump rates must be >= 0");
        }
    }
}

namespace {

// Expands a one-step template (fixed successor offsets and local vectors)
// into a full tree. `child_price` maps a parent price and move index to the
// successor price.
template <typename PriceFn>
ScenarioTree expand_tree(int steps, double dt, double s0, int branches,
                         PriceFn child_price) {
    double nodes = 1.0, layer = 1.0;
    for (int t = 0; t < steps; ++t) {
        layer *= branches;
        nodes += layer;
    }
    if (nodes > 2e6)
        throw ModelError("generated tree would exceed 2e6 nodes; reduce steps or moves");

    ScenarioTree tree;
    tree.horizon = steps;
    tree.dim = 1;
    TreeNode root;
    root.id = "r";
    root.t = 0;
    root.price = {s0};
    root.dt = dt;
    tree.nodes.push_back(root);
    tree.root = 0;

    std::vector<int> frontier{0};
    for (int t = 1; t <= steps; ++t) {
        std::vector<int> next;
        for (int parent : frontier)
            for (int j = 0; j < branches; ++j) {
                TreeNode n;
                n.id = tree.nodes[parent].id + "." + std::to_string(j);
                n.t = t;
                n.parent = parent;
                n.price = {child_price(tree.nodes[parent].price[0], j)};
                n.dt = dt;
                const int idx = tree.node_count();
                tree.nodes.push_back(std::move(n));
                tree.nodes[parent].succ.push_back(idx);
                next.push_back(idx);
            }
        frontier = std::move(next);
    }
    return tree;
}

// Zero-mean distribution over the given returns with variance pinned at v.
// Prefers the support {-outer, 0, +outer}; falls back to full vertex
// enumeration with the variance row appended.
Vec variance_vertex(const Vec& returns, double v) {
    const int m = static_cast<int>(returns.size());
    Mat eq(3, Vec(m, 0.0));
    for (int i = 0; i < m; ++i) {
        eq[0][i] = 1.0;
        eq[1][i] = returns[i];
        eq[2][i] = returns[i] * returns[i];
    }
    const Vec rhs{1.0, 0.0, v};

    const int center = (m - 1) / 2;
    const std::vector<int> preferred{0, center, m - 1};
    Mat sub(3, Vec(3, 0.0));
    for (int r = 0; r < 3; ++r)
        for (int k = 0; k < 3; ++k) sub[r][k] = eq[r][preferred[k]];
    if (auto sol = solve_unique(sub, rhs, 1e-12)) {
        bool ok = true;
        for (double w : *sol)
            if (w < -1e-12) ok = false;
        if (ok) {
            Vec p(m, 0.0);
            for (int k = 0; k < 3; ++k) p[preferred[k]] = std::max((*sol)[k], 0.0);
            return p;
        }
    }
    auto verts = polytope_vertices(eq, rhs);
    if (verts.empty())
        throw ModelError("uv_lattice: variance " + std::to_string(v) +
                         " unattainable on the move grid");
    return verts.front();
}

} // namespace

GeneratedModel uv_lattice(const UVSpec& spec) {
    spec.validate();
    const int k = (spec.move_grid - 1) / 2;
    const double step = spec.sigma_hi * std::sqrt(spec.dt) / k;

    Vec moves(spec.move_grid), returns(spec.move_grid);
    for (int j = -k; j <= k; ++j) {
        moves[j + k] = j * step;
        returns[j + k] = std::expm1(j * step);
    }

    const double v_lo = spec.sigma_lo * spec.sigma_lo * spec.dt;
    const double v_hi = spec.sigma_hi * spec.sigma_hi * spec.dt;
    std::vector<Vec> local{variance_vertex(returns, v_lo)};
    if (v_hi > v_lo) local.push_back(variance_vertex(returns, v_hi));

    GeneratedModel model;
    model.tree = expand_tree(spec.steps, spec.dt, spec.s0, spec.move_grid,
                             [&](double s, int j) { return s * std::exp(moves[j]); });
    model.family.local.resize(model.tree.nodes.size());
    for (int u = 0; u < model.tree.node_count(); ++u)
        if (!model.tree.is_terminal(u)) model.family.insert({u, local});

    model.targets_relative = true;
    model.targets.push_back({0.0, v_lo});
    if (v_hi > v_lo) model.targets.push_back({0.0, v_hi});

    model.tree.validate();
    validate_family(model.tree, model.family);
    return model;
}

GeneratedModel levy_tree(const LevySpec& spec) {
    spec.validate();

    // Gather every offset any triplet can reach, then merge within 1e-12.
    std::vector<std::map<double, double>> raw; // offset -> weight per triplet
    std::vector<double> offsets;
    for (const auto& th : spec.triplets) {
        std::map<double, double> w;
        double jump_mass = 0.0;
        for (const auto& [size, rate] : th.jumps) {
            const double mass = rate * spec.dt;
            jump_mass += mass;
            if (mass > 0.0) w[size] += mass;
        }
        const double remainder = 1.0 - jump_mass;
        if (remainder < 0.0)
            throw ModelError("levy_tree: dt too large (negative remainder weight)");
        const double drift_offset = th.drift * spec.dt;
        if (th.diffusion > 0.0) {
            const double sigma_step = std::sqrt(th.diffusion * spec.dt);
            w[drift_offset + sigma_step] += remainder / 2.0;
            w[drift_offset - sigma_step] += remainder / 2.0;
        } else {
            w[drift_offset] += remainder;
        }
        for (const auto& [off, mass] : w) {
            (void)mass;
            offsets.push_back(off);
        }
        raw.push_back(std::move(w));
    }
    std::sort(offsets.begin(), offsets.end());
    Vec grid;
    for (double off : offsets)
        if (grid.empty() || off - grid.back() > 1e-12) grid.push_back(off);

    std::vector<Vec> local;
    for (const auto& w : raw) {
        Vec p(grid.size(), 0.0);
        for (const auto& [off, mass] : w) {
            const auto it = std::lower_bound(grid.begin(), grid.end(), off - 1e-12);
            p[static_cast<size_t>(it - grid.begin())] += mass;
        }
        if (std::find(local.begin(), local.end(), p) == local.end())
            local.push_back(std::move(p));
    }

    GeneratedModel model;
    model.tree = expand_tree(spec.steps, spec.dt, spec.s0, static_cast<int>(grid.size()),
                             [&](double s, int j) { return s + grid[j]; });
    model.family.local.resize(model.tree.nodes.size());
    for (int u = 0; u < model.tree.node_count(); ++u)
        if (!model.tree.is_terminal(u)) model.family.insert({u, local});

    for (const auto& th : spec.triplets) {
        MomentTarget tgt;
        tgt.mean = th.drift * spec.dt;
        tgt.variance = th.diffusion * spec.dt;
        for (const auto& [size, rate] : th.jumps) {
            tgt.mean += rate * size * spec.dt;
            tgt.variance += rate * size * size * spec.dt;
        }
        model.targets.push_back(tgt);
    }

    model.tree.validate();
    validate_family(model.tree, model.family);
    return model;
}

std::vector<MomentRow> moment_report(const ScenarioTree& tree, const MeasureFamily& family) {
    std::vector<MomentRow> rows;
    for (int u = 0; u < tree.node_count(); ++u) {
        if (!family.covers(u)) continue;
        const double s = tree.nodes[u].price[0];
        const auto& succ = tree.nodes[u].succ;
        for (size_t e = 0; e < family.at(u).size(); ++e) {
            const Vec& p = family.at(u)[e];
            MomentRow row;
            row.node = u;
            row.extreme = static_cast<int>(e);
            for (size_t i = 0; i < succ.size(); ++i) {
                const double inc = tree.nodes[succ[i]].price[0] - s;
                row.mean_abs += p[i] * inc;
                row.var_abs += p[i] * inc * inc;
                if (s != 0.0) {
                    row.mean_rel += p[i] * (inc / s);
                    row.var_rel += p[i] * (inc / s) * (inc / s);
                }
            }
            row.var_abs -= row.mean_abs * row.mean_abs;
            row.var_rel -= row.mean_rel * row.mean_rel;
            rows.push_back(row);
        }
    }
    return rows;
}

double max_target_deviation(const GeneratedModel& model) {
    double worst = 0.0;
    for (const MomentRow& row : moment_report(model.tree, model.family)) {
        if (row.extreme >= static_cast<int>(model.targets.size())) continue;
        const MomentTarget& tgt = model.targets[row.extreme];
        const double mean = model.targets_relative ? row.mean_rel : row.mean_abs;
        const double var = model.targets_relative ? row.var_rel : row.var_abs;
        worst = std::max(worst, std::abs(mean - tgt.mean));
        worst = std::max(worst, std::abs(var - tgt.variance));
    }
    return worst;
}

namespace {

ScalarProcess payoff_from_spec(const ScenarioTree& tree, const nlohmann::json& j,
                               double default_strike) {
    std::string type = "put";
    double strike = default_strike;
    if (j.contains("payoff")) {
        const auto& jp = j.at("payoff");
        type = jp.value("type", "put");
        strike = jp.value("strike", default_strike);
    }
    if (type != "put" && type != "call")
        throw ModelError("payoff type must be 'put' or 'call'");
    ScalarProcess xi = make_scalar(tree);
    for (int u = 0; u < tree.node_count(); ++u) {
        const double s = tree.nodes[u].price[0];
        xi[u] = type == "put" ? std::max(strike - s, 0.0) : std::max(s - strike, 0.0);
    }
    return xi;
}

nlohmann::json parse_object(const std::string& text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw ModelError(std::string("parse error: ") + e.what());
    }
}

} // namespace

UVSpec parse_uv_spec(const std::string& json_text) {
    nlohmann::json j = parse_object(json_text);
    if (j.value("kind", "") != "uv") throw ModelError("not a uv spec (kind mismatch)");
    UVSpec spec;
    try {
        spec.sigma_lo = j.at("sigma_lo").get<double>();
        spec.sigma_hi = j.at("sigma_hi").get<double>();
        spec.steps = j.at("steps").get<int>();
        spec.dt = j.value("dt", 1.0);
        spec.s0 = j.value("s0", 1.0);
        spec.move_grid = j.value("move_grid", 3);
    } catch (const std::exception& e) {
        throw ModelError(std::string("malformed uv spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

LevySpec parse_levy_spec(const std::string& json_text) {
    nlohmann::json j = parse_object(json_text);
    if (j.value("kind", "") != "levy") throw ModelError("not a levy spec (kind mismatch)");
    LevySpec spec;
    try {
        for (const auto& jt : j.at("triplets")) {
            LevyTripletSpec th;
            th.drift = jt.value("b", 0.0);
            th.diffusion = jt.value("c", 0.0);
            if (jt.contains("jumps"))
                for (const auto& jj : jt.at("jumps"))
                    th.jumps.emplace_back(jj.at(0).get<double>(), jj.at(1).get<double>());
            spec.triplets.push_back(std::move(th));
        }
        spec.dt = j.value("dt", 1.0);
        spec.steps = j.at("steps").get<int>();
        spec.s0 = j.value("s0", 1.0);
    } catch (const ModelError&) {
        throw;
    } catch (const std::exception& e) {
        throw ModelError(std::string("malformed levy spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

TreeModel load_generated_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();

    nlohmann::json j = parse_object(text);
    const std::string kind = j.value("kind", "");
    GeneratedModel gen;
    if (kind == "uv")
        gen = uv_lattice(parse_uv_spec(text));
    else if (kind == "levy")
        gen = levy_tree(parse_levy_spec(text));
    else
        throw ModelError("file '" + path + "' is neither a uv nor a levy spec");

    TreeModel model;
    model.payoff = payoff_from_spec(gen.tree, j, gen.tree.nodes[gen.tree.root].price[0]);
    model.tree = std::move(gen.tree);
    model.family = std::move(gen.family);
    return model;
}

} // namespace rsnell
