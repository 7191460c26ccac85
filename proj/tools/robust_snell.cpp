// robust-snell: command-line front door for pricing, hedging, duality
// checks, the penalization ladder and the characteristics toolkit.
//
// Payloads go to stdout (or --out) and are byte-deterministic for identical
// inputs; the status line with wall-clock timing goes to stderr. Exit codes:
// 0 ok, 2 load/validation, 3 numeric, 4 node arbitrage, 5 internal breach.

#include "rsnell/characteristics.hpp"
#include "rsnell/errors.hpp"
#include "rsnell/families.hpp"
#include "rsnell/hedging.hpp"
#include "rsnell/model_io.hpp"
#include "rsnell/rbsde.hpp"
#include "rsnell/snell.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using ordered_json = nlohmann::ordered_json;
using namespace rsnell;

namespace {

struct Options {
    std::string command;
    std::string path;
    std::string family = "given";
    std::string measure;
    std::string n_list;
    std::string ladder;      // "m,ell,kmax"
    std::string verify_only;
    std::string out;
    std::string dump_model;
    std::optional<long long> seed;
    bool brute_force = false;
};

double brute_force_cap() {
    if (const char* env = std::getenv("ROBUST_SNELL_CAP")) {
        try {
            return std::stod(env);
        } catch (...) {
            throw ModelError("ROBUST_SNELL_CAP is not a number");
        }
    }
    return kDefaultBruteForceCap;
}

TreeModel load_any_model(const std::string& path) {
    const std::string kind = peek_kind(path);
    if (kind == "tree_model") return load_model(path);
    if (kind == "uv" || kind == "levy") return load_generated_model(path);
    throw ModelError("file '" + path + "' has kind '" + kind +
                     "'; expected a tree_model, uv or levy document");
}

Measure resolve_measure(const ScenarioTree& tree, const MeasureFamily& family,
                        const std::string& selector) {
    if (selector == "first") return select_extreme(tree, family, 0);
    if (selector == "last") return select_extreme(tree, family, 1 << 20);
    if (selector == "uniform") return select_uniform_mixture(tree, family);
    try {
        return select_extreme(tree, family, std::stoi(selector));
    } catch (const std::exception&) {
        throw ModelError("--measure must be first|last|uniform|<index>");
    }
}

std::vector<double> parse_n_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (...) {
            throw ModelError("--n-list must be a comma-separated number list");
        }
    }
    if (out.empty()) throw ModelError("--n-list is empty");
    return out;
}

void emit(const Options& opt, const std::string& payload) {
    if (opt.out.empty()) {
        std::cout << payload;
    } else {
        std::ofstream f(opt.out);
        if (!f) throw ModelError("cannot write '" + opt.out + "'");
        f << payload;
    }
}

ordered_json strategy_json(const ScenarioTree& tree, const VectorProcess& strategy) {
    ordered_json j = ordered_json::object();
    for (int u = 0; u < tree.node_count(); ++u)
        if (!tree.is_terminal(u)) j[tree.id_of(u)] = strategy[u];
    return j;
}

ordered_json hedge_report_json(const ScenarioTree& tree, const HedgeReport& rep) {
    ordered_json j;
    j["price"] = rep.price;
    j["gap"] = rep.duality_gap;
    j["certified"] = rep.certified;
    j["strategy"] = strategy_json(tree, rep.strategy);
    ordered_json jc = ordered_json::object();
    for (int u = 0; u < tree.node_count(); ++u) jc[tree.id_of(u)] = rep.consumption[u];
    j["consumption"] = std::move(jc);
    return j;
}

int run_price(const Options& opt) {
    TreeModel model = load_any_model(opt.path);
    if (!opt.dump_model.empty()) save_model(model, opt.dump_model);
    MeasureFamily family =
        opt.family == "saturate" ? saturate(model.tree) : model.family;

    ScalarProcess y = robust_snell(model.tree, family, model.payoff);
    ExerciseRule rule = optimal_exercise(model.tree, y, model.payoff);

    ordered_json payload;
    payload["value"] = y[model.tree.root];
    ordered_json jb = ordered_json::object();
    for (int u = 0; u < model.tree.node_count(); ++u)
        jb[model.tree.id_of(u)] = static_cast<bool>(rule.stop[u]);
    payload["exercise_boundary"] = std::move(jb);
    payload["family"] = opt.family;

    // Per-measure classical values for the constant-extreme selections, when
    // the local sets share a common (small) size.
    size_t common = 0;
    bool uniform_size = true;
    for (int u = 0; u < model.tree.node_count(); ++u) {
        if (!family.covers(u)) continue;
        const size_t k = family.at(u).size();
        if (common == 0) common = k;
        uniform_size &= (k == common);
    }
    if (uniform_size && common >= 1 && common <= 16) {
        ordered_json vals = ordered_json::array();
        for (size_t e = 0; e < common; ++e) {
            Measure m = select_extreme(model.tree, family, static_cast<int>(e));
            vals.push_back(classical_snell(model.tree, m, model.payoff)[model.tree.root]);
        }
        payload["per_measure_values"] = std::move(vals);
    }
    if (!opt.measure.empty()) {
        Measure m = resolve_measure(model.tree, family, opt.measure);
        payload["measure_value"] =
            classical_snell(model.tree, m, model.payoff)[model.tree.root];
    }
    if (opt.brute_force) {
        try {
            payload["brute_force"] =
                brute_force_value(model.tree, family, model.payoff, brute_force_cap());
        } catch (const CapExceededError&) {
            payload["brute_force_skipped"] = "cap";
        }
    }
    if (opt.seed) payload["seed"] = *opt.seed;
    emit(opt, payload.dump(2) + "\n");
    return 0;
}

int run_hedge(const Options& opt) {
    TreeModel model = load_any_model(opt.path);
    if (!opt.dump_model.empty()) save_model(model, opt.dump_model);

    if (!opt.verify_only.empty()) {
        std::ifstream in(opt.verify_only);
        if (!in) throw ModelError("cannot open strategy file '" + opt.verify_only + "'");
        ordered_json js;
        try {
            in >> js;
        } catch (const std::exception& e) {
            throw ModelError(std::string("strategy parse error: ") + e.what());
        }
        double y0 = 0.0;
        VectorProcess strategy(model.tree.nodes.size());
        try {
            y0 = js.at("y0").get<double>();
            for (const auto& [id, z] : js.at("strategy").items()) {
                const int u = model.tree.index_of(id);
                if (u < 0) throw ModelError("strategy references unknown node '" + id + "'");
                strategy[u] = z.get<Vec>();
            }
        } catch (const ModelError&) {
            throw;
        } catch (const std::exception& e) {
            throw ModelError(std::string("malformed strategy file: ") + e.what());
        }
        ordered_json payload;
        payload["verified"] = verify_superhedge(model.tree, model.payoff, y0, strategy);
        payload["y0"] = y0;
        if (opt.seed) payload["seed"] = *opt.seed;
        emit(opt, payload.dump(2) + "\n");
        return 0;
    }

    HedgeReport rep = superhedge(model.tree, model.payoff);
    if (!verify_superhedge(model.tree, model.payoff, rep.price, rep.strategy))
        throw InternalError("superhedge report failed its own pathwise verification");
    ordered_json payload = hedge_report_json(model.tree, rep);
    if (opt.seed) payload["seed"] = *opt.seed;
    emit(opt, payload.dump(2) + "\n");
    return 0;
}

int run_duality(const Options& opt) {
    TreeModel model = load_any_model(opt.path);
    if (!opt.dump_model.empty()) save_model(model, opt.dump_model);

    MeasureFamily sat = saturate(model.tree);
    MeasureFamily family = opt.family == "saturate" ? sat : model.family;

    const double primal = robust_snell(model.tree, family, model.payoff)[model.tree.root];
    HedgeReport rep = superhedge(model.tree, model.payoff);
    const double gap = std::abs(rep.price - primal);

    ordered_json payload;
    payload["primal"] = primal;
    payload["dual"] = rep.price;
    payload["gap"] = gap;
    payload["certified"] = gap <= 1e-8;
    payload["family_saturated"] = families_equal(model.tree, family, sat);
    if (opt.brute_force) {
        try {
            payload["brute_force"] =
                brute_force_value(model.tree, family, model.payoff, brute_force_cap());
        } catch (const CapExceededError&) {
            payload["brute_force_skipped"] = "cap";
        }
    }
    if (opt.seed) payload["seed"] = *opt.seed;
    emit(opt, payload.dump(2) + "\n");
    return 0;
}

int run_penalize(const Options& opt) {
    TreeModel model = load_any_model(opt.path);
    if (!opt.dump_model.empty()) save_model(model, opt.dump_model);
    Measure measure = resolve_measure(model.tree, model.family, opt.measure);
    std::vector<double> n_list = parse_n_list(opt.n_list);

    std::vector<StudyRow> rows;
    if (opt.ladder.empty()) {
        rows = penalization_study(model.tree, measure, model.payoff, n_list);
    } else {
        std::vector<double> p = parse_n_list(opt.ladder);
        if (p.size() != 3) throw ModelError("--ladder expects m,ell,kmax");
        rows = ladder_study(model.tree, measure, model.payoff, n_list, p[0], p[1],
                            static_cast<int>(p[2]));
    }
    std::ostringstream csv;
    write_convergence_csv(csv, rows);
    emit(opt, csv.str());
    return 0;
}

int run_characteristics(const Options& opt) {
    CharacteristicTriplet triplet = load_characteristics(opt.path);
    FactorizedDiffusion fact = factorize(triplet);

    ordered_json intervals = ordered_json::array();
    for (int i = 0; i < triplet.intervals(); ++i) {
        ordered_json ji;
        const double da = fact.trace[i + 1] - fact.trace[i];
        const double dk = triplet.jump_activity[i + 1] - triplet.jump_activity[i];
        const double det = det_psd(fact.density[i]);
        double min_diag = fact.density[i][0][0];
        for (size_t j = 1; j < fact.density[i].size(); ++j)
            min_diag = std::min(min_diag, fact.density[i][j][j]);
        ji["det"] = det;
        ji["trace"] = da;
        ji["jump_activity"] = dk;
        ji["dd_new"] = !(dk > 0.0) || (da > 0.0 && det > kDetTol);
        ji["dd_old"] = !(dk > 0.0) || (min_diag * da > 0.0);
        // the five determinant formulations, restricted to this interval
        const bool no_jump = !(dk > 0.0);
        ordered_json five = ordered_json::array(
            {no_jump || (det > kDetTol && da > 0.0),
             no_jump || ((det < -kDetTol || det > kDetTol) && da > 0.0),
             no_jump || (std::abs(det) > kDetTol && da > 0.0),
             no_jump || (det * da > kDetTol * da),
             no_jump || (std::abs(det) * da > kDetTol * da)});
        for (size_t a = 1; a < 5; ++a)
            if (five[a] != five[0])
                throw InternalError("five-way equivalence disagreed on interval " +
                                    std::to_string(i));
        ji["five_way"] = std::move(five);
        intervals.push_back(std::move(ji));
    }
    EquivalenceSuite suite = equivalence_suite(fact, triplet);
    if (!suite.all_agree())
        throw InternalError("five-way equivalence suite disagreed on a PSD input");

    ordered_json payload;
    payload["per_interval"] = std::move(intervals);
    ordered_json overall;
    overall["dd_new"] = dominating_diffusion(fact, triplet);
    overall["dd_old"] = dominating_diffusion_componentwise(fact, triplet);
    overall["five_way"] = ordered_json::array(
        {suite.det_positive, suite.det_nonzero, suite.abs_det_positive,
         suite.det_weighted, suite.abs_det_weighted});
    overall["five_way_agree"] = suite.all_agree();
    payload["overall"] = std::move(overall);
    if (opt.seed) payload["seed"] = *opt.seed;
    emit(opt, payload.dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    Options opt;
    CLI::App app{"Robust pricing and superhedging of American-style options on "
                 "finite scenario trees"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* cmd, bool with_model_flags) {
        cmd->add_option("path", opt.path, "input file")->required();
        cmd->add_option("--out", opt.out, "write the payload to this file");
        cmd->add_option("--seed", opt.seed,
                        "seed for randomized sub-procedures (reserved; recorded)");
        if (with_model_flags)
            cmd->add_option("--dump-model", opt.dump_model,
                            "write the (generated) tree_model JSON here");
    };

    CLI::App* price = app.add_subcommand("price", "robust value and exercise rule");
    add_common(price, true);
    price->add_option("--family", opt.family, "given|saturate")
        ->check(CLI::IsMember({"given", "saturate"}));
    price->add_option("--measure", opt.measure, "also report a classical value");
    price->add_flag("--brute-force", opt.brute_force, "add the enumeration value");

    CLI::App* hedge = app.add_subcommand("hedge", "minimal superhedge report");
    add_common(hedge, true);
    hedge->add_option("--verify-only", opt.verify_only,
                      "verify a user strategy file instead of solving");

    CLI::App* duality = app.add_subcommand("duality", "primal/dual comparison");
    add_common(duality, true);
    duality->add_option("--family", opt.family, "given|saturate")
        ->check(CLI::IsMember({"given", "saturate"}));
    duality->add_flag("--brute-force", opt.brute_force, "add the enumeration value");

    CLI::App* penalize = app.add_subcommand("penalize", "penalization convergence study");
    add_common(penalize, true);
    penalize->add_option("--measure", opt.measure, "measure selector")->required();
    penalize->add_option("--n-list", opt.n_list, "comma-separated penalty levels")
        ->required();
    penalize->add_option("--ladder", opt.ladder, "m,ell,kmax: use the Picard ladder");

    CLI::App* chars = app.add_subcommand("characteristics", "triplet verdict report");
    add_common(chars, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    opt.command = app.get_subcommands().front()->get_name();

    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed_ms = [&] {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         t0)
            .count();
    };
    auto fail = [&](const char* code, const std::string& message, int rc) {
        ordered_json err;
        err["status"] = "error";
        err["code"] = code;
        err["message"] = message;
        std::cout << err.dump(2) << "\n";
        std::cerr << opt.command << ": " << code << " (" << elapsed_ms() << " ms)\n";
        return rc;
    };

    try {
        int rc = 0;
        if (opt.command == "price") rc = run_price(opt);
        else if (opt.command == "hedge") rc = run_hedge(opt);
        else if (opt.command == "duality") rc = run_duality(opt);
        else if (opt.command == "penalize") rc = run_penalize(opt);
        else if (opt.command == "characteristics") rc = run_characteristics(opt);
        std::cerr << opt.command << ": ok (" << elapsed_ms() << " ms)\n";
        return rc;
    } catch (const ArbitrageError& e) {
        return fail("E_ARBITRAGE", e.what(), 4);
    } catch (const ModelError& e) {
        return fail("E_LOAD", e.what(), 2);
    } catch (const CapExceededError& e) {
        return fail("E_CAP", e.what(), 3);
    } catch (const NumericError& e) {
        return fail("E_NUMERIC", e.what(), 3);
    } catch (const InternalError& e) {
        return fail("E_INTERNAL", e.what(), 5);
    } catch (const std::exception& e) {
        return fail("E_INTERNAL", e.what(), 5);
    }
}
