#include "rsnell/characteristics.hpp"

#include "rsnell/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace rsnell {

namespace {

Mat interval_increment(const std::vector<Mat>& cum, int i) {
    const int d = static_cast<int>(cum[i].size());
    Mat inc(d, Vec(d, 0.0));
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) inc[r][c] = cum[i + 1][r][c] - cum[i][r][c];
    return inc;
}

} // namespace

void CharacteristicTriplet::validate() const {
    const int n = static_cast<int>(grid.size());
    if (n < 2) throw ModelError("characteristics: grid needs at least two points");
    for (int i = 0; i + 1 < n; ++i)
        if (!(grid[i] < grid[i + 1]))
            throw ModelError("characteristics: grid must be strictly increasing");
    if (static_cast<int>(drift.size()) != n || static_cast<int>(cov.size()) != n ||
        static_cast<int>(jump_activity.size()) != n)
        throw ModelError("characteristics: B, C, K must match the grid length");

    const int d = dim();
    if (d < 1) throw ModelError("characteristics: dimension must be >= 1");
    for (const Vec& b : drift)
        if (static_cast<int>(b.size()) != d)
            throw ModelError("characteristics: ragged drift entries");
    for (const Mat& c : cov) {
        if (static_cast<int>(c.size()) != d)
            throw ModelError("characteristics: C entries must be d x d");
        for (const Vec& row : c)
            if (static_cast<int>(row.size()) != d)
                throw ModelError("characteristics: C entries must be d x d");
    }
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
            if (cov[0][r][c] != 0.0)
                throw ModelError("characteristics: C_0 must vanish");
    if (jump_activity[0] != 0.0) throw ModelError("characteristics: K_0 must vanish");
    for (int i = 0; i + 1 < n; ++i) {
        if (jump_activity[i + 1] < jump_activity[i] - 1e-12)
            throw ModelError("characteristics: K must be non-decreasing");
        Mat inc = interval_increment(cov, i);
        EigenSym eig = jacobi_eigensym(inc);
        double scale = std::max(1.0, std::abs(eig.values.back()));
        if (eig.values.front() < -1e-9 * scale)
            throw ModelError("characteristics: C increment not PSD on interval " +
                             std::to_string(i));
    }
}

FactorizedDiffusion factorize(const CharacteristicTriplet& triplet) {
    triplet.validate();
    const int d = triplet.dim();
    FactorizedDiffusion fact;
    fact.trace.reserve(triplet.grid.size());
    for (const Mat& c : triplet.cov) fact.trace.push_back(trace(c));

    for (int i = 0; i < triplet.intervals(); ++i) {
        Mat inc = interval_increment(triplet.cov, i);
        const double da = fact.trace[i + 1] - fact.trace[i];
        Mat density(d, Vec(d, 0.0));
        if (da > 0.0) {
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c) density[r][c] = inc[r][c] / da;
        } else {
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c)
                    if (std::abs(inc[r][c]) > 1e-12)
                        throw ModelError("factorize: interval " + std::to_string(i) +
                                         " has dC != 0 while dTr(C) = 0");
        }
        fact.density.push_back(std::move(density));
    }
    return fact;
}

bool dominating_diffusion(const FactorizedDiffusion& fact,
                          const CharacteristicTriplet& triplet) {
    for (int i = 0; i < triplet.intervals(); ++i) {
        const double dk = triplet.jump_activity[i + 1] - triplet.jump_activity[i];
        if (dk <= 0.0) continue;
        const double da = fact.trace[i + 1] - fact.trace[i];
        if (!(da > 0.0) || det_psd(fact.density[i]) <= kDetTol) return false;
    }
    return true;
}

bool dominating_diffusion_componentwise(const FactorizedDiffusion& fact,
                                        const CharacteristicTriplet& triplet) {
    for (int i = 0; i < triplet.intervals(); ++i) {
        const double dk = triplet.jump_activity[i + 1] - triplet.jump_activity[i];
        if (dk <= 0.0) continue;
        const double da = fact.trace[i + 1] - fact.trace[i];
        double min_diag = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < fact.density[i].size(); ++j)
            min_diag = std::min(min_diag, fact.density[i][j][j]);
        if (!(min_diag * da > 0.0)) return false;
    }
    return true;
}

EquivalenceSuite equivalence_suite(const FactorizedDiffusion& fact,
                                   const CharacteristicTriplet& triplet) {
    EquivalenceSuite suite;
    suite.det_positive = true;
    suite.det_nonzero = true;
    suite.abs_det_positive = true;
    suite.det_weighted = true;
    suite.abs_det_weighted = true;
    for (int i = 0; i < triplet.intervals(); ++i) {
        const double dk = triplet.jump_activity[i + 1] - triplet.jump_activity[i];
        if (dk <= 0.0) continue;
        const double da = fact.trace[i + 1] - fact.trace[i];
        const double det = det_psd(fact.density[i]);
        suite.det_positive &= (det > kDetTol) && da > 0.0;
        suite.det_nonzero &= (det < -kDetTol || det > kDetTol) && da > 0.0;
        suite.abs_det_positive &= (std::abs(det) > kDetTol) && da > 0.0;
        suite.det_weighted &= det * da > kDetTol * da;
        suite.abs_det_weighted &= std::abs(det) * da > kDetTol * da;
    }
    return suite;
}

Mat pseudo_inverse(const Mat& m) {
    const int d = static_cast<int>(m.size());
    double scale = 0.0;
    for (int r = 0; r < d; ++r) {
        if (static_cast<int>(m[r].size()) != d)
            throw NumericError("pseudo_inverse: matrix not square");
        for (int c = 0; c < d; ++c) scale = std::max(scale, std::abs(m[r][c]));
    }
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
            if (std::abs(m[r][c] - m[c][r]) > 1e-12 * std::max(1.0, scale))
                throw NumericError("pseudo_inverse: matrix not symmetric within 1e-12");

    EigenSym eig = jacobi_eigensym(m, 1e-13);
    double lam_max = 0.0;
    for (double v : eig.values) lam_max = std::max(lam_max, std::abs(v));
    const double cutoff = 1e-12 * lam_max;

    Mat out(d, Vec(d, 0.0));
    for (int j = 0; j < d; ++j) {
        const double lam = eig.values[j];
        if (lam <= cutoff) continue;
        const double inv = 1.0 / lam;
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c)
                out[r][c] += inv * eig.vectors[r][j] * eig.vectors[c][j];
    }
    return out;
}

HedgingCandidate hedging_candidate(const std::vector<Mat>& c_s,
                                   const std::vector<Vec>& c_sy) {
    if (c_s.size() != c_sy.size())
        throw ModelError("hedging_candidate: mismatched interval lists");
    HedgingCandidate out;
    for (size_t i = 0; i < c_s.size(); ++i) {
        Vec z = mat_vec(pseudo_inverse(c_s[i]), c_sy[i]);
        Vec back = mat_vec(c_s[i], z);
        bool ok = true;
        for (size_t j = 0; j < back.size(); ++j)
            if (std::abs(back[j] - c_sy[i][j]) > 1e-9) ok = false;
        out.strategy.push_back(std::move(z));
        out.in_range.push_back(ok);
    }
    return out;
}

CharacteristicTriplet counterexample_triplet() {
    CharacteristicTriplet t;
    t.grid = {0.0, 1.0, 2.0};
    for (double s : t.grid) {
        t.drift.push_back(Vec{0.0, 0.0});
        t.cov.push_back(Mat{{s, s}, {s, s}});
        // (|x|^2 ^ 1) at the jump (1,1) is 1, arriving at unit rate.
        t.jump_activity.push_back(s);
    }
    return t;
}

std::pair<bool, bool> counterexample_verdicts() {
    CharacteristicTriplet t = counterexample_triplet();
    FactorizedDiffusion f = factorize(t);
    return {dominating_diffusion_componentwise(f, t), dominating_diffusion(f, t)};
}

CharacteristicTriplet parse_characteristics(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const std::exception& e) {
        throw ModelError(std::string("parse error: ") + e.what());
    }
    if (!j.is_object() || j.value("kind", "") != "characteristics")
        throw ModelError("not a characteristics document (kind mismatch)");
    CharacteristicTriplet t;
    try {
        t.grid = j.at("grid").get<Vec>();
        t.drift = j.at("B").get<std::vector<Vec>>();
        t.cov = j.at("C").get<std::vector<Mat>>();
        t.jump_activity = j.at("K").get<Vec>();
    } catch (const std::exception& e) {
        throw ModelError(std::string("malformed characteristics: ") + e.what());
    }
    t.validate();
    return t;
}

CharacteristicTriplet load_characteristics(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_characteristics(ss.str());
}

std::string serialize_characteristics(const CharacteristicTriplet& triplet) {
    nlohmann::ordered_json j;
    j["kind"] = "characteristics";
    j["grid"] = triplet.grid;
    j["B"] = triplet.drift;
    j["C"] = triplet.cov;
    j["K"] = triplet.jump_activity;
    return j.dump(2) + "\n";
}

} // namespace rsnell
