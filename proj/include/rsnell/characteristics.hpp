// Grid-sampled semimartingale characteristics: factorization of the second
// characteristic against its trace, the two dominating-diffusion variants,
// the five-way absolute-continuity suite, the Moore-Penrose hedging candidate
// and the two-dimensional counterexample fixture.
#pragma once

#include "rsnell/linalg.hpp"

#include <string>
#include <vector>

namespace rsnell {

/// Cumulative (B, C, K) data on a strictly increasing time grid. K holds the
/// running jump activity integral of |x|^2 ^ 1 against the compensator.
struct CharacteristicTriplet {
    Vec grid;              // t_0 < ... < t_N
    std::vector<Vec> drift;    // B per grid point, each of length d
    std::vector<Mat> cov;      // C per grid point, d x d, cumulative
    Vec jump_activity;         // K per grid point, cumulative

    int dim() const { return drift.empty() ? 0 : static_cast<int>(drift[0].size()); }
    int intervals() const { return static_cast<int>(grid.size()) - 1; }

    void validate() const;
};

/// Densities of C against its trace: dC = c dA with A = Tr(C), c symmetric
/// PSD with unit trace on intervals where A moves.
struct FactorizedDiffusion {
    Vec trace;                 // A per grid point, cumulative
    std::vector<Mat> density;  // c per interval; zero matrix where dA = 0
};

FactorizedDiffusion factorize(const CharacteristicTriplet& triplet);

/// Determinant threshold separating singular from invertible densities; the
/// densities have unit trace, so no further scaling is needed.
inline constexpr double kDetTol = 1e-12;

/// dK > 0 on an interval requires det(c) > 0 there (and dA > 0).
bool dominating_diffusion(const FactorizedDiffusion& fact,
                          const CharacteristicTriplet& triplet);

/// The older per-coordinate variant: dK > 0 requires min_j c_jj dA > 0.
bool dominating_diffusion_componentwise(const FactorizedDiffusion& fact,
                                        const CharacteristicTriplet& triplet);

/// The five equivalent formulations of the determinant condition, evaluated
/// independently. PSD densities force all five to agree.
struct EquivalenceSuite {
    bool det_positive = false;
    bool det_nonzero = false;
    bool abs_det_positive = false;
    bool det_weighted = false;
    bool abs_det_weighted = false;

    bool all_agree() const {
        return det_positive == det_nonzero && det_nonzero == abs_det_positive &&
               abs_det_positive == det_weighted && det_weighted == abs_det_weighted;
    }
};

EquivalenceSuite equivalence_suite(const FactorizedDiffusion& fact,
                                   const CharacteristicTriplet& triplet);

/// Moore-Penrose pseudoinverse of a symmetric PSD matrix via the Jacobi
/// spectrum: eigenvalues above 1e-12 x (largest eigenvalue) are inverted,
/// the rest zeroed.
Mat pseudo_inverse(const Mat& m);

struct HedgingCandidate {
    std::vector<Vec> strategy; // Z per interval
    std::vector<bool> in_range; // c_S Z == c_SY within 1e-9
};

/// Z_i = pinv(c_S_i) c_SY_i per interval, with the range-consistency flag.
HedgingCandidate hedging_candidate(const std::vector<Mat>& c_s,
                                   const std::vector<Vec>& c_sy);

/// The bundled counterexample: B = 0, C_t = [[t,t],[t,t]],
/// jump compensator a unit-rate point mass at (1,1), grid {0,1,2}.
CharacteristicTriplet counterexample_triplet();

/// (componentwise verdict, determinant verdict) for the fixture: (true, false).
std::pair<bool, bool> counterexample_verdicts();

/// File schema: {"kind":"characteristics","grid":[num],"B":[[num]],
/// "C":[[[num]]],"K":[num]}.
CharacteristicTriplet load_characteristics(const std::string& path);
CharacteristicTriplet parse_characteristics(const std::string& json_text);
std::string serialize_characteristics(const CharacteristicTriplet& triplet);

} // namespace rsnell
