// two_level.hpp — closed-form d=2 model: the analytic oracle for the
// eigensolver, the sweep and the EP finder.

#pragma once

#include <utility>

#include "nhsr/ensemble.hpp"
#include "nhsr/open_system.hpp"
#include "nhsr/quasispin.hpp"

namespace nhsr {

struct TwoLevelModel {
    double e1 = 0;
    double e2 = 1;
    double theta = 0.78539816339744830961;  // pi/4; must avoid 0 and pi
};

Eigen::Matrix2cd two_level_hamiltonian(const TwoLevelModel& m, Complex lambda);

// Deterministic order: principal square root, (mean + s, mean - s).
std::pair<Complex, Complex> analytic_eigenvalues(const TwoLevelModel& m,
                                                 Complex lambda);

// The conjugate EP pair -(e1 - e2) exp(+-2 i theta); (+) branch first.
std::pair<Complex, Complex> analytic_eps(const TwoLevelModel& m);

struct JordanReport {
    double min_self_overlap = 1;   // min over both EPs of |v^T v|, unit-norm v
    double max_eigenvalue_gap = 0; // |E1 - E2| at the EPs
    double max_rank_ratio = 0;     // sigma_2/sigma_1 of H - E I (0 => rank 1)
};

JordanReport jordan_check(const TwoLevelModel& m);

// Adapters so the generic machinery (eig, run_sweep, find_eps) can be driven
// by the analytic model.
InitialSpectrum two_level_spectrum(const TwoLevelModel& m);
DecayingSubspace two_level_subspace(const TwoLevelModel& m);

}  // namespace nhsr
