// quasispin.hpp — quasispin operators and the three initial (closed-system)
// Hamiltonians: equidistant (HO) and the first-/second-order critical
// spectra (PT1, PT2). All spectra are affinely normalized to span [0, d].

#pragma once

#include <Eigen/Dense>

#include <string>

namespace nhsr {

enum class Model { HO, PT1, PT2 };

const char* to_string(Model model);
Model model_from_string(const std::string& name);

inline constexpr int kMaxDimension = 16384;

// J3 eigenbasis representation; J3 diagonal with entries m = -j..+j,
// J1 the real symmetric tridiagonal ladder combination.
struct QuasispinOps {
    double j = 0;
    int d = 0;
    Eigen::MatrixXd j1;
    Eigen::MatrixXd j3;
};

struct InitialSpectrum {
    Model model = Model::HO;
    double j = 0;
    int d = 0;
    Eigen::VectorXd energies;          // ascending, energies[0] = 0, energies[d-1] = d
    Eigen::MatrixXd eigenbasis_to_j3;  // column k = |k> expressed in the J3 basis
    double scale = 1.0;                // affine map applied to the raw eigenvalues
    double shift = 0.0;
};

struct Cumulants {
    double mean = 0;
    double variance = 0;  // central second moment
    double skewness = 0;  // central third moment
};

QuasispinOps build_quasispin(double j, int max_dim = kMaxDimension);

InitialSpectrum build_initial(Model model, double j);

Cumulants spectrum_cumulants(const InitialSpectrum& s);

}  // namespace nhsr
