#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "dynlab/linalg.hpp"
#include "dynlab/sde.hpp"

namespace dynlab {

/// Network shape: k neurons, m observations, c controls.
struct CtrnnDims {
    std::size_t neurons = 2;
    std::size_t observations = 2;
    std::size_t controls = 1;

    /// k + k + k^2 + k m + c k
    std::size_t param_count() const;

    bool operator==(const CtrnnDims&) const = default;
};

/// Stochastic CTRNN parameters (tau, b, A, B, C) plus the fixed noise scale.
struct CtrnnParams {
    std::vector<double> tau;  // k, positive
    std::vector<double> bias; // k
    Matrix recurrent;         // A: k x k
    Matrix input;             // B: k x m
    Matrix readout;           // C: c x k
    double kappa = 0.01;

    CtrnnDims dims() const;
    void validate() const;

    bool operator==(const CtrnnParams&) const = default;
};

/// Zero-initialized network with unit time constants.
CtrnnParams init_params(CtrnnDims dims, double kappa = 0.01);

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// tau^-1 o (-alpha + A sigmoid(alpha + b) + B y), written into out (length k).
void ctrnn_drift(std::span<const double> alpha, std::span<const double> y, const CtrnnParams& p,
                 std::span<double> out);
std::vector<double> ctrnn_drift(std::span<const double> alpha, std::span<const double> y,
                                const CtrnnParams& p);

/// kappa I_k
Matrix ctrnn_diffusion(const CtrnnParams& p);

/// u = tanh(C alpha), written into u (length c).
void readout(std::span<const double> alpha, const CtrnnParams& p, std::span<double> u);
std::vector<double> readout(std::span<const double> alpha, const CtrnnParams& p);

/// Flat ordering: tau, b, A row-major, B row-major, C row-major.
std::vector<double> flatten_params(const CtrnnParams& p);

/// Inverse of flatten_params. Time constants below tau_min are raised to
/// tau_min (pass 0 to disable); `clamped`, when given, reports whether that
/// happened.
CtrnnParams unflatten_params(std::span<const double> v, CtrnnDims dims, double kappa = 0.01,
                             double tau_min = 0.0, bool* clamped = nullptr);

/// Agent subsystem (state alpha, input y). Captures p by value.
InputSystem ctrnn_system(const CtrnnParams& p);

} // namespace dynlab
