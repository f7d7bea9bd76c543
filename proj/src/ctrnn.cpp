#include "dynlab/ctrnn.hpp"

#include <cmath>
#include <stdexcept>

#include "dynlab/errors.hpp"

namespace dynlab {

std::size_t CtrnnDims::param_count() const {
    const std::size_t k = neurons;
    return k + k + k * k + k * observations + controls * k;
}

CtrnnDims CtrnnParams::dims() const { return {tau.size(), input.cols, readout.rows}; }

void CtrnnParams::validate() const {
    const std::size_t k = tau.size();
    if (k == 0) throw DimensionMismatch("CTRNN needs at least one neuron");
    if (bias.size() != k || recurrent.rows != k || recurrent.cols != k || input.rows != k ||
        readout.cols != k)
        throw DimensionMismatch("inconsistent CTRNN parameter shapes");
    for (double t : tau)
        if (!(t > 0.0)) throw std::invalid_argument("CTRNN time constants must be positive");
    if (!(kappa >= 0.0)) throw std::invalid_argument("CTRNN kappa must be non-negative");
}

CtrnnParams init_params(CtrnnDims dims, double kappa) {
    if (dims.neurons == 0 || dims.observations == 0 || dims.controls == 0)
        throw DimensionMismatch("CTRNN dimensions must be at least 1");
    CtrnnParams p;
    p.tau.assign(dims.neurons, 1.0);
    p.bias.assign(dims.neurons, 0.0);
    p.recurrent = Matrix(dims.neurons, dims.neurons);
    p.input = Matrix(dims.neurons, dims.observations);
    p.readout = Matrix(dims.controls, dims.neurons);
    p.kappa = kappa;
    return p;
}

void ctrnn_drift(std::span<const double> alpha, std::span<const double> y, const CtrnnParams& p,
                 std::span<double> out) {
    const std::size_t k = p.tau.size();
    const std::size_t m = p.input.cols;
    for (std::size_t i = 0; i < k; ++i) {
        double acc = -alpha[i];
        for (std::size_t j = 0; j < k; ++j) acc += p.recurrent(i, j) * logistic(alpha[j] + p.bias[j]);
        for (std::size_t j = 0; j < m; ++j) acc += p.input(i, j) * y[j];
        out[i] = acc / p.tau[i];
    }
}

std::vector<double> ctrnn_drift(std::span<const double> alpha, std::span<const double> y,
                                const CtrnnParams& p) {
    if (alpha.size() != p.tau.size() || y.size() != p.input.cols)
        throw DimensionMismatch("ctrnn_drift: alpha or y has wrong length");
    std::vector<double> out(alpha.size());
    ctrnn_drift(alpha, y, p, out);
    return out;
}

Matrix ctrnn_diffusion(const CtrnnParams& p) { return Matrix::identity(p.tau.size(), p.kappa); }

void readout(std::span<const double> alpha, const CtrnnParams& p, std::span<double> u) {
    multiply(p.readout, alpha, u);
    for (double& v : u) v = std::tanh(v);
}

std::vector<double> readout(std::span<const double> alpha, const CtrnnParams& p) {
    if (alpha.size() != p.readout.cols) throw DimensionMismatch("readout: alpha has wrong length");
    std::vector<double> u(p.readout.rows);
    readout(alpha, p, u);
    return u;
}

std::vector<double> flatten_params(const CtrnnParams& p) {
    std::vector<double> v;
    v.reserve(p.dims().param_count());
    v.insert(v.end(), p.tau.begin(), p.tau.end());
    v.insert(v.end(), p.bias.begin(), p.bias.end());
    v.insert(v.end(), p.recurrent.data.begin(), p.recurrent.data.end());
    v.insert(v.end(), p.input.data.begin(), p.input.data.end());
    v.insert(v.end(), p.readout.data.begin(), p.readout.data.end());
    return v;
}

CtrnnParams unflatten_params(std::span<const double> v, CtrnnDims dims, double kappa, double tau_min,
                             bool* clamped) {
    if (v.size() != dims.param_count())
        throw DimensionMismatch("flat parameter vector has length " + std::to_string(v.size()) +
                                ", expected " + std::to_string(dims.param_count()));
    const std::size_t k = dims.neurons;
    CtrnnParams p = init_params(dims, kappa);
    auto it = v.begin();
    auto take = [&it](std::vector<double>& dst) {
        std::copy(it, it + static_cast<std::ptrdiff_t>(dst.size()), dst.begin());
        it += static_cast<std::ptrdiff_t>(dst.size());
    };
    take(p.tau);
    take(p.bias);
    take(p.recurrent.data);
    take(p.input.data);
    take(p.readout.data);
    bool any = false;
    for (std::size_t i = 0; i < k; ++i) {
        if (p.tau[i] < tau_min) {
            p.tau[i] = tau_min;
            any = true;
        }
    }
    if (clamped) *clamped = any;
    return p;
}

InputSystem ctrnn_system(const CtrnnParams& p) {
    p.validate();
    InputSystem sys;
    sys.dim_state = p.tau.size();
    sys.dim_noise = p.tau.size();
    sys.dim_input = p.input.cols;
    sys.drift = [p](std::span<const double> alpha, std::span<const double> y, std::span<double> out) {
        ctrnn_drift(alpha, y, p, out);
    };
    sys.diffusion = [kappa = p.kappa](std::span<const double> alpha, Matrix& g) {
        for (std::size_t i = 0; i < alpha.size(); ++i) g(i, i) = kappa;
    };
    return sys;
}

} // namespace dynlab
