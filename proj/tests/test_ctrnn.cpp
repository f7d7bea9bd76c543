#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "dynlab/ctrnn.hpp"
#include "dynlab/errors.hpp"

using namespace dynlab;

namespace {

CtrnnParams single_neuron() { return init_params(CtrnnDims{1, 1, 1}); }

} // namespace

TEST(Ctrnn, ParameterCount) {
    EXPECT_EQ(CtrnnDims{}.param_count(), 14u);
    EXPECT_EQ((CtrnnDims{3, 2, 1}.param_count()), 3u + 3 + 9 + 6 + 3);
}

TEST(Ctrnn, RecurrentSigmoidTerm) {
    CtrnnParams p = single_neuron();
    p.recurrent(0, 0) = 2.0;
    const auto d = ctrnn_drift(std::vector<double>{0.0}, std::vector<double>{0.0}, p);
    EXPECT_DOUBLE_EQ(d[0], 1.0);
}

TEST(Ctrnn, InputTermAndTimeConstant) {
    CtrnnParams p = single_neuron();
    p.input(0, 0) = 1.0;
    p.tau[0] = 2.0;
    const auto d = ctrnn_drift(std::vector<double>{1.0}, std::vector<double>{3.0}, p);
    EXPECT_DOUBLE_EQ(d[0], 1.0);
}

TEST(Ctrnn, BiasShiftsTheSigmoid) {
    CtrnnParams p = single_neuron();
    p.recurrent(0, 0) = 1.0;
    p.bias[0] = 0.5;
    const auto d = ctrnn_drift(std::vector<double>{0.25}, std::vector<double>{0.0}, p);
    EXPECT_DOUBLE_EQ(d[0], -0.25 + logistic(0.75));
}

TEST(Ctrnn, ZeroNetworkIsInert) {
    const CtrnnParams p = init_params(CtrnnDims{});
    const auto d = ctrnn_drift(std::vector<double>{0.0, 0.0}, std::vector<double>{2.0, -1.0}, p);
    EXPECT_EQ(d, (std::vector<double>{0.0, 0.0}));
    EXPECT_EQ(readout(std::vector<double>{0.3, -0.2}, p), (std::vector<double>{0.0}));
}

TEST(Ctrnn, ReadoutIsTanhOfLinearMap) {
    CtrnnParams p = init_params(CtrnnDims{});
    p.readout(0, 0) = 1.5;
    p.readout(0, 1) = -0.5;
    const auto u = readout(std::vector<double>{0.4, 1.0}, p);
    EXPECT_DOUBLE_EQ(u[0], std::tanh(1.5 * 0.4 - 0.5));
}

TEST(Ctrnn, DiffusionIsKappaIdentity) {
    const Matrix g = ctrnn_diffusion(init_params(CtrnnDims{}, 0.01));
    EXPECT_EQ(g, Matrix::identity(2, 0.01));
}

TEST(Ctrnn, FlattenOrderAndRoundTrip) {
    const CtrnnDims dims{};
    std::vector<double> v(dims.param_count());
    std::iota(v.begin(), v.end(), 1.0);
    const CtrnnParams p = unflatten_params(v, dims);
    EXPECT_EQ(p.tau, (std::vector<double>{1, 2}));
    EXPECT_EQ(p.bias, (std::vector<double>{3, 4}));
    EXPECT_DOUBLE_EQ(p.recurrent(0, 1), 6.0);
    EXPECT_DOUBLE_EQ(p.recurrent(1, 0), 7.0);
    EXPECT_DOUBLE_EQ(p.input(0, 0), 9.0);
    EXPECT_DOUBLE_EQ(p.input(1, 1), 12.0);
    EXPECT_DOUBLE_EQ(p.readout(0, 0), 13.0);
    EXPECT_DOUBLE_EQ(p.readout(0, 1), 14.0);
    EXPECT_EQ(flatten_params(p), v);
}

TEST(Ctrnn, TimeConstantFloor) {
    const CtrnnDims dims{};
    std::vector<double> v(dims.param_count(), 0.0);
    v[0] = -0.3;
    v[1] = 0.5;
    bool clamped = false;
    const CtrnnParams p = unflatten_params(v, dims, 0.01, 0.05, &clamped);
    EXPECT_TRUE(clamped);
    EXPECT_DOUBLE_EQ(p.tau[0], 0.05);
    EXPECT_DOUBLE_EQ(p.tau[1], 0.5);
    v[0] = 1.0;
    unflatten_params(v, dims, 0.01, 0.05, &clamped);
    EXPECT_FALSE(clamped);
}

TEST(Ctrnn, ValidationRejectsBadShapes) {
    CtrnnParams p = init_params(CtrnnDims{});
    p.tau[0] = 0.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = init_params(CtrnnDims{});
    p.bias.pop_back();
    EXPECT_THROW(p.validate(), DimensionMismatch);
    EXPECT_THROW(unflatten_params(std::vector<double>(3), CtrnnDims{}), DimensionMismatch);
}
