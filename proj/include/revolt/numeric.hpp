#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "revolt/rng.hpp"

namespace revolt {

using Vec = std::vector<double>;

// Dense row-major matrix. All trainable parameters in this project are
// Matrix (vectors are 1 x n).
struct Matrix {
    int rows = 0;
    int cols = 0;
    Vec data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), data(size_t(r) * c, fill) {}

    double& at(int r, int c) { return data[size_t(r) * cols + c]; }
    double at(int r, int c) const { return data[size_t(r) * cols + c]; }
    size_t size() const { return data.size(); }

    static Matrix random(int r, int c, double scale, Rng& rng) {
        Matrix m(r, c);
        for (auto& v : m.data) v = scale * rng.gauss();
        return m;
    }
};

double sigmoid(double x);

// log(sigmoid(x)) computed without overflow for large |x|
double log_sigmoid(double x);

// entries v_k - log(sum_j exp(v_j)), max-subtracted for stability
Vec log_softmax(const Vec& v);
Vec softmax(const Vec& v);

double dot(std::span<const double> a, std::span<const double> b);

// y = M x  (M: rows x cols, x: cols)
Vec matvec(const Matrix& m, const Vec& x);

// y = M^T x (x: rows)
Vec matvec_t(const Matrix& m, const Vec& x);

struct SgdState {
    double learning_rate = 0.05;
    long step_count = 0;
    uint64_t seed = 0;

    SgdState() = default;
    SgdState(double lr, uint64_t s = 0) : learning_rate(lr), seed(s) {
        if (lr <= 0.0) throw std::invalid_argument("learning rate must be positive");
    }
};

// p <- p - lr * g, elementwise over a set of parameter matrices
void sgd_step(std::vector<Matrix*> params, const std::vector<Matrix*>& grads, SgdState& state);
void sgd_step(std::span<double> params, std::span<const double> grads, SgdState& state);

// Loss callable: returns the loss at `params`; when `grad` is non-null it
// must also be filled with the analytic gradient.
using LossFn = std::function<double(const Vec& params, Vec* grad)>;

// Compares the analytic gradient at `params` with central differences.
// Returns the max elementwise error relative to max(|analytic|, |numeric|, 1e-3);
// below that scale the comparison degrades to absolute, which keeps the check
// meaningful for near-zero components where central differences lose digits.
double check_gradient(const LossFn& loss_fn, const Vec& params, double epsilon);

} // namespace revolt
