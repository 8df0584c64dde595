#include "revolt/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace revolt {

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

double log_sigmoid(double x) {
    // -log(1 + exp(-x)) for x >= 0, x - log(1 + exp(x)) otherwise
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

Vec log_softmax(const Vec& v) {
    if (v.empty()) throw std::invalid_argument("log_softmax: empty vector");
    double mx = *std::max_element(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += std::exp(x - mx);
    double lse = mx + std::log(sum);
    Vec out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] - lse;
    return out;
}

Vec softmax(const Vec& v) {
    Vec out = log_softmax(v);
    for (double& x : out) x = std::exp(x);
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Vec matvec(const Matrix& m, const Vec& x) {
    Vec y(m.rows, 0.0);
    for (int r = 0; r < m.rows; ++r) {
        const double* row = &m.data[size_t(r) * m.cols];
        double s = 0.0;
        for (int c = 0; c < m.cols; ++c) s += row[c] * x[c];
        y[r] = s;
    }
    return y;
}

Vec matvec_t(const Matrix& m, const Vec& x) {
    Vec y(m.cols, 0.0);
    for (int r = 0; r < m.rows; ++r) {
        const double* row = &m.data[size_t(r) * m.cols];
        for (int c = 0; c < m.cols; ++c) y[c] += row[c] * x[r];
    }
    return y;
}

void sgd_step(std::span<double> params, std::span<const double> grads, SgdState& state) {
    if (params.size() != grads.size()) throw std::invalid_argument("sgd_step: shape mismatch");
    for (size_t i = 0; i < params.size(); ++i) params[i] -= state.learning_rate * grads[i];
    state.step_count++;
}

void sgd_step(std::vector<Matrix*> params, const std::vector<Matrix*>& grads, SgdState& state) {
    if (params.size() != grads.size()) throw std::invalid_argument("sgd_step: shape mismatch");
    for (size_t i = 0; i < params.size(); ++i) {
        Matrix& p = *params[i];
        const Matrix& g = *grads[i];
        if (p.rows != g.rows || p.cols != g.cols)
            throw std::invalid_argument("sgd_step: shape mismatch");
        for (size_t k = 0; k < p.data.size(); ++k) p.data[k] -= state.learning_rate * g.data[k];
    }
    state.step_count++;
}

double check_gradient(const LossFn& loss_fn, const Vec& params, double epsilon) {
    Vec analytic(params.size(), 0.0);
    double loss = loss_fn(params, &analytic);
    if (!std::isfinite(loss)) throw std::runtime_error("check_gradient: non-finite loss");

    Vec p = params;
    double max_err = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        double keep = p[i];
        p[i] = keep + epsilon;
        double lp = loss_fn(p, nullptr);
        p[i] = keep - epsilon;
        double lm = loss_fn(p, nullptr);
        p[i] = keep;
        if (!std::isfinite(lp) || !std::isfinite(lm))
            throw std::runtime_error("check_gradient: non-finite loss");
        double numeric = (lp - lm) / (2.0 * epsilon);
        double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-3});
        max_err = std::max(max_err, std::abs(analytic[i] - numeric) / denom);
    }
    return max_err;
}

} // namespace revolt
