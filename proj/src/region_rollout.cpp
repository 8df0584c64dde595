#include "revolt/region_rollout.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace revolt {

RolloutParams RolloutParams::init(int n_max, int hidden, uint64_t seed) {
    Rng rng(Rng::mix(seed, 0x526f6c6cULL));
    RolloutParams p;
    p.n_max = n_max;
    p.hidden = hidden;
    int in = p.input_dim();
    p.wz = Matrix::random(hidden, in, 0.08, rng);
    p.wr = Matrix::random(hidden, in, 0.08, rng);
    p.wn = Matrix::random(hidden, in, 0.08, rng);
    p.uz = Matrix::random(hidden, hidden, 0.15, rng);
    p.ur = Matrix::random(hidden, hidden, 0.15, rng);
    p.un = Matrix::random(hidden, hidden, 0.15, rng);
    p.bz = Matrix(1, hidden);
    p.br = Matrix(1, hidden);
    p.bn = Matrix(1, hidden);
    p.head_w = Matrix::random(kEmbedDim, hidden, 0.2, rng);
    p.head_b = Matrix(1, kEmbedDim);
    return p;
}

std::vector<Matrix*> RolloutParams::matrices() {
    return {&wz, &wr, &wn, &uz, &ur, &un, &bz, &br, &bn, &head_w, &head_b};
}

std::vector<const Matrix*> RolloutParams::matrices() const {
    return {&wz, &wr, &wn, &uz, &ur, &un, &bz, &br, &bn, &head_w, &head_b};
}

std::vector<MaskedStep> build_masked_sequence(const HouseSequence& seq,
                                              const LabelEmbeddingTable& labels, int n_max) {
    if (int(seq.order.size()) > n_max)
        throw std::invalid_argument("build_masked_sequence: house exceeds n_max regions");
    std::vector<MaskedStep> steps(seq.order.size());
    for (size_t i = 0; i < seq.order.size(); ++i) {
        for (size_t j = 0; j < seq.adjacency_steps[i].size(); ++j) {
            if (!seq.adjacency_steps[i][j]) continue;
            const Vec& r = labels.of(seq.labels[j]);
            steps[i].blocks.push_back({int(j) * n_max + int(i), r});
            steps[i].blocks.push_back({int(i) * n_max + int(j), r});
        }
    }
    return steps;
}

std::vector<double> masked_embedding_tensor(const std::vector<std::vector<uint8_t>>& adjacency,
                                            const std::vector<Vec>& row_embeddings, int n_max) {
    std::vector<double> t(size_t(n_max) * n_max * kEmbedDim, 0.0);
    for (int j = 0; j < int(adjacency.size()) && j < n_max; ++j)
        for (int k = 0; k < int(adjacency[j].size()) && k < n_max; ++k) {
            if (!adjacency[j][k]) continue;
            for (int d = 0; d < kEmbedDim; ++d)
                t[(size_t(j) * n_max + k) * kEmbedDim + d] = row_embeddings[j][d];
        }
    return t;
}

std::vector<double> step_to_dense(const MaskedStep& step, int n_max) {
    std::vector<double> t(size_t(n_max) * n_max * kEmbedDim, 0.0);
    for (const auto& [cell, vec] : step.blocks)
        for (int d = 0; d < kEmbedDim; ++d) t[size_t(cell) * kEmbedDim + d] = vec[d];
    return t;
}

namespace {

// sparse column product: y += W[:, blocks] * x[blocks]
void add_w_times_sparse(const Matrix& w, const MaskedStep& x, Vec& y) {
    for (const auto& [cell, vec] : x.blocks) {
        int col0 = cell * kEmbedDim;
        for (int r = 0; r < w.rows; ++r) {
            const double* row = &w.data[size_t(r) * w.cols + col0];
            double s = 0.0;
            for (int d = 0; d < kEmbedDim; ++d) s += row[d] * vec[d];
            y[r] += s;
        }
    }
}

struct GruTrace {
    Vec h_prev, z, r, n_tilde, un_h;
};

// one cell update; trace captures everything the backward pass needs
Vec gru_step(const RolloutParams& p, const MaskedStep& x, const Vec& h, GruTrace* trace) {
    int hn = p.hidden;
    Vec az(hn), ar(hn), an(hn);
    for (int i = 0; i < hn; ++i) {
        az[i] = p.bz.at(0, i);
        ar[i] = p.br.at(0, i);
        an[i] = p.bn.at(0, i);
    }
    add_w_times_sparse(p.wz, x, az);
    add_w_times_sparse(p.wr, x, ar);
    add_w_times_sparse(p.wn, x, an);
    Vec uzh = matvec(p.uz, h), urh = matvec(p.ur, h), unh = matvec(p.un, h);
    Vec z(hn), r(hn), nt(hn), out(hn);
    for (int i = 0; i < hn; ++i) {
        z[i] = sigmoid(az[i] + uzh[i]);
        r[i] = sigmoid(ar[i] + urh[i]);
        nt[i] = std::tanh(an[i] + r[i] * unh[i]);
        out[i] = (1.0 - z[i]) * nt[i] + z[i] * h[i];
    }
    if (trace) {
        trace->h_prev = h;
        trace->z = z;
        trace->r = r;
        trace->n_tilde = nt;
        trace->un_h = unh;
    }
    return out;
}

Vec head_forward(const RolloutParams& p, const Vec& h) {
    Vec x = matvec(p.head_w, h);
    for (int d = 0; d < kEmbedDim; ++d) x[d] += p.head_b.at(0, d);
    return x;
}

// logits over present labels; absent labels get a large negative logit
Vec label_logit_vec(const Vec& x_hat, const LabelEmbeddingTable& labels) {
    Vec logits(labels.label_count(), -1e30);
    for (int l = 0; l < labels.label_count(); ++l)
        if (labels.present[l]) logits[l] = dot(x_hat, labels.of(l));
    return logits;
}

} // namespace

RolloutPrediction predict_next(const std::vector<MaskedStep>& prefix, const RolloutParams& params,
                               const LabelEmbeddingTable& labels) {
    if (prefix.empty()) throw std::invalid_argument("predict_next: empty prefix");
    Vec h(params.hidden, 0.0);
    for (const auto& step : prefix) h = gru_step(params, step, h, nullptr);
    RolloutPrediction out;
    out.embedding = head_forward(params, h);
    Vec sm = softmax(label_logit_vec(out.embedding, labels));
    out.label_distribution = sm;
    return out;
}

double loss_rollout(const std::vector<Vec>& predicted, const std::vector<int>& true_labels,
                    const LabelEmbeddingTable& labels) {
    if (predicted.empty()) return 0.0;
    double loss = 0.0;
    for (size_t i = 0; i < predicted.size(); ++i) {
        Vec ls = log_softmax(label_logit_vec(predicted[i], labels));
        loss += -ls[true_labels[i]];
    }
    return loss / double(predicted.size());
}

double rollout_loss_and_grad(const std::vector<MaskedStep>& steps,
                             const std::vector<int>& true_labels, const RolloutParams& params,
                             const LabelEmbeddingTable& labels, std::vector<Matrix>* grads) {
    int n = int(steps.size());
    int hn = params.hidden;
    std::vector<GruTrace> traces(n);
    std::vector<Vec> hs(n + 1, Vec(hn, 0.0));
    std::vector<Vec> xhats(n);
    std::vector<Vec> probs(n);

    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
        hs[i + 1] = gru_step(params, steps[i], hs[i], &traces[i]);
        xhats[i] = head_forward(params, hs[i + 1]);
        Vec ls = log_softmax(label_logit_vec(xhats[i], labels));
        probs[i] = ls;
        for (double& v : probs[i]) v = std::exp(v);
        loss += -ls[true_labels[i]];
    }
    loss /= double(n);
    if (!grads) return loss;

    grads->clear();
    auto shapes = params.matrices();
    for (const Matrix* m : shapes) grads->emplace_back(m->rows, m->cols);
    Matrix& gwz = (*grads)[0];
    Matrix& gwr = (*grads)[1];
    Matrix& gwn = (*grads)[2];
    Matrix& guz = (*grads)[3];
    Matrix& gur = (*grads)[4];
    Matrix& gun = (*grads)[5];
    Matrix& gbz = (*grads)[6];
    Matrix& gbr = (*grads)[7];
    Matrix& gbn = (*grads)[8];
    Matrix& ghw = (*grads)[9];
    Matrix& ghb = (*grads)[10];

    Vec dh_next(hn, 0.0);
    double inv_n = 1.0 / double(n);
    for (int i = n - 1; i >= 0; --i) {
        // head + cross entropy
        Vec dxhat(kEmbedDim, 0.0);
        for (int l = 0; l < labels.label_count(); ++l) {
            if (!labels.present[l]) continue;
            double coef = inv_n * probs[i][l];
            if (l == true_labels[i]) coef -= inv_n;
            const Vec& rl = labels.of(l);
            for (int d = 0; d < kEmbedDim; ++d) dxhat[d] += coef * rl[d];
        }
        Vec dh = dh_next;
        for (int d = 0; d < kEmbedDim; ++d) {
            ghb.at(0, d) += dxhat[d];
            for (int j = 0; j < hn; ++j) ghw.at(d, j) += dxhat[d] * hs[i + 1][j];
        }
        Vec head_back = matvec_t(params.head_w, dxhat);
        for (int j = 0; j < hn; ++j) dh[j] += head_back[j];

        // cell backward
        const GruTrace& t = traces[i];
        Vec dz(hn), dnt(hn), dh_prev(hn, 0.0);
        for (int j = 0; j < hn; ++j) {
            dz[j] = dh[j] * (t.h_prev[j] - t.n_tilde[j]);
            dnt[j] = dh[j] * (1.0 - t.z[j]);
            dh_prev[j] = dh[j] * t.z[j];
        }
        Vec dnt_pre(hn), dz_pre(hn), dr_pre(hn), dunh(hn);
        for (int j = 0; j < hn; ++j) {
            dnt_pre[j] = dnt[j] * (1.0 - t.n_tilde[j] * t.n_tilde[j]);
            dunh[j] = dnt_pre[j] * t.r[j];
            double dr = dnt_pre[j] * t.un_h[j];
            dr_pre[j] = dr * t.r[j] * (1.0 - t.r[j]);
            dz_pre[j] = dz[j] * t.z[j] * (1.0 - t.z[j]);
        }
        // input-side gradients touch only the step's nonzero columns
        auto add_sparse_outer = [&](Matrix& g, const Vec& dpre) {
            for (const auto& [cell, vec] : steps[i].blocks) {
                int col0 = cell * kEmbedDim;
                for (int r = 0; r < hn; ++r) {
                    double* row = &g.data[size_t(r) * g.cols + col0];
                    for (int d = 0; d < kEmbedDim; ++d) row[d] += dpre[r] * vec[d];
                }
            }
        };
        add_sparse_outer(gwn, dnt_pre);
        add_sparse_outer(gwz, dz_pre);
        add_sparse_outer(gwr, dr_pre);
        for (int j = 0; j < hn; ++j) {
            gbn.at(0, j) += dnt_pre[j];
            gbz.at(0, j) += dz_pre[j];
            gbr.at(0, j) += dr_pre[j];
        }
        for (int r = 0; r < hn; ++r)
            for (int c = 0; c < hn; ++c) {
                gun.at(r, c) += dunh[r] * t.h_prev[c];
                guz.at(r, c) += dz_pre[r] * t.h_prev[c];
                gur.at(r, c) += dr_pre[r] * t.h_prev[c];
            }
        Vec back_un = matvec_t(params.un, dunh);
        Vec back_uz = matvec_t(params.uz, dz_pre);
        Vec back_ur = matvec_t(params.ur, dr_pre);
        for (int j = 0; j < hn; ++j) dh_prev[j] += back_un[j] + back_uz[j] + back_ur[j];
        dh_next = std::move(dh_prev);
    }
    return loss;
}

double rollout_simulate(const std::vector<PrefixRegion>& prefix, int spawn_index, int depth,
                        int samples, const Vec& target_embedding, const RolloutParams& params,
                        const LabelEmbeddingTable& labels, uint64_t seed) {
    if (prefix.empty()) throw std::invalid_argument("rollout_simulate: empty prefix");
    if (depth < 1 || samples < 1)
        throw std::invalid_argument("rollout_simulate: depth and samples must be >= 1");
    int n_max = params.n_max;
    int m = std::min<int>(int(prefix.size()), n_max);

    // consume the observed chain
    Vec base(params.hidden, 0.0);
    for (int i = 0; i < m; ++i) {
        MaskedStep step;
        int parent = prefix[i].parent;
        if (parent >= 0 && parent < i) {
            const Vec& r = labels.of(prefix[parent].label);
            step.blocks.push_back({parent * n_max + i, r});
            step.blocks.push_back({i * n_max + parent, r});
        }
        base = gru_step(params, step, base, nullptr);
    }

    double total = 0.0;
    for (int s = 0; s < samples; ++s) {
        Rng rng(Rng::mix(seed, uint64_t(s)));
        Vec h = base;
        int parent = std::min(spawn_index, m - 1);
        int parent_label = prefix[parent].label;
        double best = 0.0;
        for (int d = 0; d < depth; ++d) {
            int idx = m + d;
            if (idx >= n_max) break;
            MaskedStep step;
            const Vec& r = labels.of(parent_label);
            step.blocks.push_back({parent * n_max + idx, r});
            step.blocks.push_back({idx * n_max + parent, r});
            h = gru_step(params, step, h, nullptr);
            Vec x_hat = head_forward(params, h);
            Vec dist = softmax(label_logit_vec(x_hat, labels));
            // inverse-cdf sample
            double u = rng.uniform();
            int pick = 0;
            double acc = 0.0;
            for (int l = 0; l < int(dist.size()); ++l) {
                acc += dist[l];
                pick = l;
                if (u < acc) break;
            }
            best = std::max(best, sigmoid(dot(labels.of(pick), target_embedding)));
            parent = idx;
            parent_label = pick;
        }
        total += best;
    }
    return total / double(samples);
}

RolloutTrainResult train_rollout(const std::vector<HouseSpec>& train_houses,
                                 const std::vector<HouseSpec>& test_houses,
                                 const LabelEmbeddingTable& labels,
                                 const RolloutTrainConfig& config) {
    if (train_houses.empty()) throw std::invalid_argument("train_rollout: empty split");

    std::vector<std::vector<MaskedStep>> sequences;
    std::vector<std::vector<int>> seq_labels;
    for (const auto& h : train_houses) {
        HouseSequence seq = extract_house_sequence(h);
        if (int(seq.order.size()) > config.n_max) continue; // rejected at dataset build
        sequences.push_back(build_masked_sequence(seq, labels, config.n_max));
        seq_labels.push_back(seq.labels);
    }
    if (sequences.empty()) throw std::invalid_argument("train_rollout: no usable houses");

    RolloutTrainResult out;
    out.params = RolloutParams::init(config.n_max, config.hidden, config.seed);
    SgdState sgd(config.learning_rate, config.seed);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        double total = 0.0;
        for (size_t i = 0; i < sequences.size(); ++i) {
            std::vector<Matrix> grads;
            double loss =
                rollout_loss_and_grad(sequences[i], seq_labels[i], out.params, labels, &grads);
            if (!std::isfinite(loss))
                throw std::runtime_error("train_rollout: diverged (non-finite loss)");
            std::vector<Matrix*> ps = out.params.matrices(), gs;
            for (auto& g : grads) gs.push_back(&g);
            sgd_step(ps, gs, sgd);
            total += loss;
        }
        out.loss_history.push_back(total / double(sequences.size()));
    }

    // held-out next-label top-1 accuracy, teacher-forced prefixes
    long correct = 0, total_steps = 0;
    for (const auto& h : test_houses) {
        HouseSequence seq = extract_house_sequence(h);
        if (int(seq.order.size()) > config.n_max) continue;
        auto steps = build_masked_sequence(seq, labels, config.n_max);
        for (size_t i = 0; i < steps.size(); ++i) {
            std::vector<MaskedStep> prefix(steps.begin(), steps.begin() + i + 1);
            RolloutPrediction pred = predict_next(prefix, out.params, labels);
            int arg = int(std::max_element(pred.label_distribution.begin(),
                                           pred.label_distribution.end()) -
                          pred.label_distribution.begin());
            total_steps++;
            if (arg == seq.labels[i]) correct++;
        }
    }
    out.holdout_top1 = total_steps == 0 ? 0.0 : double(correct) / double(total_steps);
    return out;
}

} // namespace revolt
