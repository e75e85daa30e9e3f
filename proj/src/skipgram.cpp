#include "ehrvec/skipgram.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "ehrvec/rng.hpp"

namespace ehr {

namespace {

void check_finite(const EmbeddingMatrix& emb) {
    for (double v : emb.values)
        if (!std::isfinite(v))
            throw std::invalid_argument("embedding contains non-finite entries");
}

// Logits z[c] = v(c) · v(center).
std::vector<double> logits_for(const EmbeddingMatrix& emb, size_t center) {
    std::vector<double> z(emb.n);
    auto vc = emb.row(center);
    for (size_t c = 0; c < emb.n; ++c) {
        auto r = emb.row(c);
        double dot = 0.0;
        for (size_t k = 0; k < emb.d; ++k) dot += r[k] * vc[k];
        z[c] = dot;
    }
    return z;
}

double log_sum_exp(const std::vector<double>& z, double zmax) {
    double s = 0.0;
    for (double v : z) s += std::exp(v - zmax);
    return zmax + std::log(s);
}

void softmax_in_place(std::vector<double>& z) {
    double zmax = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (double& v : z) {
        v = std::exp(v - zmax);
        s += v;
    }
    for (double& v : z) v /= s;
}

}  // namespace

std::vector<double> softmax_probs(const EmbeddingMatrix& emb, size_t center) {
    if (center >= emb.n) throw std::out_of_range("softmax_probs: center");
    check_finite(emb);
    auto z = logits_for(emb, center);
    softmax_in_place(z);
    return z;
}

double pair_log_prob(const EmbeddingMatrix& emb, TrainingPair pair) {
    if (pair.center >= emb.n || pair.context >= emb.n)
        throw std::out_of_range("pair_log_prob: index");
    check_finite(emb);
    auto z = logits_for(emb, pair.center);
    double zmax = *std::max_element(z.begin(), z.end());
    return z[pair.context] - log_sum_exp(z, zmax);
}

double corpus_objective(const EmbeddingMatrix& emb,
                        const std::vector<TrainingPair>& pairs, size_t T) {
    if (T == 0) throw std::invalid_argument("corpus_objective: T == 0");
    double sum = 0.0;
    for (auto p : pairs) sum += pair_log_prob(emb, p);
    return sum / double(T);
}

std::vector<double> batch_gradient(const EmbeddingMatrix& emb,
                                   std::span<const TrainingPair> batch,
                                   double* sum_log_prob) {
    check_finite(emb);
    const size_t n = emb.n, d = emb.d;
    std::vector<double> grad(n * d, 0.0);

    // Pairs sharing a center share one softmax evaluation.
    std::unordered_map<uint32_t, std::vector<uint32_t>> by_center;
    for (auto p : batch) {
        if (p.center >= n || p.context >= n)
            throw std::out_of_range("batch_gradient: index");
        by_center[p.center].push_back(p.context);
    }

    std::vector<double> p(n);
    std::vector<double> mean_vec(d);
    for (const auto& [center, contexts] : by_center) {
        p = logits_for(emb, center);
        double zmax = *std::max_element(p.begin(), p.end());
        double lse = log_sum_exp(p, zmax);
        if (sum_log_prob)
            for (uint32_t o : contexts) *sum_log_prob += p[o] - lse;
        for (double& v : p) v = std::exp(v - lse);

        const double k = double(contexts.size());
        auto vc = emb.row(center);
        // Row c gets (count_o[c] - k * p[c]) * v(center).
        std::fill(mean_vec.begin(), mean_vec.end(), 0.0);
        for (size_t c = 0; c < n; ++c) {
            double coef = -k * p[c];
            double* gr = grad.data() + c * d;
            auto r = emb.row(c);
            for (size_t j = 0; j < d; ++j) {
                gr[j] += coef * vc[j];
                mean_vec[j] += p[c] * r[j];
            }
        }
        // Center row gets sum_o v(o) - k * sum_c p[c] v(c); context rows
        // get one v(center) each.
        double* gcenter = grad.data() + size_t(center) * d;
        for (size_t j = 0; j < d; ++j) gcenter[j] -= k * mean_vec[j];
        for (uint32_t o : contexts) {
            double* go = grad.data() + size_t(o) * d;
            auto vo = emb.row(o);
            for (size_t j = 0; j < d; ++j) {
                go[j] += vc[j];
                gcenter[j] += vo[j];
            }
        }
        // The loop above adds v(center) onto the center row itself when
        // center == context, which is exactly the tied self-pair gradient.
    }
    return grad;
}

std::vector<double> pair_gradient(const EmbeddingMatrix& emb,
                                  TrainingPair pair) {
    return batch_gradient(emb, std::span(&pair, 1));
}

void adadelta_step(Adadelta& state, const std::vector<double>& grad,
                   EmbeddingMatrix& emb) {
    state.step(emb.values, grad);
}

EmbeddingMatrix train(const std::vector<PatientTimeline>& timelines,
                      const Vocabulary& vocab, const TrainConfig& cfg,
                      std::ostream* log) {
    if (timelines.empty()) throw std::invalid_argument("train: no timelines");
    const size_t n = vocab.size(), d = cfg.d;

    EmbeddingMatrix emb(n, d);
    Rng init_rng(cfg.seed);
    const double half = 0.5 / double(d);
    for (double& v : emb.values) v = init_rng.uniform(-half, half);

    Adadelta state(n * d, cfg.rho, cfg.eps);
    WindowConfig wcfg{cfg.w, cfg.seed};

    std::vector<TrainingPair> batch;
    batch.reserve(cfg.batch_size);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double epoch_ll = 0.0;
        size_t epoch_pairs = 0;
        auto flush = [&] {
            if (batch.empty()) return;
            double ll = 0.0;
            auto grad = batch_gradient(emb, batch, &ll);
            state.step(emb.values, grad);
            epoch_ll += ll;
            epoch_pairs += batch.size();
            batch.clear();
        };
        for (const auto& t : timelines) {
            auto seq = flatten_timeline(t, epoch, wcfg);
            for_each_pair(seq, cfg.w, [&](TrainingPair p) {
                batch.push_back(p);
                if (batch.size() == cfg.batch_size) flush();
            });
        }
        flush();  // trailing partial batch
        if (log)
            *log << "epoch=" << epoch << " mean_ll="
                 << (epoch_pairs ? epoch_ll / double(epoch_pairs) : 0.0)
                 << "\n";
    }
    return emb;
}

}  // namespace ehr
