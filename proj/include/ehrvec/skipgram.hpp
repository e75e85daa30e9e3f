#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ehrvec/adadelta.hpp"
#include "ehrvec/corpus.hpp"
#include "ehrvec/types.hpp"

namespace ehr {

// N x D row-major matrix of concept vectors; one shared vector per concept
// serves both the center and context roles of the softmax.
struct EmbeddingMatrix {
    size_t n = 0;
    size_t d = 0;
    std::vector<double> values;  // n * d

    EmbeddingMatrix() = default;
    EmbeddingMatrix(size_t n_, size_t d_)
        : n(n_), d(d_), values(n_ * d_, 0.0) {}

    std::span<const double> row(size_t i) const {
        return {values.data() + i * d, d};
    }
    std::span<double> row(size_t i) { return {values.data() + i * d, d}; }
};

struct TrainConfig {
    size_t d = 100;
    int w = 5;
    int epochs = 10;
    size_t batch_size = 100;
    uint64_t seed = 0;
    double rho = 0.95;
    double eps = 1e-6;
};

// p[c] = exp(v(c)·v(center)) / sum_c' exp(v(c')·v(center)), max-logit
// subtracted before exponentiation. Throws on non-finite embeddings.
std::vector<double> softmax_probs(const EmbeddingMatrix& emb, size_t center);

// log p(context | center), computed as logit minus log-sum-exp.
double pair_log_prob(const EmbeddingMatrix& emb, TrainingPair pair);

// (1/T) sum of pair log probabilities. Throws if T == 0.
double corpus_objective(const EmbeddingMatrix& emb,
                        const std::vector<TrainingPair>& pairs, size_t T);

// Exact gradient of pair_log_prob with tied vectors: every row c receives
// ([c = context] - p[c]) * v(center), and the center row additionally
// receives v(context) - sum_c p[c] * v(c). Returned as a dense N x D matrix.
std::vector<double> pair_gradient(const EmbeddingMatrix& emb,
                                  TrainingPair pair);

// Sum of pair_gradient over the batch, with one softmax per distinct
// center. If sum_log_prob is non-null it accumulates the batch's summed
// pair log probabilities.
std::vector<double> batch_gradient(const EmbeddingMatrix& emb,
                                   std::span<const TrainingPair> batch,
                                   double* sum_log_prob = nullptr);

// One ascent step on the embedding entries; see Adadelta for semantics.
void adadelta_step(Adadelta& state, const std::vector<double>& grad,
                   EmbeddingMatrix& emb);

// Full training loop: uniform [-0.5/d, 0.5/d] init from cfg.seed, then for
// each epoch flattens every timeline, batches the window pairs, and applies
// one Adadelta step per batch. If log is non-null, writes one
// "epoch=<k> mean_ll=<float>" line per epoch (mean over that epoch's pairs,
// each evaluated under the weights current at its batch).
EmbeddingMatrix train(const std::vector<PatientTimeline>& timelines,
                      const Vocabulary& vocab, const TrainConfig& cfg,
                      std::ostream* log = nullptr);

}  // namespace ehr
