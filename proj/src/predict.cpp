#include "ehrvec/predict.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ehrvec/adadelta.hpp"
#include "ehrvec/rng.hpp"

namespace ehr {

std::string_view to_string(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::logistic_regression: return "logistic_regression";
        case ClassifierKind::linear_svm: return "linear_svm";
        case ClassifierKind::mlp: return "mlp";
        case ClassifierKind::knn: return "knn";
    }
    return "?";
}

ClassifierSpec default_spec(ClassifierKind kind, FeatureKind features) {
    const bool one_hot = features == FeatureKind::one_hot_counts;
    ClassifierSpec s;
    s.kind = kind;
    switch (kind) {
        case ClassifierKind::logistic_regression:
            s.l2 = one_hot ? 0.1 : 0.01;
            break;
        case ClassifierKind::linear_svm:
            s.l2 = one_hot ? 1e-6 : 1e-3;
            break;
        case ClassifierKind::mlp:
            s.l2 = one_hot ? 0.01 : 0.001;
            s.hidden_size = one_hot ? 15 : 100;
            break;
        case ClassifierKind::knn:
            s.k_neighbors = one_hot ? 15 : 100;
            break;
    }
    return s;
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty())
        throw std::invalid_argument("auc: size mismatch");
    for (double s : scores)
        if (!std::isfinite(s)) throw std::invalid_argument("auc: non-finite score");

    const size_t n = scores.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] < scores[b]; });

    // Mid-ranks over tie groups, 1-based.
    std::vector<double> rank(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        double mid = (double(i + 1) + double(j)) / 2.0;
        for (size_t t = i; t < j; ++t) rank[order[t]] = mid;
        i = j;
    }

    double pos_rank_sum = 0.0;
    size_t n_pos = 0;
    for (size_t t = 0; t < n; ++t)
        if (labels[t]) {
            pos_rank_sum += rank[t];
            ++n_pos;
        }
    size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("auc: needs both classes");
    return (pos_rank_sum - double(n_pos) * double(n_pos + 1) / 2.0) /
           (double(n_pos) * double(n_neg));
}

std::vector<size_t> FoldPlan::train_indices(size_t fold) const {
    std::vector<size_t> out;
    for (size_t c = 0; c < chunks.size(); ++c) {
        if (c == fold || c == fold + 1) continue;
        out.insert(out.end(), chunks[c].begin(), chunks[c].end());
    }
    return out;
}

FoldPlan make_folds(const std::vector<int>& labels, uint64_t seed) {
    std::vector<size_t> pos, neg;
    for (size_t i = 0; i < labels.size(); ++i)
        (labels[i] ? pos : neg).push_back(i);
    if (pos.size() < 7 || neg.size() < 7)
        throw std::invalid_argument("make_folds: need >= 7 patients per class");

    Rng rng(seed);
    rng.shuffle(pos);
    rng.shuffle(neg);

    FoldPlan plan;
    plan.chunks.assign(7, {});
    for (size_t i = 0; i < pos.size(); ++i) plan.chunks[i % 7].push_back(pos[i]);
    for (size_t i = 0; i < neg.size(); ++i) plan.chunks[i % 7].push_back(neg[i]);
    return plan;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void check_rows(const Rows& rows, const std::vector<int>& labels) {
    if (rows.empty() || rows.size() != labels.size())
        throw std::invalid_argument("training: rows/labels mismatch");
    for (const auto& r : rows)
        for (double v : r)
            if (!std::isfinite(v))
                throw std::invalid_argument("training: non-finite input");
}

}  // namespace

double LinearModel::decision(const std::vector<double>& x) const {
    return dot(w, x) + b;
}

double LinearModel::probability(const std::vector<double>& x) const {
    return sigmoid(decision(x));
}

namespace {

// Shared full-batch loop for the two linear losses. grad_fn fills the
// negative loss gradient (ascent direction) of one sample into gw/gb.
template <typename PointGrad>
LinearModel train_linear(const Rows& rows, const std::vector<int>& labels,
                         const ClassifierSpec& spec, PointGrad point_grad,
                         const LinearEpochFn& on_epoch) {
    check_rows(rows, labels);
    const size_t f = rows[0].size();
    const double p = double(rows.size());

    LinearModel m;
    m.w.assign(f, 0.0);
    Adadelta opt(f + 1, spec.rho, spec.eps);
    std::vector<double> params(f + 1, 0.0);  // w then b
    std::vector<double> grad(f + 1);

    for (int epoch = 0; epoch < spec.max_epoch; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (size_t i = 0; i < rows.size(); ++i) {
            double z = dot(m.w, rows[i]) + m.b;
            double coef = point_grad(z, labels[i]) / p;
            for (size_t j = 0; j < f; ++j) grad[j] += coef * rows[i][j];
            grad[f] += coef;
        }
        for (size_t j = 0; j < f; ++j) grad[j] -= spec.l2 * m.w[j];
        opt.step(params, grad);
        std::copy(params.begin(), params.begin() + f, m.w.begin());
        m.b = params[f];
        if (on_epoch) on_epoch(epoch, m);
    }
    return m;
}

}  // namespace

LinearModel train_logreg(const Rows& rows, const std::vector<int>& labels,
                         const ClassifierSpec& spec,
                         const LinearEpochFn& on_epoch) {
    // d/dz of -CE is y - sigmoid(z).
    return train_linear(
        rows, labels, spec,
        [](double z, int y) { return double(y) - sigmoid(z); }, on_epoch);
}

LinearModel train_svm(const Rows& rows, const std::vector<int>& labels,
                      const ClassifierSpec& spec,
                      const LinearEpochFn& on_epoch) {
    // Squared hinge on y in {-1,+1}: -dL/dz = 2 y max(0, 1 - y z).
    return train_linear(
        rows, labels, spec,
        [](double z, int y) {
            double ys = y ? 1.0 : -1.0;
            return 2.0 * ys * std::max(0.0, 1.0 - ys * z);
        },
        on_epoch);
}

namespace {

struct MlpViews {
    double* w1;  // hidden x in
    double* b1;  // hidden
    double* w2;  // hidden
    double* b2;  // 1
};

MlpViews views(std::vector<double>& p, size_t in, size_t hidden) {
    return {p.data(), p.data() + hidden * in, p.data() + hidden * in + hidden,
            p.data() + hidden * in + 2 * hidden};
}

double mlp_forward(const MlpModel& m, const std::vector<double>& x,
                   std::vector<double>* hidden_out) {
    const size_t in = m.in, h = m.hidden;
    const double* w1 = m.params.data();
    const double* b1 = w1 + h * in;
    const double* w2 = b1 + h;
    const double b2 = w2[h];
    double z2 = b2;
    for (size_t j = 0; j < h; ++j) {
        double a = b1[j];
        const double* wj = w1 + j * in;
        for (size_t i = 0; i < in; ++i) a += wj[i] * x[i];
        a = std::tanh(a);
        if (hidden_out) (*hidden_out)[j] = a;
        z2 += w2[j] * a;
    }
    return sigmoid(z2);
}

}  // namespace

double MlpModel::probability(const std::vector<double>& x) const {
    return mlp_forward(*this, x, nullptr);
}

double MlpModel::loss(const Rows& rows, const std::vector<int>& labels,
                      double l2) const {
    double ce = 0.0;
    for (size_t i = 0; i < rows.size(); ++i) {
        double s = probability(rows[i]);
        s = std::clamp(s, 1e-15, 1.0 - 1e-15);
        ce -= labels[i] ? std::log(s) : std::log(1.0 - s);
    }
    ce /= double(rows.size());
    const double* w1 = params.data();
    const double* w2 = params.data() + hidden * in + hidden;
    double reg = 0.0;
    for (size_t i = 0; i < hidden * in; ++i) reg += w1[i] * w1[i];
    for (size_t j = 0; j < hidden; ++j) reg += w2[j] * w2[j];
    return ce + 0.5 * l2 * reg;
}

MlpModel train_mlp(const Rows& rows, const std::vector<int>& labels,
                   const ClassifierSpec& spec, const MlpEpochFn& on_epoch) {
    check_rows(rows, labels);
    const size_t in = rows[0].size();
    const size_t h = spec.hidden_size;
    const double p = double(rows.size());

    MlpModel m;
    m.in = in;
    m.hidden = h;
    m.params.assign(h * in + 2 * h + 1, 0.0);
    Rng init(spec.seed);
    for (double& v : m.params) v = init.uniform(-0.05, 0.05);

    Adadelta opt(m.params.size(), spec.rho, spec.eps);
    std::vector<double> grad(m.params.size());
    std::vector<double> act(h);

    for (int epoch = 0; epoch < spec.max_epoch; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        auto g = views(grad, in, h);
        const double* w1 = m.params.data();
        const double* w2 = m.params.data() + h * in + h;
        for (size_t i = 0; i < rows.size(); ++i) {
            const auto& x = rows[i];
            double s = mlp_forward(m, x, &act);
            // Ascent on -CE: dz2 = y - s.
            double dz2 = (double(labels[i]) - s) / p;
            g.b2[0] += dz2;
            for (size_t j = 0; j < h; ++j) {
                g.w2[j] += dz2 * act[j];
                double dz1 = dz2 * w2[j] * (1.0 - act[j] * act[j]);
                g.b1[j] += dz1;
                double* gw = g.w1 + j * in;
                for (size_t k = 0; k < in; ++k) gw[k] += dz1 * x[k];
            }
        }
        for (size_t i = 0; i < h * in; ++i) g.w1[i] -= spec.l2 * w1[i];
        for (size_t j = 0; j < h; ++j) g.w2[j] -= spec.l2 * w2[j];
        opt.step(m.params, grad);
        if (on_epoch) on_epoch(epoch, m);
    }
    return m;
}

double knn_score(const Rows& train_rows, const std::vector<int>& train_labels,
                 const std::vector<double>& query, size_t k) {
    if (k == 0 || k > train_rows.size())
        throw std::invalid_argument("knn_score: k out of range");
    std::vector<std::pair<double, size_t>> dist;
    dist.reserve(train_rows.size());
    for (size_t i = 0; i < train_rows.size(); ++i) {
        double d2 = 0.0;
        for (size_t j = 0; j < query.size(); ++j) {
            double d = train_rows[i][j] - query[j];
            d2 += d * d;
        }
        dist.push_back({d2, i});
    }
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    size_t pos = 0;
    for (size_t i = 0; i < k; ++i) pos += train_labels[dist[i].second] ? 1 : 0;
    return double(pos) / double(k);
}

namespace {

template <typename Model>
std::vector<double> score_rows(const Model& m, const Rows& rows,
                               bool raw_decision) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        if constexpr (std::is_same_v<Model, LinearModel>)
            out.push_back(raw_decision ? m.decision(r) : m.probability(r));
        else
            out.push_back(m.probability(r));
    }
    return out;
}

Rows gather(const Rows& rows, const std::vector<size_t>& idx) {
    Rows out;
    out.reserve(idx.size());
    for (size_t i : idx) out.push_back(rows[i]);
    return out;
}

std::vector<int> gather(const std::vector<int>& v,
                        const std::vector<size_t>& idx) {
    std::vector<int> out;
    out.reserve(idx.size());
    for (size_t i : idx) out.push_back(v[i]);
    return out;
}

}  // namespace

EvalReport run_experiment(const FeatureMatrix& features,
                          const ClassifierSpec& spec, uint64_t seed) {
    FoldPlan plan = make_folds(features.labels, seed);
    EvalReport report;
    report.classifier = spec;
    report.feature_kind = features.kind;

    for (size_t fold = 0; fold < FoldPlan::n_folds; ++fold) {
        auto train_idx = plan.train_indices(fold);
        const auto& val_idx = plan.validation_indices(fold);
        const auto& test_idx = plan.test_indices(fold);

        Rows train_raw = gather(features.rows, train_idx);
        auto std_ = fit_standardizer(train_raw);
        Rows train = apply_standardizer(std_, train_raw);
        Rows val = apply_standardizer(std_, gather(features.rows, val_idx));
        Rows test = apply_standardizer(std_, gather(features.rows, test_idx));
        auto y_train = gather(features.labels, train_idx);
        auto y_val = gather(features.labels, val_idx);
        auto y_test = gather(features.labels, test_idx);

        ClassifierSpec fold_spec = spec;
        fold_spec.seed = splitmix64(seed ^ (fold + 1));

        auto t0 = std::chrono::steady_clock::now();
        std::vector<double> test_scores;
        const bool raw = spec.kind == ClassifierKind::linear_svm;

        if (spec.kind == ClassifierKind::knn) {
            test_scores.reserve(test.size());
            for (const auto& q : test)
                test_scores.push_back(
                    knn_score(train, y_train, q, spec.k_neighbors));
        } else if (spec.kind == ClassifierKind::mlp) {
            double best_val = -1.0;
            MlpModel best;
            auto select = [&](int, const MlpModel& m) {
                double v = auc(score_rows(m, val, false), y_val);
                if (v > best_val) {
                    best_val = v;
                    best = m;
                }
            };
            train_mlp(train, y_train, fold_spec, select);
            test_scores = score_rows(best, test, false);
        } else {
            double best_val = -1.0;
            LinearModel best;
            auto select = [&](int, const LinearModel& m) {
                double v = auc(score_rows(m, val, raw), y_val);
                if (v > best_val) {
                    best_val = v;
                    best = m;
                }
            };
            if (spec.kind == ClassifierKind::logistic_regression)
                train_logreg(train, y_train, fold_spec, select);
            else
                train_svm(train, y_train, fold_spec, select);
            test_scores = score_rows(best, test, raw);
        }
        auto t1 = std::chrono::steady_clock::now();

        report.per_fold_auc.push_back(auc(test_scores, y_test));
        report.train_seconds_per_fold.push_back(
            std::chrono::duration<double>(t1 - t0).count());
    }

    double sum = 0.0;
    for (double a : report.per_fold_auc) sum += a;
    report.mean_auc = sum / double(report.per_fold_auc.size());
    double var = 0.0;
    for (double a : report.per_fold_auc) {
        double d = a - report.mean_auc;
        var += d * d;
    }
    report.std_auc = std::sqrt(var / double(report.per_fold_auc.size()));
    return report;
}

}  // namespace ehr
