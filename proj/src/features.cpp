#include "ehrvec/features.hpp"

#include <cmath>
#include <stdexcept>

namespace ehr {

std::vector<uint32_t> observation_window(const PatientTimeline& timeline,
                                         Date index_date, int window_days) {
    std::vector<uint32_t> out;
    const Date lo = index_date.plus_days(-window_days);
    for (const auto& v : timeline.visits) {
        if (v.date < lo || v.date >= index_date) continue;
        out.insert(out.end(), v.codes.begin(), v.codes.end());
    }
    return out;
}

std::vector<double> patient_vector(
    const std::vector<uint32_t>& codes, const EmbeddingMatrix& emb,
    const std::unordered_set<uint32_t>& coverage) {
    std::vector<double> out(emb.d, 0.0);
    for (uint32_t c : codes) {
        if (!coverage.count(c)) continue;
        auto r = emb.row(c);
        for (size_t j = 0; j < emb.d; ++j) out[j] += r[j];
    }
    return out;
}

std::vector<double> one_hot_counts(const std::vector<uint32_t>& codes,
                                   size_t n) {
    std::vector<double> out(n, 0.0);
    for (uint32_t c : codes) {
        if (c >= n) throw std::out_of_range("one_hot_counts: index >= n");
        out[c] += 1.0;
    }
    return out;
}

Standardizer fit_standardizer(const std::vector<std::vector<double>>& rows) {
    if (rows.empty())
        throw std::invalid_argument("fit_standardizer: no rows");
    const size_t f = rows[0].size();
    const double p = double(rows.size());
    Standardizer s;
    s.mean.assign(f, 0.0);
    s.std.assign(f, 0.0);
    for (const auto& r : rows)
        for (size_t j = 0; j < f; ++j) s.mean[j] += r[j];
    for (double& m : s.mean) m /= p;
    for (const auto& r : rows)
        for (size_t j = 0; j < f; ++j) {
            double d = r[j] - s.mean[j];
            s.std[j] += d * d;
        }
    for (double& v : s.std) v = std::sqrt(v / p);
    return s;
}

std::vector<std::vector<double>> apply_standardizer(
    const Standardizer& s, const std::vector<std::vector<double>>& rows) {
    std::vector<std::vector<double>> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        if (r.size() != s.mean.size())
            throw std::invalid_argument("apply_standardizer: width mismatch");
        std::vector<double> t(r.size());
        for (size_t j = 0; j < r.size(); ++j)
            t[j] = s.std[j] == 0.0 ? 0.0 : (r[j] - s.mean[j]) / s.std[j];
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace ehr
