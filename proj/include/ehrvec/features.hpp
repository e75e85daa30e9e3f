#pragma once

#include <string>
#include <unordered_set>
#include <vector>

#include "ehrvec/skipgram.hpp"
#include "ehrvec/types.hpp"

namespace ehr {

enum class FeatureKind { concept_vector, one_hot_counts };

struct FeatureMatrix {
    std::vector<std::vector<double>> rows;  // P x F
    std::vector<int> labels;                // 0/1
    std::vector<std::string> patient_ids;
    FeatureKind kind = FeatureKind::one_hot_counts;
    size_t f = 0;
};

// Code occurrences (with multiplicity) in the half-open 548-day window
// [index_date - 548, index_date).
std::vector<uint32_t> observation_window(const PatientTimeline& timeline,
                                         Date index_date,
                                         int window_days = 548);

// Sum of embedding rows over codes in coverage, with multiplicity; codes
// without a vector are skipped; empty input gives the zero vector.
std::vector<double> patient_vector(const std::vector<uint32_t>& codes,
                                   const EmbeddingMatrix& emb,
                                   const std::unordered_set<uint32_t>& coverage);

// Entry i = multiplicity of index i. Throws on an index >= n.
std::vector<double> one_hot_counts(const std::vector<uint32_t>& codes,
                                   size_t n);

struct Standardizer {
    std::vector<double> mean;
    std::vector<double> std;  // population std, divisor P
};

Standardizer fit_standardizer(const std::vector<std::vector<double>>& rows);
// x -> (x - mean) / std; zero-variance features map to 0.
std::vector<std::vector<double>> apply_standardizer(
    const Standardizer& s, const std::vector<std::vector<double>>& rows);

}  // namespace ehr
