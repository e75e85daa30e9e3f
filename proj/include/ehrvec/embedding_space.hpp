#pragma once

#include <iosfwd>
#include <span>
#include <unordered_set>
#include <vector>

#include "ehrvec/skipgram.hpp"
#include "ehrvec/types.hpp"

namespace ehr {

struct ScoredConcept {
    ConceptCode concept_code;
    double score;  // cosine similarity
};

// Throws if either vector has zero norm.
double cosine(std::span<const double> a, std::span<const double> b);

// Top-k concepts by cosine to query, descending, ties by ascending
// vocabulary index. Excluded indices and zero-norm rows are skipped; fewer
// than k are returned when the vocabulary runs out.
std::vector<ScoredConcept> nearest_neighbors(
    const EmbeddingMatrix& emb, const Vocabulary& vocab,
    std::span<const double> query, size_t k,
    const std::unordered_set<size_t>& exclude = {});

// Query vector = sum(plus) - sum(minus); neighbors exclude the named
// concepts themselves. Throws on unknown concepts or a zero resultant.
std::vector<ScoredConcept> additive_query(const EmbeddingMatrix& emb,
                                          const Vocabulary& vocab,
                                          const std::vector<ConceptCode>& plus,
                                          const std::vector<ConceptCode>& minus,
                                          size_t k);

// Text format: first line "<N> <D>", then one "<domain>:<code> <x1> ... <xD>"
// line per concept in vocabulary order, values at 9 significant digits.
void export_embeddings(const EmbeddingMatrix& emb, const Vocabulary& vocab,
                       std::ostream& out);
void export_embeddings_file(const EmbeddingMatrix& emb,
                            const Vocabulary& vocab, const std::string& path);

struct EmbeddingFileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::pair<EmbeddingMatrix, Vocabulary> import_embeddings(std::istream& in);
std::pair<EmbeddingMatrix, Vocabulary> import_embeddings_file(
    const std::string& path);

}  // namespace ehr
