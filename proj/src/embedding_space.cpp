#include "ehrvec/embedding_space.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ehr {

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("cosine: dimension mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0)
        throw std::invalid_argument("undefined cosine for zero vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<ScoredConcept> nearest_neighbors(
    const EmbeddingMatrix& emb, const Vocabulary& vocab,
    std::span<const double> query, size_t k,
    const std::unordered_set<size_t>& exclude) {
    if (k < 1) throw std::invalid_argument("nearest_neighbors: k < 1");
    double qnorm = 0.0;
    for (double v : query) qnorm += v * v;
    if (qnorm == 0.0)
        throw std::invalid_argument("undefined cosine for zero vector");

    std::vector<std::pair<double, size_t>> scored;
    for (size_t i = 0; i < emb.n; ++i) {
        if (exclude.count(i)) continue;
        auto r = emb.row(i);
        double rn = 0.0;
        for (double v : r) rn += v * v;
        if (rn == 0.0) continue;  // zero-norm rows never rank
        scored.push_back({cosine(query, r), i});
    }
    size_t take = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + take, scored.end(),
                      [](const auto& a, const auto& b) {
                          if (a.first != b.first) return a.first > b.first;
                          return a.second < b.second;
                      });
    std::vector<ScoredConcept> out;
    out.reserve(take);
    for (size_t i = 0; i < take; ++i)
        out.push_back({vocab.code_at(scored[i].second), scored[i].first});
    return out;
}

std::vector<ScoredConcept> additive_query(const EmbeddingMatrix& emb,
                                          const Vocabulary& vocab,
                                          const std::vector<ConceptCode>& plus,
                                          const std::vector<ConceptCode>& minus,
                                          size_t k) {
    std::vector<double> query(emb.d, 0.0);
    std::unordered_set<size_t> exclude;
    auto add = [&](const ConceptCode& c, double sign) {
        auto idx = vocab.index_of(c);
        if (!idx)
            throw std::invalid_argument("unknown concept: " + c.to_string());
        auto r = emb.row(*idx);
        for (size_t j = 0; j < emb.d; ++j) query[j] += sign * r[j];
        exclude.insert(*idx);
    };
    for (const auto& c : plus) add(c, 1.0);
    for (const auto& c : minus) add(c, -1.0);
    bool all_zero = std::all_of(query.begin(), query.end(),
                                [](double v) { return v == 0.0; });
    if (all_zero)
        throw std::invalid_argument("additive_query: zero resultant vector");
    return nearest_neighbors(emb, vocab, query, k, exclude);
}

void export_embeddings(const EmbeddingMatrix& emb, const Vocabulary& vocab,
                       std::ostream& out) {
    if (vocab.size() != emb.n)
        throw std::invalid_argument("export: vocabulary/matrix size mismatch");
    for (double v : emb.values)
        if (!std::isfinite(v))
            throw std::invalid_argument("export: non-finite entry");
    out << emb.n << " " << emb.d << "\n";
    char buf[48];
    for (size_t i = 0; i < emb.n; ++i) {
        const auto& c = vocab.code_at(i);
        if (c.code.find(' ') != std::string::npos)
            throw std::invalid_argument("export: code contains a space: " +
                                        c.code);
        out << c.to_string();
        for (double v : emb.row(i)) {
            std::snprintf(buf, sizeof buf, " %.9g", v);
            out << buf;
        }
        out << "\n";
    }
}

void export_embeddings_file(const EmbeddingMatrix& emb,
                            const Vocabulary& vocab,
                            const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    export_embeddings(emb, vocab, out);
}

std::pair<EmbeddingMatrix, Vocabulary> import_embeddings(std::istream& in) {
    auto fail = [](size_t line, const std::string& what) -> void {
        throw EmbeddingFileError("line " + std::to_string(line) + ": " + what);
    };
    std::string raw;
    if (!std::getline(in, raw)) fail(1, "missing header");
    size_t n = 0, d = 0;
    {
        std::istringstream hs(raw);
        if (!(hs >> n >> d) || n == 0 || d == 0) fail(1, "bad header");
    }
    EmbeddingMatrix emb(n, d);
    std::vector<ConceptCode> codes;
    std::vector<int64_t> freq(n, 1);
    std::unordered_set<std::string> seen;
    for (size_t i = 0; i < n; ++i) {
        size_t line = i + 2;
        if (!std::getline(in, raw)) fail(line, "fewer rows than header declares");
        std::istringstream ls(raw);
        std::string name;
        if (!(ls >> name)) fail(line, "missing concept name");
        auto colon = name.find(':');
        if (colon == std::string::npos) fail(line, "expected <domain>:<code>");
        auto dom = parse_domain(name.substr(0, colon));
        if (!dom) fail(line, "unknown domain token");
        std::string code = name.substr(colon + 1);
        if (code.empty()) fail(line, "empty code");
        if (!seen.insert(name).second) fail(line, "duplicate code " + name);
        codes.push_back({std::move(code), *dom});
        auto r = emb.row(i);
        for (size_t j = 0; j < d; ++j) {
            std::string tok;
            if (!(ls >> tok)) fail(line, "fewer values than dimension");
            const char* b = tok.data();
            const char* e = b + tok.size();
            auto [p, ec] = std::from_chars(b, e, r[j]);
            if (ec != std::errc() || p != e)
                fail(line, "non-numeric token '" + tok + "'");
        }
        std::string extra;
        if (ls >> extra) fail(line, "more values than dimension");
    }
    if (std::getline(in, raw) && !raw.empty())
        fail(n + 2, "more rows than header declares");
    return {std::move(emb), Vocabulary(std::move(codes), std::move(freq))};
}

std::pair<EmbeddingMatrix, Vocabulary> import_embeddings_file(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw EmbeddingFileError("cannot open " + path);
    return import_embeddings(in);
}

}  // namespace ehr
