#include "topicforge/embeddings.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <map>
#include <set>
#include <unordered_map>

#include "topicforge/common/csv.hpp"
#include "topicforge/common/error.hpp"
#include "topicforge/common/hash.hpp"

namespace topicforge::embeddings {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(std::string_view in, std::size_t pos) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
    return v;
}

std::vector<std::string> word_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c) || c >= 0x80) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

}  // namespace

std::vector<double> EmbeddingMatrix::row_f64(std::size_t i) const {
    auto r = row(i);
    return {r.begin(), r.end()};
}

std::vector<double> EmbeddingMatrix::to_f64() const { return {values.begin(), values.end()}; }

std::string encode(const EmbeddingMatrix& m) {
    if (m.values.size() != static_cast<std::size_t>(m.n_docs) * m.dim)
        throw Error("embedding matrix: value count does not match n_docs*dim");
    if (m.doc_ids.size() != m.n_docs) throw Error("embedding matrix: doc id count does not match n_docs");
    std::string out = "EMB1";
    put_u32(out, m.n_docs);
    put_u32(out, m.dim);
    out.push_back(m.normalized ? 1 : 0);
    for (float f : m.values) put_u32(out, std::bit_cast<std::uint32_t>(f));
    for (const auto& id : m.doc_ids) {
        if (id.find('\n') != std::string::npos) throw Error("doc id contains a newline: " + id);
        out += id;
        out.push_back('\n');
    }
    for (const auto& line : m.trailer) out += "#" + line + "\n";
    return out;
}

EmbeddingMatrix decode(std::string_view in) {
    constexpr std::size_t header = 13;
    if (in.size() < 4 || in.substr(0, 4) != "EMB1") throw InputError("EMB1: magic mismatch");
    if (in.size() < header) throw InputError("EMB1: truncated header");
    EmbeddingMatrix m;
    m.n_docs = get_u32(in, 4);
    m.dim = get_u32(in, 8);
    const auto flag = static_cast<unsigned char>(in[12]);
    if (flag > 1) throw InputError("EMB1: normalized flag must be 0 or 1");
    m.normalized = flag == 1;
    const std::size_t payload = static_cast<std::size_t>(m.n_docs) * m.dim * 4;
    if (in.size() - header < payload)
        throw InputError("EMB1: truncated payload, expected " + std::to_string(payload) + " bytes, got " +
                         std::to_string(in.size() - header));
    m.values.resize(static_cast<std::size_t>(m.n_docs) * m.dim);
    for (std::size_t i = 0; i < m.values.size(); ++i) {
        m.values[i] = std::bit_cast<float>(get_u32(in, header + 4 * i));
        if (!std::isfinite(m.values[i]))
            throw InputError("EMB1: non-finite value in row " + std::to_string(i / m.dim));
    }
    std::string_view rest = in.substr(header + payload);
    while (!rest.empty()) {
        auto nl = rest.find('\n');
        std::string_view line = rest.substr(0, nl);
        if (m.doc_ids.size() < m.n_docs) m.doc_ids.emplace_back(line);
        else if (!line.empty() && line.front() == '#') m.trailer.emplace_back(line.substr(1));
        else if (!line.empty()) throw InputError("EMB1: unexpected data after doc ids");
        if (nl == std::string_view::npos) break;
        rest.remove_prefix(nl + 1);
    }
    if (m.doc_ids.size() != m.n_docs)
        throw InputError("EMB1: expected " + std::to_string(m.n_docs) + " doc ids, got " +
                         std::to_string(m.doc_ids.size()));
    if (m.normalized) {
        for (std::size_t i = 0; i < m.n_docs; ++i) {
            double ss = 0;
            for (float f : m.row(i)) ss += static_cast<double>(f) * f;
            if (std::fabs(std::sqrt(ss) - 1.0) > 1e-5)
                throw InputError("EMB1: row " + std::to_string(i) + " is flagged normalized but has norm " +
                                 csv::format_double(std::sqrt(ss)));
        }
    }
    return m;
}

void save(const EmbeddingMatrix& m, const std::filesystem::path& path) { csv::write_file(path, encode(m)); }

EmbeddingMatrix load_embeddings(const std::filesystem::path& path,
                                std::optional<std::span<const std::string>> expected_ids) {
    EmbeddingMatrix m = decode(csv::read_file(path));
    if (expected_ids) {
        std::set<std::string> want(expected_ids->begin(), expected_ids->end());
        std::set<std::string> have(m.doc_ids.begin(), m.doc_ids.end());
        if (have.size() != m.doc_ids.size()) throw InputError("EMB1: duplicate doc ids");
        if (want != have) {
            std::size_t missing = 0, extra = 0;
            for (const auto& id : want) missing += have.count(id) == 0;
            for (const auto& id : have) extra += want.count(id) == 0;
            throw InputError("EMB1: doc ids do not match corpus (" + std::to_string(missing) + " missing, " +
                             std::to_string(extra) + " unexpected)");
        }
    }
    return m;
}

EmbeddingMatrix fallback_embed(std::span<const std::string> corpus, std::span<const std::string> doc_ids,
                               std::uint32_t dim, std::uint64_t seed) {
    if (corpus.empty()) throw InputError("fallback_embed: empty corpus");
    if (dim < 2) throw InputError("fallback_embed: dim must be >= 2");
    if (!doc_ids.empty() && doc_ids.size() != corpus.size())
        throw InputError("fallback_embed: doc id count does not match corpus");

    const std::size_t n = corpus.size();
    // bucket -> signed count per document
    std::vector<std::map<std::uint32_t, double>> tf(n);
    std::unordered_map<std::uint32_t, std::size_t> df;
    for (std::size_t d = 0; d < n; ++d) {
        for (const auto& tok : word_tokens(corpus[d])) {
            const std::uint64_t h = hash::fnv1a(tok);
            const auto bucket = static_cast<std::uint32_t>(h & (hashed_vocabulary_size - 1));
            const double sign = (h >> 32) & 1 ? -1.0 : 1.0;
            tf[d][bucket] += sign;
        }
        for (const auto& [b, _] : tf[d]) ++df[b];
    }

    EmbeddingMatrix m;
    m.n_docs = static_cast<std::uint32_t>(n);
    m.dim = dim;
    m.normalized = true;
    m.values.resize(n * dim);
    std::vector<double> acc(dim);
    for (std::size_t d = 0; d < n; ++d) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (const auto& [b, count] : tf[d]) {
            if (count == 0.0) continue;
            const double idf = std::log((1.0 + static_cast<double>(n)) / (1.0 + static_cast<double>(df[b]))) + 1.0;
            const double w = count * idf;
            const std::uint64_t key = hash::mix(seed ^ hash::mix(b));
            for (std::uint32_t k = 0; k < dim; k += 64) {
                const std::uint64_t bits = hash::mix(key + k);
                for (std::uint32_t j = 0; j < 64 && k + j < dim; ++j) acc[k + j] += (bits >> j) & 1 ? -w : w;
            }
        }
        double ss = 0;
        for (double v : acc) ss += v * v;
        if (ss == 0.0) {
            // no usable tokens: a fixed unit vector keeps the row normalized
            std::fill(acc.begin(), acc.end(), 1.0);
            ss = dim;
        }
        const double inv = 1.0 / std::sqrt(ss);
        for (std::uint32_t k = 0; k < dim; ++k) m.values[d * dim + k] = static_cast<float>(acc[k] * inv);
    }
    if (doc_ids.empty()) {
        for (std::size_t d = 0; d < n; ++d) m.doc_ids.push_back(std::to_string(d));
    } else {
        m.doc_ids.assign(doc_ids.begin(), doc_ids.end());
    }
    return m;
}

}  // namespace topicforge::embeddings
