#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "relent/distribution.hpp"
#include "relent/errors.hpp"
#include "relent/hypothesis_tests.hpp"
#include "relent/rng.hpp"

namespace relent {

// Symbols are single bytes after normalization; the alphabet is their ordered
// list with an index map.
class Alphabet {
  public:
    Alphabet() = default;

    explicit Alphabet(std::vector<char> symbols) : symbols_(std::move(symbols)) {
        if (symbols_.empty()) throw invalid_input("Alphabet: empty");
        index_.assign(256, -1);
        for (std::size_t i = 0; i < symbols_.size(); ++i) {
            unsigned char u = static_cast<unsigned char>(symbols_[i]);
            if (index_[u] != -1) throw invalid_input("Alphabet: duplicate symbol");
            index_[u] = static_cast<int>(i);
        }
    }

    std::size_t size() const { return symbols_.size(); }
    char symbol(std::size_t i) const { return symbols_[i]; }
    const std::vector<char>& symbols() const { return symbols_; }
    int index_of(char c) const { return index_[static_cast<unsigned char>(c)]; }
    bool operator==(const Alphabet& o) const { return symbols_ == o.symbols_; }

  private:
    std::vector<char> symbols_;
    std::vector<int> index_;
};

struct SymbolSequence {
    Alphabet alphabet;
    std::vector<std::uint8_t> data;  // indices into the alphabet

    std::size_t size() const { return data.size(); }

    std::string str() const {
        std::string s;
        s.reserve(data.size());
        for (auto i : data) s.push_back(alphabet.symbol(i));
        return s;
    }

    std::string gram_at(std::size_t pos, std::size_t len) const {
        std::string s;
        s.reserve(len);
        for (std::size_t k = 0; k < len; ++k) s.push_back(alphabet.symbol(data[pos + k]));
        return s;
    }
};

// Text normalization applied before any counting; serialized with every
// trained model so that evaluation and generation tokenize identically.
struct NormalizationSpec {
    bool lowercase = true;
    bool collapse_whitespace = true;
    bool strip_punctuation = true;
    std::string keep;  // punctuation characters exempt from stripping

    bool operator==(const NormalizationSpec&) const = default;
};

namespace detail {

inline bool is_space_byte(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

}  // namespace detail

// Normalizes raw text into a symbol sequence: optional lowercase folding,
// whitespace runs collapsed to a single blank, punctuation stripped except
// for the keep-set.  Leading and trailing blanks are dropped.  The alphabet
// is inferred from the surviving symbols unless supplied.
inline SymbolSequence ingest_corpus(const std::string& text, const NormalizationSpec& norm,
                                    const Alphabet* alphabet = nullptr) {
    std::string out;
    out.reserve(text.size());
    bool pending_blank = false;
    for (char c : text) {
        if (detail::is_space_byte(c)) {
            if (norm.collapse_whitespace) {
                if (!out.empty()) pending_blank = true;
            } else {
                out.push_back(' ');
            }
            continue;
        }
        char k = c;
        if (norm.lowercase && k >= 'A' && k <= 'Z') k = static_cast<char>(k - 'A' + 'a');
        bool letter = (k >= 'a' && k <= 'z') || (k >= 'A' && k <= 'Z');
        if (!letter && norm.strip_punctuation && norm.keep.find(k) == std::string::npos)
            continue;
        if (pending_blank) {
            out.push_back(' ');
            pending_blank = false;
        }
        out.push_back(k);
    }
    if (out.empty()) throw invalid_input("ingest_corpus: no symbols survive normalization");

    SymbolSequence seq;
    if (alphabet) {
        seq.alphabet = *alphabet;
    } else {
        std::vector<char> uniq(out.begin(), out.end());
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        seq.alphabet = Alphabet(std::move(uniq));
    }
    seq.data.reserve(out.size());
    for (char c : out) {
        int idx = seq.alphabet.index_of(c);
        if (idx < 0)
            throw invalid_input(std::string("ingest_corpus: symbol '") + c +
                                "' outside the supplied alphabet");
        seq.data.push_back(static_cast<std::uint8_t>(idx));
    }
    return seq;
}

// Sliding-window r-gram counts without wraparound; total = n - r + 1.
struct NGramTable {
    int order = 0;
    std::map<std::string, long> counts;
    long total = 0;
};

inline NGramTable count_ngrams(const SymbolSequence& s, int r) {
    if (r < 1) throw invalid_input("count_ngrams: r must be >= 1");
    if (static_cast<std::size_t>(r) > s.size())
        throw invalid_input("count_ngrams: r exceeds the sequence length");
    NGramTable t;
    t.order = r;
    for (std::size_t i = 0; i + r <= s.size(); ++i) ++t.counts[s.gram_at(i, r)];
    t.total = static_cast<long>(s.size()) - r + 1;
    return t;
}

// A Markov model of order r: per-context next-symbol distributions plus the
// stationary context weights used to start generation.
struct ConditionalModel {
    int order = 0;
    Alphabet alphabet;
    NormalizationSpec normalization;
    std::map<std::string, std::vector<double>> contexts;  // row sums to 1
    std::map<std::string, double> context_weights;        // sums to 1
};

// Fits the order-r conditional model from (r+1)-gram counts grouped by
// context.  Context weights are the transition-weighted context frequencies
// n(alpha.)/(n-r), which is the stationary r-gram law up to the boundary
// term of the final window.
inline ConditionalModel fit_conditional(const SymbolSequence& s, int r,
                                        const NormalizationSpec& norm = {}) {
    if (r < 0) throw invalid_input("fit_conditional: r must be >= 0");
    if (static_cast<std::size_t>(r) + 1 > s.size())
        throw invalid_input("fit_conditional: r+1 exceeds the sequence length");
    const std::size_t m = s.alphabet.size();
    std::map<std::string, std::vector<long>> rows;
    for (std::size_t i = 0; i + r < s.size(); ++i) {
        auto& row = rows.try_emplace(s.gram_at(i, r), m, 0L).first->second;
        ++row[s.data[i + r]];
    }
    ConditionalModel model;
    model.order = r;
    model.alphabet = s.alphabet;
    model.normalization = norm;
    double transitions = static_cast<double>(s.size() - r);
    for (auto& [ctx, row] : rows) {
        long rt = 0;
        for (long c : row) rt += c;
        std::vector<double> p(m, 0.0);
        for (std::size_t w = 0; w < m; ++w) p[w] = static_cast<double>(row[w]) / rt;
        model.contexts.emplace(ctx, std::move(p));
        model.context_weights.emplace(ctx, rt / transitions);
    }
    return model;
}

// r-gram entropy H_r of the empirical distribution.
inline double gram_entropy(const SymbolSequence& s, int r) {
    NGramTable t = count_ngrams(s, r);
    double h = 0.0;
    for (const auto& [g, c] : t.counts) {
        double p = static_cast<double>(c) / t.total;
        h -= p * std::log(p);
    }
    return h;
}

// Conditional next-symbol entropy of order r (h_{r+1} in the usual indexing),
// computed
// as the plug-in conditional entropy over the n - r observed transitions.
inline double cond_entropy(const SymbolSequence& s, int r) {
    if (r < 0) throw invalid_input("cond_entropy: r must be >= 0");
    if (static_cast<std::size_t>(r) + 1 > s.size())
        throw invalid_input("cond_entropy: r+1 exceeds the sequence length");
    std::map<std::string, std::vector<long>> rows;
    const std::size_t m = s.alphabet.size();
    for (std::size_t i = 0; i + r < s.size(); ++i) {
        auto& row = rows.try_emplace(s.gram_at(i, r), m, 0L).first->second;
        ++row[s.data[i + r]];
    }
    double transitions = static_cast<double>(s.size() - r);
    double h = 0.0;
    for (const auto& [ctx, row] : rows) {
        long rt = 0;
        for (long c : row) rt += c;
        for (long c : row)
            if (c > 0) h -= (c / transitions) * std::log(static_cast<double>(c) / rt);
    }
    return h;
}

// Closed-form entropy rate of a first-order chain with transition matrix W
// and stationary distribution pi: h = -sum_j pi_j sum_k w_jk ln w_jk.
inline double entropy_rate_markov1(const std::vector<std::vector<double>>& W,
                                   const Distribution& pi) {
    const std::size_t m = pi.size();
    if (W.size() != m) throw invalid_input("entropy_rate_markov1: shape mismatch");
    for (const auto& row : W) {
        if (row.size() != m) throw invalid_input("entropy_rate_markov1: shape mismatch");
        double sum = 0.0;
        for (double w : row) {
            if (w < 0.0) throw invalid_input("entropy_rate_markov1: negative entry");
            sum += w;
        }
        if (std::fabs(sum - 1.0) > 1e-9)
            throw invalid_input("entropy_rate_markov1: rows must sum to 1");
    }
    for (std::size_t k = 0; k < m; ++k) {
        double col = 0.0;
        for (std::size_t j = 0; j < m; ++j) col += pi[j] * W[j][k];
        if (std::fabs(col - pi[k]) > 1e-9)
            throw invalid_input("entropy_rate_markov1: pi is not stationary for W");
    }
    double h = 0.0;
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k)
            if (W[j][k] > 0.0) h -= pi[j] * W[j][k] * std::log(W[j][k]);
    return h;
}

// R = 1 - h / ln m.
inline double redundancy(double h, std::size_t m) {
    if (m < 2) throw invalid_input("redundancy: m must be >= 2");
    double hmax = std::log(static_cast<double>(m));
    if (!(h >= -1e-12 && h <= hmax + 1e-9))
        throw invalid_input("redundancy: h outside [0, ln m]");
    return 1.0 - h / hmax;
}

// Markov divergence rate kappa_{r+1}(fD||g): the mean log-likelihood ratio of
// the observed transitions against the model's conditionals.  +infinity as
// soon as the data uses a transition (or context) the model forbids.
inline double kappa(const SymbolSequence& s, const ConditionalModel& model) {
    if (!(s.alphabet == model.alphabet)) throw invalid_input("kappa: alphabet mismatch");
    const int r = model.order;
    if (static_cast<std::size_t>(r) + 1 > s.size())
        throw invalid_input("kappa: sequence shorter than the model order");
    std::map<std::string, std::vector<long>> rows;
    const std::size_t m = s.alphabet.size();
    for (std::size_t i = 0; i + r < s.size(); ++i) {
        auto& row = rows.try_emplace(s.gram_at(i, r), m, 0L).first->second;
        ++row[s.data[i + r]];
    }
    double transitions = static_cast<double>(s.size() - r);
    double k = 0.0;
    for (const auto& [ctx, row] : rows) {
        auto g = model.contexts.find(ctx);
        long rt = 0;
        for (long c : row) rt += c;
        for (std::size_t w = 0; w < m; ++w) {
            if (row[w] == 0) continue;
            if (g == model.contexts.end() || g->second[w] == 0.0) return kInfinity;
            double fcond = static_cast<double>(row[w]) / rt;
            k += (row[w] / transitions) * std::log(fcond / g->second[w]);
        }
    }
    return k < 0.0 ? 0.0 : k;
}

// Nested likelihood-ratio test of order s_order within order r_order:
// statistic 2n [h_{s+1} - h_{r+1}], df = (m-1)(m^r - m^s).
inline TestReport test_order(const SymbolSequence& seq, int s_order, int r_order, double alpha) {
    if (s_order < 0 || r_order <= s_order) throw invalid_input("test_order: need r > s >= 0");
    if (static_cast<std::size_t>(r_order) + 1 > seq.size())
        throw invalid_input("test_order: sequence too short for r_order");
    double n = static_cast<double>(seq.size());
    double stat = 2.0 * n * (cond_entropy(seq, s_order) - cond_entropy(seq, r_order));
    if (stat < 0.0) stat = 0.0;  // boundary-effect guard; the population value is >= 0
    double m = static_cast<double>(seq.alphabet.size());
    double df_real = (m - 1.0) * (std::pow(m, r_order) - std::pow(m, s_order));
    if (df_real > 2e9) throw invalid_input("test_order: df overflow");
    return detail::make_report(stat, static_cast<int>(df_real + 0.5), alpha);
}

struct OrderScanResult {
    int r_max = 0;
    std::vector<TestReport> reports;  // index i is the test at r = i+1 (s = r-1)
    int detected_order = 0;           // largest rejecting r, 0 if none rejects
};

// Sequential scan r = 1..r_max with s = r-1 at each step,
// r_max = floor(ln n / (2 ln m)); detected order = largest rejecting r.
inline OrderScanResult order_scan(const SymbolSequence& seq, double alpha) {
    const double n = static_cast<double>(seq.size());
    const double m = static_cast<double>(seq.alphabet.size());
    if (m < 2) throw invalid_input("order_scan: alphabet must have at least 2 symbols");
    if (n < m * m) throw invalid_input("order_scan: sequence shorter than m^2");
    OrderScanResult res;
    res.r_max = static_cast<int>(std::floor(0.5 * std::log(n) / std::log(m)));
    for (int r = 1; r <= res.r_max; ++r) {
        res.reports.push_back(test_order(seq, r - 1, r, alpha));
        if (res.reports.back().reject) res.detected_order = r;
    }
    return res;
}

struct GenerateResult {
    SymbolSequence sequence;
    long restarts = 0;  // dead-end contexts resolved by resampling a start
};

// Generates `length` symbols: the initial r-gram is drawn from the context
// weights, then symbols are drawn from the conditional rows.  A context
// absent from the model (possible after mixing) triggers a fresh start drawn
// from the context weights, counted in `restarts`.
inline GenerateResult generate(const ConditionalModel& model, long length, std::uint64_t seed) {
    if (model.contexts.empty()) throw invalid_input("generate: model has no contexts");
    const int r = model.order;
    if (length < r || length < 1) throw invalid_input("generate: length must be >= max(r,1)");

    std::vector<std::string> ctx_keys;
    std::vector<double> ctx_w;
    for (const auto& [k, w] : model.context_weights) {
        ctx_keys.push_back(k);
        ctx_w.push_back(w);
    }
    CategoricalSampler start(ctx_w);
    Rng rng(seed);

    GenerateResult out;
    out.sequence.alphabet = model.alphabet;
    auto& data = out.sequence.data;
    data.reserve(length);

    auto emit_context = [&](const std::string& ctx) {
        for (char ch : ctx) {
            if (static_cast<long>(data.size()) >= length) break;
            data.push_back(static_cast<std::uint8_t>(model.alphabet.index_of(ch)));
        }
    };

    std::string ctx = ctx_keys[start(rng)];
    emit_context(ctx);
    while (static_cast<long>(data.size()) < length) {
        auto row = model.contexts.find(ctx);
        if (row == model.contexts.end()) {
            ++out.restarts;
            ctx = ctx_keys[start(rng)];
            emit_context(ctx);
            continue;
        }
        CategoricalSampler next(row->second);
        std::size_t w = next(rng);
        data.push_back(static_cast<std::uint8_t>(w));
        if (r > 0) {
            ctx.erase(ctx.begin());
            ctx.push_back(model.alphabet.symbol(w));
        }
    }
    return out;
}

// Annealed model: each conditional row raised to the power beta and
// renormalized.  Entries that underflow are floored at the smallest normal
// double so every row keeps its exact support at any temperature.
inline ConditionalModel anneal(const ConditionalModel& model, double beta) {
    if (!(beta > 0.0)) throw invalid_input("anneal: beta must be > 0");
    ConditionalModel out = model;
    for (auto& [ctx, row] : out.contexts) {
        double best = 0.0;
        for (double p : row) best = std::max(best, p);
        double z = 0.0;
        for (double& p : row) {
            if (p > 0.0) {
                p = std::exp(beta * (std::log(p) - std::log(best)));
                if (p < 2.2250738585072014e-308) p = 2.2250738585072014e-308;
            }
            z += p;
        }
        for (double& p : row) p /= z;
    }
    return out;
}

// Rowwise convex combination over the union of the context sets; a context
// present in only one model keeps that model's row.
inline ConditionalModel mix_additive(const ConditionalModel& mf, const ConditionalModel& mg,
                                     double lambda) {
    if (!(mf.alphabet == mg.alphabet) || mf.order != mg.order)
        throw invalid_input("mix_additive: alphabet/order mismatch");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw invalid_input("mix_additive: lambda must be in [0,1]");
    ConditionalModel out;
    out.order = mf.order;
    out.alphabet = mf.alphabet;
    out.normalization = mf.normalization;
    for (const auto& [ctx, row] : mf.contexts) {
        auto g = mg.contexts.find(ctx);
        if (g == mg.contexts.end()) {
            out.contexts.emplace(ctx, row);
        } else {
            std::vector<double> mixed(row.size());
            for (std::size_t w = 0; w < row.size(); ++w)
                mixed[w] = lambda * row[w] + (1.0 - lambda) * g->second[w];
            out.contexts.emplace(ctx, std::move(mixed));
        }
    }
    for (const auto& [ctx, row] : mg.contexts)
        if (!mf.contexts.count(ctx)) out.contexts.emplace(ctx, row);
    // start weights: the same convex combination, absent contexts weighing 0
    double total = 0.0;
    for (const auto& [ctx, unused] : out.contexts) {
        auto fw = mf.context_weights.find(ctx);
        auto gw = mg.context_weights.find(ctx);
        double w = lambda * (fw != mf.context_weights.end() ? fw->second : 0.0) +
                   (1.0 - lambda) * (gw != mg.context_weights.end() ? gw->second : 0.0);
        out.context_weights.emplace(ctx, w);
        total += w;
    }
    for (auto& [ctx, w] : out.context_weights) w /= total;
    return out;
}

struct MultiplicativeMixResult {
    ConditionalModel model;
    long dropped_contexts = 0;  // contexts with no common support, removed
};

// Rowwise geometric mixture f^mu g^(1-mu) normalized per context; transitions
// survive only where both models allow them.  Contexts absent from either
// model, or with disjoint row supports, are dropped and counted.
inline MultiplicativeMixResult mix_multiplicative(const ConditionalModel& mf,
                                                  const ConditionalModel& mg, double mu) {
    if (!(mf.alphabet == mg.alphabet) || mf.order != mg.order)
        throw invalid_input("mix_multiplicative: alphabet/order mismatch");
    if (!(mu > 0.0 && mu < 1.0)) throw invalid_input("mix_multiplicative: mu must be in (0,1)");
    MultiplicativeMixResult res;
    ConditionalModel& out = res.model;
    out.order = mf.order;
    out.alphabet = mf.alphabet;
    out.normalization = mf.normalization;
    long shared = 0;
    for (const auto& [ctx, frow] : mf.contexts) {
        auto g = mg.contexts.find(ctx);
        if (g == mg.contexts.end()) { ++res.dropped_contexts; continue; }
        ++shared;
        std::vector<double> mixed(frow.size(), 0.0);
        double z = 0.0;
        for (std::size_t w = 0; w < frow.size(); ++w) {
            if (frow[w] > 0.0 && g->second[w] > 0.0) {
                mixed[w] = std::exp(mu * std::log(frow[w]) + (1.0 - mu) * std::log(g->second[w]));
                z += mixed[w];
            }
        }
        if (!(z > 0.0)) { ++res.dropped_contexts; --shared; continue; }
        for (double& p : mixed) p /= z;
        out.contexts.emplace(ctx, std::move(mixed));
    }
    for (const auto& [ctx, unused] : mg.contexts)
        if (!mf.contexts.count(ctx)) ++res.dropped_contexts;
    if (out.contexts.empty())
        throw invalid_input("mix_multiplicative: no context survives the mixture");
    double total = 0.0;
    for (const auto& [ctx, unused] : out.contexts) {
        double w = mu * mf.context_weights.at(ctx) + (1.0 - mu) * mg.context_weights.at(ctx);
        out.context_weights.emplace(ctx, w);
        total += w;
    }
    for (auto& [ctx, w] : out.context_weights) w /= total;
    return res;
}

}  // namespace relent
