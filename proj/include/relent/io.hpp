#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "relent/bayes.hpp"
#include "relent/distribution.hpp"
#include "relent/em.hpp"
#include "relent/errors.hpp"
#include "relent/hypothesis_tests.hpp"
#include "relent/markov.hpp"
#include "relent/maxent.hpp"
#include "relent/tables.hpp"

namespace relent::io {

using nlohmann::json;

// Locale-independent double parsing ('.' decimal separator, always).
inline double parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw invalid_input("cannot parse number: '" + std::string(s) + "'");
    return value;
}

inline bool looks_numeric(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    if (s.empty()) return false;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    return ec == std::errc() && ptr == s.data() + s.size();
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw invalid_input("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw invalid_input("cannot write file: " + path);
    out << content;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

// Doubles that JSON cannot represent are encoded as the strings
// "inf", "-inf", "nan".
inline json json_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

inline double number_from_json(const json& j) {
    if (j.is_string()) {
        const std::string& s = j.get_ref<const std::string&>();
        if (s == "inf") return kInfinity;
        if (s == "-inf") return -kInfinity;
        if (s == "nan") return std::nan("");
        throw invalid_input("expected a number, got string '" + s + "'");
    }
    if (!j.is_number()) throw invalid_input("expected a number");
    return j.get<double>();
}

// --- distributions -------------------------------------------------------

// Accepts a JSON array of numbers or CSV lines `label,prob` / `prob`.
// The format is sniffed from the first non-space character.
inline Distribution parse_distribution(const std::string& content) {
    std::size_t pos = content.find_first_not_of(" \t\r\n");
    if (pos == std::string::npos) throw invalid_input("empty distribution file");
    if (content[pos] == '[') {
        json j = json::parse(content, nullptr, true, /*ignore_comments=*/false);
        std::vector<double> p;
        for (const auto& x : j) p.push_back(number_from_json(x));
        return Distribution(std::move(p));
    }
    std::vector<double> probs;
    std::vector<std::string> labels;
    std::istringstream in(content);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() == 1) {
            probs.push_back(parse_double(cells[0]));
        } else if (cells.size() == 2) {
            if (!looks_numeric(cells[1])) {
                if (first) { first = false; continue; }  // header row
                throw invalid_input("bad distribution row: " + line);
            }
            labels.push_back(cells[0]);
            probs.push_back(parse_double(cells[1]));
        } else {
            throw invalid_input("distribution rows must be `label,prob` or `prob`");
        }
        first = false;
    }
    if (labels.size() == probs.size()) return Distribution(std::move(probs), std::move(labels));
    return Distribution(std::move(probs));
}

inline Distribution load_distribution(const std::string& path) {
    return parse_distribution(read_file(path));
}

inline json distribution_to_json(const Distribution& d) {
    json arr = json::array();
    for (double p : d.probs()) arr.push_back(p);
    return arr;
}

// --- tables ---------------------------------------------------------------

// CSV matrix; a non-numeric first row and/or first column is read as labels.
inline JointTable parse_table(const std::string& content) {
    std::vector<std::vector<std::string>> grid;
    std::istringstream in(content);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        grid.push_back(split_csv_line(line));
    }
    if (grid.empty()) throw invalid_input("empty table file");
    bool header = false, rowlab = false;
    if (!looks_numeric(grid[0].back())) header = true;
    std::size_t r0 = header ? 1 : 0;
    if (r0 >= grid.size()) throw invalid_input("table has no data rows");
    if (!looks_numeric(grid[r0][0])) rowlab = true;
    std::size_t c0 = rowlab ? 1 : 0;

    std::vector<std::string> row_labels, col_labels;
    if (header)
        for (std::size_t c = c0; c < grid[0].size(); ++c) col_labels.push_back(grid[0][c]);
    std::vector<double> probs;
    std::size_t cols = 0;
    for (std::size_t r = r0; r < grid.size(); ++r) {
        if (rowlab) row_labels.push_back(grid[r][0]);
        std::size_t width = grid[r].size() - c0;
        if (cols == 0) cols = width;
        else if (width != cols) throw invalid_input("ragged table rows");
        for (std::size_t c = c0; c < grid[r].size(); ++c)
            probs.push_back(parse_double(grid[r][c]));
    }
    std::size_t rows = grid.size() - r0;
    return JointTable(rows, cols, std::move(probs), std::move(row_labels),
                      std::move(col_labels));
}

inline JointTable load_table(const std::string& path) { return parse_table(read_file(path)); }

inline std::string table_to_csv(const JointTable& t) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t j = 0; j < t.rows(); ++j) {
        for (std::size_t k = 0; k < t.cols(); ++k) {
            if (k) out << ',';
            out << t.at(j, k);
        }
        out << '\n';
    }
    return out.str();
}

inline json table_to_json(const JointTable& t) {
    json rows = json::array();
    for (std::size_t j = 0; j < t.rows(); ++j) {
        json row = json::array();
        for (std::size_t k = 0; k < t.cols(); ++k) row.push_back(t.at(j, k));
        rows.push_back(row);
    }
    return rows;
}

// JSON nested array [[[...]]] indexed [i][j][k].
inline ThreeWayTable parse_tensor(const std::string& content) {
    json j = json::parse(content);
    if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty() || !j[0][0].is_array())
        throw invalid_input("tensor must be a three-level nested JSON array");
    std::size_t d1 = j.size(), d2 = j[0].size(), d3 = j[0][0].size();
    std::vector<double> probs;
    probs.reserve(d1 * d2 * d3);
    for (const auto& plane : j) {
        if (plane.size() != d2) throw invalid_input("ragged tensor");
        for (const auto& row : plane) {
            if (row.size() != d3) throw invalid_input("ragged tensor");
            for (const auto& x : row) probs.push_back(number_from_json(x));
        }
    }
    return ThreeWayTable(d1, d2, d3, std::move(probs));
}

inline ThreeWayTable load_tensor(const std::string& path) {
    return parse_tensor(read_file(path));
}

inline json tensor_to_json(const ThreeWayTable& t) {
    json out = json::array();
    for (std::size_t i = 0; i < t.dim1(); ++i) {
        json plane = json::array();
        for (std::size_t j = 0; j < t.dim2(); ++j) {
            json row = json::array();
            for (std::size_t k = 0; k < t.dim3(); ++k) row.push_back(t.at(i, j, k));
            plane.push_back(row);
        }
        out.push_back(plane);
    }
    return out;
}

// --- constraints, hypotheses, mixtures -------------------------------------

// JSON: {coeffs: [...], target: x} or an array of such objects.
inline std::vector<LinearConstraint> parse_constraints(const std::string& content) {
    json j = json::parse(content);
    json arr = j.is_array() ? j : json::array({j});
    std::vector<LinearConstraint> cs;
    for (const auto& e : arr) {
        if (!e.contains("coeffs") || !e.contains("target"))
            throw invalid_input("constraint needs fields `coeffs` and `target`");
        LinearConstraint c;
        for (const auto& x : e["coeffs"]) c.coeffs.push_back(number_from_json(x));
        c.target = number_from_json(e["target"]);
        cs.push_back(std::move(c));
    }
    if (cs.empty()) throw invalid_input("no constraints in file");
    return cs;
}

inline std::vector<LinearConstraint> load_constraints(const std::string& path) {
    return parse_constraints(read_file(path));
}

// JSON: [{prior: p, probs: [...]}, ...]
inline HypothesisSet parse_hypotheses(const std::string& content) {
    json j = json::parse(content);
    if (!j.is_array() || j.empty()) throw invalid_input("hypothesis file must be a JSON array");
    std::vector<Distribution> models;
    std::vector<double> priors;
    for (const auto& e : j) {
        if (!e.contains("prior") || !e.contains("probs"))
            throw invalid_input("hypothesis needs fields `prior` and `probs`");
        priors.push_back(number_from_json(e["prior"]));
        std::vector<double> p;
        for (const auto& x : e["probs"]) p.push_back(number_from_json(x));
        models.push_back(Distribution(std::move(p)));
    }
    return HypothesisSet(std::move(models), Distribution::from_weights(std::move(priors)));
}

inline HypothesisSet load_hypotheses(const std::string& path) {
    return parse_hypotheses(read_file(path));
}

// JSON: {components: [[...], ...], observed: [...]}
inline MixtureProblem parse_mixture_problem(const std::string& content) {
    json j = json::parse(content);
    if (!j.contains("components") || !j.contains("observed"))
        throw invalid_input("mixture problem needs fields `components` and `observed`");
    std::vector<Distribution> comps;
    for (const auto& c : j["components"]) {
        std::vector<double> p;
        for (const auto& x : c) p.push_back(number_from_json(x));
        comps.push_back(Distribution(std::move(p)));
    }
    std::vector<double> obs;
    for (const auto& x : j["observed"]) obs.push_back(number_from_json(x));
    return MixtureProblem(std::move(comps), Distribution(std::move(obs)));
}

inline MixtureProblem load_mixture_problem(const std::string& path) {
    return parse_mixture_problem(read_file(path));
}

// --- reports ----------------------------------------------------------------

inline json test_report_to_json(const TestReport& r) {
    json j;
    j["statistic"] = json_number(r.statistic);
    j["df"] = r.df;
    j["critical_value"] = json_number(r.critical_value);
    j["p_value"] = json_number(r.p_value);
    j["alpha"] = r.alpha;
    j["reject"] = r.reject;
    return j;
}

// --- Markov models ---------------------------------------------------------

inline json normalization_to_json(const NormalizationSpec& n) {
    json j;
    j["lowercase"] = n.lowercase;
    j["collapse_whitespace"] = n.collapse_whitespace;
    j["strip_punctuation"] = n.strip_punctuation;
    j["keep"] = n.keep;
    return j;
}

inline NormalizationSpec normalization_from_json(const json& j) {
    NormalizationSpec n;
    if (j.contains("lowercase")) n.lowercase = j["lowercase"].get<bool>();
    if (j.contains("collapse_whitespace"))
        n.collapse_whitespace = j["collapse_whitespace"].get<bool>();
    if (j.contains("strip_punctuation"))
        n.strip_punctuation = j["strip_punctuation"].get<bool>();
    if (j.contains("keep")) n.keep = j["keep"].get<std::string>();
    return n;
}

inline json model_to_json(const ConditionalModel& m) {
    json j;
    j["order"] = m.order;
    json alpha = json::array();
    for (char c : m.alphabet.symbols()) alpha.push_back(std::string(1, c));
    j["alphabet"] = alpha;
    j["normalization"] = normalization_to_json(m.normalization);
    json ctx = json::object();
    for (const auto& [gram, row] : m.contexts) {
        json r = json::object();
        for (std::size_t w = 0; w < row.size(); ++w)
            if (row[w] > 0.0) r[std::string(1, m.alphabet.symbol(w))] = row[w];
        ctx[gram] = r;
    }
    j["contexts"] = ctx;
    json cw = json::object();
    for (const auto& [gram, w] : m.context_weights) cw[gram] = w;
    j["context_weights"] = cw;
    return j;
}

inline ConditionalModel model_from_json(const json& j) {
    ConditionalModel m;
    m.order = j.at("order").get<int>();
    std::vector<char> symbols;
    for (const auto& s : j.at("alphabet")) {
        std::string sym = s.get<std::string>();
        if (sym.size() != 1) throw invalid_input("model alphabet symbols must be single bytes");
        symbols.push_back(sym[0]);
    }
    m.alphabet = Alphabet(std::move(symbols));
    if (j.contains("normalization")) m.normalization = normalization_from_json(j["normalization"]);
    for (const auto& [gram, row] : j.at("contexts").items()) {
        if (static_cast<int>(gram.size()) != m.order)
            throw invalid_input("model context '" + gram + "' length != order");
        std::vector<double> r(m.alphabet.size(), 0.0);
        double sum = 0.0;
        for (const auto& [sym, p] : row.items()) {
            if (sym.size() != 1 || m.alphabet.index_of(sym[0]) < 0)
                throw invalid_input("model row symbol outside alphabet");
            r[m.alphabet.index_of(sym[0])] = number_from_json(p);
            sum += r[m.alphabet.index_of(sym[0])];
        }
        if (std::fabs(sum - 1.0) > 1e-6)
            throw invalid_input("model row for '" + gram + "' does not sum to 1");
        for (double& p : r) p /= sum;
        m.contexts.emplace(gram, std::move(r));
    }
    double wsum = 0.0;
    for (const auto& [gram, w] : j.at("context_weights").items()) {
        if (!m.contexts.count(gram))
            throw invalid_input("context weight for unknown context '" + gram + "'");
        double v = number_from_json(w);
        m.context_weights.emplace(gram, v);
        wsum += v;
    }
    if (m.context_weights.size() != m.contexts.size())
        throw invalid_input("model contexts and context_weights disagree");
    if (std::fabs(wsum - 1.0) > 1e-6) throw invalid_input("context weights do not sum to 1");
    for (auto& [gram, w] : m.context_weights) w /= wsum;
    return m;
}

inline ConditionalModel load_model(const std::string& path) {
    return model_from_json(json::parse(read_file(path)));
}

}  // namespace relent::io
