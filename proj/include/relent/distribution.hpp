#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "relent/errors.hpp"

namespace relent {

// A probability vector on the simplex S_m, optionally labelled.
//
// Construction clamps rounding-level negatives (>= -1e-12) to zero,
// accepts totals within 1e-9 of one and renormalizes exactly, and
// rejects anything further off as bad data.
class Distribution {
  public:
    Distribution() = default;

    explicit Distribution(std::vector<double> probs, std::vector<std::string> labels = {})
        : probs_(std::move(probs)), labels_(std::move(labels)) {
        if (probs_.empty()) throw invalid_input("Distribution: empty probability vector");
        if (!labels_.empty() && labels_.size() != probs_.size())
            throw invalid_input("Distribution: label/probability length mismatch");
        double total = 0.0;
        for (double& p : probs_) {
            if (std::isnan(p)) throw invalid_input("Distribution: NaN entry");
            if (p < 0.0) {
                if (p < -1e-12) throw invalid_input("Distribution: negative entry");
                p = 0.0;
            }
            total += p;
        }
        if (std::fabs(total - 1.0) > 1e-9)
            throw invalid_input("Distribution: entries sum to " + std::to_string(total) +
                                ", not 1");
        for (double& p : probs_) p /= total;
    }

    // Normalizes an arbitrary nonnegative weight vector with positive total.
    static Distribution from_weights(std::vector<double> w, std::vector<std::string> labels = {}) {
        if (w.empty()) throw invalid_input("Distribution: empty weight vector");
        if (!labels.empty() && labels.size() != w.size())
            throw invalid_input("Distribution: label/weight length mismatch");
        double total = 0.0;
        for (double& x : w) {
            if (std::isnan(x) || x < 0.0) throw invalid_input("Distribution: bad weight");
            total += x;
        }
        if (!(total > 0.0)) throw invalid_input("Distribution: zero total weight");
        for (double& x : w) x /= total;
        Distribution d;
        d.probs_ = std::move(w);
        d.labels_ = std::move(labels);
        return d;
    }

    static Distribution uniform(std::size_t m) {
        if (m == 0) throw invalid_input("Distribution: m must be >= 1");
        return from_weights(std::vector<double>(m, 1.0));
    }

    static Distribution from_counts(const std::vector<double>& counts) {
        return from_weights(counts);
    }

    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t j) const { return probs_[j]; }
    const std::vector<double>& probs() const { return probs_; }
    const std::vector<std::string>& labels() const { return labels_; }

    bool same_support(const Distribution& other) const {
        if (size() != other.size()) return false;
        for (std::size_t j = 0; j < size(); ++j)
            if ((probs_[j] > 0.0) != (other.probs_[j] > 0.0)) return false;
        return true;
    }

  private:
    std::vector<double> probs_;
    std::vector<std::string> labels_;
};

// A surjective assignment of m categories onto M < m (or equal) groups.
class Partition {
  public:
    Partition(std::vector<int> group_of, int group_count)
        : group_of_(std::move(group_of)), groups_(group_count) {
        if (group_of_.empty() || groups_ < 1) throw invalid_input("Partition: empty");
        std::vector<bool> seen(groups_, false);
        for (int g : group_of_) {
            if (g < 0 || g >= groups_) throw invalid_input("Partition: group index out of range");
            seen[g] = true;
        }
        for (bool s : seen)
            if (!s) throw invalid_input("Partition: empty group");
    }

    static Partition identity(std::size_t m) {
        std::vector<int> g(m);
        for (std::size_t j = 0; j < m; ++j) g[j] = static_cast<int>(j);
        return Partition(std::move(g), static_cast<int>(m));
    }

    std::size_t category_count() const { return group_of_.size(); }
    int group_count() const { return groups_; }
    int group_of(std::size_t j) const { return group_of_[j]; }

  private:
    std::vector<int> group_of_;
    int groups_;
};

}  // namespace relent
