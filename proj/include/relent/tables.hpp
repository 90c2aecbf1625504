#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "relent/distribution.hpp"
#include "relent/errors.hpp"

namespace relent {

// A joint distribution over an m1 x m2 grid, stored row-major.
class JointTable {
  public:
    JointTable() = default;

    JointTable(std::size_t rows, std::size_t cols, std::vector<double> probs,
               std::vector<std::string> row_labels = {}, std::vector<std::string> col_labels = {})
        : rows_(rows), cols_(cols), probs_(std::move(probs)),
          row_labels_(std::move(row_labels)), col_labels_(std::move(col_labels)) {
        if (rows_ == 0 || cols_ == 0 || probs_.size() != rows_ * cols_)
            throw invalid_input("JointTable: shape mismatch");
        if (!row_labels_.empty() && row_labels_.size() != rows_)
            throw invalid_input("JointTable: row label mismatch");
        if (!col_labels_.empty() && col_labels_.size() != cols_)
            throw invalid_input("JointTable: column label mismatch");
        normalize_checked(probs_);
    }

    static JointTable from_weights(std::size_t rows, std::size_t cols, std::vector<double> w) {
        double total = 0.0;
        for (double x : w) {
            if (std::isnan(x) || x < 0.0) throw invalid_input("JointTable: bad weight");
            total += x;
        }
        if (!(total > 0.0)) throw invalid_input("JointTable: zero total weight");
        for (double& x : w) x /= total;
        JointTable t;
        t.rows_ = rows;
        t.cols_ = cols;
        t.probs_ = std::move(w);
        if (t.probs_.size() != rows * cols) throw invalid_input("JointTable: shape mismatch");
        return t;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }
    double at(std::size_t j, std::size_t k) const { return probs_[j * cols_ + k]; }
    const std::vector<double>& probs() const { return probs_; }
    const std::vector<std::string>& row_labels() const { return row_labels_; }
    const std::vector<std::string>& col_labels() const { return col_labels_; }

    Distribution row_marginal() const {
        std::vector<double> m(rows_, 0.0);
        for (std::size_t j = 0; j < rows_; ++j)
            for (std::size_t k = 0; k < cols_; ++k) m[j] += at(j, k);
        return Distribution::from_weights(std::move(m));
    }

    Distribution col_marginal() const {
        std::vector<double> m(cols_, 0.0);
        for (std::size_t j = 0; j < rows_; ++j)
            for (std::size_t k = 0; k < cols_; ++k) m[k] += at(j, k);
        return Distribution::from_weights(std::move(m));
    }

    // The table read as a distribution over the m1*m2 product categories.
    Distribution flatten() const { return Distribution::from_weights(probs_); }

  private:
    void normalize_checked(std::vector<double>& p) {
        double total = 0.0;
        for (double& x : p) {
            if (std::isnan(x)) throw invalid_input("JointTable: NaN entry");
            if (x < 0.0) {
                if (x < -1e-12) throw invalid_input("JointTable: negative entry");
                x = 0.0;
            }
            total += x;
        }
        if (std::fabs(total - 1.0) > 1e-9)
            throw invalid_input("JointTable: entries sum to " + std::to_string(total) + ", not 1");
        for (double& x : p) x /= total;
    }

    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> probs_;
    std::vector<std::string> row_labels_, col_labels_;
};

// An m x m table required to be square on construction.
inline JointTable require_square(const JointTable& t, const char* who) {
    if (!t.square()) throw invalid_input(std::string(who) + ": table must be square");
    return t;
}

// A joint distribution over an m1 x m2 x m3 grid.
class ThreeWayTable {
  public:
    ThreeWayTable(std::size_t d1, std::size_t d2, std::size_t d3, std::vector<double> probs)
        : d1_(d1), d2_(d2), d3_(d3), probs_(std::move(probs)) {
        if (d1_ == 0 || d2_ == 0 || d3_ == 0 || probs_.size() != d1_ * d2_ * d3_)
            throw invalid_input("ThreeWayTable: shape mismatch");
        double total = 0.0;
        for (double& x : probs_) {
            if (std::isnan(x)) throw invalid_input("ThreeWayTable: NaN entry");
            if (x < 0.0) {
                if (x < -1e-12) throw invalid_input("ThreeWayTable: negative entry");
                x = 0.0;
            }
            total += x;
        }
        if (std::fabs(total - 1.0) > 1e-9)
            throw invalid_input("ThreeWayTable: entries sum to " + std::to_string(total) +
                                ", not 1");
        for (double& x : probs_) x /= total;
    }

    static ThreeWayTable from_weights(std::size_t d1, std::size_t d2, std::size_t d3,
                                      std::vector<double> w) {
        double total = 0.0;
        for (double x : w) {
            if (std::isnan(x) || x < 0.0) throw invalid_input("ThreeWayTable: bad weight");
            total += x;
        }
        if (!(total > 0.0)) throw invalid_input("ThreeWayTable: zero total weight");
        for (double& x : w) x /= total;
        return ThreeWayTable(d1, d2, d3, std::move(w), private_tag{});
    }

    std::size_t dim1() const { return d1_; }
    std::size_t dim2() const { return d2_; }
    std::size_t dim3() const { return d3_; }
    double at(std::size_t i, std::size_t j, std::size_t k) const {
        return probs_[(i * d2_ + j) * d3_ + k];
    }
    const std::vector<double>& probs() const { return probs_; }

  private:
    struct private_tag {};
    ThreeWayTable(std::size_t d1, std::size_t d2, std::size_t d3, std::vector<double> p,
                  private_tag)
        : d1_(d1), d2_(d2), d3_(d3), probs_(std::move(p)) {}

    std::size_t d1_, d2_, d3_;
    std::vector<double> probs_;
};

}  // namespace relent
