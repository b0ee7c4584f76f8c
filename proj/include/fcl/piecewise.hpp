#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fcl/error.hpp"

namespace fcl {

/// Piecewise polynomial on (0, L]. Piece i covers [b_i, b_{i+1}) and holds
/// coefficients a_0 + a_1 r + a_2 r² + …
class PiecewiseCurve {
public:
    PiecewiseCurve(std::vector<double> breakpoints, std::vector<std::vector<double>> coefficients)
        : b_(std::move(breakpoints)), a_(std::move(coefficients)) {
        require(b_.size() >= 2 && a_.size() + 1 == b_.size(), ErrorKind::config,
                "need one coefficient list per piece");
        require(b_.front() == 0.0, ErrorKind::config, "first breakpoint must be 0");
        for (std::size_t i = 1; i < b_.size(); ++i)
            require(b_[i] > b_[i - 1], ErrorKind::config, "breakpoints must increase");
    }

    double L() const { return b_.back(); }
    const std::vector<double>& breakpoints() const { return b_; }
    const std::vector<std::vector<double>>& coefficients() const { return a_; }
    std::size_t pieces() const { return a_.size(); }

    std::size_t piece_of(double r) const {
        require(r > 0.0 && r <= L(), ErrorKind::domain, "r outside (0, L]");
        const auto it = std::upper_bound(b_.begin(), b_.end(), r);
        return std::min(static_cast<std::size_t>(it - b_.begin()) - 1, a_.size() - 1);
    }

    double operator()(double r) const { return eval_piece(piece_of(r), r); }

    double eval_piece(std::size_t i, double r) const {
        double v = 0.0;
        for (std::size_t m = a_[i].size(); m-- > 0;) v = v * r + a_[i][m];
        return v;
    }

    /// sup |R| over (0, L], sampled densely inside each piece.
    double sup_abs() const {
        double s = 0.0;
        for (std::size_t i = 0; i < a_.size(); ++i)
            for (int q = 0; q <= 64; ++q) {
                const double r = b_[i] + (b_[i + 1] - b_[i]) * q / 64.0;
                s = std::max(s, std::abs(eval_piece(i, r)));
            }
        return s;
    }

private:
    std::vector<double> b_;
    std::vector<std::vector<double>> a_;
};

}  // namespace fcl
