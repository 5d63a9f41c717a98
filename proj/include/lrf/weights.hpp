#pragma once

#include "lrf/types.hpp"

namespace lrf {

/// Scalarization weights over the m objectives. The first coordinate is the
/// primary objective and stays pinned to exactly 1; only w_2..w_m move.
class WeightVector {
public:
    explicit WeightVector(Vector w);

    /// (1, 0, ..., 0)
    static WeightVector primary_only(int m);

    int m() const { return static_cast<int>(w_.size()); }
    const Vector& vec() const { return w_; }

    /// 1-based objective index, i in 1..m.
    double at(int i) const { return w_[i - 1]; }

    /// Copy with w_i replaced (i in 2..m).
    WeightVector with(int i, double value) const;

    bool operator==(const WeightVector& other) const { return w_ == other.w_; }

private:
    Vector w_;
};

}  // namespace lrf
