#include "lrf/weights.hpp"

namespace lrf {

WeightVector::WeightVector(Vector w) : w_(std::move(w)) {
    if (w_.size() < 1) throw ValidationError("weight vector must have at least one objective");
    if (w_[0] != 1.0) throw ValidationError("weight vector: first coordinate must be exactly 1");
    if (!w_.allFinite()) throw ValidationError("weight vector: non-finite entry");
}

WeightVector WeightVector::primary_only(int m) {
    Vector w = Vector::Zero(m);
    w[0] = 1.0;
    return WeightVector(std::move(w));
}

WeightVector WeightVector::with(int i, double value) const {
    if (i < 2 || i > m()) throw ContractViolation("weight index must lie in 2..m");
    Vector w = w_;
    w[i - 1] = value;
    return WeightVector(std::move(w));
}

}  // namespace lrf
