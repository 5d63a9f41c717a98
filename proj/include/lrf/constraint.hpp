#pragma once

#include "lrf/domain.hpp"
#include "lrf/model.hpp"
#include "lrf/types.hpp"
#include "lrf/weights.hpp"

#include <vector>

namespace lrf {

/// One offline-evaluation element: an exploration-promoted impression with
/// the model's current lift prediction and the observed outcome. r_v is the
/// step's full reward vector if the promoted item was clicked and the zero
/// vector otherwise.
struct EvalRecord {
    Vector user_features;
    Vector item_features;
    RewardVector predicted_lift;
    RewardVector observed;
};

/// Lower bounds on the offline correlation of each secondary objective,
/// alpha_2..alpha_m, each strictly inside (-1, 1).
struct ConstraintTargets {
    std::vector<double> alpha;

    int m() const { return static_cast<int>(alpha.size()) + 1; }
};

void validate(const ConstraintTargets& targets);

/// Builds the offline evaluation set from exploration-promoted impressions,
/// re-predicting lift with the given parameters. Non-exploration impressions
/// are excluded. Throws RefusalError when there is no exploration data.
std::vector<EvalRecord> build_eval_set(const std::vector<const Trajectory*>& buffer,
                                       const ModelParams& params);

/// Pearson correlation between observed reward component i (1-based) and the
/// weight-combined predicted lift. Throws UndefinedCorrelation when either
/// side has (numerically) zero variance.
double offline_corr(const std::vector<EvalRecord>& records, const WeightVector& w, int objective);

struct SolveReport {
    WeightVector w;
    /// Per secondary objective (index 0 = objective 2): constraint satisfied
    /// by the returned weights.
    std::vector<bool> feasible;
    /// Achieved correlation per objective 1..m at the returned weights (NaN
    /// where undefined).
    std::vector<double> achieved;

    bool all_feasible() const;
};

/// Solves for scalarization weights: minimize the expected squared secondary
/// contribution subject to Corr(observed_i, combined lift) >= alpha_i for
/// each secondary objective. The single-constraint case is solved in closed
/// form (the tight-constraint condition squares to a quadratic; real roots
/// are filtered against the un-squared equation); with more than one
/// constraint the closed form is applied sequentially in objective order,
/// folding solved weights into the primary term. An infeasible or undefined
/// constraint keeps prev_w for that coordinate and is flagged.
SolveReport solve_weights(const std::vector<EvalRecord>& records, const ConstraintTargets& targets,
                          const WeightVector& prev_w);

/// Same contract solved by grid search over each w_i (used as a fallback and
/// as the test oracle). Grid covers [-bound, bound] at the given step.
SolveReport solve_weights_grid(const std::vector<EvalRecord>& records,
                               const ConstraintTargets& targets, const WeightVector& prev_w,
                               double bound = 100.0, double step = 1e-4);

}  // namespace lrf
