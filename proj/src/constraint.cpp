#include "lrf/constraint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace lrf {

namespace {

constexpr double kFeasibleTol = 1e-9;

/// Second-moment summary of (observed component x, fixed combination A,
/// solved-for component B) over an evaluation set. Population (1/N)
/// normalization throughout; correlations are normalization-invariant.
struct PairStats {
    double cov_xA = 0.0, cov_xB = 0.0;
    double var_A = 0.0, var_B = 0.0, cov_AB = 0.0;
    double sd_x = 0.0;
    double raw_B2 = 0.0;  // E[B^2], the per-record objective term
    bool x_degenerate = true;

    double var_y(double w) const { return var_A + 2.0 * w * cov_AB + w * w * var_B; }

    /// NaN when undefined at this w.
    double corr(double w) const {
        const double vy = var_y(w);
        if (x_degenerate || !(vy > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        const double sy = std::sqrt(vy);
        if (sy <= 1e-12 * (1.0 + std::abs(cov_xA + w * cov_xB)))
            return std::numeric_limits<double>::quiet_NaN();
        return (cov_xA + w * cov_xB) / (sd_x * sy);
    }

    double corr_derivative(double w) const {
        const double vy = var_y(w);
        const double sy = std::sqrt(vy);
        const double n = cov_xA + w * cov_xB;
        return cov_xB / (sd_x * sy) - n * (cov_AB + w * var_B) / (sd_x * vy * sy);
    }
};

PairStats make_stats(const std::vector<EvalRecord>& records, const Vector& fixed_w, int objective) {
    const std::size_t n = records.size();
    double mean_x = 0.0, mean_A = 0.0, mean_B = 0.0;
    for (const EvalRecord& r : records) {
        mean_x += r.observed[objective - 1];
        mean_A += r.predicted_lift.dot(fixed_w);
        mean_B += r.predicted_lift[objective - 1];
    }
    mean_x /= static_cast<double>(n);
    mean_A /= static_cast<double>(n);
    mean_B /= static_cast<double>(n);

    PairStats s;
    double var_x = 0.0;
    for (const EvalRecord& r : records) {
        const double dx = r.observed[objective - 1] - mean_x;
        const double dA = r.predicted_lift.dot(fixed_w) - mean_A;
        const double dB = r.predicted_lift[objective - 1] - mean_B;
        var_x += dx * dx;
        s.var_A += dA * dA;
        s.var_B += dB * dB;
        s.cov_xA += dx * dA;
        s.cov_xB += dx * dB;
        s.cov_AB += dA * dB;
        s.raw_B2 += r.predicted_lift[objective - 1] * r.predicted_lift[objective - 1];
    }
    const double inv = 1.0 / static_cast<double>(n);
    var_x *= inv;
    s.var_A *= inv;
    s.var_B *= inv;
    s.cov_xA *= inv;
    s.cov_xB *= inv;
    s.cov_AB *= inv;
    s.raw_B2 *= inv;
    s.sd_x = std::sqrt(var_x);
    s.x_degenerate = s.sd_x <= 1e-12 * (1.0 + std::abs(mean_x));
    return s;
}

/// Real roots of a*w^2 + b*w + c = 0. Near-degenerate leading coefficients
/// fall back to the linear solution; small negative discriminants within
/// tolerance count as a double root.
std::vector<double> quadratic_roots(double a, double b, double c) {
    std::vector<double> roots;
    if (std::abs(a) < 1e-12) {
        if (b != 0.0) roots.push_back(-c / b);
        return roots;
    }
    double disc = b * b - 4.0 * a * c;
    const double scale = std::max({1.0, b * b, std::abs(4.0 * a * c)});
    if (disc < 0.0 && disc > -1e-12 * scale) disc = 0.0;
    if (disc < 0.0) return roots;
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
    roots.push_back(q / a);
    if (q != 0.0) roots.push_back(c / q);
    if (roots.size() == 2 && roots[0] == roots[1]) roots.pop_back();
    return roots;
}

/// A couple of Newton steps on corr(w) - alpha to take quadratic roots from
/// closed-form rounding error to full precision.
double polish_root(const PairStats& s, double alpha, double w) {
    for (int iter = 0; iter < 3; ++iter) {
        const double g = s.corr(w) - alpha;
        if (!std::isfinite(g) || std::abs(g) < 1e-15) break;
        const double dg = s.corr_derivative(w);
        if (!std::isfinite(dg) || std::abs(dg) < 1e-30) break;
        const double next = w - g / dg;
        if (!std::isfinite(next)) break;
        const double gn = s.corr(next) - alpha;
        if (!std::isfinite(gn) || std::abs(gn) >= std::abs(g)) break;
        w = next;
    }
    return w;
}

struct SingleSolve {
    double w = 0.0;
    bool feasible = false;
};

/// Closed-form single-constraint solve: the optimum is either 0 or makes
/// the constraint tight; tightness squares to a quadratic whose real roots
/// are re-checked against the un-squared condition (squaring invents roots
/// of the wrong sign).
SingleSolve solve_single(const PairStats& s, double alpha) {
    std::vector<double> candidates;
    const double at_zero = s.corr(0.0);
    if (std::isfinite(at_zero) && at_zero >= alpha - kFeasibleTol) candidates.push_back(0.0);

    const double t2 = alpha * alpha * s.sd_x * s.sd_x;
    const double a = s.cov_xB * s.cov_xB - t2 * s.var_B;
    const double b = 2.0 * (s.cov_xA * s.cov_xB - t2 * s.cov_AB);
    const double c = s.cov_xA * s.cov_xA - t2 * s.var_A;
    for (double root : quadratic_roots(a, b, c)) {
        root = polish_root(s, alpha, root);
        const double achieved = s.corr(root);
        if (std::isfinite(achieved) && achieved >= alpha - kFeasibleTol) candidates.push_back(root);
    }

    SingleSolve out;
    if (candidates.empty()) return out;
    out.feasible = true;
    out.w = candidates.front();
    auto objective = [&](double w) { return w * w * s.raw_B2; };
    for (const double w : candidates) {
        const double lhs = objective(w), rhs = objective(out.w);
        if (lhs < rhs || (lhs == rhs && std::abs(w) < std::abs(out.w)) ||
            (lhs == rhs && std::abs(w) == std::abs(out.w) && w < out.w))
            out.w = w;
    }
    return out;
}

SingleSolve solve_single_grid(const PairStats& s, double alpha, double bound, double step) {
    SingleSolve out;
    double best_obj = std::numeric_limits<double>::infinity();
    const long long half = static_cast<long long>(std::llround(bound / step));
    for (long long k = -half; k <= half; ++k) {
        const double w = static_cast<double>(k) * step;
        const double achieved = s.corr(w);
        if (!std::isfinite(achieved) || achieved < alpha - 1e-12) continue;
        const double obj = w * w * s.raw_B2;
        if (!out.feasible || obj < best_obj ||
            (obj == best_obj && std::abs(w) < std::abs(out.w))) {
            out.feasible = true;
            out.w = w;
            best_obj = obj;
        }
    }
    return out;
}

SolveReport solve_impl(const std::vector<EvalRecord>& records, const ConstraintTargets& targets,
                       const WeightVector& prev_w, bool use_grid, double bound, double step) {
    validate(targets);
    const int m = targets.m();
    if (prev_w.m() != m)
        throw ValidationError("previous weight vector has dimension " + std::to_string(prev_w.m()) +
                              ", targets imply " + std::to_string(m));
    if (records.size() < 2) throw ValidationError("weight solving needs at least 2 records");
    for (const EvalRecord& r : records)
        if (r.predicted_lift.size() != m || r.observed.size() != m)
            throw ValidationError("evaluation record dimension does not match targets");

    SolveReport report{WeightVector::primary_only(m), {}, {}};
    Vector w = Vector::Zero(m);
    w[0] = 1.0;
    report.feasible.assign(static_cast<std::size_t>(m - 1), false);

    for (int i = 2; i <= m; ++i) {
        // Weights solved so far act as the fixed "primary" combination;
        // objective i's own coordinate enters as the free variable.
        Vector fixed = w;
        fixed[i - 1] = 0.0;
        const PairStats stats = make_stats(records, fixed, i);
        SingleSolve solved;
        if (stats.x_degenerate) {
            solved.feasible = false;
        } else {
            solved = use_grid ? solve_single_grid(stats, targets.alpha[static_cast<std::size_t>(i - 2)],
                                                  bound, step)
                              : solve_single(stats, targets.alpha[static_cast<std::size_t>(i - 2)]);
        }
        if (solved.feasible) {
            w[i - 1] = solved.w;
            report.feasible[static_cast<std::size_t>(i - 2)] = true;
        } else {
            w[i - 1] = prev_w.vec()[i - 1];
        }
    }

    report.w = WeightVector(w);
    report.achieved.assign(static_cast<std::size_t>(m), std::numeric_limits<double>::quiet_NaN());
    for (int i = 1; i <= m; ++i) {
        try {
            report.achieved[static_cast<std::size_t>(i - 1)] = offline_corr(records, report.w, i);
        } catch (const UndefinedCorrelation&) {
        }
    }
    return report;
}

}  // namespace

void validate(const ConstraintTargets& targets) {
    for (const double a : targets.alpha)
        if (!(a > -1.0 && a < 1.0))
            throw ValidationError("correlation targets must lie strictly inside (-1, 1)");
}

bool SolveReport::all_feasible() const {
    return std::all_of(feasible.begin(), feasible.end(), [](bool f) { return f; });
}

std::vector<EvalRecord> build_eval_set(const std::vector<const Trajectory*>& buffer,
                                       const ModelParams& params) {
    std::vector<EvalRecord> records;
    for (const Trajectory* traj : buffer) {
        for (const Step& step : traj->steps) {
            if (!step.promoted_candidate) continue;
            const int cand = *step.promoted_candidate - 1;
            EvalRecord rec;
            rec.user_features = step.state.user_features;
            rec.item_features = step.state.candidates[static_cast<std::size_t>(cand)].item_features;
            rec.predicted_lift =
                predict_beliefs(params, step.state).items[static_cast<std::size_t>(cand)].r_lift;
            // The promoted candidate sits at display position 1.
            rec.observed = step.click_pos == 1
                               ? step.reward
                               : RewardVector(RewardVector::Zero(step.reward.size()));
            records.push_back(std::move(rec));
        }
    }
    if (records.empty())
        throw RefusalError("no exploration-promoted impressions in the buffer; cannot evaluate offline");
    return records;
}

double offline_corr(const std::vector<EvalRecord>& records, const WeightVector& w, int objective) {
    if (records.size() < 2) throw ValidationError("offline correlation needs at least 2 records");
    if (objective < 1 || objective > w.m())
        throw ContractViolation("objective index out of range");
    double mean_x = 0.0, mean_y = 0.0;
    for (const EvalRecord& r : records) {
        mean_x += r.observed[objective - 1];
        mean_y += r.predicted_lift.dot(w.vec());
    }
    mean_x /= static_cast<double>(records.size());
    mean_y /= static_cast<double>(records.size());
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (const EvalRecord& r : records) {
        const double dx = r.observed[objective - 1] - mean_x;
        const double dy = r.predicted_lift.dot(w.vec()) - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    const double sx = std::sqrt(sxx / static_cast<double>(records.size()));
    const double sy = std::sqrt(syy / static_cast<double>(records.size()));
    if (sx <= 1e-12 * (1.0 + std::abs(mean_x)) || sy <= 1e-12 * (1.0 + std::abs(mean_y)))
        throw UndefinedCorrelation("zero variance on one side of the offline correlation");
    return sxy / (static_cast<double>(records.size()) * sx * sy);
}

SolveReport solve_weights(const std::vector<EvalRecord>& records, const ConstraintTargets& targets,
                          const WeightVector& prev_w) {
    return solve_impl(records, targets, prev_w, false, 0.0, 0.0);
}

SolveReport solve_weights_grid(const std::vector<EvalRecord>& records,
                               const ConstraintTargets& targets, const WeightVector& prev_w,
                               double bound, double step) {
    return solve_impl(records, targets, prev_w, true, bound, step);
}

}  // namespace lrf
