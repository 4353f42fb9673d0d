#include "ssqp/best_iterate.hpp"

#include <algorithm>
#include <cmath>

#include "ssqp/diagnostics.hpp"
#include "ssqp/errors.hpp"

namespace ssqp {

namespace {

double finite_or_inf(double v) { return std::isfinite(v) ? v : kInf; }

}  // namespace

BestIterate best_iterate(const std::vector<IterateStats>& iterates, double c0_inf) {
  if (iterates.empty()) throw UsageError("best_iterate: empty history");
  const double threshold = kFeasibleFraction * std::max(1.0, c0_inf);
  std::optional<std::size_t> pick;
  for (std::size_t k = iterates.size(); k-- > 0;) {
    if (iterates[k].feas_inf <= threshold) {
      pick = k;
      break;
    }
  }
  BestIterate out;
  out.sufficiently_feasible = pick.has_value();
  if (!pick) {
    std::size_t least = 0;
    for (std::size_t k = 1; k < iterates.size(); ++k) {
      if (finite_or_inf(iterates[k].feas_inf) < finite_or_inf(iterates[least].feas_inf)) least = k;
    }
    pick = least;
  }
  out.index = *pick;
  out.feas_err = iterates[*pick].feas_inf;
  out.stat_err = iterates[*pick].stat_inf;
  return out;
}

bool better(const BestIterate& a, const BestIterate& b) {
  if (a.sufficiently_feasible != b.sufficiently_feasible) return a.sufficiently_feasible;
  const double af = finite_or_inf(a.feas_err), bf = finite_or_inf(b.feas_err);
  const double as = finite_or_inf(a.stat_err), bs = finite_or_inf(b.stat_err);
  if (a.sufficiently_feasible) return as != bs ? as < bs : af < bf;
  return af != bf ? af < bf : as < bs;
}

void BestIterateTracker::observe(const ProblemInstance& problem, const Vec& x) {
  const Vec c = problem.constraints(x);
  const double feas = x.allFinite() ? (c.size() ? c.lpNorm<Eigen::Infinity>() : 0.0) : kInf;
  if (count_ == 0) {
    c0_inf_ = feas;
    threshold_ = kFeasibleFraction * std::max(1.0, feas);
  }
  if (feas <= threshold_) {
    last_feasible_ = count_;
    last_feasible_x_ = x;
    last_feasible_err_ = feas;
  }
  if (count_ == 0 || finite_or_inf(feas) < least_err_) {
    least_index_ = count_;
    least_x_ = x;
    least_err_ = finite_or_inf(feas);
  }
  ++count_;
}

BestIterate BestIterateTracker::finish(const ProblemInstance& problem) const {
  if (count_ == 0) throw UsageError("best iterate: no iterates observed");
  BestIterate out;
  out.sufficiently_feasible = last_feasible_.has_value();
  const Vec& x = out.sufficiently_feasible ? last_feasible_x_ : least_x_;
  out.index = out.sufficiently_feasible ? *last_feasible_ : least_index_;
  out.feas_err = out.sufficiently_feasible ? last_feasible_err_ : least_err_;
  out.stat_err = x.allFinite() ? stationarity_residuals(problem, x).kkt_res : kInf;
  return out;
}

}  // namespace ssqp
