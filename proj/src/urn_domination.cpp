#include "treetail/urn_domination.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "treetail/recursion_core.hpp"

namespace treetail {

namespace {

using boost::multiprecision::cpp_int;

void require_sorted(const std::vector<int32_t>& x) {
  for (size_t i = 1; i < x.size(); ++i) {
    if (x[i - 1] < x[i]) throw std::invalid_argument("state must be sorted descending");
  }
  if (!x.empty() && x.back() < 0) throw std::invalid_argument("state must be nonnegative");
}

bool leq(const std::vector<int32_t>& a, const std::vector<int32_t>& b) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
  }
  return true;
}

struct VecHash {
  size_t operator()(const std::vector<int32_t>& v) const {
    size_t h = v.size();
    for (int32_t x : v) h = h * 1000003u + static_cast<uint32_t>(x);
    return h;
  }
};

double big_ratio(const cpp_int& num, const cpp_int& den) {
  if (num == 0) return 0.0;
  if (num == den) return 1.0;
  const cpp_int q = (num << 64) / den;
  return std::ldexp(static_cast<double>(q.convert_to<uint64_t>()), -64);
}

}  // namespace

int64_t UrnState::draws() const {
  return std::accumulate(counts.begin(), counts.end(), int64_t{0});
}

UrnState make_urn(int b) {
  if (b < 2) throw std::invalid_argument("make_urn: b must be >= 2");
  return UrnState{std::vector<int32_t>(b, 0)};
}

UrnState urn_step(const UrnState& state, int b, Philox4x32& rng) {
  if (static_cast<int>(state.counts.size()) != b) {
    throw std::invalid_argument("urn_step: state arity mismatch");
  }
  const int64_t n = state.draws();
  const int64_t total = b + n * (b - 1);
  int64_t r = static_cast<int64_t>(rng.next_below(static_cast<uint64_t>(total)));
  UrnState next = state;
  for (int j = 0; j < b; ++j) {
    r -= 1 + static_cast<int64_t>(state.counts[j]) * (b - 1);
    if (r < 0) {
      ++next.counts[j];
      return next;
    }
  }
  throw std::logic_error("urn_step: weights did not cover the draw");
}

int alpha_multiplicity(const std::vector<int32_t>& sorted_x, int j) {
  if (j > 0 && sorted_x[j - 1] == sorted_x[j]) return 0;
  int count = 0;
  for (int32_t v : sorted_x) count += v == sorted_x[j];
  return count;
}

std::vector<KernelEntry> kernel_pu(const std::vector<int32_t>& x, int b) {
  require_sorted(x);
  if (static_cast<int>(x.size()) != b) throw std::invalid_argument("kernel_pu: arity mismatch");
  const int64_t n = std::accumulate(x.begin(), x.end(), int64_t{0});
  const long long den = b + n * (b - 1);
  std::vector<KernelEntry> entries;
  for (int j = 0; j < b; ++j) {
    const int alpha = alpha_multiplicity(x, j);
    if (alpha == 0) continue;
    KernelEntry e;
    e.next = x;
    ++e.next[j];
    e.prob = Rat(alpha * (1 + static_cast<long long>(x[j]) * (b - 1)), den);
    e.lead = j;
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<KernelEntry> kernel_pu_plus(const std::vector<int32_t>& x, int64_t n, int b) {
  require_sorted(x);
  if (static_cast<int>(x.size()) != b) {
    throw std::invalid_argument("kernel_pu_plus: arity mismatch");
  }
  const int64_t sum = std::accumulate(x.begin(), x.end(), int64_t{0});
  if (sum > n) throw std::invalid_argument("kernel_pu_plus: state sum exceeds time");
  const long long den = b + 1 + n * static_cast<long long>(b);
  std::vector<KernelEntry> entries;
  for (int j = 0; j < b; ++j) {
    const int alpha = alpha_multiplicity(x, j);
    if (alpha == 0) continue;
    KernelEntry e;
    e.next = x;
    ++e.next[j];
    e.prob = Rat(alpha * (1 + static_cast<long long>(x[j]) * b), den);
    e.lead = j;
    entries.push_back(std::move(e));
  }
  KernelEntry stay;
  stay.next = x;
  stay.prob = Rat(1 + (n - sum) * static_cast<long long>(b), den);
  stay.lead = -1;
  entries.push_back(std::move(stay));
  return entries;
}

KernelPair kernels(const std::vector<int32_t>& x, int64_t n, int b) {
  const int64_t sum = std::accumulate(x.begin(), x.end(), int64_t{0});
  if (sum != n) throw std::invalid_argument("kernels: PU(b) kernel needs sum x = n");
  return KernelPair{kernel_pu(x, b), kernel_pu_plus(x, n, b)};
}

bool kernel_dominated(const std::vector<KernelEntry>& lower,
                      const std::vector<KernelEntry>& upper) {
  std::vector<std::vector<int32_t>> points;
  for (const auto& e : lower) points.push_back(e.next);
  for (const auto& e : upper) points.push_back(e.next);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  const size_t m = points.size();
  if (m > 20) throw std::invalid_argument("kernel_dominated: support too large");

  auto mass = [&](const std::vector<KernelEntry>& entries, uint32_t mask) {
    Rat total(0);
    for (const auto& e : entries) {
      const size_t idx = std::lower_bound(points.begin(), points.end(), e.next) - points.begin();
      if (mask & (1u << idx)) total += e.prob;
    }
    return total;
  };

  for (uint32_t mask = 0; mask < (1u << m); ++mask) {
    bool upward_closed = true;
    for (size_t i = 0; i < m && upward_closed; ++i) {
      if (!(mask & (1u << i))) continue;
      for (size_t j = 0; j < m; ++j) {
        if (!(mask & (1u << j)) && leq(points[i], points[j])) {
          upward_closed = false;
          break;
        }
      }
    }
    if (!upward_closed) continue;
    if (mass(lower, mask) > mass(upper, mask)) return false;
  }
  return true;
}

CoupledRun coupled_run(int64_t n, int b, Philox4x32& rng) {
  if (n < 1) throw std::invalid_argument("coupled_run: n must be >= 1");
  if (b < 2) throw std::invalid_argument("coupled_run: b must be >= 2");

  CoupledRun run;
  std::vector<int32_t> upper(b, 0), lower(b, 0);
  run.upper.push_back(upper);
  run.lower.push_back(lower);

  struct PlanEntry {
    long long mass;
    const KernelEntry* up;
    const KernelEntry* low;
  };

  for (int64_t m = 0; m < n; ++m) {
    const auto ku = kernel_pu(upper, b);
    const auto kl = kernel_pu_plus(lower, m, b);
    const long long den_u = b + m * static_cast<long long>(b - 1);
    const long long den_l = b + 1 + m * static_cast<long long>(b);
    const long long scale = den_u * den_l;
    // the kernel rationals are reduced; their denominators divide scale
    const auto mass_of = [scale](const Rat& prob) {
      return prob.numerator() * (scale / prob.denominator());
    };

    // Remaining upper mass per entry, in units of 1/scale.
    std::vector<long long> up_left(ku.size());
    for (size_t i = 0; i < ku.size(); ++i) up_left[i] = mass_of(ku[i].prob);

    std::vector<PlanEntry> plan;
    std::vector<std::pair<long long, const KernelEntry*>> loose;
    for (const auto& e : kl) {
      const long long mass = mass_of(e.prob);
      if (e.lead >= 0 && lower[e.lead] == upper[e.lead]) {
        // Tie block: ride the matching upper move (its mass dominates).
        const auto it = std::find_if(ku.begin(), ku.end(),
                                     [&](const KernelEntry& u) { return u.lead == e.lead; });
        if (it == ku.end()) throw std::logic_error("coupled_run: missing tie-block move");
        const size_t idx = it - ku.begin();
        if (up_left[idx] < mass) throw std::logic_error("coupled_run: tie-block mass deficit");
        up_left[idx] -= mass;
        plan.push_back({mass, &*it, &e});
      } else {
        loose.emplace_back(mass, &e);
      }
    }
    // Merge the leftovers in canonical order; any pairing is order-safe here.
    size_t ui = 0, li = 0;
    long long need = li < loose.size() ? loose[li].first : 0;
    while (li < loose.size()) {
      while (ui < ku.size() && up_left[ui] == 0) ++ui;
      if (ui == ku.size()) throw std::logic_error("coupled_run: transport plan out of mass");
      const long long take = std::min(need, up_left[ui]);
      plan.push_back({take, &ku[ui], loose[li].second});
      up_left[ui] -= take;
      need -= take;
      if (need == 0) {
        ++li;
        need = li < loose.size() ? loose[li].first : 0;
      }
    }

    long long total = 0;
    for (const auto& p : plan) total += p.mass;
    if (total != scale) throw std::logic_error("coupled_run: transport plan mass mismatch");

    const double u = rng.next_double();
    long long threshold = static_cast<long long>(u * static_cast<double>(scale));
    if (threshold >= scale) threshold = scale - 1;
    const PlanEntry* chosen = &plan.back();
    long long cum = 0;
    for (const auto& p : plan) {
      cum += p.mass;
      if (threshold < cum) {
        chosen = &p;
        break;
      }
    }

    upper = chosen->up->next;
    lower = chosen->low->next;
    if (!leq(lower, upper)) run.ordered = false;
    run.upper.push_back(upper);
    run.lower.push_back(lower);
  }
  return run;
}

SortedLaw sorted_count_law(int64_t draws, int b) {
  if (b < 2) throw std::invalid_argument("sorted_count_law: b must be >= 2");
  if (draws < 0) throw std::invalid_argument("sorted_count_law: draws must be >= 0");

  using Level = std::unordered_map<std::vector<int32_t>, cpp_int, VecHash>;
  Level level;
  level[std::vector<int32_t>(b, 0)] = 1;
  cpp_int denominator = 1;
  for (int64_t m = 0; m < draws; ++m) {
    denominator *= b + m * (b - 1);
    Level next;
    next.reserve(level.size() * 2);
    for (const auto& [state, count] : level) {
      for (int j = 0; j < b; ++j) {
        const int alpha = alpha_multiplicity(state, j);
        if (alpha == 0) continue;
        auto target = state;
        ++target[j];
        next[std::move(target)] +=
            count * (alpha * (1 + static_cast<long long>(state[j]) * (b - 1)));
      }
    }
    level = std::move(next);
  }

  cpp_int total = 0;
  for (const auto& [state, count] : level) total += count;
  if (total != denominator) throw std::logic_error("sorted_count_law: counts do not sum to one");

  SortedLaw law;
  law.b = b;
  law.draws = draws;
  law.states.reserve(level.size());
  for (const auto& [state, count] : level) {
    law.states.emplace_back(state, big_ratio(count, denominator));
  }
  std::sort(law.states.begin(), law.states.end());
  return law;
}

double dominating_cdf(double v) {
  if (v < 0.75) return 0.0;
  if (v >= 1.0) return 1.0;
  return std::sqrt(4.0 * v - 3.0);
}

namespace {

DominationReport check_level(const std::vector<std::pair<double, double>>& s_law, int b,
                             int64_t n, int grid_points) {
  DominationReport report;
  report.b = b;
  report.n = n;
  report.ok = true;
  report.min_margin = 1.0;
  report.state_count = static_cast<int64_t>(s_law.size());

  size_t idx = 0;
  double cdf = 0;
  for (int g = 0; g <= grid_points; ++g) {
    const double v = static_cast<double>(g) / grid_points;
    while (idx < s_law.size() && s_law[idx].first <= v) cdf += s_law[idx++].second;
    const double margin = cdf - dominating_cdf(v);
    // Below 3/4 the dominating cdf is 0, and at v = 1 both cdfs are 1, so the
    // margin is trivially >= 0 there; track the minimum over the binding region.
    if (v >= 0.75 && v < 1.0 && margin < report.min_margin) report.min_margin = margin;
    if (margin < -1e-12 && report.ok) {
      report.ok = false;
      report.first_violation_v = v;
    }
  }
  return report;
}

}  // namespace

std::vector<DominationReport> check_domination_range(int64_t n_max, int b, int grid_points) {
  if (b < 2 || b > 4 || n_max > 200) {
    throw std::invalid_argument("check_domination: exact-law budget is b <= 4, n <= 200");
  }
  using Level = std::unordered_map<std::vector<int32_t>, cpp_int, VecHash>;
  Level level;
  level[std::vector<int32_t>(b, 0)] = 1;
  cpp_int denominator = 1;

  std::vector<DominationReport> reports;
  for (int64_t n = 1; n <= n_max; ++n) {
    // level currently holds the law after n-1 draws = root splits at size n
    std::vector<std::pair<double, double>> s_law;
    s_law.reserve(level.size());
    for (const auto& [state, count] : level) {
      double s = 0;
      for (int32_t c : state) s += opnorm_sq_formula(static_cast<double>(c) / n);
      s_law.emplace_back(s, big_ratio(count, denominator));
    }
    std::sort(s_law.begin(), s_law.end());
    reports.push_back(check_level(s_law, b, n, grid_points));

    if (n == n_max) break;
    const int64_t m = n - 1;
    denominator *= b + m * (b - 1);
    Level next;
    next.reserve(level.size() * 2);
    for (const auto& [state, count] : level) {
      for (int j = 0; j < b; ++j) {
        const int alpha = alpha_multiplicity(state, j);
        if (alpha == 0) continue;
        auto target = state;
        ++target[j];
        next[std::move(target)] +=
            count * (alpha * (1 + static_cast<long long>(state[j]) * (b - 1)));
      }
    }
    level = std::move(next);
  }
  return reports;
}

DominationReport check_domination(int64_t n, int b, int grid_points) {
  return check_domination_range(n, b, grid_points).back();
}

bool sum_inequality_check(const std::vector<double>& x, const std::vector<double>& y) {
  if (y.size() != x.size() + 1) {
    throw std::invalid_argument("sum_inequality_check: need |y| = |x| + 1");
  }
  const auto check_shape = [](const std::vector<double>& v) {
    double sum = 0;
    for (size_t i = 0; i < v.size(); ++i) {
      if (!(v[i] >= 0)) throw std::invalid_argument("sum_inequality_check: negative entry");
      if (i > 0 && v[i] > v[i - 1] + 1e-12) {
        throw std::invalid_argument("sum_inequality_check: not sorted descending");
      }
      sum += v[i];
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("sum_inequality_check: entries must sum to 1");
    }
  };
  check_shape(x);
  check_shape(y);
  for (size_t i = 0; i < x.size(); ++i) {
    if (y[i] > x[i] + 1e-12) {
      throw std::invalid_argument("sum_inequality_check: need (y_1..y_b) <= x");
    }
  }
  double fx = 0, fy = 0;
  for (double v : x) fx += opnorm_sq_formula(v);
  for (double v : y) fy += opnorm_sq_formula(v);
  return fy <= fx + 1e-12;
}

}  // namespace treetail
