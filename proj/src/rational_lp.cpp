#include "polyround/rational_lp.hpp"

#include <mpfr.h>

#include <cmath>
#include <stdexcept>

#include "polyround/util.hpp"

namespace polyround::polygen {

mpq_class rational_of_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("rational_of_double: finite only");
  mpq_class q;
  mpq_set_d(q.get_mpq_t(), x);  // exact
  return q;
}

double double_of_rational_rne(const mpq_class& q) {
  // mpq_get_d truncates; go through a 53-bit MPFR value for correct RNE.
  mpfr_t t;
  mpfr_init2(t, 53);
  mpfr_set_q(t, q.get_mpq_t(), MPFR_RNDN);
  const double d = mpfr_get_d(t, MPFR_RNDN);
  mpfr_clear(t);
  return d;
}

namespace {

// Dual program solved by the simplex below:
//   min  sum_j b_j y_j + w   s.t.  A^T y = 0,  1^T y + w = 1,  y, w >= 0
// where column j of [A; 1^T] is (s_j * powers(x_r), 1) for constraint row
// r = j/2 with s_j = +1 (cost hi_r) or -1 (cost -lo_r). K = #terms + 1.
// The optimal objective equals the best margin z*; the equality-row
// multipliers at optimality are (c_0..c_{k-1}, z).
//
// All pivoting decisions are verified in exact rational arithmetic. A
// double-precision shadow of the columns picks pricing candidates cheaply;
// when the shadow finds nothing, a full exact scan either proves optimality
// or picks up a candidate the shadow missed.
class DualSimplex {
 public:
  explicit DualSimplex(const RationalLPProblem& p)
      : k_(static_cast<int>(p.degrees.size())), K_(k_ + 1), m_(2 * p.rows.size()) {
    powers_.resize(p.rows.size());
    powers_d_.resize(p.rows.size());
    cost_.resize(m_ + 1);
    cost_d_.resize(m_ + 1);
    for (std::size_t r = 0; r < p.rows.size(); ++r) {
      powers_[r].resize(k_);
      powers_d_[r].resize(k_);
      mpq_class acc = 1;
      int prev_deg = 0;
      for (int t = 0; t < k_; ++t) {
        const int deg = p.degrees[t];
        for (int step = prev_deg; step < deg; ++step) acc *= p.rows[r].x;
        prev_deg = deg;
        powers_[r][t] = acc;
        powers_d_[r][t] = acc.get_d();
      }
      cost_[2 * r] = p.rows[r].hi;
      cost_[2 * r + 1] = -p.rows[r].lo;
      cost_d_[2 * r] = cost_[2 * r].get_d();
      cost_d_[2 * r + 1] = cost_[2 * r + 1].get_d();
    }
    cost_[m_] = 1;  // the w column
    cost_d_[m_] = 1.0;

    // Start basis: artificials on the k zero rows, w on the convexity row.
    basis_.resize(K_);
    value_.assign(K_, 0);
    binv_.assign(K_, std::vector<mpq_class>(K_, 0));
    for (int r = 0; r < K_; ++r) binv_[r][r] = 1;
    for (int r = 0; r < k_; ++r) basis_[r] = artificial_index(r);
    basis_[k_] = static_cast<long>(m_);
    value_[k_] = 1;
    basic_.assign(m_ + 1, false);
    basic_[m_] = true;

    rows_ = &p.rows;
  }

  // Returns coefficients of a point satisfying every row (margin z >= 0), or
  // nullopt when the margin optimum is provably negative.
  std::optional<std::vector<mpq_class>> run(LPStats* stats) {
    const long cap = 50 * static_cast<long>(m_ + K_) + 5000;
    long iterations = 0;
    int degenerate_streak = 0;
    bool bland = false;

    std::vector<mpq_class> pi(K_), direction(K_), col(K_);
    std::vector<double> pi_d(K_);
    for (;;) {
      if (++iterations > cap)
        throw ResourceLimitError("solve_lp: simplex iteration cap exceeded");

      compute_multipliers(pi);
      for (int t = 0; t < K_; ++t) pi_d[t] = pi[t].get_d();

      // Early exits. The objective only decreases toward the optimal margin
      // z*, so a negative objective already proves infeasibility; and any
      // multiplier vector whose coefficients satisfy every row is an answer
      // regardless of optimality.
      mpq_class objective = 0;
      for (int r = 0; r < K_; ++r) objective += basis_cost(basis_[r]) * value_[r];
      if (objective < 0) return std::nullopt;
      if (pi[k_] > 0 && iterations % 16 == 1) {
        if (auto point = try_extract(pi)) {
          if (stats) {
            stats->iterations = static_cast<int>(iterations);
            stats->margin = pi[k_];
          }
          return point;
        }
      }

      const long entering = pick_entering(pi, pi_d, bland);
      if (entering < 0) {
        // Optimal: margin z* = pi[k]; multipliers pi[0..k) are coefficients.
        if (pi[k_] < 0) return std::nullopt;
        if (stats) {
          stats->iterations = static_cast<int>(iterations);
          stats->margin = pi[k_];
        }
        return std::vector<mpq_class>(pi.begin(), pi.begin() + k_);
      }

      column_of(entering, col);
      for (int r = 0; r < K_; ++r) {
        direction[r] = 0;
        for (int c = 0; c < K_; ++c) direction[r] += binv_[r][c] * col[c];
      }

      // Ratio test. Artificials are pinned at zero: any movement ejects them
      // with a zero step.
      int leave = -1;
      mpq_class best_t;
      for (int r = 0; r < K_; ++r) {
        const bool artificial = is_artificial(basis_[r]);
        mpq_class t;
        if (artificial) {
          if (direction[r] == 0) continue;
          t = 0;
        } else {
          if (direction[r] <= 0) continue;
          t = value_[r] / direction[r];
        }
        if (leave < 0 || t < best_t || (t == best_t && basis_[r] < basis_[leave])) {
          leave = r;
          best_t = t;
        }
      }
      if (leave < 0)
        throw std::logic_error("solve_lp: dual unbounded (cannot happen: y lives on a simplex)");

      if (best_t == 0) {
        if (++degenerate_streak >= 30) bland = true;  // Bland's rule: no cycling
      } else {
        degenerate_streak = 0;
      }

      for (int r = 0; r < K_; ++r)
        if (r != leave) value_[r] -= best_t * direction[r];
      if (!is_artificial(basis_[leave])) basic_[basis_[leave]] = false;
      basic_[entering] = true;
      value_[leave] = best_t;
      basis_[leave] = entering;

      // binv <- E * binv with the elementary pivot matrix for `direction`.
      const mpq_class pivot = direction[leave];
      for (int c = 0; c < K_; ++c) binv_[leave][c] /= pivot;
      for (int r = 0; r < K_; ++r) {
        if (r == leave || direction[r] == 0) continue;
        const mpq_class factor = direction[r];
        for (int c = 0; c < K_; ++c) binv_[r][c] -= factor * binv_[leave][c];
      }
    }
  }

 private:
  long artificial_index(int r) const { return static_cast<long>(m_) + 1 + r; }
  bool is_artificial(long j) const { return j > static_cast<long>(m_); }

  mpq_class basis_cost(long j) const {
    return is_artificial(j) ? mpq_class(0) : cost_[static_cast<std::size_t>(j)];
  }

  void column_of(long j, std::vector<mpq_class>& out) const {
    if (is_artificial(j)) {
      for (int r = 0; r < K_; ++r) out[r] = 0;
      out[j - static_cast<long>(m_) - 1] = 1;
      return;
    }
    if (j == static_cast<long>(m_)) {  // w
      for (int r = 0; r < k_; ++r) out[r] = 0;
      out[k_] = 1;
      return;
    }
    const std::size_t r = static_cast<std::size_t>(j) / 2;
    const bool upper = (j % 2) == 0;
    for (int t = 0; t < k_; ++t) out[t] = upper ? powers_[r][t] : -powers_[r][t];
    out[k_] = 1;
  }

  void compute_multipliers(std::vector<mpq_class>& pi) const {
    for (int t = 0; t < K_; ++t) {
      pi[t] = 0;
      for (int r = 0; r < K_; ++r) pi[t] += binv_[r][t] * basis_cost(basis_[r]);
    }
  }

  // Exact reduced cost of a non-artificial column.
  mpq_class reduced_cost(const std::vector<mpq_class>& pi, long j) const {
    mpq_class rc = cost_[static_cast<std::size_t>(j)];
    if (j == static_cast<long>(m_)) return rc - pi[k_];
    const std::size_t r = static_cast<std::size_t>(j) / 2;
    const bool upper = (j % 2) == 0;
    for (int t = 0; t < k_; ++t)
      rc -= (upper ? powers_[r][t] : -powers_[r][t]) * pi[t];
    return rc - pi[k_];
  }

  double reduced_cost_shadow(const std::vector<double>& pi_d, std::size_t j) const {
    double rc = cost_d_[j];
    if (j == m_) return rc - pi_d[k_];
    const std::size_t r = j / 2;
    const double sgn = (j % 2) == 0 ? 1.0 : -1.0;
    for (int t = 0; t < k_; ++t) rc -= sgn * powers_d_[r][t] * pi_d[t];
    return rc - pi_d[k_];
  }

  // Entering column with exactly negative reduced cost. The double shadow
  // proposes candidates (most negative first); if none verifies, an exact
  // Bland-order scan settles optimality.
  long pick_entering(const std::vector<mpq_class>& pi, const std::vector<double>& pi_d,
                     bool bland) const {
    const std::size_t total = m_ + 1;
    if (!bland) {
      constexpr int kCandidates = 8;
      std::size_t cand[kCandidates];
      double cand_rc[kCandidates];
      int n = 0;
      for (std::size_t j = 0; j < total; ++j) {
        if (basic_[j]) continue;
        const double rc = reduced_cost_shadow(pi_d, j);
        if (rc >= 0.0) continue;
        if (n < kCandidates) {
          cand[n] = j;
          cand_rc[n] = rc;
          ++n;
        } else {
          int worst = 0;
          for (int i = 1; i < kCandidates; ++i)
            if (cand_rc[i] > cand_rc[worst]) worst = i;
          if (rc < cand_rc[worst]) {
            cand[worst] = j;
            cand_rc[worst] = rc;
          }
        }
      }
      // most negative first
      for (int i = 0; i < n; ++i) {
        int best = i;
        for (int q = i + 1; q < n; ++q)
          if (cand_rc[q] < cand_rc[best]) best = q;
        std::swap(cand[i], cand[best]);
        std::swap(cand_rc[i], cand_rc[best]);
        if (reduced_cost(pi, static_cast<long>(cand[i])) < 0)
          return static_cast<long>(cand[i]);
      }
    }
    // Exact scan (also the Bland anti-cycling path).
    for (std::size_t j = 0; j < total; ++j) {
      if (basic_[j]) continue;
      if (reduced_cost(pi, static_cast<long>(j)) < 0) return static_cast<long>(j);
    }
    return -1;
  }

  // Substitute the current multipliers as coefficients; nullopt unless every
  // row holds in exact arithmetic.
  std::optional<std::vector<mpq_class>> try_extract(const std::vector<mpq_class>& pi) const {
    std::vector<mpq_class> c(pi.begin(), pi.begin() + k_);
    for (const auto& row : *rows_) {
      mpq_class p = 0;
      const auto& pw = powers_[&row - rows_->data()];
      for (int t = 0; t < k_; ++t) p += c[t] * pw[t];
      if (p < row.lo || p > row.hi) return std::nullopt;
    }
    return c;
  }

  int k_;
  int K_;
  std::size_t m_;
  const std::vector<RationalLPProblem::Row>* rows_ = nullptr;
  std::vector<std::vector<mpq_class>> powers_;
  std::vector<std::vector<double>> powers_d_;
  std::vector<mpq_class> cost_;
  std::vector<double> cost_d_;
  std::vector<long> basis_;
  std::vector<mpq_class> value_;
  std::vector<std::vector<mpq_class>> binv_;
  std::vector<bool> basic_;  // non-artificial columns currently in the basis
};

}  // namespace

std::optional<std::vector<mpq_class>> solve_lp(const RationalLPProblem& problem,
                                               LPStats* stats) {
  if (problem.degrees.empty()) throw std::invalid_argument("solve_lp: no terms");
  for (std::size_t t = 1; t < problem.degrees.size(); ++t)
    if (problem.degrees[t] <= problem.degrees[t - 1])
      throw std::invalid_argument("solve_lp: degrees must be strictly ascending");
  if (problem.degrees.front() < 0)
    throw std::invalid_argument("solve_lp: negative degree");
  if (problem.rows.empty()) return std::vector<mpq_class>(problem.degrees.size(), 0);
  for (const auto& row : problem.rows)
    if (row.lo > row.hi) return std::nullopt;

  DualSimplex simplex(problem);
  auto solution = simplex.run(stats);
  if (!solution) return std::nullopt;

  // The duality argument (or the early exit) guarantees feasibility; verify
  // by substitution anyway, in exact arithmetic.
  for (const auto& row : problem.rows) {
    mpq_class p = 0, xpow = 1;
    int prev_deg = 0;
    for (std::size_t t = 0; t < problem.degrees.size(); ++t) {
      for (int step = prev_deg; step < problem.degrees[t]; ++step) xpow *= row.x;
      prev_deg = problem.degrees[t];
      p += (*solution)[t] * xpow;
    }
    if (p < row.lo || p > row.hi)
      throw std::logic_error("solve_lp: solution failed substitution check");
  }
  return solution;
}

}  // namespace polyround::polygen
