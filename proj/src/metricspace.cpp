#include "afg/metricspace.hpp"

namespace afg {

NoncompleteFixture noncomplete_fixture(int k, int t_count) {
  if (k < 2) throw ValidationError("truncation k must be at least 2");
  if (k > 40) throw ValidationError("truncation k above 40 overflows the exact arithmetic");
  if (t_count < 3 || t_count % 2 == 0) throw ValidationError("t_count must be odd and >= 3 so t = 0 is a level");

  // points: index 0 is 0, index i in 1..k is 2^-i, index k+1 is 1
  std::vector<Rational> pts;
  std::vector<std::string> labels;
  pts.push_back(Rational(0));
  labels.push_back("0");
  for (int i = 1; i <= k; ++i) {
    pts.push_back(Rational(1, 1LL << i));
    labels.push_back("1/" + std::to_string(1LL << i));
  }
  pts.push_back(Rational(1));
  labels.push_back("1");
  const std::size_t n = pts.size();
  auto swap = [&](std::size_t i) { return i == 0 ? pts[n - 1] : (i == n - 1 ? pts[0] : pts[i]); };
  std::vector<Rational> da(n * n), db(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      da[i * n + j] = abs_value(Rational(pts[i] - pts[j]));
      db[i * n + j] = abs_value(Rational(swap(i) - swap(j)));
    }
  auto a = FiniteMetricSpace<Rational>::validate(labels, da);
  auto b = FiniteMetricSpace<Rational>::validate(labels, db);

  NoncompleteReport rep;
  rep.k = k;
  rep.eps_truncated = uniform_distance(a, b);
  rep.eps_used = Rational(1);
  GluedSpace<Rational> z = glue(a, b, t_count, std::optional<Rational>(rep.eps_used));

  const std::size_t mid = static_cast<std::size_t>(t_count / 2);  // t = 0
  for (int i = 1; i <= k; ++i)
    for (int m = 1; m <= k; ++m) {
      const Rational got = z.distance(z.index(mid, i), z.index(mid, m));
      const Rational want = abs_value(Rational(pts[i] - pts[m]));
      ++rep.mid_pairs_checked;
      if (got != want) rep.mid_slice_exact = false;
    }
  for (int i = 1; i < k; ++i) rep.tail_distances.push_back(z.distance(z.index(mid, i), z.index(mid, i + 1)));

  bool first = true;
  for (int i = 1; i <= k; ++i) {
    const std::size_t zi = z.index(mid, i);
    for (std::size_t w = 0; w < z.size(); ++w) {
      const Rational lo = std::min({z.case_minus(zi, w), z.case_plus(zi, w), z.case_minus_plus(zi, w),
                                    z.case_plus_minus(zi, w)});
      if (first || lo < rep.min_cross_bound) rep.min_cross_bound = lo;
      first = false;
    }
  }
  rep.cross_bounds_hold = rep.min_cross_bound >= Rational(1);

  // The only possible limits in either metric sit over p = 0 or p = 1.
  const std::size_t zk = z.index(mid, k);
  first = true;
  for (std::size_t level = 0; level < z.levels().size(); ++level)
    for (std::size_t p : {std::size_t{0}, n - 1}) {
      const Rational v = z.distance(zk, z.index(level, p));
      if (first || v < rep.limit_margin) rep.limit_margin = v;
      first = false;
    }
  rep.min_positive_gap = Rational(1, 1LL << k);
  rep.limit_excluded = rep.limit_margin >= rep.min_positive_gap;
  return NoncompleteFixture{std::move(a), std::move(b), std::move(z), rep};
}

}  // namespace afg
