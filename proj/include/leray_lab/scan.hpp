#pragma once

#include "leray_lab/corpus.hpp"
#include "leray_lab/inequalities.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <vector>

namespace leray_lab {

struct ScanOptions {
  int dim = 3;
  std::size_t count = 100;  // fields per corpus
  std::uint64_t seed = 7;
  int resolution = 0;       // 0: 32 for n = 3, 16 for n = 4
  Tolerances tol;
  GammaConstants gammas = computed_constants();
  bool radial = true;       // also sweep the radial corpus
};

/// Aggregate of one inequality over a corpus.
struct InequalityTally {
  std::string name;
  std::string corpus;  // "box" or "radial"
  double tolerance = 0.0;
  std::size_t evaluated = 0;
  std::size_t passed = 0;
  double worst_ratio = 0.0;
  std::string worst_field;
  bool diagnostic = false;  // quality check, not an inequality; excluded from all_passed

  std::size_t failed() const { return evaluated - passed; }
};

struct ScanSummary {
  int dim = 0;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  int resolution = 0;
  std::vector<InequalityTally> rows;

  bool all_passed() const {
    return std::all_of(rows.begin(), rows.end(),
                       [](const auto& r) { return r.diagnostic || r.failed() == 0; });
  }
  const InequalityTally* find(const std::string& name) const {
    for (const auto& r : rows)
      if (r.name == name) return &r;
    return nullptr;
  }
};

namespace detail {

class TallyBook {
 public:
  void add(const std::string& corpus, const InequalityReport& r, const std::string& field,
           bool diagnostic = false) {
    const std::string key = corpus + "/" + r.name;
    auto it = index_.find(key);
    if (it == index_.end()) {
      it = index_.emplace(key, rows_.size()).first;
      InequalityTally t;
      t.name = r.name;
      t.corpus = corpus;
      t.tolerance = r.tolerance;
      t.diagnostic = diagnostic;
      rows_.push_back(t);
    }
    InequalityTally& t = rows_[it->second];
    ++t.evaluated;
    if (r.passed) ++t.passed;
    if (t.evaluated == 1 || r.ratio > t.worst_ratio) {
      t.worst_ratio = r.ratio;
      t.worst_field = field;
    }
  }
  std::vector<InequalityTally> rows() const { return rows_; }

 private:
  std::map<std::string, std::size_t> index_;
  std::vector<InequalityTally> rows_;
};

/// Unit-coefficient field with a single Fourier mode of index `m` per axis.
inline Field single_mode_field(const Grid& g, const std::vector<int>& m, std::size_t components) {
  std::vector<ComplexArray> coef(components, ComplexArray(g.mode_count()));
  for (std::size_t mode = 0; mode < g.mode_count(); ++mode) {
    bool hit = true;
    for (int a = 0; a < g.dim(); ++a) hit = hit && g.mode_index(a)[mode] == m[a];
    if (hit)
      for (auto& c : coef) c[mode] = Complex(1.0, 0.0);
  }
  return Field::from_coefficients(g, std::move(coef));
}

}  // namespace detail

/// Sweeps every inequality that applies in `opt.dim` over a seeded corpus of
/// box fields (alternating band-limited and bump fields) and, optionally,
/// radial functions. Deterministic for a given seed.
inline ScanSummary inequality_scan(const ScanOptions& opt) {
  if (opt.dim != 3 && opt.dim != 4) throw InvalidArgument("inequality scan needs dim 3 or 4");
  ScanSummary summary;
  summary.dim = opt.dim;
  summary.count = opt.count;
  summary.seed = opt.seed;
  summary.resolution = opt.resolution > 0 ? opt.resolution : (opt.dim == 3 ? 32 : 16);
  if (opt.count == 0) return summary;

  const int n = opt.dim;
  const Tolerances& tol = opt.tol;
  const double gamma = opt.gammas.gamma(n);
  const Grid g = make_grid(n, summary.resolution, 2.0 * std::numbers::pi);
  const double L = g.box_length();
  Rng rng(opt.seed);
  std::uniform_real_distribution<double> slope(0.0, 2.0);
  std::uniform_int_distribution<int> bumps(1, 4);
  std::uniform_int_distribution<int> mode(-summary.resolution / 4, summary.resolution / 4);
  detail::TallyBook book;

  for (std::size_t i = 0; i < opt.count; ++i) {
    const bool band = i % 2 == 0;
    const std::string id = (band ? "band#" : "bump#") + std::to_string(i);
    const Field u = band ? random_band_limited_field(g, rng, summary.resolution / 4, slope(rng), n)
                         : random_bump_field(g, rng, bumps(rng), L / 16.0, L / 8.0, n);
    DerivativeCache cache(u);

    const double l2 = dm_l2_norm(cache.field(), 0);
    const double dl2 = dm_l2_norm(cache.field(), 1);
    const double l3 = dm_lq_norm(cache, NormRequest{0, 3.0, NormRoute::physical});
    book.add("box", make_report(n == 3 ? "gn_n3" : "gn_n4", gn_ratio_from_norms(n, l3, l2, dl2), gamma, tol.box), id);

    const TrilinearChainReport lemma = trilinear_chain_check(cache, opt.gammas, tol);
    for (const InequalityReport* link : lemma.links()) book.add("box", *link, id);
    book.add("box", make_report("|Dw|_eps_sensitivity", lemma.epsilon_sensitivity, 1e-6, 0.0), id,
             true);

    for (int m = 1; m <= kMaxTupleOrder; ++m)
      for (int l = 0; l <= m; ++l) {
        InequalityReport r = interpolation_check(cache.field(), l, m, tol.exact);
        r.name = "interp";
        book.add("box", r, id);
      }
    book.add("box", first_interp_check(cache.field(), tol.exact), id);

    if (n == 4) {
      const double l4 = dm_lq_norm(cache, NormRequest{0, 4.0, NormRoute::physical});
      book.add("box", make_report("L4<=|Du|_2", l4, dl2, tol.box), id);
      for (InequalityReport r : product_estimate_4d_sweep(cache, tol.box)) {
        r.name = "product";
        book.add("box", r, id);
      }
    }

    // Equality case of the interpolation inequality.
    // Last-axis index >= 1 keeps the mode inside the stored half spectrum
    // and away from its own conjugate.
    std::vector<int> m(n);
    for (int& v : m) v = mode(rng);
    m.back() = 1 + std::abs(m.back()) % (summary.resolution / 4);
    const Field single = detail::single_mode_field(g, m, n);
    for (int mm = 1; mm <= kMaxTupleOrder; ++mm)
      for (int l = 0; l <= mm; ++l) {
        InequalityReport r = interpolation_check(single, l, mm, tol.exact);
        r = make_identity_report("interp_single_mode", r.lhs, r.rhs, tol.exact);
        book.add("box", r, "mode#" + std::to_string(i));
      }

    if (opt.radial) {
      const RadialFunction f = random_radial_function(n, rng);
      const std::string fid = "radial#" + std::to_string(i) + ":" + f.label;
      book.add("radial", make_report(n == 3 ? "gn_n3" : "gn_n4", gn_ratio(f), gamma, tol.radial), fid);
      if (n == 4) book.add("radial", embedding_4d_check(f, tol.radial), fid);
    }
  }
  summary.rows = book.rows();
  return summary;
}

}  // namespace leray_lab
