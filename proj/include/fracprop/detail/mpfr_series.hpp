#ifndef FRACPROP_DETAIL_MPFR_SERIES_HPP
#define FRACPROP_DETAIL_MPFR_SERIES_HPP

#include <mpfr.h>

#include <complex>
#include <map>
#include <memory>
#include <vector>

#include "../errors.hpp"
#include "../gammafn.hpp"

namespace fracprop::detail {

// Gamma(a*k + b), k = 0,1,..., held in MPFR at fixed precision and extended
// lazily. Pole entries are flagged; their reciprocals are exactly zero.
class GammaTable {
 public:
  GammaTable(double a, double b, mpfr_prec_t prec) : a_(a), b_(b), prec_(prec) {
    mpfr_init2(x_, prec_ + 64);
  }
  GammaTable(const GammaTable&) = delete;
  GammaTable& operator=(const GammaTable&) = delete;
  ~GammaTable() {
    for (auto& g : vals_) mpfr_clear(&g);
    mpfr_clear(x_);
  }

  mpfr_prec_t precision() const { return prec_; }

  bool pole(long k) {
    extend_to(k);
    return pole_[static_cast<size_t>(k)] != 0;
  }
  mpfr_srcptr value(long k) {
    extend_to(k);
    return &vals_[static_cast<size_t>(k)];
  }

 private:
  void extend_to(long k) {
    while (static_cast<long>(vals_.size()) <= k) {
      const long j = static_cast<long>(vals_.size());
      // x = a*j + b, exact at this precision
      mpfr_set_d(x_, a_, MPFR_RNDN);
      mpfr_mul_si(x_, x_, j, MPFR_RNDN);
      mpfr_add_d(x_, x_, b_, MPFR_RNDN);
      const bool is_pole =
          mpfr_sgn(x_) <= 0 && mpfr_integer_p(x_) != 0;
      vals_.emplace_back();
      mpfr_init2(&vals_.back(), prec_);
      if (is_pole) {
        mpfr_set_ui(&vals_.back(), 1, MPFR_RNDN);  // placeholder, never used
        pole_.push_back(1);
      } else {
        mpfr_gamma(&vals_.back(), x_, MPFR_RNDN);
        pole_.push_back(0);
      }
    }
  }

  double a_, b_;
  mpfr_prec_t prec_;
  std::vector<__mpfr_struct> vals_;  // struct moves are safe (limbs on heap)
  std::vector<unsigned char> pole_;
  mpfr_t x_;
};

enum class SeriesKind {
  plain,  // sum z^k / Gamma(a k + b)
  dfun    // sum a(k+1) z^k / Gamma(a k + b), with b = alpha + 2
};

struct MpfrSeriesResult {
  std::complex<double> value;
  long terms = 0;
};

// Shared per-(alpha) cache of Gamma tables, keyed by (b, kind, precision tier).
struct MLContext {
  double alpha = 0.0;
  std::map<std::tuple<double, int, long>, std::unique_ptr<GammaTable>> tables;

  GammaTable& table(double a, double b, SeriesKind kind, mpfr_prec_t prec) {
    mpfr_prec_t tier = 128;
    while (tier < prec) tier *= 2;
    auto key = std::make_tuple(b, static_cast<int>(kind), static_cast<long>(tier));
    auto it = tables.find(key);
    if (it == tables.end()) {
      it = tables.emplace(key, std::make_unique<GammaTable>(a, b, tier)).first;
    }
    return *it->second;
  }
};

// Extended-precision power series at a fixed working precision.
// result_floor_log2 is a lower estimate of log2|sum|; summation stops once
// terms fall 80 bits below it on the decreasing tail.
inline MpfrSeriesResult series_mpfr(std::complex<double> z, double a, double b,
                                    SeriesKind kind, mpfr_prec_t prec,
                                    long kmax, double result_floor_log2,
                                    GammaTable& table) {
  mpfr_t zr, zi, pr, pi, tr, ti, accr, acci, q, mult;
  for (auto* p : {&zr, &zi, &pr, &pi, &tr, &ti, &accr, &acci, &q, &mult})
    mpfr_init2(*p, prec);
  mpfr_set_d(zr, z.real(), MPFR_RNDN);
  mpfr_set_d(zi, z.imag(), MPFR_RNDN);
  mpfr_set_ui(pr, 1, MPFR_RNDN);  // z^0
  mpfr_set_zero(pi, 1);
  mpfr_set_zero(accr, 1);
  mpfr_set_zero(acci, 1);

  const long floor_exp =
      static_cast<long>(std::floor(result_floor_log2)) - 80;
  long max_exp = -(1L << 40);
  long prev_exp = -(1L << 40);
  bool done = false;
  long k = 0;
  for (; k <= kmax && !done; ++k) {
    long term_exp = -(1L << 40);
    if (!table.pole(k)) {
      if (kind == SeriesKind::dfun) {
        mpfr_set_d(mult, a, MPFR_RNDN);
        mpfr_mul_si(mult, mult, k + 1, MPFR_RNDN);
        mpfr_div(q, mult, table.value(k), MPFR_RNDN);
      } else {
        mpfr_ui_div(q, 1, table.value(k), MPFR_RNDN);
      }
      // acc += z^k * q
      mpfr_mul(tr, pr, q, MPFR_RNDN);
      mpfr_mul(ti, pi, q, MPFR_RNDN);
      mpfr_add(accr, accr, tr, MPFR_RNDN);
      mpfr_add(acci, acci, ti, MPFR_RNDN);
      long ez = -(1L << 40);
      if (mpfr_zero_p(pr) == 0) ez = std::max(ez, static_cast<long>(mpfr_get_exp(pr)));
      if (mpfr_zero_p(pi) == 0) ez = std::max(ez, static_cast<long>(mpfr_get_exp(pi)));
      if (mpfr_zero_p(q) == 0 && ez > -(1L << 39))
        term_exp = ez + mpfr_get_exp(q);
      max_exp = std::max(max_exp, term_exp);
    }
    // z^{k+1}
    mpfr_mul(tr, pr, zr, MPFR_RNDN);
    mpfr_mul(q, pi, zi, MPFR_RNDN);
    mpfr_sub(tr, tr, q, MPFR_RNDN);
    mpfr_mul(ti, pr, zi, MPFR_RNDN);
    mpfr_mul(q, pi, zr, MPFR_RNDN);
    mpfr_add(ti, ti, q, MPFR_RNDN);
    mpfr_swap(pr, tr);
    mpfr_swap(pi, ti);

    if (k >= 4 && term_exp > -(1L << 39)) {
      const bool decreasing = term_exp < prev_exp;
      const bool below_floor = term_exp < floor_exp;
      const bool below_lsb = term_exp < max_exp - static_cast<long>(prec) - 16;
      if (decreasing && (below_floor || below_lsb)) done = true;
    }
    if (term_exp > -(1L << 39)) prev_exp = term_exp;
  }

  MpfrSeriesResult out;
  out.terms = k;
  out.value = {mpfr_get_d(accr, MPFR_RNDN), mpfr_get_d(acci, MPFR_RNDN)};
  for (auto* p : {&zr, &zi, &pr, &pi, &tr, &ti, &accr, &acci, &q, &mult})
    mpfr_clear(*p);
  if (!done) throw no_convergence("extended-precision series hit its term cap");
  return out;
}

}  // namespace fracprop::detail

#endif
