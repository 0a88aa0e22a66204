#ifndef GUARD_DISTILL_POLYNOMIAL_HPP
#define GUARD_DISTILL_POLYNOMIAL_HPP

#include <string>
#include <vector>

#include "guard/smt/term.hpp"

namespace guard::distill {

using smt::Rational;

// Univariate polynomial with exact rational coefficients; coeffs[k] is the
// coefficient of x^k. Trailing zeros are trimmed, so the zero polynomial is empty.
class Polynomial {
public:
  Polynomial() = default;

  static Polynomial constant(Rational c)
  {
    Polynomial p;
    p.coeffs_ = {std::move(c)};
    p.trim();
    return p;
  }

  static Polynomial unknown()
  {
    Polynomial p;
    p.coeffs_ = {Rational{0}, Rational{1}};
    return p;
  }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  bool is_constant() const { return coeffs_.size() <= 1; }
  Rational coeff(int k) const
  {
    return k >= 0 && k < static_cast<int>(coeffs_.size()) ? coeffs_[k] : Rational{0};
  }
  const std::vector<Rational> &coeffs() const { return coeffs_; }

  Rational operator()(const Rational &x) const
  {
    Rational acc = 0;
    for (size_t k = coeffs_.size(); k-- > 0;)
      acc = acc * x + coeffs_[k];
    return acc;
  }

  friend Polynomial operator+(const Polynomial &a, const Polynomial &b)
  {
    Polynomial r;
    r.coeffs_.resize(std::max(a.coeffs_.size(), b.coeffs_.size()));
    for (size_t k = 0; k < r.coeffs_.size(); ++k)
      r.coeffs_[k] = a.coeff(static_cast<int>(k)) + b.coeff(static_cast<int>(k));
    r.trim();
    return r;
  }

  friend Polynomial operator-(const Polynomial &a) { return a * constant(Rational{-1}); }
  friend Polynomial operator-(const Polynomial &a, const Polynomial &b) { return a + (-b); }

  friend Polynomial operator*(const Polynomial &a, const Polynomial &b)
  {
    Polynomial r;
    if (a.is_zero() || b.is_zero())
      return r;
    r.coeffs_.assign(a.coeffs_.size() + b.coeffs_.size() - 1, Rational{0});
    for (size_t i = 0; i < a.coeffs_.size(); ++i)
      for (size_t j = 0; j < b.coeffs_.size(); ++j)
        r.coeffs_[i + j] += a.coeffs_[i] * b.coeffs_[j];
    r.trim();
    return r;
  }

  bool operator==(const Polynomial &) const = default;

  // "3*x^2 - 1/2*x + 6"
  std::string to_string() const
  {
    if (is_zero())
      return "0";
    std::string out;
    for (size_t k = coeffs_.size(); k-- > 0;) {
      const Rational &c = coeffs_[k];
      if (c == 0)
        continue;
      bool neg = c < 0;
      Rational mag = neg ? Rational{-c} : c;
      if (out.empty())
        out += neg ? "-" : "";
      else
        out += neg ? " - " : " + ";
      std::string m = smt::rational_string(mag);
      if (k == 0)
        out += m;
      else
        out += (mag == 1 ? "" : m + "*") + std::string("x") + (k > 1 ? "^" + std::to_string(k) : "");
    }
    return out;
  }

  smt::Term to_term(const smt::Term &x) const
  {
    std::vector<smt::Term> terms;
    for (size_t k = 0; k < coeffs_.size(); ++k) {
      if (coeffs_[k] == 0)
        continue;
      smt::Term mono = smt::real_lit(coeffs_[k]);
      for (size_t i = 0; i < k; ++i)
        mono = smt::mul(mono, x);
      terms.push_back(mono);
    }
    if (terms.empty())
      return smt::real_lit(Rational{0});
    smt::Term acc = terms[0];
    for (size_t i = 1; i < terms.size(); ++i)
      acc = smt::add(acc, terms[i]);
    return acc;
  }

private:
  void trim()
  {
    while (!coeffs_.empty() && coeffs_.back() == 0)
      coeffs_.pop_back();
  }

  std::vector<Rational> coeffs_;
};

} // namespace guard::distill

#endif // GUARD_DISTILL_POLYNOMIAL_HPP
