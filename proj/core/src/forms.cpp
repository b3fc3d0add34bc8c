#include "birchmax/forms.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "birchmax/padic.hpp"

namespace birchmax {

namespace {

// ---------------------------------------------------------------------------
// Expression parsing. Polynomials are held sparsely (variable -> power maps)
// until the arity is known, then densified into exponent vectors.
// ---------------------------------------------------------------------------

using SparseMono = std::map<int, int>;            // var index (1-based) -> power
using SparsePoly = std::map<SparseMono, BigInt>;  // monomial -> coefficient

constexpr std::size_t kMonomialCap = 200000;

void poly_add_term(SparsePoly& p, const SparseMono& m, const BigInt& c) {
  if (c == 0) return;
  auto it = p.find(m);
  if (it == p.end()) {
    p.emplace(m, c);
  } else {
    it->second += c;
    if (it->second == 0) p.erase(it);
  }
}

SparsePoly poly_add(const SparsePoly& a, const SparsePoly& b) {
  SparsePoly out = a;
  for (const auto& [m, c] : b) poly_add_term(out, m, c);
  return out;
}

SparsePoly poly_neg(const SparsePoly& a) {
  SparsePoly out;
  for (const auto& [m, c] : a) out.emplace(m, -c);
  return out;
}

SparsePoly poly_mul(const SparsePoly& a, const SparsePoly& b) {
  SparsePoly out;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) {
      SparseMono m = ma;
      for (const auto& [v, e] : mb) m[v] += e;
      poly_add_term(out, m, ca * cb);
      if (out.size() > kMonomialCap)
        throw BudgetExceeded("expression expands to too many monomials");
    }
  }
  return out;
}

SparsePoly poly_pow(const SparsePoly& a, long long e) {
  if (e < 0) throw SyntaxError("negative exponent");
  if (e > 64) throw BudgetExceeded("exponent too large");
  SparsePoly out;
  out.emplace(SparseMono{}, BigInt(1));
  SparsePoly base = a;
  while (e > 0) {
    if (e & 1) out = poly_mul(out, base);
    e >>= 1;
    if (e > 0) base = poly_mul(base, base);
  }
  return out;
}

struct Token {
  enum Kind { Num, Var, Plus, Minus, Star, Caret, LParen, RParen, End } kind;
  BigInt num;
  int var = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) {}

  Token next() {
    skip_space();
    if (pos_ >= s_.size()) return {Token::End, 0, 0};
    char c = s_[pos_];
    // accept the UTF-8 minus sign as '-'
    if (c == '\xe2' && pos_ + 2 < s_.size() && s_[pos_ + 1] == '\x88' &&
        s_[pos_ + 2] == '\x92') {
      pos_ += 3;
      return {Token::Minus, 0, 0};
    }
    switch (c) {
      case '+': ++pos_; return {Token::Plus, 0, 0};
      case '-': ++pos_; return {Token::Minus, 0, 0};
      case '*': ++pos_; return {Token::Star, 0, 0};
      case '^': ++pos_; return {Token::Caret, 0, 0};
      case '(': ++pos_; return {Token::LParen, 0, 0};
      case ')': ++pos_; return {Token::RParen, 0, 0};
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return {Token::Num, BigInt(s_.substr(start, pos_ - start)), 0};
    }
    if (c == 'x') {
      ++pos_;
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ == start) throw SyntaxError("variable must be x<k> with k >= 1");
      long long idx = std::stoll(s_.substr(start, pos_ - start));
      if (idx < 1 || idx > 64) throw SyntaxError("variable index out of range");
      return {Token::Var, 0, static_cast<int>(idx)};
    }
    throw SyntaxError(std::string("unexpected character '") + c + "'");
  }

 private:
  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  const std::string& s_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(const std::string& s) : lex_(s) { advance(); }

  SparsePoly parse_expression() {
    SparsePoly result = parse_term_signed();
    while (cur_.kind == Token::Plus || cur_.kind == Token::Minus) {
      bool minus = cur_.kind == Token::Minus;
      advance();
      SparsePoly t = parse_term();
      result = poly_add(result, minus ? poly_neg(t) : t);
    }
    return result;
  }

  void expect_end() const {
    if (cur_.kind != Token::End) throw SyntaxError("trailing input after expression");
  }

 private:
  SparsePoly parse_term_signed() {
    bool minus = false;
    while (cur_.kind == Token::Plus || cur_.kind == Token::Minus) {
      if (cur_.kind == Token::Minus) minus = !minus;
      advance();
    }
    SparsePoly t = parse_term();
    return minus ? poly_neg(t) : t;
  }

  SparsePoly parse_term() {
    SparsePoly result = parse_power();
    while (cur_.kind == Token::Star) {
      advance();
      result = poly_mul(result, parse_power());
    }
    return result;
  }

  SparsePoly parse_power() {
    SparsePoly base = parse_atom();
    if (cur_.kind == Token::Caret) {
      advance();
      if (cur_.kind != Token::Num) throw SyntaxError("exponent must be an integer literal");
      BigInt e = cur_.num;
      advance();
      if (e > 64) throw BudgetExceeded("exponent too large");
      return poly_pow(base, e.convert_to<long long>());
    }
    return base;
  }

  SparsePoly parse_atom() {
    if (cur_.kind == Token::Num) {
      SparsePoly p;
      poly_add_term(p, SparseMono{}, cur_.num);
      advance();
      return p;
    }
    if (cur_.kind == Token::Var) {
      SparsePoly p;
      SparseMono m;
      m[cur_.var] = 1;
      p.emplace(m, BigInt(1));
      advance();
      return p;
    }
    if (cur_.kind == Token::LParen) {
      advance();
      SparsePoly p = parse_expression();
      if (cur_.kind != Token::RParen) throw SyntaxError("missing ')'");
      advance();
      return p;
    }
    if (cur_.kind == Token::Minus || cur_.kind == Token::Plus) return parse_term_signed();
    throw SyntaxError("expected number, variable or '('");
  }

  void advance() { cur_ = lex_.next(); }

  Lexer lex_;
  Token cur_;
};

BigInt int_pow(const BigInt& base, int e) {
  BigInt r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

Form Form::parse(const std::string& text, int n_vars_override) {
  Parser parser(text);
  SparsePoly poly = parser.parse_expression();
  parser.expect_end();

  if (poly.empty()) throw DegreeTooLow("expression reduces to the zero polynomial");

  int max_var = 0;
  int degree = -1;
  for (const auto& [m, c] : poly) {
    int total = 0;
    for (const auto& [v, e] : m) {
      total += e;
      max_var = std::max(max_var, v);
    }
    if (degree < 0) degree = total;
    if (total != degree)
      throw NotHomogeneous("monomials of total degree " + std::to_string(degree) + " and " +
                           std::to_string(total) + " are mixed");
    (void)c;
  }
  if (degree < 2) throw DegreeTooLow("degree " + std::to_string(degree) + " is below 2");

  int n = n_vars_override > 0 ? n_vars_override : max_var;
  if (n < max_var)
    throw DimensionMismatch("arity override " + std::to_string(n) +
                            " below used variable x" + std::to_string(max_var));

  MonomialMap monos;
  for (const auto& [m, c] : poly) {
    ExponentVec exps(n, 0);
    for (const auto& [v, e] : m) exps[v - 1] = e;
    monos.emplace(std::move(exps), c);
  }
  return from_monomials(n, std::move(monos));
}

Form Form::from_monomials(int n_vars, MonomialMap monomials) {
  if (n_vars < 1) throw DimensionMismatch("form needs at least one variable");
  for (auto it = monomials.begin(); it != monomials.end();) {
    if (it->second == 0)
      it = monomials.erase(it);
    else
      ++it;
  }
  if (monomials.empty()) throw DegreeTooLow("zero polynomial");
  int degree = -1;
  for (const auto& [m, c] : monomials) {
    if (static_cast<int>(m.size()) != n_vars)
      throw DimensionMismatch("exponent vector length mismatch");
    int total = 0;
    for (int e : m) {
      if (e < 0) throw SyntaxError("negative exponent in monomial");
      total += e;
    }
    if (degree < 0) degree = total;
    if (total != degree) throw NotHomogeneous("mixed total degrees in monomial table");
    (void)c;
  }
  if (degree < 2) throw DegreeTooLow("degree below 2");
  Form f;
  f.n_vars_ = n_vars;
  f.degree_ = degree;
  f.monomials_ = std::move(monomials);
  return f;
}

std::string Form::render() const {
  std::ostringstream out;
  bool first = true;
  // reverse map order gives x1-major terms first
  for (auto it = monomials_.rbegin(); it != monomials_.rend(); ++it) {
    const auto& [exps, coeff] = *it;
    BigInt mag = coeff < 0 ? BigInt(-coeff) : coeff;
    if (first) {
      if (coeff < 0) out << "-";
      first = false;
    } else {
      out << (coeff < 0 ? "-" : "+");
    }
    bool printed = false;
    if (mag != 1) {
      out << mag.str();
      printed = true;
    }
    for (int v = 0; v < n_vars_; ++v) {
      if (exps[v] == 0) continue;
      if (printed) out << "*";
      out << "x" << (v + 1);
      if (exps[v] > 1) out << "^" << exps[v];
      printed = true;
    }
    if (!printed) out << mag.str();  // unreachable for d >= 2, kept for safety
  }
  return out.str();
}

StructureFlag Form::structure() const {
  if (is_diagonal()) return StructureFlag::Diagonal;
  if (degree_ == 2) return StructureFlag::Quadratic;
  return StructureFlag::General;
}

bool Form::is_diagonal() const {
  for (const auto& [exps, c] : monomials_) {
    int nonzero = 0;
    for (int e : exps)
      if (e > 0) ++nonzero;
    if (nonzero != 1) return false;
    (void)c;
  }
  return true;
}

BigInt Form::evaluate(const std::vector<BigInt>& x) const {
  if (static_cast<int>(x.size()) != n_vars_)
    throw DimensionMismatch("point has arity " + std::to_string(x.size()));
  BigInt sum = 0;
  for (const auto& [exps, c] : monomials_) {
    BigInt term = c;
    for (int v = 0; v < n_vars_; ++v)
      if (exps[v] > 0) term *= int_pow(x[v], exps[v]);
    sum += term;
  }
  return sum;
}

BigInt Form::evaluate(const std::vector<long long>& x) const {
  std::vector<BigInt> big(x.begin(), x.end());
  return evaluate(big);
}

std::vector<BigInt> Form::gradient(const std::vector<BigInt>& x) const {
  if (static_cast<int>(x.size()) != n_vars_)
    throw DimensionMismatch("point has arity " + std::to_string(x.size()));
  std::vector<BigInt> grad(n_vars_, BigInt(0));
  for (const auto& [exps, c] : monomials_) {
    for (int i = 0; i < n_vars_; ++i) {
      if (exps[i] == 0) continue;
      BigInt term = c * exps[i];
      for (int v = 0; v < n_vars_; ++v) {
        int e = v == i ? exps[v] - 1 : exps[v];
        if (e > 0) term *= int_pow(x[v], e);
      }
      grad[i] += term;
    }
  }
  return grad;
}

std::vector<BigInt> Form::gradient(const std::vector<long long>& x) const {
  std::vector<BigInt> big(x.begin(), x.end());
  return gradient(big);
}

std::vector<BigInt> Form::diagonal_coefficients() const {
  if (!is_diagonal()) throw DimensionMismatch("form is not diagonal");
  std::vector<BigInt> coeffs(n_vars_, BigInt(0));
  for (const auto& [exps, c] : monomials_) {
    for (int v = 0; v < n_vars_; ++v)
      if (exps[v] > 0) coeffs[v] = c;
  }
  return coeffs;
}

// ---------------------------------------------------------------------------
// Int64FormEvaluator
// ---------------------------------------------------------------------------

Int64FormEvaluator::Int64FormEvaluator(const Form& form)
    : n_(form.n_vars()), degree_(form.degree()) {
  for (const auto& [exps, c] : form.monomials()) {
    Mono m;
    if (c < std::numeric_limits<long long>::min() || c > std::numeric_limits<long long>::max())
      throw BudgetExceeded("coefficient exceeds int64 fast path");
    m.coeff = c.convert_to<long long>();
    for (int v = 0; v < n_; ++v)
      for (int k = 0; k < exps[v]; ++k) m.exps.push_back(v);
    monos_.push_back(std::move(m));
  }
}

BigInt Int64FormEvaluator::max_abs_value(long long bound) const {
  BigInt total = 0;
  for (const auto& m : monos_) {
    BigInt term = m.coeff < 0 ? BigInt(-m.coeff) : BigInt(m.coeff);
    for (std::size_t k = 0; k < m.exps.size(); ++k) term *= bound;
    total += term;
  }
  return total;
}

bool Int64FormEvaluator::fits_int64(long long bound) const {
  return max_abs_value(bound) < (BigInt(1) << 62);
}

long long Int64FormEvaluator::evaluate(const std::int32_t* x) const {
  long long sum = 0;
  for (const auto& m : monos_) {
    long long term = m.coeff;
    for (int v : m.exps) term *= x[v];
    sum += term;
  }
  return sum;
}

long long Int64FormEvaluator::evaluate(const std::vector<long long>& x) const {
  long long sum = 0;
  for (const auto& m : monos_) {
    long long term = m.coeff;
    for (int v : m.exps) term *= x[v];
    sum += term;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// ModFormEvaluator
// ---------------------------------------------------------------------------

ModFormEvaluator::ModFormEvaluator(const Form& form, long long q) : q_(q) {
  if (q < 1) throw DimensionMismatch("modulus must be >= 1");
  for (const auto& [exps, c] : form.monomials()) {
    Mono m;
    BigInt red = c % q;
    if (red < 0) red += q;
    m.coeff = red.convert_to<long long>();
    for (int v = 0; v < form.n_vars(); ++v)
      if (exps[v] > 0) m.powers.emplace_back(v, exps[v]);
    monos_.push_back(std::move(m));
  }
}

long long ModFormEvaluator::evaluate(const std::vector<long long>& s) const {
  long long sum = 0;
  for (const auto& m : monos_) {
    long long term = m.coeff;
    for (const auto& [v, e] : m.powers) {
      long long r = s[v] % q_;
      if (r < 0) r += q_;
      for (int k = 0; k < e; ++k) term = (term * r) % q_;
    }
    sum = (sum + term) % q_;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Birch rank and regularity
// ---------------------------------------------------------------------------

namespace {

int hessian_rank(const Form& form) {
  int n = form.n_vars();
  std::vector<std::vector<BigInt>> h(n, std::vector<BigInt>(n, BigInt(0)));
  for (const auto& [exps, c] : form.monomials()) {
    std::vector<int> vars;
    for (int v = 0; v < n; ++v)
      if (exps[v] > 0) vars.push_back(v);
    if (vars.size() == 1) {
      h[vars[0]][vars[0]] += 2 * c;
    } else {
      h[vars[0]][vars[1]] += c;
      h[vars[1]][vars[0]] += c;
    }
  }
  // exact Gaussian elimination over the rationals (cross-multiplied rows)
  int rank = 0;
  int row = 0;
  for (int col = 0; col < n && row < n; ++col) {
    int pivot = -1;
    for (int r = row; r < n; ++r)
      if (h[r][col] != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    std::swap(h[row], h[pivot]);
    for (int r = row + 1; r < n; ++r) {
      if (h[r][col] == 0) continue;
      BigInt f1 = h[row][col];
      BigInt f2 = h[r][col];
      for (int cc = col; cc < n; ++cc) h[r][cc] = h[r][cc] * f1 - h[row][cc] * f2;
    }
    ++row;
    ++rank;
  }
  return rank;
}

bool any_nonzero(const std::vector<BigInt>& v) {
  for (const auto& x : v)
    if (x != 0) return true;
  return false;
}

std::optional<RealWitness> find_real_witness(const Form& form, long long box) {
  int n = form.n_vars();
  long long side = 2 * box + 1;
  double cells = 1.0;
  for (int i = 0; i < n; ++i) cells *= static_cast<double>(side);
  while (cells > 2e7 && box > 1) {
    --box;
    side = 2 * box + 1;
    cells = 1.0;
    for (int i = 0; i < n; ++i) cells *= static_cast<double>(side);
  }

  std::vector<long long> x(n, -box);
  std::vector<signed char> signs;
  signs.reserve(static_cast<std::size_t>(cells));
  std::vector<long long> strides(n);  // lex enumeration, last axis fastest
  strides[n - 1] = 1;
  for (int i = n - 2; i >= 0; --i) strides[i] = strides[i + 1] * side;

  // first pass: signs at all grid points; exact zeros with nonzero gradient win
  std::optional<RealWitness> sign_change;
  bool done = false;
  while (!done) {
    BigInt v = form.evaluate(x);
    bool origin = std::all_of(x.begin(), x.end(), [](long long c) { return c == 0; });
    if (v == 0 && !origin && any_nonzero(form.gradient(x))) {
      RealWitness w;
      w.kind = RealWitness::Kind::ExactZero;
      w.point = x;
      return w;
    }
    signs.push_back(v == 0 ? 0 : (v > 0 ? 1 : -1));
    int axis = n - 1;
    while (axis >= 0) {
      if (x[axis] < box) {
        ++x[axis];
        break;
      }
      x[axis] = -box;
      --axis;
    }
    if (axis < 0) done = true;
  }

  // second pass: sign changes along +e_i edges with a nonzero gradient endpoint
  std::fill(x.begin(), x.end(), -box);
  std::size_t idx = 0;
  done = false;
  while (!done) {
    for (int axis = 0; axis < n && !sign_change; ++axis) {
      if (x[axis] >= box) continue;
      std::size_t nb = idx + static_cast<std::size_t>(strides[axis]);
      if (static_cast<int>(signs[idx]) * static_cast<int>(signs[nb]) < 0) {
        if (any_nonzero(form.gradient(x))) {
          RealWitness w;
          w.kind = RealWitness::Kind::SignChange;
          w.point = x;
          w.edge_axis = axis;
          sign_change = w;
        }
      }
    }
    if (sign_change) return sign_change;
    int axis = n - 1;
    while (axis >= 0) {
      if (x[axis] < box) {
        ++x[axis];
        idx += static_cast<std::size_t>(strides[axis]);
        break;
      }
      idx -= static_cast<std::size_t>(strides[axis]) * static_cast<std::size_t>(2 * box);
      x[axis] = -box;
      --axis;
    }
    if (axis < 0) done = true;
  }
  return std::nullopt;
}

}  // namespace

RankReport birch_rank(const Form& form) {
  RankReport report;
  if (form.is_diagonal()) {
    int present = 0;
    for (const auto& [exps, c] : form.monomials()) {
      (void)exps;
      (void)c;
      ++present;
    }
    report.birch_rank = present;
    report.method = RankMethod::DiagonalRule;
  } else if (form.degree() == 2) {
    report.birch_rank = hessian_rank(form);
    report.method = RankMethod::QuadraticRank;
  } else {
    report.method = RankMethod::Unsupported;
  }
  return report;
}

RankReport check_regularity(const Form& form, long long prime_budget, long long search_box) {
  RankReport report = birch_rank(form);
  if (!report.birch_rank.has_value()) {
    report.regular = Regularity::Undetermined;
    return report;
  }
  int d = form.degree();
  long long threshold = (d - 1) * (1LL << std::min(d, 60));
  if (*report.birch_rank <= threshold) {
    report.regular = Regularity::No;
    return report;
  }

  report.real_witness = find_real_witness(form, search_box);

  bool all_primes_ok = true;
  for (long long p : primes_up_to(prime_budget)) {
    PrimeVerdict verdict;
    verdict.p = p;
    auto w = padic::hensel_witness(form, p);
    if (w.has_value()) {
      verdict.witness_found = true;
      verdict.hensel_level = w->level;
      verdict.witness = w->point;
    } else {
      all_primes_ok = false;
    }
    report.evidence.push_back(std::move(verdict));
  }

  if (report.real_witness.has_value() && all_primes_ok)
    report.regular = Regularity::Yes;
  else
    report.regular = Regularity::Undetermined;
  return report;
}

std::vector<long long> primes_up_to(long long bound) {
  std::vector<long long> primes;
  if (bound < 2) return primes;
  std::vector<bool> composite(static_cast<std::size_t>(bound) + 1, false);
  for (long long p = 2; p <= bound; ++p) {
    if (composite[static_cast<std::size_t>(p)]) continue;
    primes.push_back(p);
    for (long long m = p * p; m <= bound; m += p) composite[static_cast<std::size_t>(m)] = true;
  }
  return primes;
}

}  // namespace birchmax
