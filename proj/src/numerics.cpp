#include "otakey/numerics.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <utility>

#include "otakey/errors.hpp"

namespace otakey {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mul_mod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 pow_mod(u64 base, u64 e, u64 m) {
  u64 r = 1;
  base %= m;
  while (e) {
    if (e & 1) r = mul_mod(r, base, m);
    base = mul_mod(base, base, m);
    e >>= 1;
  }
  return r;
}

// Deterministic for all 64-bit n with these witnesses.
bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  static constexpr std::array<u64, 12> kWitnesses = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (u64 p : kWitnesses) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : kWitnesses) {
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

bool miller_rabin_round(const mpz_class& n, const mpz_class& d, int s, const mpz_class& a) {
  mpz_class x;
  mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
  mpz_class n1 = n - 1;
  if (x == 1 || x == n1) return true;
  for (int i = 1; i < s; ++i) {
    x = x * x % n;
    if (x == n1) return true;
  }
  return false;
}

const std::vector<unsigned>& small_primes() {
  static const std::vector<unsigned> primes = [] {
    constexpr unsigned kLimit = 1'000'000;
    std::vector<bool> composite(kLimit + 1, false);
    std::vector<unsigned> out;
    for (unsigned i = 2; i <= kLimit; ++i) {
      if (composite[i]) continue;
      out.push_back(i);
      for (u64 j = static_cast<u64>(i) * i; j <= kLimit; j += i) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

// Brent's cycle finding with batched gcds. Returns a divisor of n, possibly
// n itself when the walk collapses; 0 once the budget is spent.
mpz_class brent_rho(const mpz_class& n, Rng& rng, u64& budget) {
  const mpz_class y0 = rng.uniform_mpz(1, n - 1);
  const mpz_class c = rng.uniform_mpz(1, n - 1);
  constexpr u64 kBatch = 128;
  mpz_class y = y0, x, ys, q = 1, g = 1, diff;
  auto step = [&](mpz_class& v) {
    v = v * v + c;
    mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
  };
  for (u64 r = 1; g == 1; r *= 2) {
    x = y;
    if (budget < r) return 0;
    budget -= r;
    for (u64 i = 0; i < r; ++i) step(y);
    for (u64 k = 0; k < r && g == 1; k += kBatch) {
      ys = y;
      u64 steps = std::min(kBatch, r - k);
      if (budget < steps) return 0;
      budget -= steps;
      for (u64 i = 0; i < steps; ++i) {
        step(y);
        diff = x - y;
        q = q * abs(diff);
        mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
      }
      mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
    }
  }
  if (g == n) {
    // The batch overshot; replay it one step at a time.
    do {
      if (budget == 0) return 0;
      --budget;
      step(ys);
      diff = x - ys;
      diff = abs(diff);
      mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
    } while (g == 1);
  }
  return g;
}

// (root, k) with root^k == n and k maximal, or (n, 1).
std::pair<mpz_class, unsigned> perfect_power(const mpz_class& n) {
  if (!mpz_perfect_power_p(n.get_mpz_t())) return {n, 1};
  std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
  for (unsigned k = static_cast<unsigned>(bits); k >= 2; --k) {
    mpz_class root;
    if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), k) != 0) return {root, k};
  }
  return {n, 1};
}

}  // namespace

bool is_probable_prime(const mpz_class& n) {
  if (n < 2) return false;
  if (mpz_fits_ulong_p(n.get_mpz_t())) return is_prime_u64(n.get_ui());
  for (unsigned p : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
  }
  mpz_class d = n - 1;
  int s = 0;
  while (mpz_even_p(d.get_mpz_t())) {
    d >>= 1;
    ++s;
  }
  // Bases depend only on n, so the test is reproducible.
  u64 low = mpz_getlimbn(n.get_mpz_t(), 0);
  Rng rng(mix64(low ^ mpz_sizeinbase(n.get_mpz_t(), 2)));
  for (int round = 0; round < 32; ++round) {
    mpz_class a = rng.uniform_mpz(2, n - 2);
    if (!miller_rabin_round(n, d, s, a)) return false;
  }
  return true;
}

int decimal_digits(const mpz_class& n) {
  if (n == 0) return 1;
  return static_cast<int>(mpz_class(abs(n)).get_str().size());
}

PrimeInput PrimeInput::from_value(const mpz_class& value) {
  if (!is_probable_prime(value)) {
    throw NonPositiveInput(value.get_str() + " is not prime");
  }
  return PrimeInput(value, decimal_digits(value));
}

PrimeInput sample_prime(int digit_count, Rng& rng) {
  if (digit_count < 1) throw NonPositiveInput("digit_count must be >= 1");
  mpz_class lo, hi;
  mpz_ui_pow_ui(lo.get_mpz_t(), 10, static_cast<unsigned long>(digit_count - 1));
  hi = lo * 10 - 1;
  // Rejection sampling keeps the draw uniform over the primes in range.
  for (;;) {
    mpz_class candidate = rng.uniform_mpz(lo, hi);
    if (is_probable_prime(candidate)) return PrimeInput::from_value(candidate);
  }
}

std::vector<PrimeInput> sample_distinct_primes(int count, int digit_count, Rng& rng,
                                               int* collisions) {
  if (count < 0) throw NonPositiveInput("count must be non-negative");
  // Primes available with 1, 2, 3 digits.
  static constexpr int kAvailable[] = {0, 4, 21, 143};
  if (digit_count >= 1 && digit_count <= 3 && count > kAvailable[digit_count]) {
    throw NonPositiveInput("only " + std::to_string(kAvailable[digit_count]) + " primes have " +
                           std::to_string(digit_count) + " digits");
  }
  std::vector<PrimeInput> out;
  out.reserve(static_cast<std::size_t>(count));
  int clashes = 0;
  while (static_cast<int>(out.size()) < count) {
    PrimeInput p = sample_prime(digit_count, rng);
    if (std::find(out.begin(), out.end(), p) != out.end()) {
      ++clashes;
      continue;
    }
    out.push_back(std::move(p));
  }
  if (collisions) *collisions += clashes;
  return out;
}

Factorization::Factorization(std::vector<PrimePower> factors) {
  std::map<mpz_class, unsigned> merged;
  for (auto& f : factors) {
    if (f.exponent == 0) throw NonPositiveInput("zero exponent in factorization");
    if (f.prime < 2) throw NonPositiveInput("factor " + f.prime.get_str() + " is not a prime");
    merged[f.prime] += f.exponent;
  }
  for (auto& [p, e] : merged) factors_.push_back({p, e});
}

mpz_class Factorization::value() const {
  mpz_class v = 1;
  for (const auto& f : factors_) {
    mpz_class power;
    mpz_pow_ui(power.get_mpz_t(), f.prime.get_mpz_t(), f.exponent);
    v *= power;
  }
  return v;
}

std::string Factorization::to_string() const {
  std::string out;
  for (const auto& f : factors_) {
    if (!out.empty()) out += " * ";
    out += f.prime.get_str() + "^" + std::to_string(f.exponent);
  }
  return out;
}

Factorization Factorization::parse(std::string_view text) {
  std::vector<PrimePower> factors;
  std::size_t pos = 0;
  auto skip_spaces = [&] {
    while (pos < text.size() && text[pos] == ' ') ++pos;
  };
  auto read_number = [&]() -> std::string {
    skip_spaces();
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (start == pos) throw ParseError("expected digits in factorization '" + std::string(text) + "'");
    return std::string(text.substr(start, pos - start));
  };
  skip_spaces();
  if (pos == text.size()) return Factorization();
  for (;;) {
    mpz_class prime(read_number(), 10);
    skip_spaces();
    if (pos >= text.size() || text[pos] != '^') {
      throw ParseError("expected '^' in factorization '" + std::string(text) + "'");
    }
    ++pos;
    unsigned long exponent = std::stoul(read_number());
    factors.push_back({prime, static_cast<unsigned>(exponent)});
    skip_spaces();
    if (pos == text.size()) break;
    if (text[pos] != '*') throw ParseError("expected '*' in factorization '" + std::string(text) + "'");
    ++pos;
  }
  return Factorization(std::move(factors));
}

Factorization factorize(const mpz_class& n, const FactorOptions& options) {
  if (n < 2) throw NonPositiveInput("factorize needs n >= 2, got " + n.get_str());
  std::map<mpz_class, unsigned> found;
  mpz_class rest = n;

  const auto& primes = small_primes();
  for (unsigned p : primes) {
    if (p > options.trial_bound) break;
    if (rest == 1) break;
    if (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
      unsigned e = 0;
      do {
        mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
        ++e;
      } while (mpz_divisible_ui_p(rest.get_mpz_t(), p));
      found[mpz_class(p)] += e;
    }
  }

  Rng rng(options.rng_seed);
  std::vector<std::pair<mpz_class, unsigned>> pending;
  if (rest > 1) pending.emplace_back(rest, 1);
  while (!pending.empty()) {
    auto [m, multiplicity] = std::move(pending.back());
    pending.pop_back();
    if (m == 1) continue;
    if (is_probable_prime(m)) {
      found[m] += multiplicity;
      continue;
    }
    auto [root, k] = perfect_power(m);
    if (k > 1) {
      pending.emplace_back(root, multiplicity * k);
      continue;
    }
    u64 budget = options.rho_budget;
    mpz_class d = 0;
    while (budget > 0) {
      d = brent_rho(m, rng, budget);
      if (d == 0 || d != m) break;
    }
    if (d == 0 || d == m) {
      throw FactorBoundExceeded("cofactor " + m.get_str() + " resisted " +
                                std::to_string(options.rho_budget) + " rho iterations");
    }
    mpz_class other = m / d;
    pending.emplace_back(d, multiplicity);
    pending.emplace_back(other, multiplicity);
  }

  std::vector<PrimePower> factors;
  factors.reserve(found.size());
  for (auto& [p, e] : found) factors.push_back({p, e});
  return Factorization(std::move(factors));
}

mpz_class radical(const Factorization& f) {
  mpz_class r = 1;
  for (const auto& pf : f.factors()) r *= pf.prime;
  return r;
}

RoundedInteger round_to_integer(const BigReal& x, const BigReal& tol) {
  if (tol.sign() <= 0) throw NonPositiveInput("tolerance must be positive");
  mpz_class nearest = x.to_nearest_integer();
  BigReal distance = (x - BigReal(nearest)).abs();
  if (distance > tol) {
    throw NotNearInteger(x.to_string(30) + " is " + distance.to_string(6) +
                         " from the nearest integer (tolerance " + tol.to_string(3) + ")");
  }
  if (nearest <= 0) throw NotNearInteger(x.to_string(30) + " is not near a positive integer");
  return {nearest, distance};
}

BigReal default_tolerance(const PrecisionContext& ctx) { return pow10(-ctx.tolerance_digits()); }

RoundedInteger recover_integer(const BigReal& x, const PrecisionContext& ctx) {
  std::int64_t limit = ctx.digits() - ctx.guard_digits();
  if (x.adjusted_exponent() >= limit) {
    throw Overflow("value ~1e" + std::to_string(x.adjusted_exponent()) +
                   " is too large to resolve as an integer at " + std::to_string(ctx.digits()) +
                   " digits (limit 1e" + std::to_string(limit) + ")");
  }
  return round_to_integer(x, default_tolerance(ctx));
}

int leading_digit_overlap(const BigReal& a, const BigReal& b) {
  if (a.sign() <= 0 || b.sign() <= 0) throw NonPositiveInput("digit overlap needs positive values");
  if (a.adjusted_exponent() != b.adjusted_exponent()) return 0;
  std::string da = a.significand().get_str();
  std::string db = b.significand().get_str();
  std::size_t len = std::max(da.size(), db.size());
  if (a.adjusted_exponent() >= 0) {
    len = std::max(len, static_cast<std::size_t>(a.adjusted_exponent() + 1));
  }
  da.resize(len, '0');
  db.resize(len, '0');
  int k = 0;
  while (static_cast<std::size_t>(k) < len && da[k] == db[k]) ++k;
  return k;
}

}  // namespace otakey
