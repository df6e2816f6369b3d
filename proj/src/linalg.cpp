#include "tietime/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tietime {

RationalSystemResult solve_rational_system(std::vector<std::vector<Rational>> a,
                                           std::vector<Rational> b) {
    const std::size_t rows = a.size();
    const std::size_t cols = rows ? a[0].size() : 0;
    if (b.size() != rows) throw std::invalid_argument("rhs length mismatch");

    // Augment with the identity so that eliminated rows remember the
    // combination of original equations they came from.
    std::vector<std::vector<Rational>> mult(rows, std::vector<Rational>(rows, 0));
    for (std::size_t r = 0; r < rows; ++r) mult[r][r] = 1;

    std::vector<std::size_t> pivot_col_of_row;
    std::vector<bool> is_pivot_col(cols, false);
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t sel = r;
        while (sel < rows && a[sel][c] == 0) ++sel;
        if (sel == rows) continue;
        std::swap(a[sel], a[r]);
        std::swap(b[sel], b[r]);
        std::swap(mult[sel], mult[r]);
        const Rational inv = 1 / a[r][c];
        for (std::size_t j = 0; j < cols; ++j) a[r][j] *= inv;
        b[r] *= inv;
        for (std::size_t j = 0; j < rows; ++j) mult[r][j] *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            const Rational f = a[i][c];
            for (std::size_t j = 0; j < cols; ++j) a[i][j] -= f * a[r][j];
            b[i] -= f * b[r];
            for (std::size_t j = 0; j < rows; ++j) mult[i][j] -= f * mult[r][j];
        }
        pivot_col_of_row.push_back(c);
        is_pivot_col[c] = true;
        ++r;
    }

    RationalSystemResult out;
    out.rank = r;
    for (std::size_t i = r; i < rows; ++i) {
        if (b[i] != 0) {
            out.consistent = false;
            out.certificate = mult[i];
            return out;
        }
    }
    out.consistent = true;
    out.particular.assign(cols, Rational(0));
    for (std::size_t i = 0; i < r; ++i) out.particular[pivot_col_of_row[i]] = b[i];
    for (std::size_t c = 0; c < cols; ++c) {
        if (is_pivot_col[c]) continue;
        std::vector<Rational> v(cols, Rational(0));
        v[c] = 1;
        for (std::size_t i = 0; i < r; ++i) v[pivot_col_of_row[i]] = -a[i][c];
        out.nullspace.push_back(std::move(v));
    }
    return out;
}

namespace {

constexpr std::uint64_t kPrimes[] = {
    4611686018427387847ull,  // largest prime below 2^62
    4611686018427387817ull,
    4611686018427387787ull,
    4611686018427387761ull,
};

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(a) * b) % p);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t e, std::uint64_t p) {
    std::uint64_t acc = 1;
    while (e) {
        if (e & 1) acc = mulmod(acc, base, p);
        base = mulmod(base, base, p);
        e >>= 1;
    }
    return acc;
}

// Banded LU of the system matrix mod p. Returns false on a zero pivot
// (caller retries with another prime).
struct ModBandLU {
    int n, kl, ku;
    std::uint64_t p;
    std::vector<std::uint64_t> band;  // row-major, width kl+ku+1

    std::uint64_t& at(int i, int j) { return band[static_cast<std::size_t>(i) * (kl + ku + 1) + (j - i + kl)]; }

    bool factor() {
        for (int k = 0; k < n; ++k) {
            const std::uint64_t piv = at(k, k);
            if (piv == 0) return false;
            const std::uint64_t inv = powmod(piv, p - 2, p);
            const int imax = std::min(n - 1, k + kl);
            for (int i = k + 1; i <= imax; ++i) {
                std::uint64_t& lik = at(i, k);
                if (lik == 0) continue;
                const std::uint64_t f = mulmod(lik, inv, p);
                lik = f;
                const int jmax = std::min(n - 1, k + ku);
                for (int j = k + 1; j <= jmax; ++j) {
                    std::uint64_t& aij = at(i, j);
                    const std::uint64_t sub = mulmod(f, at(k, j), p);
                    aij = (aij >= sub) ? aij - sub : aij + p - sub;
                }
            }
        }
        return true;
    }

    void solve(std::vector<std::uint64_t>& x) const {
        for (int i = 0; i < n; ++i) {
            std::uint64_t acc = x[i];
            const int j0 = std::max(0, i - kl);
            for (int j = j0; j < i; ++j) {
                const std::uint64_t sub = mulmod(
                    band[static_cast<std::size_t>(i) * (kl + ku + 1) + (j - i + kl)], x[j], p);
                acc = (acc >= sub) ? acc - sub : acc + p - sub;
            }
            x[i] = acc;
        }
        for (int i = n - 1; i >= 0; --i) {
            std::uint64_t acc = x[i];
            const int jmax = std::min(n - 1, i + ku);
            for (int j = i + 1; j <= jmax; ++j) {
                const std::uint64_t sub = mulmod(
                    band[static_cast<std::size_t>(i) * (kl + ku + 1) + (j - i + kl)], x[j], p);
                acc = (acc >= sub) ? acc - sub : acc + p - sub;
            }
            const std::uint64_t piv =
                band[static_cast<std::size_t>(i) * (kl + ku + 1) + kl];
            x[i] = mulmod(acc, powmod(piv, p - 2, p), p);
        }
    }
};

// Rational reconstruction of v mod modulus; returns false if no small
// representative exists yet.
bool reconstruct(const mpz_class& v, const mpz_class& modulus, Rational& out) {
    mpz_class bound;
    mpz_sqrt(bound.get_mpz_t(), mpz_class(modulus / 2).get_mpz_t());
    mpz_class r0 = modulus, r1 = v % modulus;
    if (r1 < 0) r1 += modulus;
    mpz_class t0 = 0, t1 = 1;
    while (r1 > bound) {
        mpz_class q = r0 / r1;
        mpz_class r2 = r0 - q * r1;
        mpz_class t2 = t0 - q * t1;
        r0 = r1; r1 = r2;
        t0 = t1; t1 = t2;
    }
    if (t1 == 0) return false;
    mpz_class den = t1, num = r1;
    if (den < 0) { den = -den; num = -num; }
    if (den > bound) return false;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    if (g != 1) { num /= g; den /= g; }
    out = Rational(num, den);
    out.canonicalize();
    return true;
}

}  // namespace

std::vector<Rational> solve_sparse_exact(const SparseIntSystem& a,
                                         const std::vector<Rational>& b) {
    const int n = a.n;
    if (static_cast<int>(b.size()) != n || static_cast<int>(a.rows.size()) != n) {
        throw std::invalid_argument("system size mismatch");
    }

    // Clear rhs denominators so the lifting runs over integers.
    mpz_class scale = 1;
    for (const auto& v : b) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), v.get_den_mpz_t());
    std::vector<mpz_class> rhs(n);
    for (int i = 0; i < n; ++i) {
        rhs[i] = b[i].get_num() * (scale / b[i].get_den());
    }

    int kl = 0, ku = 0;
    for (int i = 0; i < n; ++i) {
        for (const auto& [j, v] : a.rows[i]) {
            kl = std::max(kl, i - j);
            ku = std::max(ku, j - i);
        }
    }

    for (std::uint64_t p : kPrimes) {
        ModBandLU lu{n, kl, ku, p,
                     std::vector<std::uint64_t>(static_cast<std::size_t>(n) * (kl + ku + 1), 0)};
        for (int i = 0; i < n; ++i) {
            for (const auto& [j, v] : a.rows[i]) {
                const std::int64_t vv = v % static_cast<std::int64_t>(p);
                lu.at(i, j) = static_cast<std::uint64_t>(vv >= 0 ? vv : vv + static_cast<std::int64_t>(p));
            }
        }
        if (!lu.factor()) continue;

        const mpz_class pz(static_cast<unsigned long>(p));
        std::vector<mpz_class> residue = rhs;
        std::vector<mpz_class> solution(n, 0);
        mpz_class modulus = 1;

        // Hadamard-style cap on the digit count, with slack for the rhs.
        double log2det = 0;
        for (int i = 0; i < n; ++i) {
            double s = 0;
            for (const auto& [j, v] : a.rows[i]) s += static_cast<double>(v) * v;
            log2det += 0.5 * std::log2(std::max(2.0, s));
        }
        std::size_t rhs_bits = 1;
        for (const auto& v : rhs) rhs_bits = std::max(rhs_bits, mpz_sizeinbase(v.get_mpz_t(), 2));
        const std::uint64_t max_digits =
            8 + 2 * static_cast<std::uint64_t>((log2det + rhs_bits + 64) / 61.0 + 1);

        std::vector<std::uint64_t> digit(n);
        std::uint64_t next_check = 1;
        for (std::uint64_t step = 0; step < max_digits; ++step) {
            for (int i = 0; i < n; ++i) {
                mpz_class m = residue[i] % pz;
                if (m < 0) m += pz;
                digit[i] = m.get_ui();
            }
            lu.solve(digit);
            for (int i = 0; i < n; ++i) {
                mpz_class d(static_cast<unsigned long>(digit[i]));
                solution[i] += d * modulus;
            }
            // residue <- (residue - A * digit) / p, exactly
            for (int i = 0; i < n; ++i) {
                mpz_class acc = residue[i];
                for (const auto& [j, v] : a.rows[i]) {
                    acc -= mpz_class(static_cast<unsigned long>(digit[j])) * v;
                }
                mpz_divexact(residue[i].get_mpz_t(), acc.get_mpz_t(), pz.get_mpz_t());
            }
            modulus *= pz;

            bool all_zero = true;
            for (int i = 0; i < n && all_zero; ++i) all_zero = (residue[i] == 0);
            if (!all_zero && step + 1 != next_check && step + 1 < max_digits) continue;
            next_check *= 2;

            std::vector<Rational> candidate(n);
            bool ok = true;
            if (all_zero) {
                for (int i = 0; i < n; ++i) candidate[i] = Rational(solution[i]);
            } else {
                for (int i = 0; i < n && ok; ++i) {
                    ok = reconstruct(solution[i], modulus, candidate[i]);
                }
            }
            if (!ok) continue;
            // exact verification of A * candidate == scaled rhs
            bool verified = true;
            for (int i = 0; i < n && verified; ++i) {
                Rational acc = 0;
                for (const auto& [j, v] : a.rows[i]) acc += candidate[j] * v;
                verified = (acc == Rational(rhs[i]));
            }
            if (verified) {
                for (auto& v : candidate) {
                    v /= Rational(scale);
                    v.canonicalize();
                }
                return candidate;
            }
            if (all_zero) break;  // integer residue exhausted but wrong: bad prime
        }
    }
    throw std::runtime_error("exact sparse solve failed: no prime admitted an LU factorization");
}

BandedLU::BandedLU(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku),
      band_(static_cast<std::size_t>(n) * (kl + ku + 1), 0.0) {}

double& BandedLU::at(int row, int col) {
    const int off = col - row;
    if (off < -kl_ || off > ku_) throw std::out_of_range("outside band");
    return band_[static_cast<std::size_t>(row) * (kl_ + ku_ + 1) + (off + kl_)];
}

void BandedLU::factor() {
    const int w = kl_ + ku_ + 1;
    for (int k = 0; k < n_; ++k) {
        const double piv = band_[static_cast<std::size_t>(k) * w + kl_];
        if (piv == 0.0) throw std::runtime_error("zero pivot in banded LU");
        const int imax = std::min(n_ - 1, k + kl_);
        for (int i = k + 1; i <= imax; ++i) {
            double& lik = band_[static_cast<std::size_t>(i) * w + (k - i + kl_)];
            if (lik == 0.0) continue;
            const double f = lik / piv;
            lik = f;
            const int jmax = std::min(n_ - 1, k + ku_);
            for (int j = k + 1; j <= jmax; ++j) {
                band_[static_cast<std::size_t>(i) * w + (j - i + kl_)] -=
                    f * band_[static_cast<std::size_t>(k) * w + (j - k + kl_)];
            }
        }
    }
    factored_ = true;
}

void BandedLU::solve(std::vector<double>& rhs) const {
    if (!factored_) throw std::logic_error("factor() must run before solve()");
    if (static_cast<int>(rhs.size()) != n_) throw std::invalid_argument("rhs size mismatch");
    const int w = kl_ + ku_ + 1;
    for (int i = 0; i < n_; ++i) {
        double acc = rhs[i];
        const int j0 = std::max(0, i - kl_);
        for (int j = j0; j < i; ++j) {
            acc -= band_[static_cast<std::size_t>(i) * w + (j - i + kl_)] * rhs[j];
        }
        rhs[i] = acc;
    }
    for (int i = n_ - 1; i >= 0; --i) {
        double acc = rhs[i];
        const int jmax = std::min(n_ - 1, i + ku_);
        for (int j = i + 1; j <= jmax; ++j) {
            acc -= band_[static_cast<std::size_t>(i) * w + (j - i + kl_)] * rhs[j];
        }
        rhs[i] = acc / band_[static_cast<std::size_t>(i) * w + kl_];
    }
}

}  // namespace tietime
