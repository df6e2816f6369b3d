#include "tietime/series.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "tietime/polynomial.hpp"

namespace tietime {

namespace {

int total_degree(const std::vector<int>& e) {
    return std::accumulate(e.begin(), e.end(), 0);
}

// All exponent vectors with total degree <= max_total, in a fixed order.
void enumerate_exponents(int vars, int max_total,
                         const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> e(vars, 0);
    std::function<void(int, int)> rec = [&](int slot, int budget) {
        if (slot == vars) {
            fn(e);
            return;
        }
        for (int d = 0; d <= budget; ++d) {
            e[slot] = d;
            rec(slot + 1, budget - d);
        }
        e[slot] = 0;
    };
    rec(0, max_total);
}

}  // namespace

MultiSeries MultiSeries::constant(int var_count, int degree_cap, const Rational& c) {
    MultiSeries s(var_count, degree_cap);
    s.add_coefficient(std::vector<int>(var_count, 0), c);
    return s;
}

MultiSeries MultiSeries::monomial(std::vector<int> exponents, const Rational& c,
                                  int degree_cap) {
    MultiSeries s(static_cast<int>(exponents.size()), degree_cap);
    s.add_coefficient(std::move(exponents), c);
    return s;
}

Rational MultiSeries::coefficient(const std::vector<int>& exponents) const {
    auto it = coeffs_.find(exponents);
    return it == coeffs_.end() ? Rational(0) : it->second;
}

void MultiSeries::add_coefficient(std::vector<int> exponents, const Rational& c) {
    if (static_cast<int>(exponents.size()) != vars_) {
        throw std::invalid_argument("exponent vector length mismatch");
    }
    if (c == 0 || total_degree(exponents) > cap_) return;
    auto it = coeffs_.find(exponents);
    if (it == coeffs_.end()) {
        coeffs_.emplace(std::move(exponents), c);
    } else {
        it->second += c;
        if (it->second == 0) coeffs_.erase(it);
    }
}

MultiSeries MultiSeries::truncated(int new_cap) const {
    MultiSeries out(vars_, new_cap);
    for (const auto& [e, c] : coeffs_) out.add_coefficient(e, c);
    return out;
}

MultiSeries& MultiSeries::operator+=(const MultiSeries& rhs) {
    for (const auto& [e, c] : rhs.coeffs_) add_coefficient(e, c);
    return *this;
}

MultiSeries& MultiSeries::operator-=(const MultiSeries& rhs) {
    for (const auto& [e, c] : rhs.coeffs_) add_coefficient(e, -c);
    return *this;
}

MultiSeries MultiSeries::operator+(const MultiSeries& rhs) const {
    MultiSeries out = *this;
    out += rhs;
    return out;
}

MultiSeries MultiSeries::operator-(const MultiSeries& rhs) const {
    MultiSeries out = *this;
    out -= rhs;
    return out;
}

MultiSeries MultiSeries::operator*(const MultiSeries& rhs) const {
    if (vars_ != rhs.vars_) throw std::invalid_argument("variable count mismatch");
    MultiSeries out(vars_, std::min(cap_, rhs.cap_));
    for (const auto& [ea, ca] : coeffs_) {
        const int da = total_degree(ea);
        for (const auto& [eb, cb] : rhs.coeffs_) {
            if (da + total_degree(eb) > out.cap_) continue;
            std::vector<int> e(vars_);
            for (int i = 0; i < vars_; ++i) e[i] = ea[i] + eb[i];
            out.add_coefficient(std::move(e), ca * cb);
        }
    }
    return out;
}

MultiSeries MultiSeries::scaled(const Rational& c) const {
    MultiSeries out(vars_, cap_);
    if (c == 0) return out;
    for (const auto& [e, coef] : coeffs_) out.add_coefficient(e, coef * c);
    return out;
}

Rational inv_power_coeff(Sign sign, int i, int k) {
    if (i < 0 || k < 0) throw std::invalid_argument("indices must be nonnegative");
    if (i == 0) return Rational(k == 0 ? 1 : 0);
    // binomial C(i+k-1, k), sign-alternating for the + kernel
    mpz_class binom;
    mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(i + k - 1),
                 static_cast<unsigned long>(k));
    Rational r(binom);
    if (sign == Sign::plus && (k & 1)) r = -r;
    return r;
}

MultiSeries substitute_slot(Sign sign, int slot, const MultiSeries& f) {
    if (slot < 1 || slot > f.var_count()) throw std::invalid_argument("slot out of range");
    const int s = slot - 1;
    MultiSeries out(f.var_count(), f.degree_cap());
    for (const auto& [e, c] : f.coeffs()) {
        const int base = e[s];
        const int room = f.degree_cap() - total_degree(e);
        std::vector<int> target = e;
        for (int extra = 0; extra <= room; ++extra) {
            const Rational kern = inv_power_coeff(sign, base, extra);
            if (kern != 0) {
                target[s] = base + extra;
                out.add_coefficient(target, c * kern);
            }
        }
    }
    return out;
}

bool check_commutativity(Sign sign1, int slot1, Sign sign2, int slot2,
                         const MultiSeries& f) {
    if (slot1 == slot2) throw std::invalid_argument("slots must differ");
    const MultiSeries ab = substitute_slot(sign2, slot2, substitute_slot(sign1, slot1, f));
    const MultiSeries ba = substitute_slot(sign1, slot1, substitute_slot(sign2, slot2, f));
    return ab == ba;
}

namespace {

// 1 +- u_slot as a series with the given cap.
MultiSeries one_plus(Sign sign, int slot, int vars, int cap) {
    MultiSeries p = MultiSeries::constant(vars, cap, 1);
    std::vector<int> e(vars, 0);
    e[slot - 1] = 1;
    p.add_coefficient(std::move(e), sign == Sign::plus ? Rational(1) : Rational(-1));
    return p;
}

}  // namespace

MultiSeries generator_residual(const MultiSeries& f, const Rational& gamma) {
    const int k = f.var_count();
    const int cap = f.degree_cap();
    if (k < 2) throw std::invalid_argument("need at least two reciprocal variables");
    if (cap < k) throw std::invalid_argument("degree cap too small to hold the gamma term");

    MultiSeries rhs(k, cap);
    rhs += one_plus(Sign::minus, 1, k, cap) * substitute_slot(Sign::minus, 1, f);
    for (int i = 1; i <= k - 1; ++i) {
        const MultiSeries inner =
            substitute_slot(Sign::plus, i, substitute_slot(Sign::minus, i + 1, f));
        rhs += one_plus(Sign::plus, i, k, cap) * one_plus(Sign::minus, i + 1, k, cap) * inner;
    }
    rhs += one_plus(Sign::plus, k, k, cap) * substitute_slot(Sign::plus, k, f);

    MultiSeries res = f - rhs.scaled(Rational(1, k + 1));
    res.add_coefficient(std::vector<int>(k, 1), -gamma);
    return res;
}

MultiSeries pole_ansatz_residual(const MultiSeries& g, const Rational& gamma) {
    if (g.var_count() != 3) throw std::invalid_argument("pole ansatz takes three variables");
    const int cap = g.degree_cap();

    auto mono = [&](int a, int b, int c, long coef) {
        return MultiSeries::monomial({a, b, c}, Rational(coef), cap);
    };
    const MultiSeries u_plus_w = mono(1, 0, 0, 1) + mono(0, 0, 1, 1);
    const MultiSeries plus_uw = u_plus_w + mono(1, 0, 1, 1);
    const MultiSeries minus_uw = u_plus_w - mono(1, 0, 1, 1);

    MultiSeries res(3, cap);
    // -4 (u+w+uw)(u+w-uw) g
    res += (plus_uw * minus_uw * g).scaled(-4);
    // (u+w)(u+w+uw)(1-u) g(u/(1-u), v, w)
    res += u_plus_w * plus_uw * one_plus(Sign::minus, 1, 3, cap) *
           substitute_slot(Sign::minus, 1, g);
    // (u+w)(u+w-uw)(1+u)(1-v) g(u/(1+u), v/(1-v), w)
    res += u_plus_w * minus_uw * one_plus(Sign::plus, 1, 3, cap) *
           one_plus(Sign::minus, 2, 3, cap) *
           substitute_slot(Sign::plus, 1, substitute_slot(Sign::minus, 2, g));
    // (u+w)(u+w+uw)(1+v)(1-w) g(u, v/(1+v), w/(1-w))
    res += u_plus_w * plus_uw * one_plus(Sign::plus, 2, 3, cap) *
           one_plus(Sign::minus, 3, 3, cap) *
           substitute_slot(Sign::plus, 2, substitute_slot(Sign::minus, 3, g));
    // (u+w)(u+w-uw)(1+w) g(u, v, w/(1+w))
    res += u_plus_w * minus_uw * one_plus(Sign::plus, 3, 3, cap) *
           substitute_slot(Sign::plus, 3, g);
    // + 4 gamma v (u+w)(u+w+uw)(u+w-uw)
    res += (u_plus_w * plus_uw * minus_uw * mono(0, 1, 0, 4)).scaled(gamma);
    return res;
}

namespace {

struct AssembledFamily {
    std::vector<std::vector<int>> basis;            // unknown exponents
    std::vector<std::vector<int>> equation_rows;    // residual exponents
    std::vector<std::vector<Rational>> matrix;      // equations x (basis + gamma)
    std::vector<Rational> rhs;
};

AssembledFamily assemble(int vars, int max_degree, int working_cap,
                         const std::function<MultiSeries(const MultiSeries&)>& residual_of,
                         const MultiSeries& gamma_column_series) {
    AssembledFamily fam;
    enumerate_exponents(vars, max_degree,
                        [&](const std::vector<int>& e) { fam.basis.push_back(e); });
    enumerate_exponents(vars, working_cap,
                        [&](const std::vector<int>& e) { fam.equation_rows.push_back(e); });

    const std::size_t cols = fam.basis.size() + 1;
    fam.matrix.assign(fam.equation_rows.size(), std::vector<Rational>(cols, Rational(0)));
    fam.rhs.assign(fam.equation_rows.size(), Rational(0));

    std::map<std::vector<int>, std::size_t> row_of;
    for (std::size_t r = 0; r < fam.equation_rows.size(); ++r) row_of[fam.equation_rows[r]] = r;

    for (std::size_t c = 0; c < fam.basis.size(); ++c) {
        const MultiSeries col =
            residual_of(MultiSeries::monomial(fam.basis[c], Rational(1), working_cap));
        for (const auto& [e, v] : col.coeffs()) fam.matrix[row_of.at(e)][c] = v;
    }
    for (const auto& [e, v] : gamma_column_series.coeffs()) {
        fam.matrix[row_of.at(e)][cols - 1] = v;
    }
    return fam;
}

double least_squares_residual(const std::vector<std::vector<Rational>>& a,
                              const std::vector<Rational>& b) {
    const std::size_t rows = a.size();
    const std::size_t cols = rows ? a[0].size() : 0;
    std::vector<std::vector<double>> ad(rows, std::vector<double>(cols));
    std::vector<double> bd(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        bd[i] = b[i].get_d();
        for (std::size_t j = 0; j < cols; ++j) ad[i][j] = a[i][j].get_d();
    }
    // normal equations with a tiny ridge to tolerate rank deficiency
    std::vector<std::vector<double>> n(cols, std::vector<double>(cols, 0.0));
    std::vector<double> rhs(cols, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            rhs[j] += ad[i][j] * bd[i];
            for (std::size_t l = j; l < cols; ++l) n[j][l] += ad[i][j] * ad[i][l];
        }
    }
    for (std::size_t j = 0; j < cols; ++j) {
        for (std::size_t l = 0; l < j; ++l) n[j][l] = n[l][j];
        n[j][j] += 1e-12;
    }
    // gaussian elimination with partial pivoting
    std::vector<double> x = rhs;
    for (std::size_t c = 0; c < cols; ++c) {
        std::size_t piv = c;
        for (std::size_t i = c + 1; i < cols; ++i) {
            if (std::fabs(n[i][c]) > std::fabs(n[piv][c])) piv = i;
        }
        std::swap(n[c], n[piv]);
        std::swap(x[c], x[piv]);
        if (n[c][c] == 0.0) continue;
        for (std::size_t i = c + 1; i < cols; ++i) {
            const double f = n[i][c] / n[c][c];
            if (f == 0.0) continue;
            for (std::size_t j = c; j < cols; ++j) n[i][j] -= f * n[c][j];
            x[i] -= f * x[c];
        }
    }
    for (std::size_t c = cols; c-- > 0;) {
        for (std::size_t j = c + 1; j < cols; ++j) x[c] -= n[c][j] * x[j];
        x[c] = n[c][c] == 0.0 ? 0.0 : x[c] / n[c][c];
    }
    double err = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < cols; ++j) dot += ad[i][j] * x[j];
        err += (dot - bd[i]) * (dot - bd[i]);
    }
    return err;
}

LinearFamilyResult solve_family(AssembledFamily fam, int vars, int working_cap,
                                const Rational& normalize_c) {
    const std::size_t cols = fam.basis.size() + 1;
    if (normalize_c != 0) {
        // pin the constant coefficient of the unknown series
        std::vector<Rational> row(cols, Rational(0));
        const std::vector<int> zero(vars, 0);
        for (std::size_t c = 0; c < fam.basis.size(); ++c) {
            if (fam.basis[c] == zero) row[c] = 1;
        }
        fam.matrix.push_back(std::move(row));
        fam.rhs.push_back(normalize_c);
    }

    LinearFamilyResult out;
    out.equations = fam.matrix.size();
    out.unknowns = cols;
    out.residual_norm = least_squares_residual(fam.matrix, fam.rhs);

    const RationalSystemResult sys = solve_rational_system(fam.matrix, fam.rhs);
    auto to_series = [&](const std::vector<Rational>& vec) {
        MultiSeries s(vars, working_cap);
        for (std::size_t c = 0; c < fam.basis.size(); ++c) {
            if (vec[c] != 0) s.add_coefficient(fam.basis[c], vec[c]);
        }
        return std::make_pair(s, vec[cols - 1]);
    };
    if (!sys.consistent) {
        out.status = LinearFamilyResult::Status::inconsistent;
        out.certificate = sys.certificate;
        return out;
    }
    out.status = LinearFamilyResult::Status::solved;
    auto [s, g] = to_series(sys.particular);
    out.solution = std::move(s);
    out.gamma = g;
    out.nullity = sys.nullspace.size();
    for (const auto& v : sys.nullspace) {
        out.nullspace.push_back(to_series(v));
    }
    return out;
}

}  // namespace

LinearFamilyResult solve_generator_family(int k, int max_degree,
                                          const Rational& normalize_c) {
    if (k < 2) throw std::invalid_argument("need at least two variables");
    if (max_degree < 1) throw std::invalid_argument("max_degree must be >= 1");
    const int working_cap = max_degree + 2;
    MultiSeries gamma_col(k, working_cap);
    gamma_col.add_coefficient(std::vector<int>(k, 1), Rational(-1));
    AssembledFamily fam = assemble(
        k, max_degree, working_cap,
        [](const MultiSeries& f) { return generator_residual(f, Rational(0)); }, gamma_col);
    return solve_family(std::move(fam), k, working_cap, normalize_c);
}

LinearFamilyResult solve_pole_family(int max_degree, const Rational& normalize_c) {
    if (max_degree < 1) throw std::invalid_argument("max_degree must be >= 1");
    const int working_cap = max_degree + 4;
    const MultiSeries gamma_col =
        pole_ansatz_residual(MultiSeries(3, working_cap), Rational(1));
    AssembledFamily fam = assemble(
        3, max_degree, working_cap,
        [](const MultiSeries& g) { return pole_ansatz_residual(g, Rational(0)); }, gamma_col);
    return solve_family(std::move(fam), 3, working_cap, normalize_c);
}

bool crosscheck_with_drift(const std::vector<int>& theta, const Rational& gamma,
                           int degree, const std::vector<std::vector<std::int64_t>>& test_states) {
    const int k = static_cast<int>(theta.size());
    if (k < 2) throw std::invalid_argument("need at least two variables");
    std::vector<int> h_exp(k);
    for (int i = 0; i < k; ++i) {
        if (theta[i] < 0 || theta[i] > 1) {
            throw std::invalid_argument(
                "unsupported ansatz: x_1...x_k * u^theta is not a polynomial");
        }
        h_exp[i] = 1 - theta[i];
    }
    const MultiSeries f = MultiSeries::monomial(theta, Rational(1), degree + 2);
    const bool series_zero = generator_residual(f, gamma).is_zero();

    const StatePolynomial h = StatePolynomial::monomial(h_exp, Rational(1));
    const int m = k + 1;
    bool drift_matches = true;
    for (const auto& s : test_states) {
        if (static_cast<int>(s.size()) != k) throw std::invalid_argument("bad test state size");
        if (drift_at(h, m, s) != -gamma) {
            drift_matches = false;
            break;
        }
    }
    return series_zero == drift_matches;
}

std::string series_to_json(const MultiSeries& f) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [e, c] : f.coeffs()) {
        arr.push_back({{"exponents", e}, {"coeff", rational_to_string(c)}});
    }
    return arr.dump(2);
}

MultiSeries series_from_json(const std::string& text, int degree_cap) {
    const nlohmann::json arr = nlohmann::json::parse(text);
    if (!arr.is_array() || arr.empty()) {
        throw std::invalid_argument("series file must be a nonempty JSON array");
    }
    int vars = -1;
    MultiSeries out;
    for (const auto& item : arr) {
        const auto exps = item.at("exponents").get<std::vector<int>>();
        if (vars == -1) {
            vars = static_cast<int>(exps.size());
            out = MultiSeries(vars, degree_cap);
        }
        out.add_coefficient(exps, rational_from_string(item.at("coeff").get<std::string>()));
    }
    return out;
}

}  // namespace tietime
