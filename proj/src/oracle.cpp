#include "pairorth/oracle.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "pairorth/metrics.hpp"
#include "pairorth/tolerances.hpp"

namespace pairorth::oracle {

template <FieldScalar T>
OneStepExpectation exact_one_step_expectation(const ColumnMatrix<T>& a) {
    const std::size_t n = a.dim();
    if (n > 8) throw UsageError("exact_one_step_expectation: n must be at most 8");
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            total += potential_phi(orth_step(a, {i, j}));
            ++count;
        }
    }
    return {total / static_cast<double>(count), count};
}

template <FieldScalar T>
double brute_force_distance(const ColumnMatrix<T>& a, std::size_t j) {
    const std::size_t n = a.dim();
    if (j >= n) throw UsageError("brute_force_distance: column index out of range");

    auto project_out = [](DenseVector<T>& v, const std::vector<DenseVector<T>>& basis) {
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : basis) v -= inner(v, q) * q;
        }
    };

    std::vector<DenseVector<T>> basis;
    basis.reserve(n - 1);
    for (std::size_t k = 0; k < n; ++k) {
        if (k == j) continue;
        DenseVector<T> v = a.column(k);
        project_out(v, basis);
        const double norm = v.norm();
        if (!(norm > 1e-14)) {
            throw SingularityError(k, "Gram-Schmidt breakdown at column " + std::to_string(k));
        }
        basis.push_back(v / norm);
    }
    DenseVector<T> r = a.column(j);
    project_out(r, basis);
    return r.norm();
}

template <FieldScalar T>
Lemma3Report verify_lemma3(const ColumnMatrix<T>& a, PairIndex pair) {
    Lemma3Report rep;
    const auto update = orth_update(a, pair);
    rep.d_before = leave_one_out_distances(a);
    rep.d_after = leave_one_out_distances(update.matrix);
    rep.inner_abs = update.inner_abs;
    rep.monotone_margin = (rep.d_after - rep.d_before).minCoeff();
    const double shrink = std::sqrt((1.0 - rep.inner_abs) * (1.0 + rep.inner_abs));
    const auto i = static_cast<Eigen::Index>(pair.i);
    rep.ratio_margin = rep.d_after(i) - rep.d_before(i) / shrink;
    for (double d : rep.d_before) rep.phi_before -= std::log(d);
    for (double d : rep.d_after) rep.phi_after -= std::log(d);
    rep.pass = rep.monotone_margin >= -tol::kMonotonicity && rep.ratio_margin >= -tol::kMonotonicity;
    return rep;
}

BoundId parse_bound_id(std::string_view name) {
    if (name == "c_n") return BoundId::c_n;
    if (name == "inflection") return BoundId::inflection;
    if (name == "f_map") return BoundId::f_map;
    if (name == "theorem7") return BoundId::theorem7;
    if (name == "kappa_lower") return BoundId::kappa_lower;
    if (name == "kappa_upper_loose") return BoundId::kappa_upper_loose;
    if (name == "kappa_upper_tight") return BoundId::kappa_upper_tight;
    if (name == "stopping_threshold") return BoundId::stopping_threshold;
    if (name == "stopping_tail_prob") return BoundId::stopping_tail_prob;
    if (name == "prop_a0") return BoundId::prop_a0;
    if (name == "theorem1_steps") return BoundId::theorem1_steps;
    throw UsageError("unknown bound '" + std::string(name) + "'");
}

namespace {

using Big = boost::multiprecision::cpp_dec_float_50;

Big ln2() { return log(Big(2)); }

Big inflection(int n) { return ln2() / 2 * n; }

Big c_n(int n) {
    const Big nd = n;
    return 2 * ln2() * ln2() * nd * nd * (nd - 1) * (nd - 1);
}

// Same rounding contract as the double path: within 1e-12 relative of an
// integer counts as that integer.
Big ceil_exactish(const Big& x) {
    const Big r = round(x);
    if (abs(x - r) <= Big("1e-12") * (abs(x) > 1 ? abs(x) : Big(1))) return r;
    return ceil(x);
}

}  // namespace

double highprec_bound_reference(BoundId id, const BoundArgs& args) {
    if (args.n < 2) throw UsageError("dimension must be at least 2");
    const Big n = args.n;
    const Big x = args.x;
    const Big t = args.t;
    Big value;
    switch (id) {
        case BoundId::c_n:
            value = c_n(args.n);
            break;
        case BoundId::inflection:
            value = inflection(args.n);
            break;
        case BoundId::f_map: {
            const Big gap = 1 - exp(-2 * x / n);
            value = x - gap * gap / (2 * (n - 1) * (n - 1));
            break;
        }
        case BoundId::theorem7: {
            if (x < inflection(args.n)) {
                const Big c = c_n(args.n);
                value = c / (c + x * t) * x;
            } else {
                const Big n3 = n * n * n;
                const Big tail = n * n3 / (2 / ln2() * n3 + t / 2);
                value = tail + (x - tail) * exp(-t / (47 * n * n * x));
            }
            break;
        }
        case BoundId::kappa_lower:
            value = exp(x / n);
            break;
        case BoundId::kappa_upper_loose:
            value = n * exp(x);
            break;
        case BoundId::kappa_upper_tight: {
            if (!(2 * x < 1)) throw UsageError("kappa_upper_tight requires 2 phi < 1");
            const Big r = sqrt(2 * x);
            value = (1 + r) / (1 - r);
            break;
        }
        case BoundId::stopping_threshold:
            value = ceil_exactish(Big(args.c) * 16 * (n - 1) * (n - 1) * x);
            break;
        case BoundId::stopping_tail_prob:
            value = pow(Big(2), -args.c);
            break;
        case BoundId::prop_a0:
            value = log(n) + x - (1 - inflection(args.n) / x) * t / (96 * n * n);
            break;
        case BoundId::theorem1_steps: {
            const Big eps = args.eps;
            const Big delta = args.delta;
            const Big log_term = log(7 * x / n);
            const Big first = log_term > 0 ? 200 * n * n * x * log_term : Big(0);
            const Big second = 48 * n * n * n * n / (delta * eps * eps);
            value = ceil_exactish(first > second ? first : second);
            break;
        }
    }
    return value.convert_to<double>();
}

#define PAIRORTH_INSTANTIATE(T)                                                           \
    template OneStepExpectation exact_one_step_expectation(const ColumnMatrix<T>&);      \
    template double brute_force_distance(const ColumnMatrix<T>&, std::size_t);           \
    template Lemma3Report verify_lemma3(const ColumnMatrix<T>&, PairIndex);

PAIRORTH_INSTANTIATE(double)
PAIRORTH_INSTANTIATE(std::complex<double>)

#undef PAIRORTH_INSTANTIATE

}  // namespace pairorth::oracle
