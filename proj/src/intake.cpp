#include "drplan/intake.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace drplan {

int effective_jobs(int jobs) {
#ifdef _OPENMP
    if (jobs > 0) return jobs;
    return omp_get_max_threads();
#else
    (void)jobs;
    return 1;
#endif
}

// ---------------------------------------------------------------------------
// Intake space

IntakeSpace::IntakeSpace(std::vector<int> intake_max) : intake_max_(std::move(intake_max)) {
    size_ = space_cardinality(intake_max_);
    stride_.assign(intake_max_.size(), 1);
    for (int d = static_cast<int>(intake_max_.size()) - 2; d >= 0; --d)
        stride_[d] = stride_[d + 1] * (intake_max_[d + 1] + 1);
}

std::int64_t space_cardinality(std::span<const int> intake_max) {
    std::int64_t size = 1;
    for (int m : intake_max) {
        if (m < 0) throw std::invalid_argument("intake_max entries must be >= 0");
        std::int64_t f = static_cast<std::int64_t>(m) + 1;
        if (size > std::numeric_limits<std::int64_t>::max() / f)
            throw std::overflow_error("intake space cardinality overflows int64");
        size *= f;
    }
    return size;
}

void IntakeSpace::decode(std::int64_t index, std::span<int> out) const {
    for (size_t d = 0; d < intake_max_.size(); ++d) {
        out[d] = static_cast<int>(index / stride_[d]);
        index %= stride_[d];
    }
}

std::int64_t IntakeSpace::encode(std::span<const int> intake) const {
    std::int64_t index = 0;
    for (size_t d = 0; d < intake_max_.size(); ++d) index += stride_[d] * intake[d];
    return index;
}

void IntakeSpace::for_each(
    const std::function<void(std::int64_t, std::span<const int>)>& fn) const {
    std::vector<int> cur(intake_max_.size(), 0);
    for (std::int64_t j = 0; j < size_; ++j) {
        fn(j, cur);
        // lexicographic increment, last day fastest
        for (int d = static_cast<int>(cur.size()) - 1; d >= 0; --d) {
            if (cur[d] < intake_max_[d]) {
                ++cur[d];
                break;
            }
            cur[d] = 0;
        }
    }
}

// ---------------------------------------------------------------------------
// Binomial machinery

double binomial_pmf(int n, double p, int k) {
    if (n < 0 || k < 0 || k > n) throw std::invalid_argument("binomial_pmf: need 0 <= k <= n");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial_pmf: need p in [0,1]");
    if (p == 0.0) return k == 0 ? 1.0 : 0.0;
    if (p == 1.0) return k == n ? 1.0 : 0.0;
    double value = std::pow(1.0 - p, n);
    const double ratio = p / (1.0 - p);
    for (int j = 0; j < k; ++j) value *= ratio * static_cast<double>(n - j) / (j + 1);
    return value;
}

std::vector<double> binomial_pmf_table(int n, double p) {
    if (n < 0) throw std::invalid_argument("binomial_pmf_table: need n >= 0");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("binomial_pmf_table: need p in [0,1]");
    std::vector<double> table(n + 1, 0.0);
    if (p == 0.0) {
        table[0] = 1.0;
        return table;
    }
    if (p == 1.0) {
        table[n] = 1.0;
        return table;
    }
    table[0] = std::pow(1.0 - p, n);
    const double ratio = p / (1.0 - p);
    for (int k = 0; k < n; ++k) table[k + 1] = table[k] * ratio * static_cast<double>(n - k) / (k + 1);
    return table;
}

double joint_pmf(std::span<const double> p, std::span<const int> intake_max,
                 std::span<const int> intake) {
    if (p.size() != intake_max.size() || intake.size() != intake_max.size())
        throw std::invalid_argument("joint_pmf: length mismatch");
    double prod = 1.0;
    for (size_t d = 0; d < p.size(); ++d) prod *= binomial_pmf(intake_max[d], p[d], intake[d]);
    return prod;
}

std::vector<double> mle_success_probs(std::span<const std::vector<int>> samples,
                                      std::span<const int> intake_max) {
    if (samples.empty()) throw std::invalid_argument("mle_success_probs: no samples");
    const size_t dims = intake_max.size();
    std::vector<long long> sums(dims, 0);
    for (const auto& s : samples) {
        if (s.size() != dims) throw std::invalid_argument("mle_success_probs: sample length");
        for (size_t d = 0; d < dims; ++d) {
            if (s[d] < 0 || s[d] > intake_max[d])
                throw std::invalid_argument("mle_success_probs: sample outside [0, i_max]");
            sums[d] += s[d];
        }
    }
    std::vector<double> p_hat(dims, 0.0);
    for (size_t d = 0; d < dims; ++d) {
        if (intake_max[d] > 0)
            p_hat[d] = static_cast<double>(sums[d]) /
                       (static_cast<double>(samples.size()) * intake_max[d]);
    }
    return p_hat;
}

// ---------------------------------------------------------------------------
// Chi-square quantile via the regularised incomplete gamma function

namespace {

// Lower regularised incomplete gamma P(a, x): series for x < a+1, continued
// fraction (modified Lentz) otherwise.
double gamma_p(double a, double x) {
    if (x <= 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int n = 0; n < 1000; ++n) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int n = 1; n < 1000; ++n) {
        double an = -n * (n - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    double q = std::exp(-x + a * std::log(x) - lg) * h;
    return 1.0 - q;
}

}  // namespace

double chi_square_quantile(int dof, double prob) {
    if (dof < 1) throw std::invalid_argument("chi_square_quantile: dof must be >= 1");
    if (!(prob > 0.0 && prob < 1.0))
        throw std::invalid_argument("chi_square_quantile: prob must lie in (0,1)");
    const double a = 0.5 * dof;
    auto cdf = [&](double x) { return gamma_p(a, 0.5 * x); };
    double lo = 0.0;
    double hi = std::max(4.0 * dof, 16.0);
    while (cdf(hi) < prob) hi *= 2.0;
    for (int it = 0; it < 300; ++it) {
        double mid = 0.5 * (lo + hi);
        if (cdf(mid) < prob)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-14 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Ambiguity sets

ParametricAmbiguitySet::ParametricAmbiguitySet(std::vector<std::vector<double>> members,
                                               AmbiguityMeta meta)
    : members_(std::move(members)), meta_(std::move(meta)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    for (const auto& m : members_)
        for (double v : m)
            if (!(v >= 0.0 && v <= 1.0))
                throw std::invalid_argument("ambiguity member coordinate outside [0,1]");
}

bool ParametricAmbiguitySet::contains(std::span<const double> p) const {
    std::vector<double> key(p.begin(), p.end());
    return std::binary_search(members_.begin(), members_.end(), key);
}

BaseGrid::BaseGrid(int n_probs, int dims) : n_probs_(n_probs), dims_(dims) {
    if (n_probs < 1) throw std::invalid_argument("base grid: n_probs must be >= 1");
    if (dims < 1) throw std::invalid_argument("base grid: dims must be >= 1");
    count_ = 1;
    for (int d = 0; d < dims; ++d) {
        std::int64_t f = n_probs + 1;
        if (count_ > std::numeric_limits<std::int64_t>::max() / f)
            throw std::overflow_error("base grid cardinality overflows int64");
        count_ *= f;
    }
}

std::vector<double> BaseGrid::member(std::int64_t index) const {
    std::vector<double> p(dims_);
    for (int d = dims_ - 1; d >= 0; --d) {
        p[d] = static_cast<double>(index % (n_probs_ + 1)) / n_probs_;
        index /= (n_probs_ + 1);
    }
    return p;
}

void BaseGrid::for_each(const std::function<void(std::span<const double>)>& fn) const {
    std::vector<int> j(dims_, 0);
    std::vector<double> p(dims_, 0.0);
    for (std::int64_t k = 0; k < count_; ++k) {
        for (int d = 0; d < dims_; ++d) p[d] = static_cast<double>(j[d]) / n_probs_;
        fn(p);
        for (int d = dims_ - 1; d >= 0; --d) {
            if (j[d] < n_probs_) {
                ++j[d];
                break;
            }
            j[d] = 0;
        }
    }
}

BaseGrid build_base_grid(int n_probs, int dims) { return BaseGrid(n_probs, dims); }

namespace {

struct ConfidenceSpec {
    int dims;
    int n_probs;
    double threshold;
    std::vector<double> weight;           // N i_max / (p_hat (1 - p_hat)), 0 when i_max = 0
    std::vector<double> p_hat;
    std::vector<std::pair<int, int>> jr;  // per-coordinate candidate range [lo, hi]
};

// Enumerates grid points with coordinate d >= start fixed prefix cost acc,
// appending full vectors to out.
void enumerate_confidence(const ConfidenceSpec& spec, int d, double acc, std::vector<double>& cur,
                          std::vector<std::vector<double>>& out) {
    if (d == spec.dims) {
        out.push_back(cur);
        return;
    }
    for (int j = spec.jr[d].first; j <= spec.jr[d].second; ++j) {
        double pj = static_cast<double>(j) / spec.n_probs;
        double diff = spec.p_hat[d] - pj;
        double term = spec.weight[d] * diff * diff;
        if (acc + term > spec.threshold) continue;
        cur[d] = pj;
        enumerate_confidence(spec, d + 1, acc + term, cur, out);
    }
}

}  // namespace

std::vector<double> clamp_mle(std::span<const double> p_hat, int sample_count,
                              std::span<const int> intake_max) {
    std::vector<double> out(p_hat.begin(), p_hat.end());
    for (size_t d = 0; d < out.size(); ++d) {
        if (intake_max[d] <= 0) continue;
        double margin = 1.0 / (2.0 * sample_count * intake_max[d]);
        out[d] = std::clamp(out[d], margin, 1.0 - margin);
    }
    return out;
}

ParametricAmbiguitySet build_confidence_set(std::span<const double> p_hat, int sample_count,
                                            std::span<const int> intake_max, double alpha,
                                            int n_probs, ExecPolicy policy) {
    const int dims = static_cast<int>(p_hat.size());
    if (intake_max.size() != p_hat.size())
        throw std::invalid_argument("confidence set: length mismatch");
    if (sample_count < 1) throw std::invalid_argument("confidence set: need N >= 1");
    if (n_probs < 1) throw std::invalid_argument("confidence set: need n_probs >= 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("confidence set: alpha must lie in (0,1)");

    ConfidenceSpec spec;
    spec.dims = dims;
    spec.n_probs = n_probs;
    spec.threshold = chi_square_quantile(dims, 1.0 - alpha);
    spec.p_hat.assign(p_hat.begin(), p_hat.end());
    spec.weight.resize(dims);
    for (int d = 0; d < dims; ++d) {
        if (intake_max[d] == 0) {
            spec.weight[d] = 0.0;  // degenerate day, no information in p_d
            continue;
        }
        double denom = p_hat[d] * (1.0 - p_hat[d]);
        if (denom <= 0.0)
            throw std::invalid_argument(
                "confidence set: p_hat on the boundary {0,1}; clamp the MLE first "
                "(see clamp_mle)");
        spec.weight[d] = static_cast<double>(sample_count) * intake_max[d] / denom;
    }

    // Per-coordinate pruning: keep j only while the single-coordinate term
    // already fits under the threshold. Days with zero weight are pinned to
    // the grid value nearest p_hat (every value is observationally identical).
    spec.jr.resize(dims);
    bool any_empty = false;
    for (int d = 0; d < dims; ++d) {
        if (spec.weight[d] == 0.0) {
            int j = static_cast<int>(std::lround(spec.p_hat[d] * n_probs));
            j = std::clamp(j, 0, n_probs);
            spec.jr[d] = {j, j};
            continue;
        }
        double radius = std::sqrt(spec.threshold / spec.weight[d]);
        int lo = static_cast<int>(std::ceil((spec.p_hat[d] - radius) * n_probs - 1e-12));
        int hi = static_cast<int>(std::floor((spec.p_hat[d] + radius) * n_probs + 1e-12));
        lo = std::max(lo, 0);
        hi = std::min(hi, n_probs);
        spec.jr[d] = {lo, hi};
        if (lo > hi) any_empty = true;
    }

    AmbiguityMeta meta;
    meta.n_probs = n_probs;
    meta.sample_count = sample_count;
    meta.alpha = alpha;
    meta.p_hat.assign(p_hat.begin(), p_hat.end());

    std::vector<std::vector<double>> members;
    if (!any_empty) {
        if (policy == ExecPolicy::parallel && dims >= 2) {
            const int lo = spec.jr[0].first, hi = spec.jr[0].second;
            std::vector<std::vector<std::vector<double>>> slices(hi - lo + 1);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
            for (int j = lo; j <= hi; ++j) {
                double pj = static_cast<double>(j) / n_probs;
                double diff = spec.p_hat[0] - pj;
                double term = spec.weight[0] * diff * diff;
                if (term > spec.threshold) continue;
                std::vector<double> cur(dims);
                cur[0] = pj;
                enumerate_confidence(spec, 1, term, cur, slices[j - lo]);
            }
            for (auto& s : slices)
                members.insert(members.end(), std::make_move_iterator(s.begin()),
                               std::make_move_iterator(s.end()));
        } else {
            std::vector<double> cur(dims);
            enumerate_confidence(spec, 0, 0.0, cur, members);
        }
    }

    if (members.empty()) {
        // Nearest grid point(s) per coordinate; ties keep both neighbours.
        meta.nearest_fallback = true;
        std::vector<std::vector<double>> coord_choices(dims);
        for (int d = 0; d < dims; ++d) {
            double scaled = spec.p_hat[d] * n_probs;
            int lo = std::clamp(static_cast<int>(std::floor(scaled)), 0, n_probs);
            int hi = std::clamp(static_cast<int>(std::ceil(scaled)), 0, n_probs);
            double dl = std::fabs(spec.p_hat[d] - static_cast<double>(lo) / n_probs);
            double dh = std::fabs(spec.p_hat[d] - static_cast<double>(hi) / n_probs);
            if (std::fabs(dl - dh) < 1e-12) {
                coord_choices[d].push_back(static_cast<double>(lo) / n_probs);
                if (hi != lo) coord_choices[d].push_back(static_cast<double>(hi) / n_probs);
            } else {
                int j = dl < dh ? lo : hi;
                coord_choices[d].push_back(static_cast<double>(j) / n_probs);
            }
        }
        std::vector<double> cur(dims);
        std::function<void(int)> rec = [&](int d) {
            if (d == dims) {
                members.push_back(cur);
                return;
            }
            for (double v : coord_choices[d]) {
                cur[d] = v;
                rec(d + 1);
            }
        };
        rec(0);
    }

    return ParametricAmbiguitySet(std::move(members), std::move(meta));
}

ParametricAmbiguitySet build_extreme_set(const ParametricAmbiguitySet& theta) {
    if (theta.empty()) throw std::invalid_argument("extreme set: theta is empty");
    const int dims = static_cast<int>(theta.member(0).size());
    std::vector<std::vector<double>> out;
    for (int d = 0; d < dims; ++d) {
        double pmax = -1.0;
        for (const auto& m : theta.members()) pmax = std::max(pmax, m[d]);
        double best_sum = -1.0;
        for (const auto& m : theta.members()) {
            if (m[d] != pmax) continue;
            double s = 0.0;
            for (double v : m) s += v;
            best_sum = std::max(best_sum, s);
        }
        for (const auto& m : theta.members()) {
            if (m[d] != pmax) continue;
            double s = 0.0;
            for (double v : m) s += v;
            if (s == best_sum) out.push_back(m);
        }
    }
    AmbiguityMeta meta = theta.meta();
    return ParametricAmbiguitySet(std::move(out), std::move(meta));
}

ReducedIntakeSet reduce_intake_set(const ParametricAmbiguitySet& theta,
                                   std::span<const int> intake_max, double beta,
                                   ExecPolicy policy) {
    if (theta.empty()) throw std::invalid_argument("reduce_intake_set: theta is empty");
    if (!(beta >= 0.0 && beta < 1.0))
        throw std::invalid_argument("reduce_intake_set: beta must lie in [0,1)");
    const int dims = static_cast<int>(intake_max.size());
    IntakeSpace space(std::vector<int>(intake_max.begin(), intake_max.end()));

    // One pmf table per (day, distinct p value); members share tables.
    std::vector<std::map<double, std::vector<double>>> day_tables(dims);
    std::vector<std::vector<const std::vector<double>*>> tables(theta.size());
    for (size_t k = 0; k < theta.size(); ++k) {
        tables[k].resize(dims);
        for (int d = 0; d < dims; ++d) {
            double p = theta.member(k)[d];
            auto [it, inserted] = day_tables[d].try_emplace(p);
            if (inserted) it->second = binomial_pmf_table(intake_max[d], p);
            tables[k][d] = &it->second;
        }
    }

    const std::int64_t n = space.size();
    std::vector<char> keep(n, 0);
    auto scan = [&](std::int64_t j, std::vector<int>& buf) {
        space.decode(j, buf);
        for (size_t k = 0; k < theta.size(); ++k) {
            double prob = 1.0;
            for (int d = 0; d < dims; ++d) prob *= (*tables[k][d])[buf[d]];
            if (prob > beta) return true;
        }
        return false;
    };

    if (policy == ExecPolicy::parallel) {
#ifdef _OPENMP
#pragma omp parallel
        {
            std::vector<int> buf(dims);
#pragma omp for schedule(static)
            for (std::int64_t j = 0; j < n; ++j) keep[j] = scan(j, buf) ? 1 : 0;
        }
#else
        std::vector<int> buf(dims);
        for (std::int64_t j = 0; j < n; ++j) keep[j] = scan(j, buf) ? 1 : 0;
#endif
    } else {
        std::vector<int> buf(dims);
        for (std::int64_t j = 0; j < n; ++j) keep[j] = scan(j, buf) ? 1 : 0;
    }

    ReducedIntakeSet reduced;
    reduced.beta = beta;
    for (std::int64_t j = 0; j < n; ++j)
        if (keep[j]) reduced.retained.push_back(j);
    if (reduced.retained.empty())
        throw std::invalid_argument("reduce_intake_set: beta removed every intake");
    return reduced;
}

}  // namespace drplan
