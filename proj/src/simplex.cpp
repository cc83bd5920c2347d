#include "drplan/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace drplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kFeasTol = 1e-7;

}  // namespace

int LinearProgram::add_var(double obj, double lo, double hi, bool integral) {
    objective.push_back(obj);
    lower.push_back(lo);
    upper.push_back(hi);
    integer.push_back(integral ? 1 : 0);
    return num_vars() - 1;
}

int LinearProgram::add_row(char row_sense, double row_rhs) {
    if (row_sense != 'L' && row_sense != 'G' && row_sense != 'E')
        throw std::invalid_argument("row sense must be one of L, G, E");
    sense.push_back(row_sense);
    rhs.push_back(row_rhs);
    return num_rows() - 1;
}

void LinearProgram::validate() const {
    if (lower.size() != objective.size() || upper.size() != objective.size() ||
        integer.size() != objective.size())
        throw std::invalid_argument("lp: variable arrays disagree in length");
    if (rhs.size() != sense.size()) throw std::invalid_argument("lp: row arrays disagree");
    for (const Entry& e : entries) {
        if (e.row < 0 || e.row >= num_rows() || e.col < 0 || e.col >= num_vars())
            throw std::invalid_argument("lp: entry outside matrix");
        if (!std::isfinite(e.value)) throw std::invalid_argument("lp: non-finite coefficient");
    }
    for (int j = 0; j < num_vars(); ++j) {
        if (!std::isfinite(objective[j])) throw std::invalid_argument("lp: non-finite objective");
        if (lower[j] > upper[j]) throw std::invalid_argument("lp: empty variable bound interval");
    }
}

namespace {

// Dense two-phase tableau simplex over the standard form produced below.
class Tableau {
  public:
    Tableau(int rows, int cols) : m_(rows), n_(cols), data_((rows + 1) * (cols + 1), 0.0) {}

    double* row(int i) { return data_.data() + static_cast<size_t>(i) * (n_ + 1); }
    const double* row(int i) const { return data_.data() + static_cast<size_t>(i) * (n_ + 1); }
    // objective row lives at index m_, rhs in column n_
    double& at(int i, int j) { return data_[static_cast<size_t>(i) * (n_ + 1) + j]; }
    double& rhs(int i) { return data_[static_cast<size_t>(i) * (n_ + 1) + n_]; }

    int rows() const { return m_; }
    int cols() const { return n_; }

    void pivot(int pr, int pc) {
        double* prow = row(pr);
        const double inv = 1.0 / prow[pc];
        for (int j = 0; j <= n_; ++j) prow[j] *= inv;
        prow[pc] = 1.0;
        for (int i = 0; i <= m_; ++i) {
            if (i == pr) continue;
            double* r = row(i);
            const double f = r[pc];
            if (f == 0.0) continue;
            for (int j = 0; j <= n_; ++j) r[j] -= f * prow[j];
            r[pc] = 0.0;
        }
    }

  private:
    int m_, n_;
    std::vector<double> data_;
};

struct StandardForm {
    // min cost'x, Ax sense b after variable shifting/splitting, x >= 0
    int num_cols = 0;  // structural columns after transform
    std::vector<double> cost;
    std::vector<std::vector<std::pair<int, double>>> col_entries;  // per column (row, value)
    std::vector<char> sense;
    std::vector<double> rhs;
    double objective_shift = 0.0;
    // mapping back: var j of the original problem -> (pos_col, neg_col, shift)
    struct VarMap {
        int pos = -1;
        int neg = -1;
        double shift = 0.0;
    };
    std::vector<VarMap> var_map;
    int original_rows = 0;
};

StandardForm standardize(const LinearProgram& lp, std::span<const double> lower,
                         std::span<const double> upper) {
    StandardForm sf;
    const int n = lp.num_vars();
    const int m = lp.num_rows();
    sf.original_rows = m;
    sf.sense.assign(lp.sense.begin(), lp.sense.end());
    sf.rhs.assign(lp.rhs.begin(), lp.rhs.end());
    sf.var_map.resize(n);

    // column-major copy of the matrix
    std::vector<std::vector<std::pair<int, double>>> cols(n);
    for (const auto& e : lp.entries) cols[e.col].push_back({e.row, e.value});

    const double sign = lp.maximize ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) {
        const double lo = lower[j];
        const double hi = upper[j];
        const double c = sign * lp.objective[j];
        if (std::isfinite(lo)) {
            // x = lo + x', x' >= 0
            sf.var_map[j].pos = sf.num_cols++;
            sf.var_map[j].shift = lo;
            sf.cost.push_back(c);
            sf.col_entries.push_back(cols[j]);
            if (lo != 0.0) {
                sf.objective_shift += c * lo;
                for (const auto& [r, v] : cols[j]) sf.rhs[r] -= v * lo;
            }
            if (std::isfinite(hi)) {
                // x' <= hi - lo as an extra row
                sf.sense.push_back('L');
                sf.rhs.push_back(hi - lo);
                sf.col_entries.back().push_back({static_cast<int>(sf.sense.size()) - 1, 1.0});
            }
        } else {
            // free below: x = x+ - x-
            sf.var_map[j].pos = sf.num_cols++;
            sf.cost.push_back(c);
            sf.col_entries.push_back(cols[j]);
            sf.var_map[j].neg = sf.num_cols++;
            sf.cost.push_back(-c);
            std::vector<std::pair<int, double>> negcol;
            for (const auto& [r, v] : cols[j]) negcol.push_back({r, -v});
            sf.col_entries.push_back(std::move(negcol));
            if (std::isfinite(hi)) {
                sf.sense.push_back('L');
                sf.rhs.push_back(hi);
                const int row = static_cast<int>(sf.sense.size()) - 1;
                sf.col_entries[sf.var_map[j].pos].push_back({row, 1.0});
                sf.col_entries[sf.var_map[j].neg].push_back({row, -1.0});
            }
        }
    }
    return sf;
}

struct SimplexCore {
    Tableau tab;
    std::vector<int> basis;       // per row: basic column
    std::vector<char> blocked;    // columns barred from entering (artificials in phase 2)
    long long iterations = 0;

    explicit SimplexCore(int m, int n) : tab(m, n), basis(m, -1) {}

    // Returns false when the phase objective is unbounded below.
    bool iterate(long long budget, bool* stalled) {
        const int m = tab.rows();
        const int n = tab.cols();
        double last_obj = tab.rhs(m);
        int stall = 0;
        bool bland = false;
        *stalled = false;
        while (true) {
            // pricing
            int pc = -1;
            const double* obj = tab.row(m);
            if (!bland) {
                double best = -kCostTol;
                for (int j = 0; j < n; ++j) {
                    if (blocked[j]) continue;
                    if (obj[j] < best) {
                        best = obj[j];
                        pc = j;
                    }
                }
            } else {
                for (int j = 0; j < n; ++j) {
                    if (blocked[j]) continue;
                    if (obj[j] < -kCostTol) {
                        pc = j;
                        break;
                    }
                }
            }
            if (pc < 0) return true;  // optimal for this phase

            // ratio test
            int pr = -1;
            double best_ratio = kInf;
            for (int i = 0; i < m; ++i) {
                const double a = tab.at(i, pc);
                if (a <= kPivotTol) continue;
                double r = std::max(tab.rhs(i), 0.0) / a;
                if (r < best_ratio - 1e-12 ||
                    (r < best_ratio + 1e-12 && (pr < 0 || basis[i] < basis[pr]))) {
                    best_ratio = r;
                    pr = i;
                }
            }
            if (pr < 0) return false;  // unbounded direction

            tab.pivot(pr, pc);
            basis[pr] = pc;
            ++iterations;
            if (iterations > budget) {
                *stalled = true;
                return true;
            }
            // the objective row keeps -objval in its rhs cell, so progress
            // in a minimisation shows up as an increase there
            const double cur = tab.rhs(m);
            if (cur > last_obj + 1e-12) {
                last_obj = cur;
                stall = 0;
            } else if (!bland && ++stall > 200) {
                bland = true;  // anti-cycling fallback
            }
        }
    }
};

}  // namespace

LpSolution lp_solve_bounded(const LinearProgram& lp, std::span<const double> lower,
                            std::span<const double> upper) {
    lp.validate();
    StandardForm sf = standardize(lp, lower, upper);
    const int m = static_cast<int>(sf.sense.size());
    const int ns = sf.num_cols;

    // normalize rhs >= 0
    std::vector<double> flip(m, 1.0);
    for (int i = 0; i < m; ++i) {
        if (sf.rhs[i] < 0.0) {
            flip[i] = -1.0;
            sf.rhs[i] = -sf.rhs[i];
            if (sf.sense[i] == 'L')
                sf.sense[i] = 'G';
            else if (sf.sense[i] == 'G')
                sf.sense[i] = 'L';
        }
    }

    // column layout: structural | slack/surplus | artificial
    int n_slack = 0, n_art = 0;
    for (int i = 0; i < m; ++i) {
        if (sf.sense[i] == 'L' || sf.sense[i] == 'G') ++n_slack;
        if (sf.sense[i] == 'G' || sf.sense[i] == 'E') ++n_art;
    }
    const int total = ns + n_slack + n_art;

    SimplexCore core(m, total);
    core.blocked.assign(total, 0);
    Tableau& tab = core.tab;
    for (int j = 0; j < ns; ++j) {
        for (const auto& [r, v] : sf.col_entries[j]) tab.at(r, j) += flip[r] * v;
    }
    std::vector<int> id_col(m, -1);  // the +1 identity-ish column per row, for duals
    {
        int sj = ns, aj = ns + n_slack;
        for (int i = 0; i < m; ++i) {
            if (sf.sense[i] == 'L') {
                tab.at(i, sj) = 1.0;
                core.basis[i] = sj;
                id_col[i] = sj;
                ++sj;
            } else if (sf.sense[i] == 'G') {
                tab.at(i, sj) = -1.0;
                ++sj;
                tab.at(i, aj) = 1.0;
                core.basis[i] = aj;
                id_col[i] = aj;
                ++aj;
            } else {
                tab.at(i, aj) = 1.0;
                core.basis[i] = aj;
                id_col[i] = aj;
                ++aj;
            }
        }
        for (int i = 0; i < m; ++i) tab.rhs(i) = sf.rhs[i];
    }

    LpSolution out;
    const long long budget = 20'000 + 60LL * (m + total);

    // ---- phase 1: minimise the artificial total
    if (n_art > 0) {
        // reduced costs: c = e_art; subtract basic artificial rows
        for (int i = 0; i < m; ++i) {
            if (core.basis[i] >= ns + n_slack) {
                double* obj = tab.row(m);
                const double* ri = tab.row(i);
                for (int j = 0; j <= total; ++j) obj[j] -= ri[j];
            }
        }
        for (int j = ns + n_slack; j < total; ++j) tab.at(m, j) += 1.0;
        bool stalled = false;
        core.iterate(budget, &stalled);
        if (stalled) {
            out.status = LpStatus::stalled;
            out.iterations = core.iterations;
            return out;
        }
        if (-tab.rhs(m) > kFeasTol) {  // objective row stores -objval
            out.status = LpStatus::infeasible;
            out.iterations = core.iterations;
            return out;
        }
        // pivot remaining artificials out where possible
        for (int i = 0; i < m; ++i) {
            if (core.basis[i] < ns + n_slack) continue;
            int pc = -1;
            for (int j = 0; j < ns + n_slack; ++j) {
                if (std::fabs(tab.at(i, j)) > kPivotTol) {
                    pc = j;
                    break;
                }
            }
            if (pc >= 0) {
                tab.pivot(i, pc);
                core.basis[i] = pc;
            }
        }
        for (int j = ns + n_slack; j < total; ++j) core.blocked[j] = 1;
    }

    // ---- phase 2: rebuild the objective row for the true costs
    {
        double* obj = tab.row(m);
        for (int j = 0; j <= total; ++j) obj[j] = 0.0;
        for (int j = 0; j < ns; ++j) obj[j] = sf.cost[j];
        for (int i = 0; i < m; ++i) {
            const int b = core.basis[i];
            const double cb = b < ns ? sf.cost[b] : 0.0;
            if (cb == 0.0) continue;
            const double* ri = tab.row(i);
            for (int j = 0; j <= total; ++j) obj[j] -= cb * ri[j];
        }
    }
    bool stalled = false;
    const bool bounded = core.iterate(budget, &stalled);
    out.iterations = core.iterations;
    if (stalled) {
        out.status = LpStatus::stalled;
        return out;
    }
    if (!bounded) {
        out.status = LpStatus::unbounded;
        return out;
    }

    // ---- extraction
    std::vector<double> xs(ns, 0.0);
    for (int i = 0; i < m; ++i)
        if (core.basis[i] < ns) xs[core.basis[i]] = tab.rhs(i);

    out.primal.assign(lp.num_vars(), 0.0);
    for (int j = 0; j < lp.num_vars(); ++j) {
        const auto& vm = sf.var_map[j];
        double v = vm.shift + xs[vm.pos];
        if (vm.neg >= 0) v -= xs[vm.neg];
        out.primal[j] = v;
    }
    double objval = -tab.rhs(m) + sf.objective_shift;  // row m holds -objective
    out.objective = lp.maximize ? -objval : objval;

    // duals of the original rows: y_i = -reduced_cost(identity column of row i),
    // unflipped; sign convention per the header (maximisation flips).
    out.dual.assign(sf.original_rows, 0.0);
    for (int i = 0; i < sf.original_rows; ++i) {
        double y = -tab.at(m, id_col[i]);
        y *= flip[i];
        out.dual[i] = lp.maximize ? -y : y;
    }
    out.status = LpStatus::optimal;
    return out;
}

LpSolution lp_solve(const LinearProgram& lp) { return lp_solve_bounded(lp, lp.lower, lp.upper); }

MipSolution mip_solve(const LinearProgram& lp, const MipOptions& options) {
    lp.validate();
    struct Node {
        double bound;  // relaxation objective, oriented so smaller = better
        std::vector<double> lower, upper;
        bool operator<(const Node& other) const { return bound > other.bound; }
    };
    const double orient = lp.maximize ? -1.0 : 1.0;

    MipSolution out;
    std::priority_queue<Node> open;

    auto solve_node = [&](const std::vector<double>& lo, const std::vector<double>& hi) {
        return lp_solve_bounded(lp, lo, hi);
    };

    LpSolution root = solve_node(lp.lower, lp.upper);
    ++out.nodes;
    if (root.status == LpStatus::infeasible) {
        out.status = MipStatus::infeasible;
        return out;
    }
    if (root.status == LpStatus::unbounded) {
        out.status = MipStatus::unbounded;
        return out;
    }

    double incumbent = kInf;  // oriented
    std::vector<double> incumbent_values;
    bool solver_trouble = false;

    auto process = [&](const LpSolution& sol, const std::vector<double>& lo,
                       const std::vector<double>& hi) {
        if (sol.status == LpStatus::stalled) {
            solver_trouble = true;
            return;
        }
        if (sol.status != LpStatus::optimal) return;  // infeasible child: prune
        const double bound = orient * sol.objective;
        if (bound >= incumbent - 1e-9) return;
        // most fractional integer variable
        int branch_var = -1;
        double best_frac_dist = kInf;
        for (int j = 0; j < lp.num_vars(); ++j) {
            if (!lp.integer[j]) continue;
            double v = sol.primal[j];
            double frac = v - std::floor(v);
            if (frac <= options.integrality_tol || frac >= 1.0 - options.integrality_tol)
                continue;
            double dist = std::fabs(frac - 0.5);
            if (dist < best_frac_dist) {
                best_frac_dist = dist;
                branch_var = j;
            }
        }
        if (branch_var < 0) {
            // integral: new incumbent
            if (bound < incumbent - 1e-12) {
                incumbent = bound;
                incumbent_values = sol.primal;
                for (int j = 0; j < lp.num_vars(); ++j)
                    if (lp.integer[j]) incumbent_values[j] = std::round(incumbent_values[j]);
                out.has_incumbent = true;
            }
            return;
        }
        const double v = sol.primal[branch_var];
        Node down{bound, lo, hi};
        down.upper[branch_var] = std::floor(v);
        Node up{bound, lo, hi};
        up.lower[branch_var] = std::ceil(v);
        open.push(std::move(down));
        open.push(std::move(up));
    };

    process(root, lp.lower, lp.upper);
    while (!open.empty() && !solver_trouble) {
        if (out.nodes >= options.node_budget) {
            out.status = MipStatus::node_limit;
            out.objective = out.has_incumbent ? incumbent * orient : 0.0;
            out.values = incumbent_values;
            return out;
        }
        Node node = open.top();
        open.pop();
        if (node.bound >= incumbent - 1e-9) continue;  // best-bound prune
        LpSolution sol = solve_node(node.lower, node.upper);
        ++out.nodes;
        process(sol, node.lower, node.upper);
    }

    if (solver_trouble) {
        out.status = MipStatus::node_limit;  // LP stall; report best incumbent
        out.objective = out.has_incumbent ? incumbent * orient : 0.0;
        out.values = incumbent_values;
        return out;
    }
    if (!out.has_incumbent) {
        out.status = MipStatus::infeasible;
        return out;
    }
    out.status = MipStatus::optimal;
    out.objective = incumbent * orient;
    out.values = incumbent_values;
    return out;
}

}  // namespace drplan
