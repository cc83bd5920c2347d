#pragma once

#include <span>
#include <vector>

namespace drplan {

/// A linear (or mixed-integer, via the integer flags) program in triplet
/// form. Rows have senses 'L' (<=), 'G' (>=), 'E' (=). Variable bounds
/// default to [0, +inf); lower = -inf is allowed (the solver splits such
/// variables internally).
struct LinearProgram {
    struct Entry {
        int row;
        int col;
        double value;
    };

    bool maximize = false;
    std::vector<double> objective;
    std::vector<Entry> entries;
    std::vector<char> sense;
    std::vector<double> rhs;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<char> integer;

    int num_vars() const { return static_cast<int>(objective.size()); }
    int num_rows() const { return static_cast<int>(sense.size()); }

    int add_var(double obj, double lo, double hi, bool integral = false);
    int add_row(char row_sense, double row_rhs);
    void set(int row, int col, double value) { entries.push_back({row, col, value}); }

    void validate() const;
};

enum class LpStatus { optimal, infeasible, unbounded, stalled };

/// Duals follow the convention that makes weak duality read
/// obj = sum_i dual_i * rhs_i (+ bound terms): in a minimisation problem
/// '>=' rows have non-negative duals and '<=' rows non-positive ones; for a
/// maximisation problem the signs flip.
struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    double objective = 0.0;
    std::vector<double> primal;
    std::vector<double> dual;  // per original row
    long long iterations = 0;
};

/// Two-phase primal simplex on the dense tableau, Dantzig pricing with a
/// Bland's-rule fallback when the objective stalls. Integrality flags are
/// ignored here. Feasibility/optimality tolerances are 1e-7.
LpSolution lp_solve(const LinearProgram& lp);

/// lp_solve with the variable bounds overridden (used by branch and bound to
/// avoid copying the constraint matrix per node).
LpSolution lp_solve_bounded(const LinearProgram& lp, std::span<const double> lower,
                            std::span<const double> upper);

enum class MipStatus { optimal, infeasible, unbounded, node_limit };

struct MipSolution {
    MipStatus status = MipStatus::infeasible;
    double objective = 0.0;
    std::vector<double> values;
    long long nodes = 0;
    bool has_incumbent = false;
};

struct MipOptions {
    long long node_budget = 50'000;
    double integrality_tol = 1e-6;
};

/// Branch and bound over lp_solve relaxations: best-bound node selection,
/// branching on the most fractional integer variable, zero optimality gap at
/// normal termination. On node-budget exhaustion the incumbent (if any) is
/// reported with status node_limit.
MipSolution mip_solve(const LinearProgram& lp, const MipOptions& options = {});

}  // namespace drplan
