// SPDX-License-Identifier: Apache-2.0
//
// Small dense semidefinite programs over Hermitian PSD blocks and scalars.
//
// A problem has
//   * matrix variables X_j (Hermitian or real symmetric), each implicitly X_j >= 0,
//   * scalar variables s_t, optionally constrained s_t >= 0,
//   * a linear objective  sum_j Re Tr(C_j X_j) + sum_t c_t s_t + const  (minimized),
//   * LMIs  F_0 + sum alpha W^H X_j W + sum_t s_t F_t >= 0,
//   * scalar affine constraints (=, >=, <=) in traces of X_j and in s_t.
//
// solve() runs an infeasible-start primal-dual interior-point method with the
// HKM search direction and Mehrotra predictor-corrector steps. The Schur
// complement is assembled from the congruence structure W^H X W directly, so
// the cost per iteration scales with the number of matrix-variable parameters
// rather than with the size of a generic vectorized embedding.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "rgsbf/hermitian.hpp"

namespace rgsbf::sdp {

struct MatrixVarId {
    int index = -1;
};
struct ScalarVarId {
    int index = -1;
};

enum class Field { Complex, Real };

struct MatrixVariable {
    std::string name;
    std::size_t dim = 0;
    Field field = Field::Complex;
};

struct ScalarVariable {
    std::string name;
    bool nonnegative = true;
};

/// Hermitian coefficient matrix given by its nonzero upper-triangle entries.
/// An entry (row, col, v) with row < col also stands for (col, row, conj(v)).
struct SparseHermitian {
    struct Entry {
        std::size_t row = 0;
        std::size_t col = 0;
        cplx value;
    };

    std::size_t dim = 0;
    std::vector<Entry> entries;

    static SparseHermitian from_dense(const HermitianMatrix& m);
    static SparseHermitian diagonal(const RVector& d);
    /// Adds v at (row, col); (col, row) receives conj(v).
    void add(std::size_t row, std::size_t col, cplx v);
    HermitianMatrix to_dense() const;
};

struct TraceTerm {
    MatrixVarId var;
    SparseHermitian coefficient;
};

struct ScalarCoefficient {
    ScalarVarId var;
    double coefficient = 0.0;
};

/// sum Re Tr(C_j X_j) + sum a_t s_t + constant
struct AffineScalar {
    std::vector<TraceTerm> traces;
    std::vector<ScalarCoefficient> scalars;
    double constant = 0.0;
};

enum class Relation { Equal, GreaterEqual, LessEqual };

/// expr (relation) 0
struct LinearConstraint {
    AffineScalar expr;
    Relation relation = Relation::GreaterEqual;
    std::string label;
};

/// coefficient * map^H X map.  An empty map means the identity (dim(X) == dim(LMI)).
struct CongruenceTerm {
    MatrixVarId var;
    double coefficient = 1.0;
    CMatrix map;
};

struct ScalarLmiTerm {
    ScalarVarId var;
    HermitianMatrix coefficient;
};

/// constant + sum congruences + sum scalar terms  >= 0
struct LmiConstraint {
    std::string label;
    HermitianMatrix constant;
    std::vector<CongruenceTerm> congruences;
    std::vector<ScalarLmiTerm> scalars;

    std::size_t dim() const { return constant.dim(); }
};

class SdpProblem {
public:
    MatrixVarId add_matrix_variable(std::string name, std::size_t dim, Field field = Field::Complex);
    ScalarVarId add_scalar_variable(std::string name, bool nonnegative = true);

    void set_objective(AffineScalar objective) { objective_ = std::move(objective); }
    void add_lmi(LmiConstraint lmi) { lmis_.push_back(std::move(lmi)); }
    void add_constraint(LinearConstraint c) { constraints_.push_back(std::move(c)); }

    const std::vector<MatrixVariable>& matrix_variables() const { return matrix_vars_; }
    const std::vector<ScalarVariable>& scalar_variables() const { return scalar_vars_; }
    const AffineScalar& objective() const { return objective_; }
    const std::vector<LmiConstraint>& lmis() const { return lmis_; }
    const std::vector<LinearConstraint>& constraints() const { return constraints_; }

    /// Throws ModelError on undeclared variables or mismatched dimensions.
    void validate() const;

private:
    std::vector<MatrixVariable> matrix_vars_;
    std::vector<ScalarVariable> scalar_vars_;
    AffineScalar objective_;
    std::vector<LmiConstraint> lmis_;
    std::vector<LinearConstraint> constraints_;
};

struct SolverConfig {
    double tol_cone = 1e-6;
    double tol_eq = 1e-6;
    double tol_gap = 1e-6;
    /// Interior-point iterations per solve.
    int max_iterations = 200;
    /// Phase-I verdict threshold on the optimal slack.
    double tol_feas = 1e-5;
    bool equilibrate = true;
    /// Skip the phase-I classification pass when the main solve does not converge.
    bool classify_failures = true;
    int verbosity = 0;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIterations };

const char* to_string(SolveStatus s);

struct SdpSolution {
    SolveStatus status = SolveStatus::MaxIterations;
    std::vector<HermitianMatrix> matrices;
    std::vector<double> scalars;
    double objective_value = 0.0;
    /// Largest violation over LMIs (negative eigenvalue part), matrix cones and linear rows, unscaled.
    double primal_residual = 0.0;
    /// Relative dual infeasibility of the final iterate.
    double dual_residual = 0.0;
    double relative_gap = 0.0;
    int iterations = 0;
    /// Optimal phase-I slack when a classification pass ran, otherwise negative.
    double phase_one_slack = -1.0;

    const HermitianMatrix& value(MatrixVarId id) const { return matrices.at(static_cast<std::size_t>(id.index)); }
    double value(ScalarVarId id) const { return scalars.at(static_cast<std::size_t>(id.index)); }
};

enum class Verdict { Feasible, Infeasible, Marginal };

const char* to_string(Verdict v);

struct FeasibilityVerdict {
    Verdict verdict = Verdict::Marginal;
    double slack = 0.0;
    SolveStatus solver_status = SolveStatus::MaxIterations;
    int iterations = 0;
};

SdpSolution solve(const SdpProblem& problem, const SolverConfig& cfg = {});

/// Phase-I: minimize s >= 0 with every LMI relaxed to expr + s I >= 0, every
/// equality to |expr| <= s and every inequality shifted by s.
FeasibilityVerdict check_feasible(const SdpProblem& problem, const SolverConfig& cfg = {});

/// The phase-I problem used by check_feasible, with the id of its slack variable.
struct PhaseOneProblem {
    SdpProblem problem;
    ScalarVarId slack;
};
PhaseOneProblem make_phase_one(const SdpProblem& problem);

double evaluate(const AffineScalar& expr, const std::vector<HermitianMatrix>& x, const std::vector<double>& s);
HermitianMatrix evaluate(const LmiConstraint& lmi, const std::vector<HermitianMatrix>& x, const std::vector<double>& s);

/// Largest constraint violation of a candidate point (0 when feasible).
double max_violation(const SdpProblem& problem, const std::vector<HermitianMatrix>& x, const std::vector<double>& s);

/// Plain-text listing of all problem data; format described in docs/sdp_dump_format.md.
void dump_problem(const SdpProblem& problem, std::ostream& out);

}  // namespace rgsbf::sdp
