// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "rgsbf/errors.hpp"
#include "rgsbf/sdp.hpp"

namespace rgsbf::sdp {

SparseHermitian SparseHermitian::from_dense(const HermitianMatrix& m) {
    SparseHermitian out;
    out.dim = m.dim();
    for (std::size_t i = 0; i < m.dim(); ++i) {
        for (std::size_t j = i; j < m.dim(); ++j) {
            const cplx v = m(i, j);
            if (v != cplx(0.0, 0.0)) out.entries.push_back({i, j, v});
        }
    }
    return out;
}

SparseHermitian SparseHermitian::diagonal(const RVector& d) {
    SparseHermitian out;
    out.dim = static_cast<std::size_t>(d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (d(i) != 0.0) out.entries.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(i), cplx(d(i), 0.0)});
    }
    return out;
}

void SparseHermitian::add(std::size_t row, std::size_t col, cplx v) {
    if (row <= col) {
        entries.push_back({row, col, v});
    } else {
        entries.push_back({col, row, std::conj(v)});
    }
}

HermitianMatrix SparseHermitian::to_dense() const {
    CMatrix d = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (const auto& e : entries) {
        const auto r = static_cast<Eigen::Index>(e.row);
        const auto c = static_cast<Eigen::Index>(e.col);
        if (r == c) {
            d(r, r) += cplx(e.value.real(), 0.0);
        } else {
            d(r, c) += e.value;
            d(c, r) += std::conj(e.value);
        }
    }
    return HermitianMatrix(d);
}

MatrixVarId SdpProblem::add_matrix_variable(std::string name, std::size_t dim, Field field) {
    if (dim == 0) throw ModelError("matrix variable '" + name + "' has zero dimension");
    matrix_vars_.push_back({std::move(name), dim, field});
    return MatrixVarId{static_cast<int>(matrix_vars_.size()) - 1};
}

ScalarVarId SdpProblem::add_scalar_variable(std::string name, bool nonnegative) {
    scalar_vars_.push_back({std::move(name), nonnegative});
    return ScalarVarId{static_cast<int>(scalar_vars_.size()) - 1};
}

namespace {

void check_matrix_id(const SdpProblem& p, MatrixVarId id, const std::string& where) {
    if (id.index < 0 || static_cast<std::size_t>(id.index) >= p.matrix_variables().size()) {
        throw ModelError(where + ": undeclared matrix variable");
    }
}

void check_scalar_id(const SdpProblem& p, ScalarVarId id, const std::string& where) {
    if (id.index < 0 || static_cast<std::size_t>(id.index) >= p.scalar_variables().size()) {
        throw ModelError(where + ": undeclared scalar variable");
    }
}

void check_affine(const SdpProblem& p, const AffineScalar& e, const std::string& where) {
    for (const auto& t : e.traces) {
        check_matrix_id(p, t.var, where);
        const auto dim = p.matrix_variables()[static_cast<std::size_t>(t.var.index)].dim;
        if (t.coefficient.dim != dim) throw ModelError(where + ": trace coefficient dimension mismatch");
        for (const auto& en : t.coefficient.entries) {
            if (en.row > en.col || en.col >= dim) throw ModelError(where + ": trace coefficient entry out of range");
        }
    }
    for (const auto& s : e.scalars) check_scalar_id(p, s.var, where);
}

}  // namespace

void SdpProblem::validate() const {
    check_affine(*this, objective_, "objective");
    for (const auto& c : constraints_) check_affine(*this, c.expr, "constraint '" + c.label + "'");
    for (const auto& lmi : lmis_) {
        const std::string where = "LMI '" + lmi.label + "'";
        const auto d = static_cast<Eigen::Index>(lmi.dim());
        if (d == 0) throw ModelError(where + ": zero dimension");
        for (const auto& t : lmi.congruences) {
            check_matrix_id(*this, t.var, where);
            const auto n = static_cast<Eigen::Index>(matrix_vars_[static_cast<std::size_t>(t.var.index)].dim);
            if (t.map.size() == 0) {
                if (n != d) throw ModelError(where + ": identity congruence needs matching dimensions");
            } else if (t.map.rows() != n || t.map.cols() != d) {
                throw ModelError(where + ": congruence map has wrong shape");
            }
        }
        for (const auto& s : lmi.scalars) {
            check_scalar_id(*this, s.var, where);
            if (static_cast<Eigen::Index>(s.coefficient.dim()) != d) {
                throw ModelError(where + ": scalar coefficient dimension mismatch");
            }
        }
    }
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "Optimal";
        case SolveStatus::Infeasible: return "Infeasible";
        case SolveStatus::Unbounded: return "Unbounded";
        case SolveStatus::MaxIterations: return "MaxIterations";
    }
    return "?";
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Feasible: return "Feasible";
        case Verdict::Infeasible: return "Infeasible";
        case Verdict::Marginal: return "Marginal";
    }
    return "?";
}

double evaluate(const AffineScalar& expr, const std::vector<HermitianMatrix>& x, const std::vector<double>& s) {
    double v = expr.constant;
    for (const auto& t : expr.traces) {
        const auto& m = x.at(static_cast<std::size_t>(t.var.index));
        for (const auto& e : t.coefficient.entries) {
            if (e.row == e.col) {
                v += e.value.real() * m(e.row, e.row).real();
            } else {
                // C_rc X_cr + C_cr X_rc = 2 Re(C_rc conj(X_rc))
                v += 2.0 * (e.value * std::conj(m(e.row, e.col))).real();
            }
        }
    }
    for (const auto& c : expr.scalars) v += c.coefficient * s.at(static_cast<std::size_t>(c.var.index));
    return v;
}

HermitianMatrix evaluate(const LmiConstraint& lmi, const std::vector<HermitianMatrix>& x, const std::vector<double>& s) {
    CMatrix acc = lmi.constant.dense();
    for (const auto& t : lmi.congruences) {
        const CMatrix xv = x.at(static_cast<std::size_t>(t.var.index)).dense();
        if (t.map.size() == 0) {
            acc += t.coefficient * xv;
        } else {
            acc += t.coefficient * (t.map.adjoint() * xv * t.map);
        }
    }
    for (const auto& st : lmi.scalars) acc += s.at(static_cast<std::size_t>(st.var.index)) * st.coefficient.dense();
    return HermitianMatrix(acc);
}

double max_violation(const SdpProblem& problem, const std::vector<HermitianMatrix>& x, const std::vector<double>& s) {
    double worst = 0.0;
    for (const auto& m : x) worst = std::max(worst, -min_eigenvalue(m));
    for (std::size_t t = 0; t < s.size(); ++t) {
        if (problem.scalar_variables()[t].nonnegative) worst = std::max(worst, -s[t]);
    }
    for (const auto& lmi : problem.lmis()) worst = std::max(worst, -min_eigenvalue(evaluate(lmi, x, s)));
    for (const auto& c : problem.constraints()) {
        const double v = evaluate(c.expr, x, s);
        switch (c.relation) {
            case Relation::Equal: worst = std::max(worst, std::abs(v)); break;
            case Relation::GreaterEqual: worst = std::max(worst, -v); break;
            case Relation::LessEqual: worst = std::max(worst, v); break;
        }
    }
    return worst;
}

PhaseOneProblem make_phase_one(const SdpProblem& problem) {
    PhaseOneProblem out;
    SdpProblem& p = out.problem;
    for (const auto& mv : problem.matrix_variables()) p.add_matrix_variable(mv.name, mv.dim, mv.field);
    for (const auto& sv : problem.scalar_variables()) p.add_scalar_variable(sv.name, sv.nonnegative);
    out.slack = p.add_scalar_variable("phase_one_slack", true);

    AffineScalar obj;
    obj.scalars.push_back({out.slack, 1.0});
    p.set_objective(obj);

    for (const auto& lmi : problem.lmis()) {
        LmiConstraint relaxed = lmi;
        relaxed.scalars.push_back({out.slack, HermitianMatrix::identity(lmi.dim())});
        p.add_lmi(std::move(relaxed));
    }
    for (const auto& c : problem.constraints()) {
        auto shifted = [&](double sign, const std::string& suffix) {
            LinearConstraint r;
            r.label = c.label + suffix;
            r.relation = Relation::GreaterEqual;
            r.expr = c.expr;
            if (sign < 0.0) {
                for (auto& t : r.expr.traces) {
                    for (auto& e : t.coefficient.entries) e.value = -e.value;
                }
                for (auto& sc : r.expr.scalars) sc.coefficient = -sc.coefficient;
                r.expr.constant = -r.expr.constant;
            }
            r.expr.scalars.push_back({out.slack, 1.0});
            p.add_constraint(std::move(r));
        };
        switch (c.relation) {
            case Relation::Equal:
                shifted(1.0, "/lo");
                shifted(-1.0, "/hi");
                break;
            case Relation::GreaterEqual: shifted(1.0, ""); break;
            case Relation::LessEqual: shifted(-1.0, ""); break;
        }
    }
    return out;
}

namespace {

void dump_dense(std::ostream& out, const CMatrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out << (j == 0 ? "" : " ") << m(i, j).real() << ' ' << m(i, j).imag();
        }
        out << '\n';
    }
}

void dump_affine(std::ostream& out, const AffineScalar& e) {
    out << "constant " << e.constant << '\n';
    for (const auto& t : e.traces) {
        out << "trace " << t.var.index << '\n';
        dump_dense(out, t.coefficient.to_dense().dense());
    }
    for (const auto& s : e.scalars) out << "scalar " << s.var.index << ' ' << s.coefficient << '\n';
    out << "end\n";
}

}  // namespace

void dump_problem(const SdpProblem& problem, std::ostream& out) {
    const auto old_precision = out.precision(17);
    out << "sdp-dump 1\n";
    out << "matrix_variables " << problem.matrix_variables().size() << '\n';
    for (const auto& mv : problem.matrix_variables()) {
        out << mv.name << ' ' << mv.dim << ' ' << (mv.field == Field::Complex ? "complex" : "real") << '\n';
    }
    out << "scalar_variables " << problem.scalar_variables().size() << '\n';
    for (const auto& sv : problem.scalar_variables()) {
        out << sv.name << ' ' << (sv.nonnegative ? "nonnegative" : "free") << '\n';
    }
    out << "objective\n";
    dump_affine(out, problem.objective());
    out << "lmis " << problem.lmis().size() << '\n';
    for (const auto& lmi : problem.lmis()) {
        out << "lmi " << (lmi.label.empty() ? "-" : lmi.label) << ' ' << lmi.dim() << '\n';
        out << "constant\n";
        dump_dense(out, lmi.constant.dense());
        for (const auto& t : lmi.congruences) {
            const auto n = problem.matrix_variables()[static_cast<std::size_t>(t.var.index)].dim;
            out << "congruence " << t.var.index << ' ' << t.coefficient << '\n';
            if (t.map.size() == 0) {
                dump_dense(out, CMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
            } else {
                dump_dense(out, t.map);
            }
        }
        for (const auto& s : lmi.scalars) {
            out << "scalar " << s.var.index << '\n';
            dump_dense(out, s.coefficient.dense());
        }
        out << "end\n";
    }
    out << "constraints " << problem.constraints().size() << '\n';
    for (const auto& c : problem.constraints()) {
        const char* rel = c.relation == Relation::Equal ? "eq" : (c.relation == Relation::GreaterEqual ? "ge" : "le");
        out << "constraint " << (c.label.empty() ? "-" : c.label) << ' ' << rel << '\n';
        dump_affine(out, c.expr);
    }
    out.precision(old_precision);
}

}  // namespace rgsbf::sdp
