// SPDX-License-Identifier: Apache-2.0
//
// Primal-dual interior-point method for the SdpProblem model.
//
// Internally the problem is written in "LMI form": every real parameter of every
// matrix variable and every scalar variable becomes one coordinate of y, and
//
//     minimize  c^T y
//     s.t.      S_b = F_b0 + A_b(y) >= 0      (one block per LMI and per matrix variable)
//               s   = h + G y       >= 0      (linear inequalities, scalar sign bounds)
//               E y = f
//
// Multipliers are Z_b >= 0, z >= 0 and w. Newton directions use the HKM
// symmetrization, dZ = mu S^-1 - Z - sym(Z dS S^-1).

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>

#include "rgsbf/errors.hpp"
#include "rgsbf/sdp.hpp"

namespace rgsbf::sdp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CMatrix sym(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

// Real parameters of a matrix variable, grouped by upper-triangle position.
struct PairParams {
    int a = 0;
    int b = 0;
    int re = -1;  // diagonal parameter when a == b
    int im = -1;  // -1 for real fields and for the diagonal
};

struct VarLayout {
    int offset = 0;
    int dim = 0;
    int nparams = 0;
    Field field = Field::Complex;
    double scale = 1.0;
    std::vector<PairParams> pairs;
    std::vector<int> pair_of;  // dim*dim -> pair index (upper triangle)

    const PairParams& pair(int a, int b) const {
        return a <= b ? pairs[static_cast<std::size_t>(pair_of[static_cast<std::size_t>(a * dim + b)])]
                      : pairs[static_cast<std::size_t>(pair_of[static_cast<std::size_t>(b * dim + a)])];
    }
};

VarLayout make_layout(int offset, int dim, Field field) {
    VarLayout v;
    v.offset = offset;
    v.dim = dim;
    v.field = field;
    v.pair_of.assign(static_cast<std::size_t>(dim * dim), -1);
    int k = 0;
    for (int a = 0; a < dim; ++a) {
        for (int b = a; b < dim; ++b) {
            PairParams p;
            p.a = a;
            p.b = b;
            p.re = k++;
            if (a != b && field == Field::Complex) p.im = k++;
            v.pair_of[static_cast<std::size_t>(a * dim + b)] = static_cast<int>(v.pairs.size());
            v.pairs.push_back(p);
        }
    }
    v.nparams = k;
    return v;
}

struct MapData {
    CMatrix w;  // var_dim x block_dim; empty when identity
    bool identity = true;
    int var_dim = 0;
};

struct CongTerm {
    int var = 0;
    double coef = 1.0;
    int map = 0;
};

struct ScalTerm {
    int y = 0;
    CMatrix f;
};

struct Block {
    int dim = 0;
    CMatrix f0;
    std::vector<MapData> maps;
    std::vector<CongTerm> terms;
    std::vector<ScalTerm> scalars;
    double row_scale = 1.0;
};

struct SparseRow {
    std::vector<int> idx;
    std::vector<double> val;
    double constant = 0.0;

    double dot(const RVector& y) const {
        double s = 0.0;
        for (std::size_t k = 0; k < idx.size(); ++k) s += val[k] * y(idx[k]);
        return s;
    }

    void compress() {
        std::map<int, double> acc;
        for (std::size_t k = 0; k < idx.size(); ++k) acc[idx[k]] += val[k];
        idx.clear();
        val.clear();
        for (const auto& [i, v] : acc) {
            if (v != 0.0) {
                idx.push_back(i);
                val.push_back(v);
            }
        }
    }
};

struct Compiled {
    int m = 0;
    std::vector<VarLayout> vars;
    std::vector<int> scalar_y;
    std::vector<double> scalar_scale;
    std::vector<Block> blocks;
    std::vector<SparseRow> lp;  // g^T y + constant >= 0
    std::vector<SparseRow> eq;  // e^T y + constant == 0
    RVector c;
    double obj_scale = 1.0;
};

// ---------------------------------------------------------------------------
// Equilibration

struct Scaling {
    std::vector<double> matrix_col;
    std::vector<double> scalar_col;
    std::vector<double> lmi_row;
    std::vector<double> lin_row;
};

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double map_magnitude(const CMatrix& w) {
    if (w.size() == 0) return 1.0;
    return w.colwise().squaredNorm().maxCoeff();
}

double trace_magnitude(const SparseHermitian& c) {
    double m = 0.0;
    for (const auto& e : c.entries) m = std::max(m, std::abs(e.value) * (e.row == e.col ? 1.0 : 2.0));
    return m;
}

Scaling equilibrate(const SdpProblem& p, bool enabled) {
    Scaling s;
    s.matrix_col.assign(p.matrix_variables().size(), 1.0);
    s.scalar_col.assign(p.scalar_variables().size(), 1.0);
    s.lmi_row.assign(p.lmis().size(), 1.0);
    s.lin_row.assign(p.constraints().size(), 1.0);
    if (!enabled) return s;

    struct Entry {
        bool lmi;
        std::size_t row;
        bool matrix;
        std::size_t col;
        double mag;
    };
    std::vector<Entry> entries;
    for (std::size_t b = 0; b < p.lmis().size(); ++b) {
        const auto& lmi = p.lmis()[b];
        for (const auto& t : lmi.congruences) {
            const double mag = std::abs(t.coefficient) * map_magnitude(t.map);
            if (mag > 0.0) entries.push_back({true, b, true, static_cast<std::size_t>(t.var.index), mag});
        }
        for (const auto& t : lmi.scalars) {
            const double mag = max_abs(t.coefficient.dense());
            if (mag > 0.0) entries.push_back({true, b, false, static_cast<std::size_t>(t.var.index), mag});
        }
    }
    for (std::size_t r = 0; r < p.constraints().size(); ++r) {
        const auto& e = p.constraints()[r].expr;
        for (const auto& t : e.traces) {
            const double mag = trace_magnitude(t.coefficient);
            if (mag > 0.0) entries.push_back({false, r, true, static_cast<std::size_t>(t.var.index), mag});
        }
        for (const auto& t : e.scalars) {
            if (t.coefficient != 0.0) entries.push_back({false, r, false, static_cast<std::size_t>(t.var.index), std::abs(t.coefficient)});
        }
    }
    if (entries.empty()) return s;

    for (int pass = 0; pass < 10; ++pass) {
        std::vector<double> lmi_max(s.lmi_row.size(), 0.0);
        std::vector<double> lin_max(s.lin_row.size(), 0.0);
        for (const auto& e : entries) {
            const double col = e.matrix ? s.matrix_col[e.col] : s.scalar_col[e.col];
            const double row = e.lmi ? s.lmi_row[e.row] : s.lin_row[e.row];
            auto& target = e.lmi ? lmi_max[e.row] : lin_max[e.row];
            target = std::max(target, e.mag * col * row);
        }
        for (std::size_t i = 0; i < lmi_max.size(); ++i) {
            if (lmi_max[i] > 0.0) s.lmi_row[i] /= std::sqrt(lmi_max[i]);
        }
        for (std::size_t i = 0; i < lin_max.size(); ++i) {
            if (lin_max[i] > 0.0) s.lin_row[i] /= std::sqrt(lin_max[i]);
        }
        std::vector<double> mcol(s.matrix_col.size(), 0.0);
        std::vector<double> scol(s.scalar_col.size(), 0.0);
        for (const auto& e : entries) {
            const double col = e.matrix ? s.matrix_col[e.col] : s.scalar_col[e.col];
            const double row = e.lmi ? s.lmi_row[e.row] : s.lin_row[e.row];
            auto& target = e.matrix ? mcol[e.col] : scol[e.col];
            target = std::max(target, e.mag * col * row);
        }
        for (std::size_t i = 0; i < mcol.size(); ++i) {
            if (mcol[i] > 0.0) s.matrix_col[i] /= std::sqrt(mcol[i]);
        }
        for (std::size_t i = 0; i < scol.size(); ++i) {
            if (scol[i] > 0.0) s.scalar_col[i] /= std::sqrt(scol[i]);
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Compilation

void add_trace_to_row(SparseRow& row, const VarLayout& v, const SparseHermitian& c, double factor) {
    for (const auto& e : c.entries) {
        const auto& pp = v.pair(static_cast<int>(e.row), static_cast<int>(e.col));
        if (e.row == e.col) {
            row.idx.push_back(v.offset + pp.re);
            row.val.push_back(factor * e.value.real());
        } else {
            row.idx.push_back(v.offset + pp.re);
            row.val.push_back(factor * 2.0 * e.value.real());
            if (pp.im >= 0) {
                row.idx.push_back(v.offset + pp.im);
                row.val.push_back(factor * 2.0 * e.value.imag());
            }
        }
    }
}

SparseRow compile_affine(const Compiled& cp, const AffineScalar& e, double row_scale) {
    SparseRow row;
    for (const auto& t : e.traces) {
        const auto& v = cp.vars[static_cast<std::size_t>(t.var.index)];
        add_trace_to_row(row, v, t.coefficient, row_scale * v.scale);
    }
    for (const auto& t : e.scalars) {
        const auto k = static_cast<std::size_t>(t.var.index);
        row.idx.push_back(cp.scalar_y[k]);
        row.val.push_back(row_scale * cp.scalar_scale[k] * t.coefficient);
    }
    row.constant = row_scale * e.constant;
    row.compress();
    return row;
}

Compiled compile(const SdpProblem& p, const Scaling& sc) {
    Compiled cp;
    int offset = 0;
    for (std::size_t j = 0; j < p.matrix_variables().size(); ++j) {
        const auto& mv = p.matrix_variables()[j];
        auto layout = make_layout(offset, static_cast<int>(mv.dim), mv.field);
        layout.scale = sc.matrix_col[j];
        offset += layout.nparams;
        cp.vars.push_back(std::move(layout));
    }
    for (std::size_t t = 0; t < p.scalar_variables().size(); ++t) {
        cp.scalar_y.push_back(offset++);
        cp.scalar_scale.push_back(sc.scalar_col[t]);
    }
    cp.m = offset;

    // one PSD block per matrix variable
    for (std::size_t j = 0; j < cp.vars.size(); ++j) {
        Block b;
        b.dim = cp.vars[j].dim;
        b.f0 = CMatrix::Zero(b.dim, b.dim);
        b.maps.push_back({CMatrix(), true, b.dim});
        b.terms.push_back({static_cast<int>(j), 1.0, 0});
        cp.blocks.push_back(std::move(b));
    }
    for (std::size_t k = 0; k < p.lmis().size(); ++k) {
        const auto& lmi = p.lmis()[k];
        const double r = sc.lmi_row[k];
        Block b;
        b.dim = static_cast<int>(lmi.dim());
        b.row_scale = r;
        b.f0 = r * lmi.constant.dense();
        for (const auto& t : lmi.congruences) {
            const auto vj = static_cast<std::size_t>(t.var.index);
            const bool ident = t.map.size() == 0;
            int map_index = -1;
            for (std::size_t u = 0; u < b.maps.size(); ++u) {
                const auto& md = b.maps[u];
                if (md.identity != ident || md.var_dim != cp.vars[vj].dim) continue;
                if (ident || md.w == t.map) {
                    map_index = static_cast<int>(u);
                    break;
                }
            }
            if (map_index < 0) {
                b.maps.push_back({ident ? CMatrix() : t.map, ident, cp.vars[vj].dim});
                map_index = static_cast<int>(b.maps.size()) - 1;
            }
            b.terms.push_back({t.var.index, r * t.coefficient * cp.vars[vj].scale, map_index});
        }
        for (const auto& t : lmi.scalars) {
            const auto sk = static_cast<std::size_t>(t.var.index);
            b.scalars.push_back({cp.scalar_y[sk], r * cp.scalar_scale[sk] * t.coefficient.dense()});
        }
        cp.blocks.push_back(std::move(b));
    }

    // scalar sign constraints
    for (std::size_t t = 0; t < p.scalar_variables().size(); ++t) {
        if (!p.scalar_variables()[t].nonnegative) continue;
        SparseRow row;
        row.idx.push_back(cp.scalar_y[t]);
        row.val.push_back(1.0);
        cp.lp.push_back(std::move(row));
    }
    for (std::size_t r = 0; r < p.constraints().size(); ++r) {
        const auto& c = p.constraints()[r];
        const double rs = sc.lin_row[r];
        switch (c.relation) {
            case Relation::Equal: cp.eq.push_back(compile_affine(cp, c.expr, rs)); break;
            case Relation::GreaterEqual: cp.lp.push_back(compile_affine(cp, c.expr, rs)); break;
            case Relation::LessEqual: cp.lp.push_back(compile_affine(cp, c.expr, -rs)); break;
        }
    }

    SparseRow obj = compile_affine(cp, p.objective(), 1.0);
    cp.c = RVector::Zero(cp.m);
    double cmax = 0.0;
    for (std::size_t k = 0; k < obj.idx.size(); ++k) {
        cp.c(obj.idx[k]) += obj.val[k];
        cmax = std::max(cmax, std::abs(obj.val[k]));
    }
    cp.obj_scale = cmax > 0.0 ? 1.0 / cmax : 1.0;
    cp.c *= cp.obj_scale;
    return cp;
}

// ---------------------------------------------------------------------------
// Linear maps

CMatrix var_matrix(const VarLayout& v, const RVector& y) {
    CMatrix x(v.dim, v.dim);
    for (const auto& pp : v.pairs) {
        if (pp.a == pp.b) {
            x(pp.a, pp.a) = cplx(y(v.offset + pp.re), 0.0);
        } else {
            const cplx val(y(v.offset + pp.re), pp.im >= 0 ? y(v.offset + pp.im) : 0.0);
            x(pp.a, pp.b) = val;
            x(pp.b, pp.a) = std::conj(val);
        }
    }
    return x;
}

// Adds factor * <B_p, M> for every parameter p of v, with M Hermitian.
void add_adjoint(const VarLayout& v, const CMatrix& m, double factor, RVector& out) {
    for (const auto& pp : v.pairs) {
        if (pp.a == pp.b) {
            out(v.offset + pp.re) += factor * m(pp.a, pp.a).real();
        } else {
            const cplx z = m(pp.a, pp.b);
            out(v.offset + pp.re) += factor * 2.0 * z.real();
            if (pp.im >= 0) out(v.offset + pp.im) += factor * 2.0 * z.imag();
        }
    }
}

// Adds factor * Re Tr(B_p T) for general (non-Hermitian) T.
void add_trace_general(const VarLayout& v, const CMatrix& t, double factor, RVector& out) {
    for (const auto& pp : v.pairs) {
        if (pp.a == pp.b) {
            out(v.offset + pp.re) += factor * t(pp.a, pp.a).real();
        } else {
            const cplx tba = t(pp.b, pp.a);
            const cplx tab = t(pp.a, pp.b);
            out(v.offset + pp.re) += factor * (tba + tab).real();
            if (pp.im >= 0) out(v.offset + pp.im) += factor * (tab.imag() - tba.imag());
        }
    }
}

CMatrix congruence(const MapData& md, const CMatrix& x) {
    if (md.identity) return x;
    return md.w.adjoint() * x * md.w;
}

// A_b(y) without the constant term.
CMatrix apply_linear(const Compiled& cp, const Block& b, const RVector& y) {
    CMatrix acc = CMatrix::Zero(b.dim, b.dim);
    // group by map to share the congruence product
    for (std::size_t u = 0; u < b.maps.size(); ++u) {
        CMatrix xsum;
        bool any = false;
        for (const auto& t : b.terms) {
            if (t.map != static_cast<int>(u)) continue;
            const CMatrix x = var_matrix(cp.vars[static_cast<std::size_t>(t.var)], y);
            if (!any) {
                xsum = t.coef * x;
                any = true;
            } else {
                xsum += t.coef * x;
            }
        }
        if (any) acc += congruence(b.maps[u], xsum);
    }
    for (const auto& s : b.scalars) acc += y(s.y) * s.f;
    return acc;
}

void apply_adjoint(const Compiled& cp, const Block& b, const CMatrix& z, RVector& out) {
    for (std::size_t u = 0; u < b.maps.size(); ++u) {
        const auto& md = b.maps[u];
        const CMatrix wzw = md.identity ? z : CMatrix(md.w * z * md.w.adjoint());
        for (const auto& t : b.terms) {
            if (t.map != static_cast<int>(u)) continue;
            add_adjoint(cp.vars[static_cast<std::size_t>(t.var)], wzw, t.coef, out);
        }
    }
    for (const auto& s : b.scalars) out(s.y) += (s.f.cwiseProduct(z.conjugate())).sum().real();
}

// core(p, q) = Re Tr(B_p P B_q R) for the parameter bases of two variables.
RMatrix schur_core(const VarLayout& vu, const VarLayout& vv, const CMatrix& P, const CMatrix& R) {
    RMatrix core(vu.nparams, vv.nparams);
    for (const auto& pu : vu.pairs) {
        const int a = pu.a;
        const int b = pu.b;
        const bool pdiag = a == b;
        for (const auto& pv : vv.pairs) {
            const int c = pv.a;
            const int d = pv.b;
            const bool qdiag = c == d;
            // Tr(E_ab P E_cd R) = P(b,c) R(d,a)
            const cplx k1 = P(b, c) * R(d, a);
            if (pdiag && qdiag) {
                core(pu.re, pv.re) = k1.real();
                continue;
            }
            if (pdiag) {
                const cplx k2 = P(b, d) * R(c, a);
                core(pu.re, pv.re) = (k1 + k2).real();
                if (pv.im >= 0) core(pu.re, pv.im) = -(k1 - k2).imag();
                continue;
            }
            const cplx k3 = P(a, c) * R(d, b);
            if (qdiag) {
                core(pu.re, pv.re) = (k1 + k3).real();
                if (pu.im >= 0) core(pu.im, pv.re) = -(k1 - k3).imag();
                continue;
            }
            const cplx k2 = P(b, d) * R(c, a);
            const cplx k4 = P(a, d) * R(c, b);
            core(pu.re, pv.re) = (k1 + k2 + k3 + k4).real();
            if (pv.im >= 0) core(pu.re, pv.im) = -(k1 - k2 + k3 - k4).imag();
            if (pu.im >= 0) {
                core(pu.im, pv.re) = -(k1 + k2 - k3 - k4).imag();
                if (pv.im >= 0) core(pu.im, pv.im) = (-k1 + k2 + k3 - k4).real();
            }
        }
    }
    return core;
}

// ---------------------------------------------------------------------------
// Interior-point iterations

struct Direction {
    RVector dy;
    RVector dw;
    std::vector<CMatrix> dS;
    std::vector<CMatrix> dZ;
    RVector ds;
    RVector dz;
};

struct IpmResult {
    bool converged = false;
    bool diverged_y = false;
    bool diverged_z = false;
    int iterations = 0;
    RVector y;
    double pinf = kInf;
    double dinf = kInf;
    double relgap = kInf;
};

class InteriorPoint {
public:
    InteriorPoint(const Compiled& cp, const SolverConfig& cfg) : cp_(cp), cfg_(cfg) {}

    IpmResult run(const SdpProblem& original, const Scaling& scaling);

private:
    void initialize();
    void residuals();
    bool factorize();
    Direction direction(const std::vector<CMatrix>& rc, const RVector& rc_lp);
    static double max_step(const Eigen::LLT<CMatrix>& chol, const CMatrix& d);
    static double max_step_lp(const RVector& v, const RVector& d);

    const Compiled& cp_;
    const SolverConfig& cfg_;
    std::size_t nb_ = 0;
    int nlp_ = 0;
    int neq_ = 0;

    RVector y_, w_, s_, z_;
    std::vector<CMatrix> S_, Z_, Sinv_;
    std::vector<Eigen::LLT<CMatrix>> cholS_, cholZ_;

    std::vector<CMatrix> Rp_;
    RVector Rlp_, Re_, Rd_;
    double mu_ = 0.0;

    RMatrix H_;
    Eigen::LLT<RMatrix> cholH_;
    RMatrix E_;
    RVector f_;
    RMatrix HinvEt_;
    Eigen::LLT<RMatrix> cholEHE_;
};

void InteriorPoint::initialize() {
    nb_ = cp_.blocks.size();
    nlp_ = static_cast<int>(cp_.lp.size());
    neq_ = static_cast<int>(cp_.eq.size());

    E_ = RMatrix::Zero(neq_, cp_.m);
    f_ = RVector::Zero(neq_);
    for (int r = 0; r < neq_; ++r) {
        const auto& row = cp_.eq[static_cast<std::size_t>(r)];
        for (std::size_t k = 0; k < row.idx.size(); ++k) E_(r, row.idx[k]) += row.val[k];
        f_(r) = -row.constant;
    }

    double cnorm = cp_.c.size() > 0 ? cp_.c.cwiseAbs().maxCoeff() : 0.0;
    y_ = RVector::Zero(cp_.m);
    w_ = RVector::Zero(neq_);
    S_.resize(nb_);
    Z_.resize(nb_);
    Sinv_.resize(nb_);
    cholS_.resize(nb_);
    cholZ_.resize(nb_);
    for (std::size_t b = 0; b < nb_; ++b) {
        const auto& blk = cp_.blocks[b];
        double fnorm = max_abs(blk.f0);
        for (const auto& t : blk.terms) fnorm = std::max(fnorm, std::abs(t.coef));
        for (const auto& s : blk.scalars) fnorm = std::max(fnorm, max_abs(s.f));
        const double d = static_cast<double>(blk.dim);
        const double xi = std::max({10.0, std::sqrt(d), fnorm * std::sqrt(d)});
        const double zeta = std::max({10.0, std::sqrt(d), d * (1.0 + cnorm) / (1.0 + fnorm)});
        S_[b] = xi * CMatrix::Identity(blk.dim, blk.dim);
        Z_[b] = zeta * CMatrix::Identity(blk.dim, blk.dim);
    }
    s_ = RVector::Constant(nlp_, 10.0);
    z_ = RVector::Constant(nlp_, 10.0);
    for (int r = 0; r < nlp_; ++r) {
        const auto& row = cp_.lp[static_cast<std::size_t>(r)];
        double g = std::abs(row.constant);
        for (double v : row.val) g = std::max(g, std::abs(v));
        s_(r) = std::max(10.0, g);
        z_(r) = std::max(10.0, (1.0 + cnorm) / (1.0 + g));
    }
}

void InteriorPoint::residuals() {
    Rp_.resize(nb_);
    for (std::size_t b = 0; b < nb_; ++b) {
        const auto& blk = cp_.blocks[b];
        Rp_[b] = blk.f0 + apply_linear(cp_, blk, y_) - S_[b];
        Rp_[b] = sym(Rp_[b]);
    }
    Rlp_.resize(nlp_);
    for (int r = 0; r < nlp_; ++r) {
        const auto& row = cp_.lp[static_cast<std::size_t>(r)];
        Rlp_(r) = row.constant + row.dot(y_) - s_(r);
    }
    Re_ = f_ - E_ * y_;
    RVector at = RVector::Zero(cp_.m);
    for (std::size_t b = 0; b < nb_; ++b) apply_adjoint(cp_, cp_.blocks[b], Z_[b], at);
    for (int r = 0; r < nlp_; ++r) {
        const auto& row = cp_.lp[static_cast<std::size_t>(r)];
        for (std::size_t k = 0; k < row.idx.size(); ++k) at(row.idx[k]) += row.val[k] * z_(r);
    }
    if (neq_ > 0) at += E_.transpose() * w_;
    Rd_ = cp_.c - at;
}

bool InteriorPoint::factorize() {
    const int m = cp_.m;
    H_ = RMatrix::Zero(m, m);
    for (std::size_t b = 0; b < nb_; ++b) {
        const auto& blk = cp_.blocks[b];
        const CMatrix& Z = Z_[b];
        const CMatrix& Si = Sinv_[b];
        // congruence-congruence
        for (std::size_t u = 0; u < blk.maps.size(); ++u) {
            for (std::size_t v = u; v < blk.maps.size(); ++v) {
                const auto& mu = blk.maps[u];
                const auto& mv = blk.maps[v];
                const CMatrix P = mu.identity ? (mv.identity ? Z : CMatrix(Z * mv.w.adjoint()))
                                              : (mv.identity ? CMatrix(mu.w * Z) : CMatrix(mu.w * Z * mv.w.adjoint()));
                const CMatrix R = mv.identity ? (mu.identity ? Si : CMatrix(Si * mu.w.adjoint()))
                                              : (mu.identity ? CMatrix(mv.w * Si) : CMatrix(mv.w * Si * mu.w.adjoint()));
                const CongTerm* first_u = nullptr;
                const CongTerm* first_v = nullptr;
                for (const auto& t : blk.terms) {
                    if (t.map == static_cast<int>(u) && !first_u) first_u = &t;
                    if (t.map == static_cast<int>(v) && !first_v) first_v = &t;
                }
                if (!first_u || !first_v) continue;
                const auto& vu = cp_.vars[static_cast<std::size_t>(first_u->var)];
                const auto& vv = cp_.vars[static_cast<std::size_t>(first_v->var)];
                const RMatrix core = schur_core(vu, vv, P, R);
                for (const auto& tp : blk.terms) {
                    if (tp.map != static_cast<int>(u)) continue;
                    const auto& lp = cp_.vars[static_cast<std::size_t>(tp.var)];
                    for (const auto& tq : blk.terms) {
                        if (tq.map != static_cast<int>(v)) continue;
                        const auto& lq = cp_.vars[static_cast<std::size_t>(tq.var)];
                        const double w = tp.coef * tq.coef;
                        H_.block(lp.offset, lq.offset, lp.nparams, lq.nparams) += w * core;
                        if (u != v) H_.block(lq.offset, lp.offset, lq.nparams, lp.nparams) += w * core.transpose();
                    }
                }
            }
        }
        if (!blk.scalars.empty()) {
            std::vector<CMatrix> fz;
            std::vector<CMatrix> fsi;
            for (const auto& s : blk.scalars) {
                fz.push_back(s.f * Z);
                fsi.push_back(s.f * Si);
            }
            for (std::size_t i = 0; i < blk.scalars.size(); ++i) {
                for (std::size_t j = 0; j < blk.scalars.size(); ++j) {
                    // Re Tr(F_i Z F_j S^-1) = Re sum (F_i Z) .* (F_j S^-1)^T
                    const double v = (fz[i].cwiseProduct(fsi[j].transpose())).sum().real();
                    H_(blk.scalars[i].y, blk.scalars[j].y) += v;
                }
                for (std::size_t u = 0; u < blk.maps.size(); ++u) {
                    const auto& md = blk.maps[u];
                    const CMatrix inner = Si * fz[i];
                    const CMatrix T = md.identity ? inner : CMatrix(md.w * inner * md.w.adjoint());
                    for (const auto& t : blk.terms) {
                        if (t.map != static_cast<int>(u)) continue;
                        const auto& lv = cp_.vars[static_cast<std::size_t>(t.var)];
                        RVector col = RVector::Zero(cp_.m);
                        add_trace_general(lv, T, t.coef, col);
                        const int yi = blk.scalars[i].y;
                        H_.block(lv.offset, yi, lv.nparams, 1) += col.segment(lv.offset, lv.nparams);
                        H_.block(yi, lv.offset, 1, lv.nparams) += col.segment(lv.offset, lv.nparams).transpose();
                    }
                }
            }
        }
    }
    for (int r = 0; r < nlp_; ++r) {
        const auto& row = cp_.lp[static_cast<std::size_t>(r)];
        const double w = z_(r) / s_(r);
        for (std::size_t i = 0; i < row.idx.size(); ++i) {
            for (std::size_t j = 0; j < row.idx.size(); ++j) H_(row.idx[i], row.idx[j]) += w * row.val[i] * row.val[j];
        }
    }
    H_ = 0.5 * (H_ + H_.transpose());
    double dmax = 0.0;
    for (int i = 0; i < m; ++i) dmax = std::max(dmax, H_(i, i));
    if (dmax <= 0.0) dmax = 1.0;
    for (int i = 0; i < m; ++i) {
        if (H_(i, i) <= 1e-14 * dmax) H_(i, i) += 1e-10 * dmax;
    }
    double reg = 1e-14 * dmax;
    for (int attempt = 0; attempt < 8; ++attempt) {
        RMatrix Hr = H_;
        Hr.diagonal().array() += reg;
        cholH_.compute(Hr);
        if (cholH_.info() == Eigen::Success) break;
        reg *= 100.0;
        if (attempt == 7) return false;
    }
    if (neq_ > 0) {
        HinvEt_ = cholH_.solve(E_.transpose());
        RMatrix ehe = E_ * HinvEt_;
        double emax = ehe.diagonal().cwiseAbs().maxCoeff();
        if (emax <= 0.0) emax = 1.0;
        double ereg = 1e-14 * emax;
        for (int attempt = 0; attempt < 8; ++attempt) {
            RMatrix er = ehe;
            er.diagonal().array() += ereg;
            cholEHE_.compute(er);
            if (cholEHE_.info() == Eigen::Success) break;
            ereg *= 100.0;
            if (attempt == 7) return false;
        }
    }
    return true;
}

Direction InteriorPoint::direction(const std::vector<CMatrix>& rc, const RVector& rc_lp) {
    Direction d;
    RVector rhs = -Rd_;
    for (std::size_t b = 0; b < nb_; ++b) {
        const CMatrix t = rc[b] - sym(Z_[b] * Rp_[b] * Sinv_[b]);
        apply_adjoint(cp_, cp_.blocks[b], t, rhs);
    }
    RVector tl(nlp_);
    for (int r = 0; r < nlp_; ++r) tl(r) = rc_lp(r) - z_(r) / s_(r) * Rlp_(r);
    for (int r = 0; r < nlp_; ++r) {
        const auto& row = cp_.lp[static_cast<std::size_t>(r)];
        for (std::size_t k = 0; k < row.idx.size(); ++k) rhs(row.idx[k]) += row.val[k] * tl(r);
    }
    RVector hr = cholH_.solve(rhs);
    if (neq_ > 0) {
        d.dw = cholEHE_.solve(Re_ - E_ * hr);
        d.dy = hr + HinvEt_ * d.dw;
    } else {
        d.dw = RVector::Zero(0);
        d.dy = hr;
    }
    d.dS.resize(nb_);
    d.dZ.resize(nb_);
    for (std::size_t b = 0; b < nb_; ++b) {
        d.dS[b] = sym(apply_linear(cp_, cp_.blocks[b], d.dy) + Rp_[b]);
        d.dZ[b] = sym(rc[b] - sym(Z_[b] * d.dS[b] * Sinv_[b]));
    }
    d.ds.resize(nlp_);
    d.dz.resize(nlp_);
    for (int r = 0; r < nlp_; ++r) {
        d.ds(r) = cp_.lp[static_cast<std::size_t>(r)].dot(d.dy) + Rlp_(r);
        d.dz(r) = rc_lp(r) - z_(r) / s_(r) * d.ds(r);
    }
    return d;
}

double InteriorPoint::max_step(const Eigen::LLT<CMatrix>& chol, const CMatrix& d) {
    const CMatrix a = chol.matrixL().solve(d);
    const CMatrix m = chol.matrixL().solve(CMatrix(a.adjoint()));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sym(m), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    return lmin >= 0.0 ? kInf : -1.0 / lmin;
}

double InteriorPoint::max_step_lp(const RVector& v, const RVector& d) {
    double a = kInf;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (d(i) < 0.0) a = std::min(a, -v(i) / d(i));
    }
    return a;
}

IpmResult InteriorPoint::run(const SdpProblem& original, const Scaling& scaling) {
    (void)original;
    (void)scaling;
    initialize();
    IpmResult res;
    double nu = static_cast<double>(nlp_);
    for (const auto& b : cp_.blocks) nu += static_cast<double>(b.dim);
    if (nu == 0.0) nu = 1.0;

    double f0norm = 0.0;
    for (const auto& b : cp_.blocks) f0norm = std::max(f0norm, max_abs(b.f0));
    for (const auto& r : cp_.lp) f0norm = std::max(f0norm, std::abs(r.constant));
    if (neq_ > 0) f0norm = std::max(f0norm, f_.cwiseAbs().maxCoeff());
    const double cnorm = cp_.c.size() > 0 ? cp_.c.cwiseAbs().maxCoeff() : 0.0;

    const double tol_p = 1e-2 * std::min(cfg_.tol_cone, cfg_.tol_eq);
    const double tol_g = 1e-2 * cfg_.tol_gap;

    const double loose_p = 0.5 * std::min(cfg_.tol_cone, cfg_.tol_eq);
    const double loose_g = 0.5 * cfg_.tol_gap;

    double best_merit = kInf;
    IpmResult best;
    int stall = 0;

    for (int it = 0; it < cfg_.max_iterations; ++it) {
        res.iterations = it;
        bool interior = true;
        for (std::size_t b = 0; b < nb_ && interior; ++b) {
            cholS_[b].compute(S_[b]);
            cholZ_[b].compute(Z_[b]);
            if (cholS_[b].info() != Eigen::Success || cholZ_[b].info() != Eigen::Success) {
                interior = false;
                break;
            }
            Sinv_[b] = cholS_[b].solve(CMatrix::Identity(S_[b].rows(), S_[b].cols()));
            Sinv_[b] = sym(Sinv_[b]);
        }
        if (!interior) break;
        residuals();

        double gap = 0.0;
        for (std::size_t b = 0; b < nb_; ++b) gap += (Z_[b].cwiseProduct(S_[b].conjugate())).sum().real();
        gap += z_.dot(s_);
        mu_ = gap / nu;

        const double pobj = cp_.c.dot(y_);
        double dobj = 0.0;
        for (std::size_t b = 0; b < nb_; ++b) dobj -= (cp_.blocks[b].f0.cwiseProduct(Z_[b].conjugate())).sum().real();
        for (int r = 0; r < nlp_; ++r) dobj -= cp_.lp[static_cast<std::size_t>(r)].constant * z_(r);
        if (neq_ > 0) dobj += f_.dot(w_);

        double rp = 0.0;
        for (const auto& r : Rp_) rp = std::max(rp, r.cwiseAbs().maxCoeff());
        if (nlp_ > 0) rp = std::max(rp, Rlp_.cwiseAbs().maxCoeff());
        if (neq_ > 0) rp = std::max(rp, Re_.cwiseAbs().maxCoeff());
        res.pinf = rp / (1.0 + f0norm);
        res.dinf = (Rd_.size() > 0 ? Rd_.cwiseAbs().maxCoeff() : 0.0) / (1.0 + cnorm);
        res.relgap = std::max(std::abs(pobj - dobj), gap) / (1.0 + std::abs(pobj) + std::abs(dobj));

        if (cfg_.verbosity > 1) {
            std::cerr << "ipm it " << it << " pobj " << pobj << " dobj " << dobj << " pinf " << res.pinf << " dinf "
                      << res.dinf << " gap " << res.relgap << " mu " << mu_ << '\n';
        }

        if (res.pinf <= tol_p && res.dinf <= tol_p && res.relgap <= tol_g) {
            res.converged = true;
            res.y = y_;
            return res;
        }
        const double ynorm = y_.size() > 0 ? y_.cwiseAbs().maxCoeff() : 0.0;
        double znorm = z_.size() > 0 ? z_.cwiseAbs().maxCoeff() : 0.0;
        for (const auto& z : Z_) znorm = std::max(znorm, z.cwiseAbs().maxCoeff());
        if (ynorm > 1e9 && res.pinf < 1e-6 && pobj < -1e6) {
            res.diverged_y = true;
            break;
        }
        if (znorm > 1e9 && res.pinf < 1.0) {
            res.diverged_z = true;
            break;
        }
        const double merit = std::max({res.pinf, res.dinf, res.relgap});
        if (merit < best_merit) {
            best = res;
            best.y = y_;
        }
        if (merit < 0.9 * best_merit) {
            best_merit = merit;
            stall = 0;
        } else {
            ++stall;
            // late iterations lose accuracy once mu is tiny; settle for the best loose-tolerance point
            const bool loose_ok = best.pinf <= loose_p && best.dinf <= loose_p && best.relgap <= loose_g;
            if (stall > 12 || (stall > 3 && loose_ok)) break;
        }

        if (!factorize()) break;

        // predictor
        std::vector<CMatrix> rc(nb_);
        for (std::size_t b = 0; b < nb_; ++b) rc[b] = -Z_[b];
        RVector rc_lp = -z_;
        const Direction pred = direction(rc, rc_lp);
        double ap = 1.0;
        double ad = 1.0;
        for (std::size_t b = 0; b < nb_; ++b) {
            ap = std::min(ap, max_step(cholS_[b], pred.dS[b]));
            ad = std::min(ad, max_step(cholZ_[b], pred.dZ[b]));
        }
        ap = std::min(ap, max_step_lp(s_, pred.ds));
        ad = std::min(ad, max_step_lp(z_, pred.dz));

        double gap_aff = 0.0;
        for (std::size_t b = 0; b < nb_; ++b) {
            gap_aff += ((Z_[b] + ad * pred.dZ[b]).cwiseProduct((S_[b] + ap * pred.dS[b]).conjugate())).sum().real();
        }
        gap_aff += (z_ + ad * pred.dz).dot(s_ + ap * pred.ds);
        const double mu_aff = std::max(gap_aff, 0.0) / nu;
        double sigma = std::pow(mu_aff / mu_, 3.0);
        sigma = std::clamp(sigma, 0.0, 1.0);

        // corrector
        for (std::size_t b = 0; b < nb_; ++b) {
            rc[b] = sigma * mu_ * Sinv_[b] - Z_[b] - sym(pred.dZ[b] * pred.dS[b] * Sinv_[b]);
        }
        for (int r = 0; r < nlp_; ++r) rc_lp(r) = sigma * mu_ / s_(r) - z_(r) - pred.dz(r) * pred.ds(r) / s_(r);
        const Direction corr = direction(rc, rc_lp);

        ap = kInf;
        ad = kInf;
        for (std::size_t b = 0; b < nb_; ++b) {
            ap = std::min(ap, max_step(cholS_[b], corr.dS[b]));
            ad = std::min(ad, max_step(cholZ_[b], corr.dZ[b]));
        }
        ap = std::min(ap, max_step_lp(s_, corr.ds));
        ad = std::min(ad, max_step_lp(z_, corr.dz));
        const double tau = 0.98;
        ap = std::min(1.0, tau * ap);
        ad = std::min(1.0, tau * ad);

        y_ += ap * corr.dy;
        for (std::size_t b = 0; b < nb_; ++b) {
            S_[b] = sym(S_[b] + ap * corr.dS[b]);
            Z_[b] = sym(Z_[b] + ad * corr.dZ[b]);
        }
        s_ += ap * corr.ds;
        z_ += ad * corr.dz;
        if (neq_ > 0) w_ += ad * corr.dw;

        if (ap < 1e-10 && ad < 1e-10) break;
    }
    if (best.y.size() == 0) {
        res.y = y_;
        return res;
    }
    best.iterations = res.iterations;
    best.diverged_y = res.diverged_y;
    best.diverged_z = res.diverged_z;
    if (best.diverged_y) best.y = y_;
    return best;
}

// ---------------------------------------------------------------------------

struct Unscaled {
    std::vector<HermitianMatrix> matrices;
    std::vector<double> scalars;
};

Unscaled unscale(const Compiled& cp, const RVector& y) {
    Unscaled u;
    for (const auto& v : cp.vars) u.matrices.emplace_back(CMatrix(v.scale * var_matrix(v, y)));
    for (std::size_t t = 0; t < cp.scalar_y.size(); ++t) u.scalars.push_back(cp.scalar_scale[t] * y(cp.scalar_y[t]));
    return u;
}

SdpSolution solve_impl(const SdpProblem& problem, const SolverConfig& cfg) {
    problem.validate();
    const Scaling scaling = equilibrate(problem, cfg.equilibrate);
    const Compiled cp = compile(problem, scaling);
    InteriorPoint ipm(cp, cfg);
    const IpmResult r = ipm.run(problem, scaling);

    SdpSolution sol;
    sol.iterations = r.iterations;
    sol.dual_residual = r.dinf;
    sol.relative_gap = r.relgap;
    Unscaled u = unscale(cp, r.y);
    sol.matrices = std::move(u.matrices);
    sol.scalars = std::move(u.scalars);
    sol.objective_value = evaluate(problem.objective(), sol.matrices, sol.scalars);
    sol.primal_residual = max_violation(problem, sol.matrices, sol.scalars);

    const double relgap_ok = cfg.tol_gap;
    const bool meets = r.pinf <= cfg.tol_cone && r.dinf <= cfg.tol_cone && r.relgap <= relgap_ok &&
                       sol.primal_residual <= cfg.tol_cone;
    if ((r.converged || meets) && sol.primal_residual <= cfg.tol_cone) {
        sol.status = SolveStatus::Optimal;
        return sol;
    }
    sol.status = SolveStatus::MaxIterations;
    if (!cfg.classify_failures) return sol;

    SolverConfig sub = cfg;
    sub.classify_failures = false;
    const FeasibilityVerdict v = check_feasible(problem, sub);
    sol.phase_one_slack = v.slack;
    if (v.verdict == Verdict::Infeasible) {
        sol.status = SolveStatus::Infeasible;
    } else if (v.verdict == Verdict::Feasible && r.diverged_y) {
        sol.status = SolveStatus::Unbounded;
    }
    return sol;
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SolverConfig& cfg) { return solve_impl(problem, cfg); }

FeasibilityVerdict check_feasible(const SdpProblem& problem, const SolverConfig& cfg) {
    const PhaseOneProblem p1 = make_phase_one(problem);
    SolverConfig sub = cfg;
    sub.classify_failures = false;
    const SdpSolution sol = solve_impl(p1.problem, sub);
    FeasibilityVerdict v;
    v.solver_status = sol.status;
    v.iterations = sol.iterations;
    v.slack = sol.value(p1.slack);
    if (sol.status != SolveStatus::Optimal) {
        // a stalled run can still bound the optimal slack from below through the duality gap
        const double lower = v.slack - sol.relative_gap * (2.0 + 2.0 * std::abs(v.slack));
        const bool usable = sol.primal_residual <= cfg.tol_cone && sol.relative_gap <= 1e-3 && sol.dual_residual <= 1e-3;
        v.verdict = usable && lower > 10.0 * cfg.tol_feas ? Verdict::Infeasible : Verdict::Marginal;
        return v;
    }
    if (v.slack <= cfg.tol_feas) {
        v.verdict = Verdict::Feasible;
    } else if (v.slack > 10.0 * cfg.tol_feas) {
        v.verdict = Verdict::Infeasible;
    } else {
        v.verdict = Verdict::Marginal;
    }
    return v;
}

}  // namespace rgsbf::sdp
