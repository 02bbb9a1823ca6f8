#pragma once

#include <cstring>
#include <memory>

#include "itw/filters.hpp"
#include "itw/transform.hpp"

namespace itw {

// Matrix-free square linear operator on coefficient vectors over one grid.
class LinOp {
 public:
  virtual ~LinOp() = default;
  virtual std::size_t dim() const = 0;
  virtual std::shared_ptr<const MultiGrid> grid() const = 0;
  // out is overwritten
  virtual void apply(const double* in, double* out) const = 0;
  virtual bool has_transpose() const { return false; }
  virtual void apply_transpose(const double*, double*) const {
    throw std::logic_error("operator does not support transpose application");
  }
};

inline Field apply(const LinOp& op, const Field& c) {
  require_kind(c, FieldKind::coefficients, "apply");
  if (c.grid.get() != op.grid().get())
    throw std::invalid_argument("apply: operator/field grid mismatch");
  Field out(c.grid, FieldKind::coefficients);
  op.apply(c.v.data(), out.v.data());
  return out;
}

namespace detail {

// out(o) += pref * sum_i F(i - c*o) * in(i)      (kind A)
// out(o) += pref * sum_i F(o - c*i) * in(i)      (kind B)
// 1D filter application along `axis` of a 3D block; all other axes copied.
struct AxisSpec {
  const Stencil* F = nullptr;
  bool kindB = false;
  int c = 1;
};

inline void filter_axis(const AxisSpec& sp, int axis, const std::array<int, 3>& in_lo,
                        const std::array<int, 3>& in_ext, const double* in,
                        const std::array<int, 3>& out_lo, const std::array<int, 3>& out_ext,
                        double* out, double pref) {
  const Stencil& F = *sp.F;
  const int ilo = in_lo[axis], ihi = in_lo[axis] + in_ext[axis] - 1;
  const int olo = out_lo[axis], ohi = out_lo[axis] + out_ext[axis] - 1;
  auto istride = [&](int d) -> std::ptrdiff_t {
    return d == 2 ? 1 : d == 1 ? in_ext[2] : std::ptrdiff_t(in_ext[1]) * in_ext[2];
  };
  auto ostride = [&](int d) -> std::ptrdiff_t {
    return d == 2 ? 1 : d == 1 ? out_ext[2] : std::ptrdiff_t(out_ext[1]) * out_ext[2];
  };
  int d1 = (axis == 0) ? 1 : 0;
  int d2 = (axis == 2) ? 1 : 2;
  const std::ptrdiff_t is = istride(axis), os = ostride(axis);
  const std::ptrdiff_t is1 = istride(d1), os1 = ostride(d1);
  const std::ptrdiff_t is2 = istride(d2), os2 = ostride(d2);
  const int n1 = in_ext[d1], n2 = in_ext[d2];
#pragma omp parallel for schedule(static) if (n1 > 16)
  for (int i1 = 0; i1 < n1; ++i1) {
    for (int i2 = 0; i2 < n2; ++i2) {
      const double* ip = in + i1 * is1 + i2 * is2;
      double* op = out + i1 * os1 + i2 * os2;
      for (int o = olo; o <= ohi; ++o) {
        int ia, ib;
        if (!sp.kindB) {
          ia = F.lo + sp.c * o;
          ib = F.hi() + sp.c * o;
        } else {
          // o - c*i in [lo, hi]
          int num_lo = o - F.hi(), num_hi = o - F.lo;
          ia = (num_lo >= 0) ? (num_lo + sp.c - 1) / sp.c : -((-num_lo) / sp.c);
          ib = (num_hi >= 0) ? num_hi / sp.c : -((-num_hi + sp.c - 1) / sp.c);
        }
        ia = std::max(ia, ilo);
        ib = std::min(ib, ihi);
        double acc = 0.0;
        for (int i = ia; i <= ib; ++i) {
          int arg = sp.kindB ? (o - sp.c * i) : (i - sp.c * o);
          acc += F.at(arg) * ip[(i - ilo) * is];
        }
        op[(o - olo) * os] += pref * acc;
      }
    }
  }
}

}  // namespace detail

// Tensor-product Laplacian assembled from the a/s filter families; represents
// the grid-unit operator d2/dx2 + d2/dy2 + d2/dz2 on expansion coefficients.
class LaplacianOp : public LinOp {
 public:
  LaplacianOp(std::shared_ptr<const MultiGrid> grid, std::shared_ptr<const FilterTable> ft)
      : grid_(std::move(grid)), ft_(std::move(ft)) {
    int iota_min = grid_->classes().front().iota, iota_max = iota_min;
    for (const auto& pc : grid_->classes()) {
      iota_min = std::min(iota_min, pc.iota);
      iota_max = std::max(iota_max, pc.iota);
    }
    if (ft_->jspan() < iota_max - iota_min)
      throw std::logic_error("LaplacianOp: filter table jspan smaller than grid level span");
    build_tasks();
  }

  std::size_t dim() const override { return grid_->size(); }
  std::shared_ptr<const MultiGrid> grid() const override { return grid_; }
  double scale_a() const { return grid_->scale_a(); }

  void apply(const double* in, double* out) const override { run(in, out, false); }
  bool has_transpose() const override { return true; }
  void apply_transpose(const double* in, double* out) const override { run(in, out, true); }

  // dense matrix element from the filter formulas (test oracle and task source)
  double entry(std::size_t row, std::size_t col) const {
    const ParityClass& O = grid_->class_of(row);
    const ParityClass& I = grid_->class_of(col);
    auto lo = class_l(O, row);
    auto li = class_l(I, col);
    double sum = 0.0;
    for (int d = 0; d < 3; ++d) sum += entry_axis(O, lo, I, li, d);
    return sum;
  }

 private:
  struct Task {
    const ParityClass* out_c;
    const ParityClass* in_c;
    std::array<detail::AxisSpec, 3> ax;
    double pref;
  };

  static std::array<int, 3> class_l(const ParityClass& pc, std::size_t idx) {
    std::size_t r = idx - pc.offset;
    auto e = pc.extent();
    int lz = int(r % std::size_t(e[2]));
    r /= std::size_t(e[2]);
    int ly = int(r % std::size_t(e[1]));
    int lx = int(r / std::size_t(e[1]));
    return {pc.lo[0] + lx, pc.lo[1] + ly, pc.lo[2] + lz};
  }

  double entry_axis(const ParityClass& O, const std::array<int, 3>& lo, const ParityClass& I,
                    const std::array<int, 3>& li, int d) const {
    int jd = I.iota - O.iota;
    double pref = dpow2(2 * std::min(O.iota, I.iota));
    double prod = pref;
    for (int e = 0; e < 3; ++e) {
      int arg;
      if (O.iota <= I.iota)
        arg = li[e] - ipow2(jd) * lo[e];
      else
        arg = lo[e] - ipow2(-jd) * li[e];
      double f = (e == d) ? ft_->a(O.t[e], I.t[e], jd, arg) : ft_->s(O.t[e], I.t[e], jd, arg);
      prod *= f;
      if (prod == 0.0) return 0.0;
    }
    return prod;
  }

  void build_tasks() {
    const auto& cls = grid_->classes();
    for (const auto& O : cls)
      for (const auto& I : cls) {
        int jd = I.iota - O.iota;
        bool kindB = O.iota > I.iota;
        int c = ipow2(std::abs(jd));
        double pref = dpow2(2 * std::min(O.iota, I.iota));
        for (int d = 0; d < 3; ++d) {
          Task t;
          t.out_c = &O;
          t.in_c = &I;
          t.pref = pref;
          bool nonzero = true;
          for (int e = 0; e < 3; ++e) {
            const Stencil& F = (e == d) ? ft_->a_stencil(O.t[e], I.t[e], jd)
                                        : ft_->s_stencil(O.t[e], I.t[e], jd);
            if (F.empty()) nonzero = false;
            t.ax[std::size_t(e)] = detail::AxisSpec{&F, kindB, c};
          }
          if (nonzero) tasks_.push_back(t);
        }
      }
  }

  void run(const double* in, double* out, bool transpose) const {
    std::memset(out, 0, grid_->size() * sizeof(double));
    std::vector<double> buf1, buf2;
    for (const Task& t : tasks_) {
      const ParityClass* O = transpose ? t.in_c : t.out_c;
      const ParityClass* I = transpose ? t.out_c : t.in_c;
      // transposing swaps the pass kind while keeping the same stencils
      std::array<int, 3> cur_lo = {I->lo[0], I->lo[1], I->lo[2]};
      std::array<int, 3> cur_ext = I->extent();
      const double* src = in + I->offset;
      for (int e = 0; e < 3; ++e) {
        detail::AxisSpec sp = t.ax[std::size_t(e)];
        if (transpose) sp.kindB = !sp.kindB;
        std::array<int, 3> nxt_lo = cur_lo, nxt_ext = cur_ext;
        nxt_lo[e] = O->lo[e];
        nxt_ext[e] = O->extent()[e];
        std::vector<double>& dst_buf = (e % 2 == 0) ? buf1 : buf2;
        double* dst;
        double pref = (e == 2) ? t.pref : 1.0;
        if (e == 2) {
          dst = out + O->offset;
        } else {
          dst_buf.assign(std::size_t(nxt_ext[0]) * nxt_ext[1] * nxt_ext[2], 0.0);
          dst = dst_buf.data();
        }
        detail::filter_axis(sp, e, cur_lo, cur_ext, src, nxt_lo, nxt_ext, dst, pref);
        cur_lo = nxt_lo;
        cur_ext = nxt_ext;
        src = dst;
      }
    }
  }

  std::shared_ptr<const MultiGrid> grid_;
  std::shared_ptr<const FilterTable> ft_;
  std::vector<Task> tasks_;
};

// Pointwise multiplication in point space: M = U D W.
class MultiplyOp : public LinOp {
 public:
  MultiplyOp(std::shared_ptr<const TransformPlan> plan, std::vector<double> point_values)
      : plan_(std::move(plan)), d_(std::move(point_values)) {
    if (d_.size() != plan_->grid().size())
      throw std::invalid_argument("MultiplyOp: diagonal length != grid size");
  }

  std::size_t dim() const override { return d_.size(); }
  std::shared_ptr<const MultiGrid> grid() const override { return plan_->grid_ptr(); }
  const std::vector<double>& diagonal() const { return d_; }

  void apply(const double* in, double* out) const override {
    std::vector<double> v(d_.size(), 0.0);
    plan_->apply_W(in, v.data());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= d_[i];
    std::memset(out, 0, d_.size() * sizeof(double));
    plan_->apply_U(v.data(), out);
  }

  bool has_transpose() const override { return true; }
  void apply_transpose(const double* in, double* out) const override {
    std::vector<double> v(d_.size(), 0.0);
    plan_->apply_Ut(in, v.data());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= d_[i];
    std::memset(out, 0, d_.size() * sizeof(double));
    plan_->apply_Wt(v.data(), out);
  }

 private:
  std::shared_ptr<const TransformPlan> plan_;
  std::vector<double> d_;
};

inline std::shared_ptr<LinOp> multiply_operator(std::shared_ptr<const TransformPlan> plan,
                                                std::vector<double> d) {
  return std::make_shared<MultiplyOp>(std::move(plan), std::move(d));
}

class ScaledOp : public LinOp {
 public:
  ScaledOp(std::shared_ptr<const LinOp> op, double f) : op_(std::move(op)), f_(f) {}
  std::size_t dim() const override { return op_->dim(); }
  std::shared_ptr<const MultiGrid> grid() const override { return op_->grid(); }
  void apply(const double* in, double* out) const override {
    op_->apply(in, out);
    for (std::size_t i = 0; i < dim(); ++i) out[i] *= f_;
  }
  bool has_transpose() const override { return op_->has_transpose(); }
  void apply_transpose(const double* in, double* out) const override {
    op_->apply_transpose(in, out);
    for (std::size_t i = 0; i < dim(); ++i) out[i] *= f_;
  }

 private:
  std::shared_ptr<const LinOp> op_;
  double f_;
};

class SumOp : public LinOp {
 public:
  explicit SumOp(std::vector<std::shared_ptr<const LinOp>> parts) : parts_(std::move(parts)) {
    if (parts_.empty()) throw std::invalid_argument("SumOp: no parts");
    for (const auto& p : parts_)
      if (p->grid().get() != parts_.front()->grid().get())
        throw std::invalid_argument("SumOp: operator grid mismatch");
  }
  std::size_t dim() const override { return parts_.front()->dim(); }
  std::shared_ptr<const MultiGrid> grid() const override { return parts_.front()->grid(); }
  void apply(const double* in, double* out) const override {
    parts_.front()->apply(in, out);
    if (parts_.size() == 1) return;
    std::vector<double> tmp(dim());
    for (std::size_t p = 1; p < parts_.size(); ++p) {
      parts_[p]->apply(in, tmp.data());
      for (std::size_t i = 0; i < tmp.size(); ++i) out[i] += tmp[i];
    }
  }
  bool has_transpose() const override {
    for (const auto& p : parts_)
      if (!p->has_transpose()) return false;
    return true;
  }
  void apply_transpose(const double* in, double* out) const override {
    parts_.front()->apply_transpose(in, out);
    std::vector<double> tmp(dim());
    for (std::size_t p = 1; p < parts_.size(); ++p) {
      parts_[p]->apply_transpose(in, tmp.data());
      for (std::size_t i = 0; i < tmp.size(); ++i) out[i] += tmp[i];
    }
  }

 private:
  std::vector<std::shared_ptr<const LinOp>> parts_;
};

// A^T as a first-class operator.
class TransposedOp : public LinOp {
 public:
  explicit TransposedOp(std::shared_ptr<const LinOp> op) : op_(std::move(op)) {
    if (!op_->has_transpose())
      throw std::logic_error("transpose_apply: operator does not support transpose");
  }
  std::size_t dim() const override { return op_->dim(); }
  std::shared_ptr<const MultiGrid> grid() const override { return op_->grid(); }
  void apply(const double* in, double* out) const override { op_->apply_transpose(in, out); }
  bool has_transpose() const override { return true; }
  void apply_transpose(const double* in, double* out) const override { op_->apply(in, out); }
  std::shared_ptr<const LinOp> inner() const { return op_; }

 private:
  std::shared_ptr<const LinOp> op_;
};

inline std::shared_ptr<LinOp> transpose_apply(std::shared_ptr<const LinOp> op) {
  if (auto t = std::dynamic_pointer_cast<const TransposedOp>(op))
    return std::const_pointer_cast<LinOp>(std::static_pointer_cast<const LinOp>(t->inner()));
  return std::make_shared<TransposedOp>(std::move(op));
}

// c |-> -1/(2 a^2) L c : kinetic energy in Hartree with Bohr positions.
inline std::shared_ptr<LinOp> kinetic(std::shared_ptr<const LaplacianOp> lap) {
  double a = lap->scale_a();
  return std::make_shared<ScaledOp>(lap, -0.5 / (a * a));
}

inline std::shared_ptr<LinOp> hamiltonian(std::shared_ptr<const LinOp> kin,
                                          std::vector<std::shared_ptr<const LinOp>> locals,
                                          std::vector<std::shared_ptr<const LinOp>> nonlocals) {
  std::vector<std::shared_ptr<const LinOp>> parts;
  parts.push_back(std::move(kin));
  for (auto& p : locals) parts.push_back(std::move(p));
  for (auto& p : nonlocals) parts.push_back(std::move(p));
  return std::make_shared<SumOp>(std::move(parts));
}

}  // namespace itw
