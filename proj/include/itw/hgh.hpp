#pragma once

#include "itw/operators.hpp"
#include "itw/potentials.hpp"

namespace itw {

// Gamma-normalized radial projector p^l_i, unit norm in r^2 dr.
inline double hgh_projector_radial(int l, int i, double r_l, double r) {
  double expo = std::exp(-0.5 * (r / r_l) * (r / r_l));
  double powr = std::pow(r, l + 2 * (i - 1));
  double g = std::tgamma(l + (4.0 * i - 1.0) / 2.0);
  double den = std::pow(r_l, l + (4.0 * i - 1.0) / 2.0) * std::sqrt(g);
  return std::sqrt(2.0) * powr * expo / den;
}

// p^l_i(r) * Y_{l,m}(direction), real harmonics, smooth through the origin.
// m indexes {0} for l=0 and {x,y,z}-type combinations for l=1.
inline double hgh_projector_field(int l, int m, int i, double r_l, double dx, double dy,
                                  double dz) {
  double r2 = dx * dx + dy * dy + dz * dz;
  double r = std::sqrt(r2);
  if (l == 0) {
    return hgh_projector_radial(0, i, r_l, r) / (2.0 * std::sqrt(M_PI));
  }
  if (l == 1) {
    // p(r)/r is analytic: sqrt(2) r^{2(i-1)} exp(..)/den
    double expo = std::exp(-0.5 * r2 / (r_l * r_l));
    double powr = (i == 1) ? 1.0 : r2 * ((i == 2) ? 1.0 : r2);
    double g = std::tgamma(1 + (4.0 * i - 1.0) / 2.0);
    double den = std::pow(r_l, 1 + (4.0 * i - 1.0) / 2.0) * std::sqrt(g);
    double rad_over_r = std::sqrt(2.0) * powr * expo / den;
    double comp = (m == 0) ? dx : (m == 1) ? dy : dz;
    return std::sqrt(3.0 / (4.0 * M_PI)) * comp * rad_over_r;
  }
  throw std::logic_error("HGH nonlocal channels with l >= 2 are not supported");
}

// Separable nonlocal part of the HGH pseudopotential of one nucleus:
// sum_{l,m,i,j} |p_i Y_lm> h^l_ij <p_j Y_lm|.  Bra integrals use point-value
// quadrature on the finest-level patch around the nucleus; kets are stored as
// precomputed coefficient fields.
class HghNonlocalOp : public LinOp {
 public:
  HghNonlocalOp(std::shared_ptr<const TransformPlan> plan, std::array<double, 3> R_bohr,
                std::shared_ptr<const HghParams> params)
      : plan_(std::move(plan)), R_(R_bohr), params_(std::move(params)) {
    const MultiGrid& g = plan_->grid();
    const double a = g.scale_a();
    const int jmax = g.jmax();
    w_fine_ = std::pow(a * dpow2(-jmax), 3);

    double rcut = 0.0;
    for (const auto& ch : params_->channels)
      if (ch.nproj() > 0) rcut = std::max(rcut, 8.0 * ch.r_l);
    if (rcut == 0.0) return;  // purely local pseudopotential

    build_patch(g, rcut);
    build_projectors(g);
  }

  std::size_t dim() const override { return plan_->grid().size(); }
  std::shared_ptr<const MultiGrid> grid() const override { return plan_->grid_ptr(); }
  bool empty() const { return blocks_.empty(); }
  bool truncated() const { return truncated_; }

  void apply(const double* in, double* out) const override {
    std::memset(out, 0, dim() * sizeof(double));
    if (blocks_.empty()) return;
    std::vector<double> v(dim(), 0.0);
    plan_->apply_W(in, v.data());
    accumulate_from_values(v.data(), out);
  }

  bool has_transpose() const override { return true; }
  void apply_transpose(const double* in, double* out) const override {
    std::memset(out, 0, dim() * sizeof(double));
    if (blocks_.empty()) return;
    // transpose of C h (w P^T W): W^T P w h C^T
    std::vector<double> g_of_c(projs_.size(), 0.0);
    for (std::size_t p = 0; p < projs_.size(); ++p) {
      double s = 0.0;
      for (std::size_t q = 0; q < dim(); ++q) s += projs_[p].coeffs[q] * in[q];
      g_of_c[p] = s;
    }
    std::vector<double> vals(dim(), 0.0);
    for (const Block& b : blocks_) {
      for (int i = 0; i < b.n; ++i) {
        double f = 0.0;
        for (int j = 0; j < b.n; ++j)
          f += b.h[std::size_t(i)][std::size_t(j)] * g_of_c[b.first + std::size_t(j)];
        f *= w_fine_;
        const Proj& pr = projs_[b.first + std::size_t(i)];
        for (std::size_t q = 0; q < patch_.size(); ++q)
          vals[patch_[q]] += f * pr.patch_vals[q];
      }
    }
    plan_->apply_Wt(vals.data(), out);
  }

  // out_coeffs += V_nl acting on the function with the given point values
  void accumulate_from_values(const double* point_values, double* out_coeffs) const {
    for (const Block& b : blocks_) {
      std::array<double, 3> gvec{}, fvec{};
      for (int j = 0; j < b.n; ++j) {
        const Proj& pr = projs_[b.first + std::size_t(j)];
        double s = 0.0;
        for (std::size_t q = 0; q < patch_.size(); ++q)
          s += pr.patch_vals[q] * point_values[patch_[q]];
        gvec[std::size_t(j)] = w_fine_ * s;
      }
      for (int i = 0; i < b.n; ++i) {
        double f = 0.0;
        for (int j = 0; j < b.n; ++j)
          f += b.h[std::size_t(i)][std::size_t(j)] * gvec[std::size_t(j)];
        fvec[std::size_t(i)] = f;
      }
      for (int i = 0; i < b.n; ++i) {
        const Proj& pr = projs_[b.first + std::size_t(i)];
        double f = fvec[std::size_t(i)];
        if (f == 0.0) continue;
        for (std::size_t q = 0; q < pr.coeffs.size(); ++q) out_coeffs[q] += f * pr.coeffs[q];
      }
    }
  }

  // quadrature inner product of two point-value vectors over the patch
  double patch_inner(const std::vector<double>& f, const std::vector<double>& g) const {
    double s = 0.0;
    for (std::size_t q = 0; q < patch_.size(); ++q) s += f[patch_[q]] * g[patch_[q]];
    return w_fine_ * s;
  }

  // <p^l_i Y_lm | p^l_i Y_lm> by the module quadrature (normalization check)
  double projector_norm2(std::size_t which) const {
    const Proj& pr = projs_.at(which);
    double s = 0.0;
    for (double x : pr.patch_vals) s += x * x;
    return w_fine_ * s;
  }
  std::size_t projector_count() const { return projs_.size(); }

 private:
  struct Proj {
    int l = 0, m = 0, i = 1;
    std::vector<double> coeffs;
    std::vector<double> patch_vals;
  };
  struct Block {
    std::size_t first = 0;  // index into projs_
    int n = 0;
    std::array<std::array<double, 3>, 3> h{};
  };

  void build_patch(const MultiGrid& g, double rcut) {
    const int jmax = g.jmax();
    const double a = g.scale_a();
    const double hfine = a * dpow2(-jmax);
    const LevelBox* fb = g.level_box(jmax);
    std::array<int, 3> klo{}, khi{};
    for (int d = 0; d < 3; ++d) {
      int lo = int(std::ceil((R_[d] - rcut) / hfine));
      int hi = int(std::floor((R_[d] + rcut) / hfine));
      if (lo < fb->lo[d]) { lo = fb->lo[d]; truncated_ = true; }
      if (hi > fb->hi[d]) { hi = fb->hi[d]; truncated_ = true; }
      klo[d] = lo;
      khi[d] = hi;
    }
    for (int kx = klo[0]; kx <= khi[0]; ++kx)
      for (int ky = klo[1]; ky <= khi[1]; ++ky)
        for (int kz = klo[2]; kz <= khi[2]; ++kz) {
          double dx = kx * hfine - R_[0], dy = ky * hfine - R_[1], dz = kz * hfine - R_[2];
          if (dx * dx + dy * dy + dz * dz > rcut * rcut) continue;
          auto idx = g.index_of_mesh_point(jmax, {kx, ky, kz});
          if (!idx) continue;  // hole in the grid: quadrature skips it
          patch_.push_back(*idx);
          rel_.push_back({dx, dy, dz});
        }
  }

  void build_projectors(const MultiGrid& g) {
    for (const auto& ch : params_->channels) {
      int n = ch.nproj();
      if (n == 0) continue;
      if (ch.l > 1) throw std::logic_error("HGH nonlocal channels with l >= 2 are not supported");
      for (int m = 0; m < 2 * ch.l + 1; ++m) {
        Block b;
        b.first = projs_.size();
        b.n = n;
        b.h = ch.h;
        for (int i = 1; i <= n; ++i) {
          Proj pr;
          pr.l = ch.l;
          pr.m = m;
          pr.i = i;
          std::vector<double> vals(g.size(), 0.0);
          for (std::size_t q = 0; q < g.size(); ++q) {
            auto rp = g.position_bohr(q);
            vals[q] = hgh_projector_field(ch.l, m, i, ch.r_l, rp[0] - R_[0], rp[1] - R_[1],
                                          rp[2] - R_[2]);
          }
          pr.coeffs.assign(g.size(), 0.0);
          plan_->apply_U(vals.data(), pr.coeffs.data());
          pr.patch_vals.resize(patch_.size());
          for (std::size_t q = 0; q < patch_.size(); ++q)
            pr.patch_vals[q] =
                hgh_projector_field(ch.l, m, i, ch.r_l, rel_[q][0], rel_[q][1], rel_[q][2]);
          projs_.push_back(std::move(pr));
        }
        blocks_.push_back(b);
      }
    }
  }

  std::shared_ptr<const TransformPlan> plan_;
  std::array<double, 3> R_;
  std::shared_ptr<const HghParams> params_;
  double w_fine_ = 0.0;
  bool truncated_ = false;
  std::vector<std::size_t> patch_;
  std::vector<std::array<double, 3>> rel_;
  std::vector<Proj> projs_;
  std::vector<Block> blocks_;
};

// Kinetic + local multiplication + nonlocal projectors fused so that one
// backward/forward transform pair serves the whole application.
class HamiltonianOp : public LinOp {
 public:
  HamiltonianOp(std::shared_ptr<const TransformPlan> plan,
                std::shared_ptr<const LaplacianOp> lap, std::vector<double> local_point_values,
                std::vector<std::shared_ptr<const HghNonlocalOp>> nonlocals)
      : plan_(std::move(plan)),
        lap_(std::move(lap)),
        d_(std::move(local_point_values)),
        nl_(std::move(nonlocals)) {
    double a = lap_->scale_a();
    kin_factor_ = -0.5 / (a * a);
    if (d_.size() != plan_->grid().size())
      throw std::invalid_argument("HamiltonianOp: local potential length mismatch");
  }

  std::size_t dim() const override { return plan_->grid().size(); }
  std::shared_ptr<const MultiGrid> grid() const override { return plan_->grid_ptr(); }

  void apply(const double* in, double* out) const override {
    lap_->apply(in, out);
    for (std::size_t i = 0; i < dim(); ++i) out[i] *= kin_factor_;
    std::vector<double> v(dim(), 0.0);
    plan_->apply_W(in, v.data());
    std::vector<double> loc(dim(), 0.0);
    std::vector<double> t(dim());
    for (std::size_t i = 0; i < dim(); ++i) t[i] = d_[i] * v[i];
    plan_->apply_U(t.data(), loc.data());
    for (const auto& nl : nl_) nl->accumulate_from_values(v.data(), loc.data());
    for (std::size_t i = 0; i < dim(); ++i) out[i] += loc[i];
  }

 private:
  std::shared_ptr<const TransformPlan> plan_;
  std::shared_ptr<const LaplacianOp> lap_;
  std::vector<double> d_;
  std::vector<std::shared_ptr<const HghNonlocalOp>> nl_;
  double kin_factor_ = 0.0;
};

}  // namespace itw
