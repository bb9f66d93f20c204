#include "gaincap/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gaincap::optim {

namespace {

void clamp_into(std::vector<double>& x, std::span<const double> lo,
                std::span<const double> hi) {
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = std::min(std::max(x[i], lo[i]), hi[i]);
}

double diameter(const std::vector<std::vector<double>>& verts) {
  double d = 0.0;
  for (std::size_t a = 0; a < verts.size(); ++a)
    for (std::size_t b = a + 1; b < verts.size(); ++b)
      for (std::size_t i = 0; i < verts[a].size(); ++i)
        d = std::max(d, std::abs(verts[a][i] - verts[b][i]));
  return d;
}

}  // namespace

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 1)
    throw std::invalid_argument("log_grid: need 0 < lo < hi and n >= 1");
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = std::sqrt(lo * hi);
    return out;
  }
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < n; ++i)
    out[i] = std::exp(llo + (lhi - llo) * double(i) / double(n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

SimplexResult simplex_max(const Objective& f, std::span<const double> x0,
                          std::span<const double> lo,
                          std::span<const double> hi,
                          const SimplexOptions& opt) {
  const std::size_t dim = x0.size();
  if (dim == 0 || lo.size() != dim || hi.size() != dim)
    throw std::invalid_argument("simplex_max: dimension mismatch");

  // Minimize -f with the standard coefficients.
  const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
  auto cost = [&](const std::vector<double>& x) { return -f(x); };

  std::vector<std::vector<double>> verts(dim + 1,
                                         std::vector<double>(x0.begin(), x0.end()));
  for (std::size_t i = 0; i < dim; ++i) {
    double step = opt.init_step;
    if (verts[i + 1][i] + step > hi[i]) step = -opt.init_step;
    verts[i + 1][i] += step;
    clamp_into(verts[i + 1], lo, hi);
  }
  std::vector<double> fv(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) fv[i] = cost(verts[i]);

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), cand(dim);
  int it = 0;
  for (; it < opt.max_iters; ++it) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });

    const double fbest = fv[order.front()];
    const double fworst = fv[order.back()];
    if (std::abs(fworst - fbest) <= opt.ftol * (std::abs(fbest) + 1e-12) &&
        diameter(verts) <= opt.xtol)
      break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t r = 0; r + 1 <= dim; ++r)
      for (std::size_t i = 0; i < dim; ++i)
        centroid[i] += verts[order[r]][i] / double(dim);

    auto& worst = verts[order.back()];
    double& fworst_ref = fv[order.back()];

    for (std::size_t i = 0; i < dim; ++i)
      cand[i] = centroid[i] + alpha * (centroid[i] - worst[i]);
    clamp_into(cand, lo, hi);
    const double fr = cost(cand);

    if (fr < fv[order.front()]) {
      std::vector<double> expand(dim);
      for (std::size_t i = 0; i < dim; ++i)
        expand[i] = centroid[i] + gamma * (cand[i] - centroid[i]);
      clamp_into(expand, lo, hi);
      const double fe = cost(expand);
      if (fe < fr) {
        worst = expand;
        fworst_ref = fe;
      } else {
        worst = cand;
        fworst_ref = fr;
      }
      continue;
    }
    if (fr < fv[order[dim - 1]]) {
      worst = cand;
      fworst_ref = fr;
      continue;
    }
    // Contract toward the better of worst/reflected.
    const bool outside = fr < fworst_ref;
    std::vector<double> contr(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      const double toward = outside ? cand[i] : worst[i];
      contr[i] = centroid[i] + rho * (toward - centroid[i]);
    }
    clamp_into(contr, lo, hi);
    const double fc = cost(contr);
    if (fc < std::min(fr, fworst_ref)) {
      worst = contr;
      fworst_ref = fc;
      continue;
    }
    // Shrink toward the best vertex.
    const auto& best = verts[order.front()];
    for (std::size_t r = 1; r <= dim; ++r) {
      auto& v = verts[order[r]];
      for (std::size_t i = 0; i < dim; ++i)
        v[i] = best[i] + sigma * (v[i] - best[i]);
      clamp_into(v, lo, hi);
      fv[order[r]] = cost(v);
    }
  }

  std::size_t ib = 0;
  for (std::size_t i = 1; i <= dim; ++i)
    if (fv[i] < fv[ib]) ib = i;
  SimplexResult res;
  res.x = verts[ib];
  res.f = -fv[ib];
  res.iters = it;
  return res;
}

}  // namespace gaincap::optim
