#include "liequant/symbol_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include "grid_data.hpp"

namespace liequant {

int MultiIndexPair::beta_order() const {
  int s = 0;
  for (int b : beta) s += b;
  return s;
}

std::string MultiIndexPair::label() const {
  std::ostringstream os;
  os << "a=[";
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (i) os << ";";
    os << alpha[i].first << "," << alpha[i].second;
  }
  os << "]";
  if (!beta.empty()) {
    os << " b=[";
    for (std::size_t i = 0; i < beta.size(); ++i) {
      if (i) os << ",";
      os << beta[i];
    }
    os << "]";
  }
  return os.str();
}

SingularSymbolError::SingularSymbolError(const std::string& what, std::vector<Irrep> irreps)
    : std::runtime_error(what), resonant(std::move(irreps)) {}

namespace {

double opnorm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  return m.jacobiSvd().singularValues()(0);
}

double taper_weight(double bw, double band) {
  if (band <= 0.0 || bw <= band / 2.0) return 1.0;
  const double t = (bw - band / 2.0) / (band / 2.0);
  const double c = std::cos(0.5 * M_PI * std::min(t, 1.0));
  return c * c;
}

// kernel-route difference without the diagnostics wrapper
Symbol difference_core(const Symbol& a, const Irrep& xi0, int row, int col, double out_band,
                       bool taper, const QuadratureGrid& work) {
  const GroupId& group = a.group;
  Symbol out;
  out.group = group;
  out.band = out_band;
  out.spatial_band = a.spatial_band;
  out.irreps = irrep_list(group, out_band);

  // q(y) = conj(xi0(y)_{row,col}) - delta on the work grid
  const std::size_t n = work.size();
  Vector q(n);
  std::size_t gi = SpectralCoefficients::npos;
  const auto& girreps = work.irreps();
  for (std::size_t i = 0; i < girreps.size(); ++i)
    if (girreps[i] == xi0) {
      gi = i;
      break;
    }
  const double delta = (row == col) ? 1.0 : 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const Matrix m = gi != SpectralCoefficients::npos ? work.irrep_matrix(gi, p)
                                                      : irrep_eval(group, xi0, work.point(p));
    q(p) = std::conj(m(row, col)) - delta;
  }

  for (const SpatialMode& mode : a.modes) {
    SpectralCoefficients c;
    c.group = group;
    c.band = a.band;
    c.irreps = a.irreps;
    c.blocks = mode.bank;
    if (taper)
      for (std::size_t i = 0; i < c.blocks.size(); ++i)
        c.blocks[i] *= taper_weight(detail::irrep_band(group, a.irreps[i]), a.band);
    GridFunction kappa = inverse(c, work);
    kappa.values = kappa.values.cwiseProduct(q);
    SpatialMode nm;
    nm.eta = mode.eta;
    nm.row = mode.row;
    nm.col = mode.col;
    nm.bank = forward(kappa, out_band).blocks;
    out.modes.push_back(std::move(nm));
  }
  return out;
}

}  // namespace

Symbol difference_apply(const Symbol& a, const Irrep& xi0, int row, int col,
                        const DifferenceOptions& opts) {
  const GroupId& group = a.group;
  if (group.kind == GroupKind::Torus && static_cast<int>(xi0.k.size()) != group.torus_dim)
    throw std::invalid_argument("difference generator does not belong to the group");
  if (row < 0 || col < 0 || row >= xi0.dim || col >= xi0.dim)
    throw std::invalid_argument("difference entry outside the generator dimension");
  const double r0 = detail::irrep_band(group, xi0);
  const double exact_band = a.band - r0;
  double out_band = opts.output_band >= 0.0 ? opts.output_band : exact_band;
  if (out_band < -1e-9) throw std::invalid_argument("symbol band too small for a difference");
  out_band = std::max(out_band, 0.0);
  if (out_band > exact_band + 1e-9 && !opts.taper) {
    std::ostringstream os;
    os << "difference output band " << out_band << " exceeds the exact range " << exact_band
       << " for input band " << a.band << "; rerun with taper to accept a windowed approximation";
    throw std::invalid_argument(os.str());
  }

  QuadratureGrid work;
  if (opts.work_grid) {
    if (!(opts.work_grid->group() == group))
      throw std::invalid_argument("difference work grid group mismatch");
    if (opts.work_grid->band() + 1e-9 < a.band + r0)
      throw std::invalid_argument("difference work grid band below input band + generator band");
    work = *opts.work_grid;
  } else {
    work = haar_grid(group, a.band + r0);
  }

  Symbol out = difference_core(a, xi0, row, col, out_band, opts.taper, work);

  if (opts.taper) {
    // how far the windowed result drifts from the exact difference, where an
    // exact reference is available; banks are aligned by irrep identity
    const double probe = std::min(out_band, a.band / 2.0);
    const auto disagreement = [&](const Symbol& exact) {
      double dmax = 0.0;
      for (std::size_t i = 0; i < out.irreps.size(); ++i) {
        if (detail::irrep_band(group, out.irreps[i]) > probe + 1e-9) continue;
        const std::size_t j = exact.find(out.irreps[i]);
        if (j == SpectralCoefficients::npos) continue;
        for (std::size_t mi = 0; mi < out.modes.size(); ++mi)
          dmax = std::max(dmax, opnorm(out.modes[mi].bank[i] - exact.modes[mi].bank[j]));
      }
      return dmax;
    };
    if (exact_band >= probe - 1e-9) {
      out.truncation_diagnostic =
          disagreement(difference_core(a, xi0, row, col, std::min(out_band, exact_band), false, work));
    } else if (a.closed_form) {
      const Symbol wide = builtin_symbol(a.closed_form->spec, group, 2.0 * a.band);
      const QuadratureGrid wide_grid = haar_grid(group, wide.band + r0);
      out.truncation_diagnostic =
          disagreement(difference_core(wide, xi0, row, col, out_band, false, wide_grid));
    }
  }
  return out;
}

Symbol spatial_derivative(const Symbol& a, int axis) {
  const GroupId& group = a.group;
  if (axis < 0 || axis >= group.dim()) throw std::invalid_argument("derivative axis out of range");
  Symbol out;
  out.group = group;
  out.band = a.band;
  out.spatial_band = a.spatial_band;
  out.irreps = a.irreps;

  // key modes by (eta, row, col); derivative rotates the column index
  std::map<std::pair<std::pair<std::vector<int>, int>, std::pair<int, int>>, std::size_t> where;
  for (const SpatialMode& mode : a.modes) {
    const Matrix p = lie_action(group, mode.eta)[axis];
    for (int w = 0; w < mode.eta.dim; ++w) {
      const complexd coef = p(w, mode.col);
      if (coef == complexd(0.0, 0.0)) continue;
      const auto key = std::make_pair(std::make_pair(mode.eta.k, mode.eta.two_ell),
                                      std::make_pair(mode.row, w));
      auto it = where.find(key);
      if (it == where.end()) {
        SpatialMode nm;
        nm.eta = mode.eta;
        nm.row = mode.row;
        nm.col = w;
        nm.bank.reserve(a.irreps.size());
        for (std::size_t i = 0; i < a.irreps.size(); ++i)
          nm.bank.push_back(Matrix::Zero(a.irreps[i].dim, a.irreps[i].dim));
        it = where.emplace(key, out.modes.size()).first;
        out.modes.push_back(std::move(nm));
      }
      auto& bank = out.modes[it->second].bank;
      for (std::size_t i = 0; i < a.irreps.size(); ++i) bank[i] += coef * mode.bank[i];
    }
  }
  if (out.modes.empty()) {
    // derivative vanished identically; keep a zero multiplier so the symbol stays usable
    std::vector<Matrix> zero;
    zero.reserve(a.irreps.size());
    for (const Irrep& xi : a.irreps) zero.push_back(Matrix::Zero(xi.dim, xi.dim));
    return Symbol::multiplier(group, a.band, std::move(zero));
  }
  return out;
}

Symbol spatial_derivative(const Symbol& a, const std::vector<int>& beta) {
  if (static_cast<int>(beta.size()) != a.group.dim())
    throw std::invalid_argument("spatial multi-index length must match the group dimension");
  Symbol out = a;
  for (int axis = static_cast<int>(beta.size()) - 1; axis >= 0; --axis)
    for (int rep = 0; rep < beta[axis]; ++rep) out = spatial_derivative(out, axis);
  return out;
}

std::vector<MultiIndexPair> default_class_fit_pairs(const GroupId& group, int alpha_max,
                                                    int beta_max) {
  const int d0 = group.kind == GroupKind::SU2 ? 2 : 1;
  std::vector<MultiIndexPair> pairs;
  pairs.push_back(MultiIndexPair{});  // (0, 0)
  std::vector<std::vector<std::pair<int, int>>> level{{}};
  for (int order = 1; order <= alpha_max; ++order) {
    std::vector<std::vector<std::pair<int, int>>> next;
    for (const auto& chain : level)
      for (int i = 0; i < d0; ++i)
        for (int j = 0; j < d0; ++j) {
          auto c = chain;
          c.emplace_back(i, j);
          next.push_back(c);
          pairs.push_back(MultiIndexPair{c, {}});
        }
    level = std::move(next);
  }
  const int n = group.dim();
  for (int order = 1; order <= beta_max; ++order) {
    // pure spatial multi-indices of the given total order
    std::vector<std::vector<int>> multis;
    std::vector<int> cur(n, 0);
    std::function<void(int, int)> rec = [&](int axis, int left) {
      if (axis == n - 1) {
        cur[axis] = left;
        multis.push_back(cur);
        return;
      }
      for (int v = 0; v <= left; ++v) {
        cur[axis] = v;
        rec(axis + 1, left - v);
      }
    };
    rec(0, order);
    for (auto& multi : multis) pairs.push_back(MultiIndexPair{{}, multi});
  }
  return pairs;
}

namespace {

struct LineFit {
  double slope = std::nan("");
  double intercept = std::nan("");
  double residual = std::nan("");
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit out;
  const std::size_t n = x.size();
  if (n < 2) return out;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (det == 0.0) return out;
  out.slope = (n * sxy - sx * sy) / det;
  out.intercept = (sy - out.slope * sx) / n;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (out.intercept + out.slope * x[i]);
    rss += e * e;
  }
  out.residual = std::sqrt(rss / n);
  return out;
}

Irrep difference_generator(const GroupId& group) {
  if (group.kind == GroupKind::SU2) {
    for (const Irrep& xi : irrep_list(group, 0.5))
      if (xi.two_ell == 1) return xi;
  } else {
    std::vector<int> e1(group.torus_dim, 0);
    e1[0] = 1;
    for (const Irrep& xi : irrep_list(group, 1.0))
      if (xi.k == e1) return xi;
  }
  throw std::logic_error("no difference generator");
}

Symbol truncate_symbol(const Symbol& a, double band) {
  if (band >= a.band) return a;
  Symbol out;
  out.group = a.group;
  out.band = band;
  out.spatial_band = a.spatial_band;
  out.closed_form = a.closed_form;
  out.irreps = irrep_list(a.group, band);
  for (const SpatialMode& mode : a.modes) {
    SpatialMode nm;
    nm.eta = mode.eta;
    nm.row = mode.row;
    nm.col = mode.col;
    nm.bank.reserve(out.irreps.size());
    for (const Irrep& xi : out.irreps) {
      const std::size_t i = a.find(xi);
      if (i == SpectralCoefficients::npos) throw std::logic_error("truncate: missing irrep");
      nm.bank.push_back(mode.bank[i]);
    }
    out.modes.push_back(std::move(nm));
  }
  return out;
}

// sup_x ||S(x, irreps[i])||_op for every irrep, on an evaluation grid for
// genuinely x-dependent symbols
std::vector<double> sup_opnorms(const Symbol& s) {
  std::vector<double> out(s.irreps.size(), 0.0);
  if (s.is_multiplier()) {
    for (std::size_t i = 0; i < s.irreps.size(); ++i) out[i] = opnorm(s.modes[0].bank[i]);
    return out;
  }
  const QuadratureGrid eval = haar_grid(s.group, std::max(1.0, s.spatial_band));
  for (std::size_t i = 0; i < s.irreps.size(); ++i)
    for (std::size_t p = 0; p < eval.size(); ++p)
      out[i] = std::max(out[i], opnorm(s.value_at(eval, p, i)));
  return out;
}

}  // namespace

ClassFit class_fit(const Symbol& a, const std::vector<MultiIndexPair>& pairs,
                   const ClassFitOptions& opts) {
  const GroupId& group = a.group;
  bool has_base = false;
  int depth = 0;
  for (const MultiIndexPair& pr : pairs) {
    if (pr.alpha_order() == 0 && pr.beta_order() == 0) has_base = true;
    depth = std::max(depth, pr.alpha_order());
  }
  if (!has_base) throw std::invalid_argument("class_fit pairs must include the (0,0) pair");

  const Irrep xi0 = difference_generator(group);
  const double r0 = detail::irrep_band(group, xi0);
  double lo = opts.window_lo, hi = opts.window_hi;
  if (lo < 0.0) lo = a.band / 4.0;
  if (hi < 0.0) hi = a.band - depth * r0;
  if (!(lo >= 1.0 - 1e-9) || !(hi > lo))
    throw std::invalid_argument("class_fit window must satisfy 1 <= lo < hi");

  const double needed = hi + depth * r0;
  Symbol base = a;
  if (a.band + 1e-9 < needed) {
    if (!a.closed_form) {
      std::ostringstream os;
      os << "class_fit window " << lo << ".." << hi << " with difference depth " << depth
         << " needs symbol band " << needed << " but only " << a.band << " is available";
      throw std::invalid_argument(os.str());
    }
    base = builtin_symbol(a.closed_form->spec, group, needed);
  } else if (a.band > needed + 1e-9) {
    base = a.closed_form ? builtin_symbol(a.closed_form->spec, group, needed)
                         : truncate_symbol(a, needed);
  }

  const QuadratureGrid work = haar_grid(group, base.band + r0);

  // window irreps and their log weights, taken from the pair outputs below
  const std::vector<Irrep> window = [&] {
    std::vector<Irrep> w;
    for (const Irrep& xi : irrep_list(group, hi)) {
      const double b = detail::irrep_band(group, xi);
      if (b >= lo - 1e-9 && b <= hi + 1e-9) w.push_back(xi);
    }
    return w;
  }();
  if (window.size() < 2) throw std::invalid_argument("class_fit window holds fewer than two irreps");
  std::vector<double> logw(window.size());
  for (std::size_t i = 0; i < window.size(); ++i) logw[i] = std::log(window[i].weight);

  // evaluate chains with prefix caching
  std::map<std::vector<std::pair<int, int>>, Symbol> chain_cache;
  chain_cache.emplace(std::vector<std::pair<int, int>>{}, base);
  std::function<const Symbol&(const std::vector<std::pair<int, int>>&)> chain_symbol =
      [&](const std::vector<std::pair<int, int>>& chain) -> const Symbol& {
    auto it = chain_cache.find(chain);
    if (it != chain_cache.end()) return it->second;
    std::vector<std::pair<int, int>> prefix(chain.begin(), chain.end() - 1);
    const Symbol& prev = chain_symbol(prefix);
    DifferenceOptions dopts;
    dopts.work_grid = &work;
    Symbol next = difference_apply(prev, xi0, chain.back().first, chain.back().second, dopts);
    return chain_cache.emplace(chain, std::move(next)).first->second;
  };

  ClassFit fit;
  std::map<std::pair<int, int>, std::vector<double>> group_env;  // (|a|,|b|) -> sup per window irrep
  for (const MultiIndexPair& pr : pairs) {
    const Symbol& alpha_sym = chain_symbol(pr.alpha);
    std::vector<double> sups;
    if (pr.beta_order() == 0) {
      sups = sup_opnorms(alpha_sym);
    } else {
      std::vector<int> beta = pr.beta;
      beta.resize(group.dim(), 0);
      sups = sup_opnorms(spatial_derivative(alpha_sym, beta));
    }
    const Symbol& shape = alpha_sym;  // irreps of the pair output
    std::vector<double> xs, ys, winvals(window.size(), 0.0);
    for (std::size_t wi = 0; wi < window.size(); ++wi) {
      const std::size_t i = shape.find(window[wi]);
      if (i == SpectralCoefficients::npos) throw std::logic_error("class_fit: window irrep missing");
      winvals[wi] = sups[i];
      if (sups[i] > 1e-280) {
        xs.push_back(logw[wi]);
        ys.push_back(std::log(sups[i]));
      }
    }
    const LineFit lf = fit_line(xs, ys);
    fit.rows.push_back(ClassFitRow{pr, lf.slope, lf.intercept, lf.residual});

    const auto key = std::make_pair(pr.alpha_order(), pr.beta_order());
    auto it = group_env.find(key);
    if (it == group_env.end()) it = group_env.emplace(key, std::vector<double>(window.size(), 0.0)).first;
    for (std::size_t wi = 0; wi < window.size(); ++wi)
      it->second[wi] = std::max(it->second[wi], winvals[wi]);
  }

  // per-group slope: envelope (pointwise max) or pooled points
  std::vector<std::array<double, 3>> groups;
  if (opts.envelope) {
    for (const auto& [key, env] : group_env) {
      std::vector<double> xs, ys;
      for (std::size_t wi = 0; wi < window.size(); ++wi)
        if (env[wi] > 1e-280) {
          xs.push_back(logw[wi]);
          ys.push_back(std::log(env[wi]));
        }
      const LineFit lf = fit_line(xs, ys);
      if (std::isnan(lf.slope)) continue;
      groups.push_back({static_cast<double>(key.first), static_cast<double>(key.second), lf.slope});
    }
  } else {
    std::map<std::pair<int, int>, std::vector<double>> pooled;
    for (const ClassFitRow& row : fit.rows)
      if (!std::isnan(row.slope)) pooled[{row.pair.alpha_order(), row.pair.beta_order()}].push_back(row.slope);
    for (const auto& [key, slopes] : pooled) {
      double s = 0.0;
      for (double v : slopes) s += v;
      groups.push_back({static_cast<double>(key.first), static_cast<double>(key.second),
                        s / static_cast<double>(slopes.size())});
    }
  }
  fit.group_slopes = groups;
  if (groups.empty()) throw std::invalid_argument("class_fit: no usable slopes");

  // slope(|a|, |b|) ~ m - rho |a| + delta |b|
  bool vary_a = false, vary_b = false;
  for (const auto& g : groups) {
    if (g[0] != groups[0][0]) vary_a = true;
    if (g[1] != groups[0][1]) vary_b = true;
  }
  const int cols = 1 + (vary_a ? 1 : 0) + (vary_b ? 1 : 0);
  Eigen::MatrixXd design(groups.size(), cols);
  Eigen::VectorXd rhs(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    int c = 0;
    design(i, c++) = 1.0;
    if (vary_a) design(i, c++) = -groups[i][0];
    if (vary_b) design(i, c++) = groups[i][1];
    rhs(i) = groups[i][2];
  }
  const Eigen::VectorXd sol = design.colPivHouseholderQr().solve(rhs);
  int c = 0;
  fit.m = sol(c++);
  fit.rho = vary_a ? sol(c++) : 0.0;
  fit.delta = vary_b ? sol(c++) : 0.0;
  fit.rho_identified = vary_a;
  fit.delta_identified = vary_b;
  return fit;
}

WeakNormResult weak_plancherel_norm(const Symbol& a, double p1, double p2, PlancherelWeight weight) {
  if (!a.is_multiplier())
    throw std::invalid_argument("weak Plancherel norm is defined for multipliers");
  if (!(p1 > 1.0 && p1 <= 2.0 && p2 >= 2.0 && std::isfinite(p2)))
    throw std::invalid_argument("weak norm exponents must satisfy 1 < p1 <= 2 <= p2 < inf");
  const double e = 1.0 / p1 - 1.0 / p2;
  const auto& bank = a.multiplier_bank();
  std::vector<std::pair<double, double>> items;  // (op norm, measure)
  for (std::size_t i = 0; i < a.irreps.size(); ++i) {
    const Irrep& xi = a.irreps[i];
    if (!xi.type_one) continue;
    const double mu = weight == PlancherelWeight::DimSquared
                          ? static_cast<double>(xi.dim) * xi.dim
                          : static_cast<double>(xi.dim) * xi.invariant_rank;
    items.emplace_back(opnorm(bank[i]), mu);
  }
  std::sort(items.begin(), items.end());
  WeakNormResult out;
  // distinct values descending, accumulating the tail measure mu{ v >= s }
  double tail = 0.0;
  std::vector<std::array<double, 3>> steps;
  for (std::size_t i = items.size(); i-- > 0;) {
    tail += items[i].second;
    const bool last_of_value = (i == 0) || items[i - 1].first != items[i].first;
    if (!last_of_value) continue;
    const double v = items[i].first;
    if (v <= 0.0) continue;
    const double cand = v * std::pow(tail, e);
    steps.push_back({v, tail, cand});
    if (cand > out.value) {
      out.value = cand;
      out.threshold = v;
    }
  }
  std::reverse(steps.begin(), steps.end());  // ascending in s
  out.steps = std::move(steps);
  return out;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

Matrix invariant_identity(const Irrep& xi) {
  Matrix m = Matrix::Zero(xi.dim, xi.dim);
  for (int i = 0; i < xi.invariant_rank; ++i) m(i, i) = 1.0;
  return m;
}

Symbol make_multiplier_builtin(const GroupId& group, double band, const std::string& spec,
                               const std::function<Matrix(const Irrep&)>& block) {
  std::vector<Irrep> irreps = irrep_list(group, band);
  std::vector<Matrix> bank;
  bank.reserve(irreps.size());
  for (const Irrep& xi : irreps) bank.push_back(block(xi));
  Symbol a = Symbol::multiplier(group, band, std::move(bank));
  a.closed_form = BuiltinSpec{spec};
  return a;
}

Symbol parametrix_of(const Symbol& inner, const GroupId& group, double band,
                     const std::string& spec, const std::string& inner_spec) {
  if (!inner.is_multiplier())
    throw std::invalid_argument("parametrix_of requires a multiplier inner symbol");

  // the vector field d pi(Y) + c is singular exactly when c sits on the
  // weight lattice i * (1/2) Z; refuse with the resonant irreps named
  if (inner_spec.rfind("vector_field_su2", 0) == 0) {
    const auto parts = split(inner_spec, ':');
    double re = 0.0, im = 0.0;
    if (parts.size() > 1) {
      const auto ps = split(parts[1], ',');
      if (!ps.empty() && !ps[0].empty()) re = std::stod(ps[0]);
      if (ps.size() > 1 && !ps[1].empty()) im = std::stod(ps[1]);
    }
    const double tol = 1e-9 * (1.0 + std::hypot(re, im));
    const double t0d = 2.0 * im;
    const long long t0 = std::llround(t0d);
    if (std::abs(re) <= tol && std::abs(t0d - static_cast<double>(t0)) <= tol) {
      std::vector<Irrep> resonant;
      for (const Irrep& xi : inner.irreps)
        if (xi.two_ell >= std::llabs(t0) && (xi.two_ell - std::llabs(t0)) % 2 == 0)
          resonant.push_back(xi);
      if (!resonant.empty()) {
        std::ostringstream os;
        os << "parametrix_of:" << inner_spec << " is singular: c = " << re << "+" << im
           << "i lies on the weight lattice; resonant irreps:";
        for (const Irrep& xi : resonant) os << " " << xi.label();
        throw SingularSymbolError(os.str(), resonant);
      }
    }
  }

  const auto& bank = inner.multiplier_bank();
  std::vector<Matrix> pbank;
  pbank.reserve(bank.size());
  for (std::size_t i = 0; i < bank.size(); ++i) {
    const Matrix& blk = bank[i];
    const double scale = blk.size() ? blk.cwiseAbs().maxCoeff() : 0.0;
    if (scale == 0.0) {
      pbank.push_back(Matrix::Zero(blk.rows(), blk.cols()));
      continue;
    }
    Eigen::JacobiSVD<Matrix> svd(blk, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double cut = 1e-10 * sv(0);
    Eigen::VectorXd inv(sv.size());
    for (int j = 0; j < sv.size(); ++j) inv(j) = sv(j) > cut ? 1.0 / sv(j) : 0.0;
    pbank.push_back(svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint());
  }
  Symbol a = Symbol::multiplier(group, band, std::move(pbank));
  a.closed_form = BuiltinSpec{spec};
  return a;
}

}  // namespace

Symbol builtin_symbol(const std::string& spec, const GroupId& group, double band) {
  const std::size_t colon = spec.find(':');
  const std::string name = spec.substr(0, colon == std::string::npos ? spec.size() : colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);

  if (name == "identity")
    return make_multiplier_builtin(group, band, spec, [](const Irrep& xi) { return invariant_identity(xi); });

  if (name == "bessel_potential") {
    if (rest.empty()) throw std::invalid_argument("bessel_potential needs an order, e.g. bessel_potential:-1");
    const double s = std::stod(rest);
    return make_multiplier_builtin(group, band, spec, [s](const Irrep& xi) {
      return Matrix(std::pow(xi.weight, s) * invariant_identity(xi));
    });
  }

  if (name == "casimir")
    return make_multiplier_builtin(group, band, spec, [](const Irrep& xi) {
      return Matrix(-xi.casimir * invariant_identity(xi));
    });

  if (name == "sublaplacian_su2") {
    if (group.kind != GroupKind::SU2)
      throw std::invalid_argument("sublaplacian_su2 requires an SU(2) group");
    return make_multiplier_builtin(group, band, spec, [&group](const Irrep& xi) {
      const auto y = lie_action(group, xi);
      return Matrix(y[0] * y[0] + y[1] * y[1]);
    });
  }

  if (name == "vector_field_su2") {
    if (group.kind != GroupKind::SU2)
      throw std::invalid_argument("vector_field_su2 requires an SU(2) group");
    if (rest.empty()) throw std::invalid_argument("vector_field_su2 needs c, e.g. vector_field_su2:0.3");
    const auto ps = split(rest, ',');
    const double re = std::stod(ps[0]);
    const double im = ps.size() > 1 && !ps[1].empty() ? std::stod(ps[1]) : 0.0;
    const int axis = ps.size() > 2 && !ps[2].empty() ? std::stoi(ps[2]) : 1;
    if (axis < 1 || axis > 3) throw std::invalid_argument("vector_field_su2 axis must be 1, 2 or 3");
    const complexd c(re, im);
    return make_multiplier_builtin(group, band, spec, [&group, c, axis](const Irrep& xi) {
      const auto y = lie_action(group, xi);
      return Matrix(y[axis - 1] + c * Matrix::Identity(xi.dim, xi.dim));
    });
  }

  if (name == "parametrix_of") {
    if (rest.empty()) throw std::invalid_argument("parametrix_of needs an inner symbol");
    const Symbol inner = builtin_symbol(rest, group, band);
    return parametrix_of(inner, group, band, spec, rest);
  }

  if (name == "modulated_bessel") {
    if (rest.empty()) throw std::invalid_argument("modulated_bessel needs an order");
    const double s = std::stod(rest);
    Symbol a;
    a.group = group;
    a.band = band;
    a.spatial_band = 1.0;
    a.irreps = irrep_list(group, band);
    const auto scaled_bank = [&](double factor) {
      std::vector<Matrix> bank;
      bank.reserve(a.irreps.size());
      for (const Irrep& xi : a.irreps)
        bank.push_back(Matrix(factor * std::pow(xi.weight, s) * invariant_identity(xi)));
      return bank;
    };
    SpatialMode trivial_mode;
    trivial_mode.eta = irrep_list(group, 0.0).front();
    trivial_mode.bank = scaled_bank(1.0);
    a.modes.push_back(std::move(trivial_mode));
    if (group.kind == GroupKind::SU2) {
      // g(x) = 1 + cos(beta)/2 through the zonal entry of the spin-1 irrep
      SpatialMode m;
      for (const Irrep& xi : irrep_list(group, 1.0))
        if (xi.two_ell == 2) m.eta = xi;
      const int zonal = group.homogeneous_space() ? 0 : 1;  // index of m = 0
      m.row = zonal;
      m.col = zonal;
      m.bank = scaled_bank(1.0 / 6.0);
      a.modes.push_back(std::move(m));
    } else {
      // g(x) = 1 + cos(2 pi x_1)/2
      for (int sign : {+1, -1}) {
        SpatialMode m;
        std::vector<int> k(group.torus_dim, 0);
        k[0] = sign;
        for (const Irrep& xi : irrep_list(group, 1.0))
          if (xi.k == k) m.eta = xi;
        m.bank = scaled_bank(0.25);
        a.modes.push_back(std::move(m));
      }
    }
    a.closed_form = BuiltinSpec{spec};
    return a;
  }

  throw std::invalid_argument("unknown builtin symbol: " + spec);
}

}  // namespace liequant
