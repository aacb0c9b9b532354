#include "poro/macro.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <numbers>
#include <thread>

#include "poro/errors.hpp"
#include "poro/linsolve.hpp"

namespace poro {

namespace {

constexpr double kPi = std::numbers::pi;

struct MacroGrid {
  int dim = 1;
  std::array<int, 2> ne{1, 1};
  std::array<double, 2> h{1, 1};
  std::array<long, 2> nn{2, 1};
  long n_nodes = 0;

  explicit MacroGrid(const MacroDomain& d) : dim(d.dim), ne(d.elements) {
    n_nodes = 1;
    for (int a = 0; a < dim; ++a) {
      h[a] = d.extent[a] / ne[a];
      nn[a] = ne[a] + 1;
      n_nodes *= nn[a];
    }
    if (dim == 1) nn[1] = 1;
  }
  long node(long i, long j = 0) const { return i + nn[0] * j; }
  bool boundary(long i, long j = 0) const {
    if (i == 0 || i == nn[0] - 1) return true;
    if (dim == 2 && (j == 0 || j == nn[1] - 1)) return true;
    return false;
  }
};

struct MacroKernel {
  int dim, nloc, ndof, nq, nv;
  std::vector<Vec> N;
  std::vector<Mat> G;
  std::vector<Mat> B;
  std::vector<Vec> divrow;
  std::vector<std::array<double, 2>> qp_ref; // reference coordinates
  double wq = 0.0;

  explicit MacroKernel(const MacroGrid& g) {
    dim = g.dim;
    nloc = 1 << dim;
    ndof = nloc * dim;
    nq = 1 << dim;
    nv = voigt_size(dim);
    double meas = 1.0;
    for (int a = 0; a < dim; ++a) meas *= g.h[a];
    wq = meas / nq;
    const double ga = 0.5 - 0.5 / std::sqrt(3.0), gb = 0.5 + 0.5 / std::sqrt(3.0);
    N.resize(nq);
    G.resize(nq);
    B.resize(nq);
    divrow.resize(nq);
    qp_ref.resize(nq);
    for (int q = 0; q < nq; ++q) {
      std::array<double, 2> xi{0.5, 0.5};
      for (int d = 0; d < dim; ++d) xi[d] = ((q >> d) & 1) ? gb : ga;
      qp_ref[q] = xi;
      N[q] = Vec::Zero(nloc);
      G[q] = Mat::Zero(nloc, dim);
      for (int l = 0; l < nloc; ++l) {
        double val = 1.0;
        for (int d = 0; d < dim; ++d) val *= ((l >> d) & 1) ? xi[d] : 1.0 - xi[d];
        N[q](l) = val;
        for (int d = 0; d < dim; ++d) {
          double gr = ((l >> d) & 1) ? 1.0 : -1.0;
          for (int e = 0; e < dim; ++e)
            if (e != d) gr *= ((l >> e) & 1) ? xi[e] : 1.0 - xi[e];
          G[q](l, d) = gr / g.h[d];
        }
      }
      B[q] = Mat::Zero(nv, ndof);
      divrow[q] = Vec::Zero(ndof);
      for (int l = 0; l < nloc; ++l) {
        for (int d = 0; d < dim; ++d) {
          B[q](d, l * dim + d) = G[q](l, d);
          divrow[q](l * dim + d) = G[q](l, d);
        }
        if (dim == 2) {
          B[q](2, l * 2 + 0) += G[q](l, 1);
          B[q](2, l * 2 + 1) += G[q](l, 0);
        }
      }
    }
  }
};

} // namespace

double MacroForcing::shape(const MacroDomain& d, const std::array<double, 2>& x) const {
  double g = 1.0;
  for (int a = 0; a < d.dim; ++a) g *= std::sin(mode[a] * kPi * x[a] / d.extent[a]);
  return g;
}

CMat permeability_at(const EffectiveCoefficients& coeffs, Complex lambda) {
  const int d = coeffs.dim;
  if (coeffs.K_samples.empty()) return CMat::Zero(d, d); // sealed pores
  for (const auto& s : coeffs.K_samples)
    if (std::abs(s.lambda - lambda) <= 1e-12 * (1.0 + std::abs(lambda))) return s.K;
  // Real-axis interpolation of H = lambda^2 rho_f K, linear in log lambda.
  if (std::abs(lambda.imag()) > 1e-14 * (1.0 + std::abs(lambda)))
    throw MissingK("no sample at complex lambda; contour nodes need dedicated solves");
  double lr = lambda.real();
  if (lr <= 0.0) throw MissingK("cannot interpolate at nonpositive lambda");
  const PermeabilitySample *lo = nullptr, *hi = nullptr;
  for (const auto& s : coeffs.K_samples) {
    if (std::abs(s.lambda.imag()) > 1e-14) continue;
    double sr = s.lambda.real();
    if (sr <= lr && (!lo || sr > lo->lambda.real())) lo = &s;
    if (sr >= lr && (!hi || sr < hi->lambda.real())) hi = &s;
  }
  if (!lo || !hi) throw MissingK("lambda outside the sampled real-axis range");
  if (lo == hi) return lo->K;
  auto H = [&](const PermeabilitySample* s) -> CMat {
    return s->lambda * s->lambda * coeffs.rho_f * s->K;
  };
  double t = (std::log(lr) - std::log(lo->lambda.real())) /
             (std::log(hi->lambda.real()) - std::log(lo->lambda.real()));
  CMat Hm = (1.0 - t) * H(lo) + t * H(hi);
  return Hm / (lambda * lambda * coeffs.rho_f);
}

MacroSystem assemble_macro(const MacroProblem& problem, Complex lambda) {
  if (!(lambda.real() > problem.region_min))
    throw OutOfRegion("Re(lambda) = " + std::to_string(lambda.real()) +
                      " not above the configured bound " + std::to_string(problem.region_min));
  const auto& c = problem.coeffs;
  if (c.dim != problem.domain.dim)
    throw MeshMismatch("coefficient dimension does not match the macro domain");
  MacroGrid grid(problem.domain);
  MacroKernel k(grid);
  CMat K = permeability_at(c, lambda);

  const int dim = grid.dim;
  // Unknown layout: free u DOFs first, then all pressure nodes.
  std::vector<long> u_map(grid.n_nodes * dim, -1);
  std::vector<long> u_keep;
  for (long j = 0; j < (dim == 2 ? grid.nn[1] : 1); ++j)
    for (long i = 0; i < grid.nn[0]; ++i) {
      if (grid.boundary(i, j)) continue;
      for (int cc = 0; cc < dim; ++cc) {
        long full = grid.node(i, j) * dim + cc;
        u_map[full] = static_cast<long>(u_keep.size());
        u_keep.push_back(full);
      }
    }
  long n_u = static_cast<long>(u_keep.size());
  long n_p = grid.n_nodes;

  const Complex l2rf = lambda * lambda * c.rho_f;
  const double rho_bar = c.mean_density();
  const Complex lap_coeff = lambda * lambda * rho_bar;

  Vec beta_v = Vec::Zero(k.nv); // Voigt pairing vector for beta_ij : grad w
  for (int v = 0; v < k.nv; ++v) {
    auto [i, j] = voigt_pair(dim, v);
    beta_v(v) = c.beta_ij(i, j);
  }

  std::vector<Eigen::Triplet<Complex>> trips;
  CVec b = CVec::Zero(n_u + n_p);
  const Complex fhat = problem.forcing.transform(lambda);
  const int fc = problem.forcing.component;

  std::array<long, 4> enodes{};
  for (long ej = 0; ej < (dim == 2 ? grid.ne[1] : 1); ++ej)
    for (long ei = 0; ei < grid.ne[0]; ++ei) {
      for (int l = 0; l < k.nloc; ++l)
        enodes[l] = grid.node(ei + (l & 1), dim == 2 ? ej + ((l >> 1) & 1) : 0);

      auto udof = [&](int l, int cc) { return u_map[enodes[l] * dim + cc]; };
      auto pdof = [&](int l) { return n_u + enodes[l]; };

      for (int q = 0; q < k.nq; ++q) {
        std::array<double, 2> xq{0, 0};
        xq[0] = (ei + k.qp_ref[q][0]) * grid.h[0];
        if (dim == 2) xq[1] = (ej + k.qp_ref[q][1]) * grid.h[1];
        double g = problem.forcing.shape(problem.domain, xq);

        // momentum-block locals
        Mat KqB = k.B[q].transpose() * c.q_voigt * k.B[q]; // (q grad u, grad w)
        Vec bB = k.B[q].transpose() * beta_v;              // beta_ij : grad w
        for (int a = 0; a < k.nloc; ++a) {
          for (int ca = 0; ca < dim; ++ca) {
            long ra = udof(a, ca);
            if (ra < 0) continue;
            // loads: (f,w) - l2rf (K f, w)
            Complex fv = k.wq * k.N[q](a) * g * fhat *
                         (Complex(ca == fc ? 1.0 : 0.0) - l2rf * K(ca, fc));
            b(ra) += fv;
            for (int bb = 0; bb < k.nloc; ++bb) {
              for (int cb = 0; cb < dim; ++cb) {
                long cbid = udof(bb, cb);
                if (cbid < 0) continue;
                Complex val(0.0);
                if (ca == cb) {
                  val += lap_coeff * k.wq * k.N[q](a) * k.N[q](bb); // lambda^2 <rho> mass
                  val += KqB(a * dim + ca, bb * dim + cb) * k.wq;
                }
                val -= l2rf * l2rf * k.wq * k.N[q](a) * k.N[q](bb) * K(ca, cb);
                if (val != Complex(0.0)) trips.emplace_back(ra, cbid, val);
              }
              // u-p coupling: (p, beta:grad w) - Pi (p, div w) - l2rf (K grad p, w)
              Complex cup = k.wq * (bB(a * dim + ca) - c.Pi * k.divrow[q](a * dim + ca)) *
                            k.N[q](bb);
              Complex gk(0.0);
              for (int d = 0; d < dim; ++d) gk += K(ca, d) * k.G[q](bb, d);
              cup -= l2rf * k.wq * k.N[q](a) * gk;
              trips.emplace_back(ra, pdof(bb), cup);
              trips.emplace_back(pdof(bb), ra, cup);
            }
          }
        }
        // pressure-block locals: -delta^{-1} (p,psi) - (K grad p, grad psi)
        for (int a = 0; a < k.nloc; ++a) {
          long ra = pdof(a);
          for (int bb = 0; bb < k.nloc; ++bb) {
            Complex val = -k.wq / c.delta * k.N[q](a) * k.N[q](bb);
            Complex ck(0.0);
            for (int d1 = 0; d1 < dim; ++d1)
              for (int d2 = 0; d2 < dim; ++d2)
                ck += k.G[q](a, d1) * K(d1, d2) * k.G[q](bb, d2);
            val -= k.wq * ck;
            trips.emplace_back(ra, pdof(bb), val);
          }
          // load: -(K f, grad psi)
          Complex gk(0.0);
          for (int d = 0; d < dim; ++d) gk += K(d, fc) * k.G[q](a, d);
          b(ra) -= k.wq * g * fhat * gk;
        }
      }
    }

  MacroSystem sys;
  sys.A.resize(n_u + n_p, n_u + n_p);
  sys.A.setFromTriplets(trips.begin(), trips.end());
  sys.b = std::move(b);
  sys.n_u = n_u;
  sys.n_p = n_p;
  sys.u_keep = std::move(u_keep);
  return sys;
}

namespace {

MacroField solve_one(const MacroProblem& problem, Complex lambda) {
  MacroGrid grid(problem.domain);
  MacroSystem sys = assemble_macro(problem, lambda);
  CVec x = sparse_solve<Complex>(sys.A, sys.b, 1e-10);
  MacroField f;
  f.lambda = lambda;
  f.K = permeability_at(problem.coeffs, lambda);
  f.u = CVec::Zero(grid.n_nodes * grid.dim);
  for (long i = 0; i < sys.n_u; ++i) f.u(sys.u_keep[i]) = x(i);
  f.p = x.tail(sys.n_p);
  double bn = sys.b.norm();
  f.residual = bn > 0 ? (sys.b - sys.A * x).norm() / bn : 0.0;
  return f;
}

} // namespace

MacroSolution solve_macro(const MacroProblem& problem, int threads) {
  MacroSolution sol;
  sol.domain = problem.domain;
  sol.rho_f = problem.coeffs.rho_f;
  sol.forcing = problem.forcing;
  sol.fields.resize(problem.lambdas.size());
  if (threads <= 1 || problem.lambdas.size() <= 1) {
    for (size_t i = 0; i < problem.lambdas.size(); ++i)
      sol.fields[i] = solve_one(problem, problem.lambdas[i]);
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= problem.lambdas.size()) return;
        sol.fields[i] = solve_one(problem, problem.lambdas[i]);
      }
    };
    std::vector<std::thread> pool;
    int nt = std::min<int>(threads, static_cast<int>(problem.lambdas.size()));
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return sol;
}

const MacroField& MacroSolution::at(Complex lambda) const {
  for (const auto& f : fields)
    if (std::abs(f.lambda - lambda) <= 1e-12 * (1.0 + std::abs(lambda))) return f;
  throw MissingK("no macro field solved at the requested lambda");
}

namespace {

struct EvalPoint {
  long enodes[4];
  double N[4];
  double G[4][2];
  int nloc;
};

EvalPoint locate(const MacroDomain& dom, const std::array<double, 2>& x) {
  MacroGrid grid(dom);
  EvalPoint ep{};
  ep.nloc = 1 << dom.dim;
  long idx[2] = {0, 0};
  double xi[2] = {0.5, 0.5};
  for (int d = 0; d < dom.dim; ++d) {
    double t = x[d] / grid.h[d];
    long i = std::min<long>(grid.ne[d] - 1, std::max<long>(0, static_cast<long>(std::floor(t))));
    idx[d] = i;
    xi[d] = t - i;
  }
  for (int l = 0; l < ep.nloc; ++l) {
    long i = idx[0] + (l & 1);
    long j = dom.dim == 2 ? idx[1] + ((l >> 1) & 1) : 0;
    ep.enodes[l] = grid.node(i, j);
    double val = 1.0;
    for (int d = 0; d < dom.dim; ++d) val *= ((l >> d) & 1) ? xi[d] : 1.0 - xi[d];
    ep.N[l] = val;
    for (int d = 0; d < dom.dim; ++d) {
      double g = ((l >> d) & 1) ? 1.0 : -1.0;
      for (int e = 0; e < dom.dim; ++e)
        if (e != d) g *= ((l >> e) & 1) ? xi[e] : 1.0 - xi[e];
      ep.G[l][d] = g / grid.h[d];
    }
  }
  return ep;
}

} // namespace

CVec MacroSolution::eval_u(const MacroField& f, const std::array<double, 2>& x) const {
  EvalPoint ep = locate(domain, x);
  CVec u = CVec::Zero(domain.dim);
  for (int l = 0; l < ep.nloc; ++l)
    for (int c = 0; c < domain.dim; ++c) u(c) += ep.N[l] * f.u(ep.enodes[l] * domain.dim + c);
  return u;
}

Complex MacroSolution::eval_p(const MacroField& f, const std::array<double, 2>& x) const {
  EvalPoint ep = locate(domain, x);
  Complex p(0.0);
  for (int l = 0; l < ep.nloc; ++l) p += ep.N[l] * f.p(ep.enodes[l]);
  return p;
}

CVec MacroSolution::eval_grad_p(const MacroField& f, const std::array<double, 2>& x) const {
  EvalPoint ep = locate(domain, x);
  CVec g = CVec::Zero(domain.dim);
  for (int l = 0; l < ep.nloc; ++l)
    for (int d = 0; d < domain.dim; ++d) g(d) += ep.G[l][d] * f.p(ep.enodes[l]);
  return g;
}

CVec MacroSolution::eval_mean_ur(const MacroField& f, const std::array<double, 2>& x) const {
  CVec F = CVec::Zero(domain.dim);
  double g = forcing.shape(domain, x);
  Complex fh = forcing.transform(f.lambda);
  F(forcing.component) += g * fh;
  F -= f.lambda * f.lambda * rho_f * eval_u(f, x);
  F -= eval_grad_p(f, x);
  return f.K * F;
}

CVec MacroSolution::eval_u0(const MacroField& f, const std::array<double, 2>& x) const {
  return eval_u(f, x) + eval_mean_ur(f, x);
}

ProbeTraces macro_time_traces(MacroProblem problem, const ContourSpec& contour,
                              const std::vector<std::array<double, 2>>& probes,
                              const std::vector<double>& times, int threads) {
  ProbeTraces out;
  out.times = times;
  out.values.assign(probes.size(),
                    std::vector<std::vector<double>>(problem.domain.dim + 1,
                                                     std::vector<double>(times.size(), 0.0)));

  // Distinct contour nodes across all times (Weeks reuses one family).
  std::map<std::pair<double, double>, size_t> node_index;
  std::vector<Complex> all_nodes;
  std::vector<std::vector<size_t>> per_time(times.size());
  for (size_t ti = 0; ti < times.size(); ++ti) {
    for (Complex s : contour_nodes(contour, times[ti])) {
      auto key = std::make_pair(s.real(), s.imag());
      auto it = node_index.find(key);
      size_t id;
      if (it == node_index.end()) {
        id = all_nodes.size();
        node_index.emplace(key, id);
        all_nodes.push_back(s);
      } else {
        id = it->second;
      }
      per_time[ti].push_back(id);
    }
  }
  for (Complex s : all_nodes)
    if (!(s.real() > problem.region_min))
      throw OutOfRegion("contour node at Re(lambda) = " + std::to_string(s.real()) +
                        " leaves the coercivity region; use the Weeks contour or raise sigma");

  problem.lambdas = all_nodes;
  MacroSolution sol = solve_macro(problem, threads);

  for (size_t pi = 0; pi < probes.size(); ++pi) {
    for (size_t ti = 0; ti < times.size(); ++ti) {
      const auto& ids = per_time[ti];
      for (int comp = 0; comp <= problem.domain.dim; ++comp) {
        std::vector<Complex> samples;
        samples.reserve(ids.size());
        for (size_t id : ids) {
          const MacroField& f = sol.fields[id];
          samples.push_back(comp < problem.domain.dim ? sol.eval_u(f, probes[pi])(comp)
                                                      : sol.eval_p(f, probes[pi]));
        }
        out.values[pi][comp][ti] = invert_from_samples(contour, times[ti], samples);
      }
    }
  }
  return out;
}

EffectiveCoefficients reduce_to_1d(const EffectiveCoefficients& eff) {
  EffectiveCoefficients r;
  r.dim = 1;
  r.q_voigt = Mat::Constant(1, 1, eff.q_voigt(0, 0));
  r.beta_ij = Mat::Constant(1, 1, eff.beta_ij(0, 0));
  r.beta = eff.beta;
  r.Pi = eff.Pi;
  r.gamma = eff.gamma;
  r.delta = eff.delta;
  r.rho_s = eff.rho_s;
  r.rho_f = eff.rho_f;
  for (const auto& s : eff.K_samples)
    r.K_samples.push_back({s.lambda, CMat::Constant(1, 1, s.K(0, 0))});
  return r;
}

} // namespace poro
