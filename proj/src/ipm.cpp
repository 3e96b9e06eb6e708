#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>

#include "standard_form.hpp"

namespace flexplan::detail {

namespace {

constexpr double kStepDamping = 0.99;

// ---------------------------------------------------------------------------
// cone algebra on vectors partitioned as [ R+^l | soc_1 | soc_2 | ... ]
// ---------------------------------------------------------------------------

// smallest "eigenvalue": min component on the LP part, u0 - |u1| on each SOC
double cone_min_eig(const Vec& u, const ConeLayout& K) {
  double m = std::numeric_limits<double>::max();
  for (int i = 0; i < K.nonneg; ++i) m = std::min(m, u(i));
  int at = K.nonneg;
  for (int d : K.soc_dims) {
    m = std::min(m, u(at) - u.segment(at + 1, d - 1).norm());
    at += d;
  }
  return m;
}

void bring_to_cone(Vec& u, const ConeLayout& K) {
  const double alpha = -cone_min_eig(u, K);
  if (alpha < 0.0) return;  // already interior
  for (int i = 0; i < K.nonneg; ++i) u(i) += 1.0 + alpha;
  int at = K.nonneg;
  for (int d : K.soc_dims) {
    u(at) += 1.0 + alpha;
    at += d;
  }
}

// identity element scaled by a
void add_identity(Vec& u, double a, const ConeLayout& K) {
  for (int i = 0; i < K.nonneg; ++i) u(i) += a;
  int at = K.nonneg;
  for (int d : K.soc_dims) {
    u(at) += a;
    at += d;
  }
}

// Jordan product u o v
Vec jordan_product(const Vec& u, const Vec& v, const ConeLayout& K) {
  Vec w(u.size());
  for (int i = 0; i < K.nonneg; ++i) w(i) = u(i) * v(i);
  int at = K.nonneg;
  for (int d : K.soc_dims) {
    w(at) = u.segment(at, d).dot(v.segment(at, d));
    w.segment(at + 1, d - 1) =
        u(at) * v.segment(at + 1, d - 1) + v(at) * u.segment(at + 1, d - 1);
    at += d;
  }
  return w;
}

// solve lambda o u = v for u
Vec jordan_solve(const Vec& lambda, const Vec& v, const ConeLayout& K) {
  Vec u(v.size());
  for (int i = 0; i < K.nonneg; ++i) u(i) = v(i) / lambda(i);
  int at = K.nonneg;
  for (int d : K.soc_dims) {
    const auto l1 = lambda.segment(at + 1, d - 1);
    const auto v1 = v.segment(at + 1, d - 1);
    const double det = lambda(at) * lambda(at) - l1.squaredNorm();
    const double u0 = (lambda(at) * v(at) - l1.dot(v1)) / det;
    u(at) = u0;
    u.segment(at + 1, d - 1) = (v1 - u0 * l1) / lambda(at);
    at += d;
  }
  return u;
}

// largest step a with u + a du staying in the cone (capped)
double max_step(const Vec& u, const Vec& du, const ConeLayout& K, double cap) {
  double amax = cap;
  for (int i = 0; i < K.nonneg; ++i) {
    if (du(i) < 0.0) amax = std::min(amax, -u(i) / du(i));
  }
  int at = K.nonneg;
  for (int d : K.soc_dims) {
    const auto u1 = u.segment(at + 1, d - 1);
    const auto d1 = du.segment(at + 1, d - 1);
    // boundary: (u0 + a d0)^2 = |u1 + a d1|^2 with u0 + a d0 >= 0
    const double a2 = du(at) * du(at) - d1.squaredNorm();
    const double a1 = 2.0 * (u(at) * du(at) - u1.dot(d1));
    const double a0 = u(at) * u(at) - u1.squaredNorm();
    double bound = cap;
    const double disc = a1 * a1 - 4.0 * a2 * a0;
    if (std::abs(a2) < 1e-16) {
      if (a1 < 0.0) bound = -a0 / a1;
    } else if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double r1 = (-a1 - sq) / (2.0 * a2);
      const double r2 = (-a1 + sq) / (2.0 * a2);
      const double lo = std::min(r1, r2);
      const double hi = std::max(r1, r2);
      if (a2 > 0.0) {
        // feasible outside (lo, hi); blocked only if lo > 0
        if (lo > 0.0) bound = lo;
      } else {
        // feasible inside [lo, hi]
        bound = hi > 0.0 ? hi : 0.0;
      }
    }
    if (du(at) < 0.0) bound = std::min(bound, -u(at) / du(at));
    amax = std::min(amax, bound);
    at += d;
  }
  return std::max(amax, 0.0);
}

// ---------------------------------------------------------------------------
// Nesterov-Todd scaling
// ---------------------------------------------------------------------------

struct Scaling {
  Vec lp_w2;  // s_i / z_i over the LP block
  struct Soc {
    double eta = 0.0;   // W = eta * P(wbar)^{1/2}
    double a = 0.0;     // wbar head
    Vec q;              // wbar tail, a^2 - |q|^2 = 1
  };
  std::vector<Soc> socs;
  Vec lambda;  // W z

  bool update(const Vec& s, const Vec& z, const ConeLayout& K);
  Vec apply(const Vec& v, const ConeLayout& K) const;      // W v
  Vec apply_inv(const Vec& v, const ConeLayout& K) const;  // W^{-1} v
  Vec apply_w2(const Vec& v, const ConeLayout& K) const;   // W^2 v
};

bool Scaling::update(const Vec& s, const Vec& z, const ConeLayout& K) {
  lp_w2.resize(K.nonneg);
  for (int i = 0; i < K.nonneg; ++i) {
    if (s(i) <= 0.0 || z(i) <= 0.0) return false;
    lp_w2(i) = s(i) / z(i);
  }
  socs.assign(K.soc_dims.size(), {});
  int at = K.nonneg;
  for (std::size_t k = 0; k < K.soc_dims.size(); ++k) {
    const int d = K.soc_dims[k];
    const double sres = s(at) * s(at) - s.segment(at + 1, d - 1).squaredNorm();
    const double zres = z(at) * z(at) - z.segment(at + 1, d - 1).squaredNorm();
    if (sres <= 0.0 || zres <= 0.0) return false;
    const double snorm = std::sqrt(sres);
    const double znorm = std::sqrt(zres);
    Vec sbar = s.segment(at, d) / snorm;
    Vec zbar = z.segment(at, d) / znorm;
    const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
    auto& sc = socs[k];
    sc.eta = std::sqrt(snorm / znorm);
    sc.a = (sbar(0) + zbar(0)) / (2.0 * gamma);
    sc.q = (sbar.tail(d - 1) - zbar.tail(d - 1)) / (2.0 * gamma);
    at += d;
  }
  lambda = apply(z, K);
  return true;
}

Vec Scaling::apply(const Vec& v, const ConeLayout& K) const {
  Vec out(v.size());
  out.head(K.nonneg) = lp_w2.cwiseSqrt().cwiseProduct(v.head(K.nonneg));
  int at = K.nonneg;
  for (const auto& sc : socs) {
    const int d = static_cast<int>(sc.q.size()) + 1;
    const double zeta = sc.q.dot(v.segment(at + 1, d - 1));
    out(at) = sc.eta * (sc.a * v(at) + zeta);
    out.segment(at + 1, d - 1) =
        sc.eta * (v.segment(at + 1, d - 1) + (v(at) + zeta / (1.0 + sc.a)) * sc.q);
    at += d;
  }
  return out;
}

Vec Scaling::apply_inv(const Vec& v, const ConeLayout& K) const {
  Vec out(v.size());
  out.head(K.nonneg) = v.head(K.nonneg).cwiseQuotient(lp_w2.cwiseSqrt());
  int at = K.nonneg;
  for (const auto& sc : socs) {
    const int d = static_cast<int>(sc.q.size()) + 1;
    const double zeta = sc.q.dot(v.segment(at + 1, d - 1));
    out(at) = (sc.a * v(at) - zeta) / sc.eta;
    out.segment(at + 1, d - 1) =
        (v.segment(at + 1, d - 1) + (-v(at) + zeta / (1.0 + sc.a)) * sc.q) / sc.eta;
    at += d;
  }
  return out;
}

Vec Scaling::apply_w2(const Vec& v, const ConeLayout& K) const {
  Vec out(v.size());
  out.head(K.nonneg) = lp_w2.cwiseProduct(v.head(K.nonneg));
  int at = K.nonneg;
  for (const auto& sc : socs) {
    const int d = static_cast<int>(sc.q.size()) + 1;
    // W^2 = eta^2 (2 wbar wbar' - J)
    const double e2 = sc.eta * sc.eta;
    const double wv = sc.a * v(at) + sc.q.dot(v.segment(at + 1, d - 1));
    out(at) = e2 * (2.0 * sc.a * wv - v(at));
    out.segment(at + 1, d - 1) = e2 * (2.0 * wv * sc.q + v.segment(at + 1, d - 1));
    at += d;
  }
  return out;
}

// ---------------------------------------------------------------------------
// KKT system  [ dI  A'  G' ; A  -dI  0 ; G  0  -W^2-dI ]
// ---------------------------------------------------------------------------

class Kkt {
 public:
  Kkt(const StandardForm& sf, double static_reg)
      : sf_(sf), reg_(static_reg), dim_(sf.n + sf.A.rows() + sf.G.rows()) {}

  void set_regularization(double reg) { reg_ = reg; }
  bool factor(const Scaling& W);

  // Solves the unregularized system with iterative refinement.
  void solve(const Vec& rx, const Vec& ry, const Vec& rz, const Scaling& W, int refine_steps,
             Vec* dx, Vec* dy, Vec* dz) const;

 private:
  Vec multiply(const Vec& u, const Scaling& W) const;  // unregularized K * u

  const StandardForm& sf_;
  double reg_;
  int dim_;
  Eigen::SimplicialLDLT<SpMat, Eigen::Upper> ldlt_;
  SpMat K_;
  bool analyzed_ = false;
};

bool Kkt::factor(const Scaling& W) {
  const int n = sf_.n;
  const int p = static_cast<int>(sf_.A.rows());
  const int m = static_cast<int>(sf_.G.rows());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(n + p + m + sf_.A.nonZeros() + sf_.G.nonZeros() + 8 * m);

  for (int i = 0; i < n; ++i) trip.emplace_back(i, i, reg_);
  // store upper triangle: A block goes to (x rows, y cols)
  for (int k = 0; k < sf_.A.outerSize(); ++k) {
    for (SpMat::InnerIterator it(sf_.A, k); it; ++it) {
      trip.emplace_back(it.col(), n + it.row(), it.value());
    }
  }
  for (int i = 0; i < p; ++i) trip.emplace_back(n + i, n + i, -reg_);
  for (int k = 0; k < sf_.G.outerSize(); ++k) {
    for (SpMat::InnerIterator it(sf_.G, k); it; ++it) {
      trip.emplace_back(it.col(), n + p + it.row(), it.value());
    }
  }
  // -W^2 - dI, upper triangle of the cone-block diagonal
  const auto& K = sf_.cones;
  for (int i = 0; i < K.nonneg; ++i) {
    trip.emplace_back(n + p + i, n + p + i, -W.lp_w2(i) - reg_);
  }
  int at = K.nonneg;
  for (const auto& sc : W.socs) {
    const int d = static_cast<int>(sc.q.size()) + 1;
    const double e2 = sc.eta * sc.eta;
    Vec wbar(d);
    wbar(0) = sc.a;
    wbar.tail(d - 1) = sc.q;
    for (int r = 0; r < d; ++r) {
      for (int c = r; c < d; ++c) {
        double v = 2.0 * e2 * wbar(r) * wbar(c);
        if (r == c) v += (r == 0 ? -e2 : e2);  // -J diagonal
        trip.emplace_back(n + p + at + r, n + p + at + c, -v - (r == c ? reg_ : 0.0));
      }
    }
    at += d;
  }

  K_.resize(dim_, dim_);
  K_.setFromTriplets(trip.begin(), trip.end());
  if (!analyzed_) {
    ldlt_.analyzePattern(K_);
    analyzed_ = true;
  }
  ldlt_.factorize(K_);
  return ldlt_.info() == Eigen::Success;
}

Vec Kkt::multiply(const Vec& u, const Scaling& W) const {
  const int n = sf_.n;
  const int p = static_cast<int>(sf_.A.rows());
  const int m = static_cast<int>(sf_.G.rows());
  Vec out(dim_);
  const auto ux = u.head(n);
  const auto uy = u.segment(n, p);
  const auto uz = u.tail(m);
  out.head(n) = sf_.A.transpose() * uy + sf_.G.transpose() * uz;
  out.segment(n, p) = sf_.A * ux;
  out.tail(m) = sf_.G * ux - W.apply_w2(uz, sf_.cones);
  return out;
}

void Kkt::solve(const Vec& rx, const Vec& ry, const Vec& rz, const Scaling& W, int refine_steps,
                Vec* dx, Vec* dy, Vec* dz) const {
  const int n = sf_.n;
  const int p = static_cast<int>(sf_.A.rows());
  const int m = static_cast<int>(sf_.G.rows());
  Vec rhs(dim_);
  rhs << rx, ry, rz;
  Vec u = ldlt_.solve(rhs);
  for (int step = 0; step < refine_steps; ++step) {
    Vec resid = rhs - multiply(u, W);
    if (resid.lpNorm<Eigen::Infinity>() < 1e-14 * (1.0 + rhs.lpNorm<Eigen::Infinity>())) break;
    u += ldlt_.solve(resid);
  }
  *dx = u.head(n);
  *dy = u.segment(n, p);
  *dz = u.tail(m);
}

// ---------------------------------------------------------------------------
// Ruiz equilibration (cone rows share one scale so K is preserved)
// ---------------------------------------------------------------------------

struct Equilibration {
  Vec col;    // n
  Vec row_a;  // p
  Vec row_g;  // m
};

Equilibration equilibrate(StandardForm& sf, int iters) {
  const int n = sf.n;
  const int p = static_cast<int>(sf.A.rows());
  const int m = static_cast<int>(sf.G.rows());
  Equilibration eq;
  eq.col = Vec::Ones(n);
  eq.row_a = Vec::Ones(p);
  eq.row_g = Vec::Ones(m);

  auto sqrt_or_one = [](double v) { return v < 1e-12 ? 1.0 : std::sqrt(v); };

  for (int it = 0; it < iters; ++it) {
    Vec cmax = Vec::Zero(n), ramax = Vec::Zero(p), rgmax = Vec::Zero(m);
    for (int k = 0; k < sf.A.outerSize(); ++k) {
      for (SpMat::InnerIterator v(sf.A, k); v; ++v) {
        cmax(v.col()) = std::max(cmax(v.col()), std::abs(v.value()));
        ramax(v.row()) = std::max(ramax(v.row()), std::abs(v.value()));
      }
    }
    for (int k = 0; k < sf.G.outerSize(); ++k) {
      for (SpMat::InnerIterator v(sf.G, k); v; ++v) {
        cmax(v.col()) = std::max(cmax(v.col()), std::abs(v.value()));
        rgmax(v.row()) = std::max(rgmax(v.row()), std::abs(v.value()));
      }
    }
    // collapse each SOC to a single row factor
    int at = sf.cones.nonneg;
    for (int d : sf.cones.soc_dims) {
      const double g = rgmax.segment(at, d).maxCoeff();
      rgmax.segment(at, d).setConstant(g);
      at += d;
    }
    cmax = cmax.unaryExpr(sqrt_or_one);
    ramax = ramax.unaryExpr(sqrt_or_one);
    rgmax = rgmax.unaryExpr(sqrt_or_one);

    for (int k = 0; k < sf.A.outerSize(); ++k) {
      for (SpMat::InnerIterator v(sf.A, k); v; ++v) {
        v.valueRef() /= ramax(v.row()) * cmax(v.col());
      }
    }
    for (int k = 0; k < sf.G.outerSize(); ++k) {
      for (SpMat::InnerIterator v(sf.G, k); v; ++v) {
        v.valueRef() /= rgmax(v.row()) * cmax(v.col());
      }
    }
    eq.col = eq.col.cwiseProduct(cmax);
    eq.row_a = eq.row_a.cwiseProduct(ramax);
    eq.row_g = eq.row_g.cwiseProduct(rgmax);
  }
  sf.c = sf.c.cwiseQuotient(eq.col);
  sf.b = sf.b.cwiseQuotient(eq.row_a);
  sf.h = sf.h.cwiseQuotient(eq.row_g);
  return eq;
}

}  // namespace

// ---------------------------------------------------------------------------
// main loop
// ---------------------------------------------------------------------------

IpmResult ipm_solve(const StandardForm& input, const ContinuousSettings& settings) {
  StandardForm sf = input;  // equilibration mutates the copy
  const Equilibration eq = equilibrate(sf, settings.equilibrate_iters);

  const int n = sf.n;
  const int p = static_cast<int>(sf.A.rows());
  const int m = static_cast<int>(sf.G.rows());
  const auto& K = sf.cones;
  const double nu = K.order() + 1;

  IpmResult res;
  res.history.reserve(settings.max_iters);

  const double normb = std::max(1.0, sf.b.size() ? sf.b.lpNorm<Eigen::Infinity>() : 0.0);
  const double normh = std::max(1.0, sf.h.size() ? sf.h.lpNorm<Eigen::Infinity>() : 0.0);
  const double normc = std::max(1.0, sf.c.lpNorm<Eigen::Infinity>());

  // ---- initialization (identity scaling) ----
  Scaling W;
  W.lp_w2 = Vec::Ones(K.nonneg);
  W.socs.assign(K.soc_dims.size(), {});
  for (std::size_t k = 0; k < K.soc_dims.size(); ++k) {
    W.socs[k].eta = 1.0;
    W.socs[k].a = 1.0;
    W.socs[k].q = Vec::Zero(K.soc_dims[k] - 1);
  }

  Kkt kkt(sf, settings.static_reg);
  double reg = settings.static_reg;
  for (int attempt = 0; attempt < 4 && !kkt.factor(W); ++attempt) {
    reg *= 100.0;
    kkt.set_regularization(reg);
  }

  Vec x(n), y(p), z(m), s(m);
  {
    Vec dx, dy, dz;
    kkt.solve(Vec::Zero(n), sf.b, sf.h, W, settings.refine_steps, &dx, &dy, &dz);
    x = dx;
    s = -dz;
    bring_to_cone(s, K);
    kkt.solve(-sf.c, Vec::Zero(p), Vec::Zero(m), W, settings.refine_steps, &dx, &dy, &dz);
    y = dy;
    z = dz;
    bring_to_cone(z, K);
  }
  double tau = 1.0, kap = 1.0;
  int stall_count = 0;

  const double mu0 = (s.dot(z) + tau * kap) / nu;

  auto finish_with_best = [&](const char* msg) {
    res.status = SolveStatus::IterLimit;
    res.message = msg;
  };

  for (int iter = 0; iter <= settings.max_iters; ++iter) {
    // residuals of the homogeneous embedding
    Vec Rx = sf.A.transpose() * y + sf.G.transpose() * z + sf.c * tau;
    Vec Ry = sf.A * x - sf.b * tau;
    Vec Rz = sf.G * x + s - sf.h * tau;
    const double Rtau = sf.c.dot(x) + sf.b.dot(y) + sf.h.dot(z) + kap;
    const double mu = (s.dot(z) + tau * kap) / nu;

    const double pcost = sf.c.dot(x) / tau;
    const double by_hz = sf.b.dot(y) + sf.h.dot(z);
    const double dcost = -by_hz / tau;
    const double pres =
        std::max(p ? Ry.lpNorm<Eigen::Infinity>() / normb : 0.0,
                 m ? Rz.lpNorm<Eigen::Infinity>() / normh : 0.0) / tau;
    const double dres = Rx.lpNorm<Eigen::Infinity>() / normc / tau;
    const double gap = s.dot(z) / (tau * tau);
    const double relgap = gap / std::max({1.0, std::abs(pcost), std::abs(dcost)});

    if (settings.record_history) {
      res.history.push_back({pcost, dcost, gap, pres, dres, mu, 0.0});
    }
    res.iterations = iter;

    const double tol = settings.tol;
    if (pres <= tol && dres <= tol && relgap <= tol) {
      res.status = SolveStatus::Optimal;
      break;
    }
    // primal infeasibility: (y, z) approaches a certificate with b'y + h'z < 0
    if (by_hz < 0.0) {
      const double cert = (sf.A.transpose() * y + sf.G.transpose() * z).lpNorm<Eigen::Infinity>();
      if (cert / normc <= tol * (-by_hz) && tau <= 1e-6 * std::max(1.0, kap)) {
        res.status = SolveStatus::Infeasible;
        res.y = y / (-by_hz);
        res.z = z / (-by_hz);
        res.message = "primal infeasibility certificate";
        break;
      }
    }
    // dual infeasibility: x approaches an unbounded ray with c'x < 0
    if (sf.c.dot(x) < 0.0) {
      const double cx = -sf.c.dot(x);
      const double ray = std::max(p ? (sf.A * x).lpNorm<Eigen::Infinity>() / normb : 0.0,
                                  (sf.G * x + s).lpNorm<Eigen::Infinity>() / normh);
      if (ray <= tol * cx && tau <= 1e-6 * std::max(1.0, kap)) {
        res.status = SolveStatus::Unbounded;
        res.x = x / cx;
        res.message = "dual infeasibility certificate (unbounded objective)";
        break;
      }
    }
    if (mu < 1e-16 * mu0 || iter == settings.max_iters) {
      finish_with_best(iter == settings.max_iters ? "iteration limit" : "numerical stall");
      break;
    }

    if (!W.update(s, z, K)) {
      finish_with_best("iterate left the cone");
      break;
    }
    bool ok = kkt.factor(W);
    for (int attempt = 0; attempt < 3 && !ok; ++attempt) {
      reg *= 100.0;
      kkt.set_regularization(reg);
      ok = kkt.factor(W);
    }
    if (!ok) {
      finish_with_best("KKT factorization failed");
      break;
    }

    // cached solve against (-c; b; h)
    Vec x1, y1, z1;
    kkt.solve(-sf.c, sf.b, sf.h, W, settings.refine_steps, &x1, &y1, &z1);
    const double denom = sf.c.dot(x1) + sf.b.dot(y1) + sf.h.dot(z1) - kap / tau;

    auto direction = [&](const Vec& ds_rhs, double dkap_rhs, double resid_weight, Vec* dx,
                         Vec* dy, Vec* dz, Vec* ds, double* dtau, double* dkap) {
      Vec wlds = W.apply(jordan_solve(W.lambda, ds_rhs, K), K);
      Vec x2, y2, z2;
      kkt.solve(-resid_weight * Rx, -resid_weight * Ry, -resid_weight * Rz - wlds, W,
                settings.refine_steps, &x2, &y2, &z2);
      *dtau = (-resid_weight * Rtau - sf.c.dot(x2) - sf.b.dot(y2) - sf.h.dot(z2) -
               dkap_rhs / tau) /
              denom;
      *dx = x2 + *dtau * x1;
      *dy = y2 + *dtau * y1;
      *dz = z2 + *dtau * z1;
      *ds = W.apply(jordan_solve(W.lambda, ds_rhs, K) - W.apply(*dz, K), K);
      *dkap = (dkap_rhs - kap * *dtau) / tau;
    };

    // affine (predictor) direction
    Vec lxl = jordan_product(W.lambda, W.lambda, K);
    Vec dxa, dya, dza, dsa;
    double dtaua, dkapa;
    direction(-lxl, -tau * kap, 1.0, &dxa, &dya, &dza, &dsa, &dtaua, &dkapa);

    double alpha = max_step(s, dsa, K, 1.0);
    alpha = std::min(alpha, max_step(z, dza, K, 1.0));
    if (dtaua < 0.0) alpha = std::min(alpha, -tau / dtaua);
    if (dkapa < 0.0) alpha = std::min(alpha, -kap / dkapa);
    const double sigma = std::clamp(std::pow(1.0 - alpha, 3.0), 0.0, 1.0);

    // combined (corrector) direction
    Vec corr = jordan_product(W.apply_inv(dsa, K), W.apply(dza, K), K);
    Vec ds_rhs = -lxl - corr;
    add_identity(ds_rhs, sigma * mu, K);
    const double dkap_rhs = -tau * kap - dtaua * dkapa + sigma * mu;

    Vec dx, dy, dz, ds;
    double dtau, dkap;
    direction(ds_rhs, dkap_rhs, 1.0 - sigma, &dx, &dy, &dz, &ds, &dtau, &dkap);

    double step = max_step(s, ds, K, 1.0 / kStepDamping);
    step = std::min(step, max_step(z, dz, K, 1.0 / kStepDamping));
    if (dtau < 0.0) step = std::min(step, -tau / dtau);
    if (dkap < 0.0) step = std::min(step, -kap / dkap);
    step *= kStepDamping;
    step = std::min(step, 1.0);
    if (settings.record_history && !res.history.empty()) res.history.back().step = step;

    stall_count = step <= 1e-7 ? stall_count + 1 : 0;
    if (step <= 1e-12 || stall_count >= 3) {
      finish_with_best("step size collapsed");
      break;
    }

    x += step * dx;
    y += step * dy;
    z += step * dz;
    s += step * ds;
    tau += step * dtau;
    kap += step * dkap;
  }

  // map back to the caller's coordinates
  if (res.status == SolveStatus::Optimal || res.status == SolveStatus::IterLimit) {
    res.x = (x / tau).cwiseQuotient(eq.col);
    res.y = (y / tau).cwiseQuotient(eq.row_a);
    res.z = (z / tau).cwiseQuotient(eq.row_g);
    res.s = (s / tau).cwiseProduct(eq.row_g);
  } else if (res.status == SolveStatus::Infeasible) {
    res.y = res.y.cwiseQuotient(eq.row_a);
    res.z = res.z.cwiseQuotient(eq.row_g);
    res.x = Vec::Zero(n);
    res.s = Vec::Zero(m);
  } else {  // Unbounded: improving ray
    res.x = res.x.cwiseQuotient(eq.col);
    res.y = Vec::Zero(p);
    res.z = Vec::Zero(m);
    res.s = Vec::Zero(m);
  }

  // true residuals on the unscaled data
  const auto& in = input;
  if (res.status == SolveStatus::Optimal || res.status == SolveStatus::IterLimit) {
    const double nb = std::max(1.0, in.b.size() ? in.b.lpNorm<Eigen::Infinity>() : 0.0);
    const double nh = std::max(1.0, in.h.size() ? in.h.lpNorm<Eigen::Infinity>() : 0.0);
    const double nc = std::max(1.0, in.c.lpNorm<Eigen::Infinity>());
    res.pcost = in.c.dot(res.x);
    const double dc = -(in.b.dot(res.y) + in.h.dot(res.z));
    res.pres = std::max(p ? (in.A * res.x - in.b).lpNorm<Eigen::Infinity>() / nb : 0.0,
                        m ? (in.G * res.x + res.s - in.h).lpNorm<Eigen::Infinity>() / nh : 0.0);
    res.dres = (in.A.transpose() * res.y + in.G.transpose() * res.z + in.c)
                   .lpNorm<Eigen::Infinity>() / nc;
    res.relgap = std::abs(res.pcost - dc) / std::max({1.0, std::abs(res.pcost), std::abs(dc)});
  }
  return res;
}

}  // namespace flexplan::detail
