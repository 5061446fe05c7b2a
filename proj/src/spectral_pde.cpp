#include "fracblow/spectral_pde.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>

#include "fracblow/error.hpp"
#include "kernel_weights.hpp"
#include "pde_march.hpp"

namespace fracblow {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct GaussRule {
  std::array<double, 4> x;
  std::array<double, 4> w;
  std::size_t size;
};

// Gauss-Legendre rules on [-1, 1]; with the kernel singularity at distance r_new from an
// interval of length tau, the n-point error is about (4 r_new / tau)^(-2n).
constexpr GaussRule kGauss2{{-0.5773502691896258, 0.5773502691896258}, {1.0, 1.0}, 2};
constexpr GaussRule kGauss3{{-0.7745966692414834, 0.0, 0.7745966692414834},
                            {0.5555555555555556, 0.8888888888888888, 0.5555555555555556},
                            3};
constexpr GaussRule kGauss4{{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526},
                            {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538},
                            4};

void check_length(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(std::string("Domain: ") + what + " must be positive");
}

std::vector<double> cosine_table(double length, std::size_t modes, std::size_t q) {
  std::vector<double> table(modes * q);
  const double h = length / double(q);
  for (std::size_t k = 0; k < modes; ++k) {
    const double norm = std::sqrt((k == 0 ? 1.0 : 2.0) / length);
    for (std::size_t i = 0; i < q; ++i)
      table[k * q + i] = norm * std::cos(double(k) * std::numbers::pi * (double(i) + 0.5) * h / length);
  }
  return table;
}

}  // namespace

Domain::Domain(Shape shape, double lx, double ly, std::size_t qx, std::size_t qy)
    : shape_(shape), lx_(lx), ly_(ly), qx_(qx), qy_(qy) {}

Domain Domain::interval(double length, std::size_t quad_points) {
  check_length(length, "length");
  if (quad_points < 2) throw ParameterError("Domain: need at least 2 quadrature points");
  return Domain(Shape::interval, length, 1.0, quad_points, 1);
}

Domain Domain::rectangle(double lx, double ly, std::size_t qx, std::size_t qy) {
  check_length(lx, "Lx");
  check_length(ly, "Ly");
  if (qx < 2 || qy < 2) throw ParameterError("Domain: need at least 2 quadrature points per axis");
  return Domain(Shape::rectangle, lx, ly, qx, qy);
}

double Domain::cell_area() const { return shape_ == Shape::interval ? hx() : hx() * hy(); }

double Domain::measure() const { return shape_ == Shape::interval ? lx_ : lx_ * ly_; }

std::string describe(const Domain& d) {
  if (d.shape() == Domain::Shape::interval)
    return "interval:" + std::to_string(d.lx()) + " (" + std::to_string(d.qx()) + " points)";
  return "rect:" + std::to_string(d.lx()) + ":" + std::to_string(d.ly()) + " (" + std::to_string(d.qx()) + "x" +
         std::to_string(d.qy()) + " points)";
}

Field::Field(Domain d, std::vector<double> v) : domain(std::move(d)), values(std::move(v)) {
  if (values.size() != domain.size())
    throw MeshMismatchError("Field: " + std::to_string(values.size()) + " values for " +
                            std::to_string(domain.size()) + " grid points");
  for (double x : values)
    if (!std::isfinite(x)) throw ParameterError("Field: non-finite value");
}

Field Field::constant(const Domain& d, double c) { return Field(d, std::vector<double>(d.size(), c)); }

Field Field::sample(const Domain& d, const std::function<double(double, double)>& f) {
  std::vector<double> v(d.size());
  for (std::size_t j = 0; j < d.qy(); ++j)
    for (std::size_t i = 0; i < d.qx(); ++i) v[j * d.qx() + i] = f(d.x(i), d.y(j));
  return Field(d, std::move(v));
}

double Field::integral() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * domain.cell_area();
}

double Field::l2_norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s * domain.cell_area());
}

double Field::min() const { return *std::min_element(values.begin(), values.end()); }
double Field::max() const { return *std::max_element(values.begin(), values.end()); }

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double mass_functional(const Field& u) { return u.integral(); }

double relative_l2_error(const Field& u, const Field& ref) {
  if (!(u.domain == ref.domain))
    throw MeshMismatchError("relative_l2_error: " + describe(u.domain) + " vs " + describe(ref.domain));
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    num += (u.values[i] - ref.values[i]) * (u.values[i] - ref.values[i]);
    den += ref.values[i] * ref.values[i];
  }
  return std::sqrt(num / den);
}

SpectralBasis::SpectralBasis(const Domain& domain, std::size_t modes_x, std::size_t modes_y)
    : domain_(domain), mx_(modes_x), my_(domain.dimension() == 1 ? 1 : modes_y) {
  if (mx_ < 1 || my_ < 1) throw ParameterError("SpectralBasis: need at least one mode per axis");
  if (domain_.qx() < 2 * mx_ || (domain_.dimension() == 2 && domain_.qy() < 2 * my_))
    throw ParameterError("SpectralBasis: quadrature points must be at least twice the modes per axis");

  std::vector<std::tuple<double, std::size_t, std::size_t>> modes;
  for (std::size_t ky = 0; ky < my_; ++ky)
    for (std::size_t kx = 0; kx < mx_; ++kx) {
      const double ax = double(kx) * std::numbers::pi / domain_.lx();
      const double ay = domain_.dimension() == 2 ? double(ky) * std::numbers::pi / domain_.ly() : 0.0;
      modes.emplace_back(ax * ax + ay * ay, kx, ky);
    }
  std::stable_sort(modes.begin(), modes.end());
  index_.assign(mx_ * my_, 0);
  for (std::size_t n = 0; n < modes.size(); ++n) {
    const auto [lam, kx, ky] = modes[n];
    lambda_.push_back(lam);
    order_.emplace_back(kx, ky);
    index_[ky * mx_ + kx] = n;
  }
  cos_x_ = cosine_table(domain_.lx(), mx_, domain_.qx());
  cos_y_ = domain_.dimension() == 2 ? cosine_table(domain_.ly(), my_, domain_.qy()) : std::vector<double>{1.0};
}

std::size_t SpectralBasis::index_of(std::size_t kx, std::size_t ky) const {
  if (kx >= mx_ || ky >= my_) throw ParameterError("SpectralBasis: wave number outside the mode cutoff");
  return index_[ky * mx_ + kx];
}

double SpectralBasis::phi(std::size_t n, double x, double y) const {
  const auto [kx, ky] = order_.at(n);
  const double fx = std::sqrt((kx == 0 ? 1.0 : 2.0) / domain_.lx()) *
                    std::cos(double(kx) * std::numbers::pi * x / domain_.lx());
  if (domain_.dimension() == 1) return fx;
  return fx * std::sqrt((ky == 0 ? 1.0 : 2.0) / domain_.ly()) *
         std::cos(double(ky) * std::numbers::pi * y / domain_.ly());
}

SpectralState SpectralBasis::project(const Field& f) const {
  if (!(f.domain == domain_))
    throw MeshMismatchError("project: field grid " + describe(f.domain) + " differs from basis grid " +
                            describe(domain_));
  const std::size_t qx = domain_.qx();
  const std::size_t qy = domain_.qy();
  std::vector<double> partial(mx_ * qy, 0.0);  // [kx qy + j]
  for (std::size_t j = 0; j < qy; ++j) {
    const double* row = f.values.data() + j * qx;
    for (std::size_t kx = 0; kx < mx_; ++kx) {
      const double* c = cos_x_.data() + kx * qx;
      double s = 0.0;
      for (std::size_t i = 0; i < qx; ++i) s += c[i] * row[i];
      partial[kx * qy + j] = s * domain_.hx();
    }
  }
  SpectralState out;
  out.coefficients.assign(size(), 0.0);
  if (domain_.dimension() == 1) {
    for (std::size_t kx = 0; kx < mx_; ++kx) out.coefficients[index_[kx]] = partial[kx];
    return out;
  }
  for (std::size_t ky = 0; ky < my_; ++ky) {
    const double* c = cos_y_.data() + ky * qy;
    for (std::size_t kx = 0; kx < mx_; ++kx) {
      double s = 0.0;
      for (std::size_t j = 0; j < qy; ++j) s += c[j] * partial[kx * qy + j];
      out.coefficients[index_[ky * mx_ + kx]] = s * domain_.hy();
    }
  }
  return out;
}

Field SpectralBasis::synthesize(const SpectralState& c) const {
  if (c.coefficients.size() != size())
    throw MeshMismatchError("synthesize: " + std::to_string(c.coefficients.size()) + " coefficients for " +
                            std::to_string(size()) + " modes");
  const std::size_t qx = domain_.qx();
  const std::size_t qy = domain_.qy();
  std::vector<double> partial(mx_ * qy, 0.0);  // sum over ky, [kx qy + j]
  for (std::size_t kx = 0; kx < mx_; ++kx)
    for (std::size_t ky = 0; ky < my_; ++ky) {
      const double coef = c.coefficients[index_[ky * mx_ + kx]];
      if (coef == 0.0) continue;
      if (domain_.dimension() == 1) {
        partial[kx] += coef;
        continue;
      }
      const double* cy = cos_y_.data() + ky * qy;
      for (std::size_t j = 0; j < qy; ++j) partial[kx * qy + j] += coef * cy[j];
    }
  std::vector<double> v(domain_.size(), 0.0);
  for (std::size_t j = 0; j < qy; ++j) {
    double* row = v.data() + j * qx;
    for (std::size_t kx = 0; kx < mx_; ++kx) {
      const double w = partial[kx * qy + j];
      if (w == 0.0) continue;
      const double* cx = cos_x_.data() + kx * qx;
      for (std::size_t i = 0; i < qx; ++i) row[i] += w * cx[i];
    }
  }
  return Field(domain_, std::move(v));
}

MildOperators::MildOperators(const SpectralBasis& basis, double alpha)
    : basis_(&basis),
      alpha_(alpha),
      e1_({alpha, 1.0}),
      e_a_({alpha, alpha}),
      e_a1_({alpha, alpha + 1.0}),
      e_a2_({alpha, alpha + 2.0}),
      inv_gamma_a1_(1.0 / gamma(alpha + 1.0)),
      inv_gamma_a2_(1.0 / gamma(alpha + 2.0)) {}

double MildOperators::s_multiplier(std::size_t n, double t) const {
  if (!(t >= 0.0)) throw DomainError("apply_S: t must be nonnegative");
  const double lam = basis_->eigenvalue(n);
  if (lam == 0.0 || t == 0.0) return 1.0;
  return e1_(-lam * std::pow(t, alpha_));
}

double MildOperators::k_multiplier(std::size_t n, double t) const {
  if (!(t > 0.0)) throw DomainError("apply_K: t must be positive (the kernel is singular at 0)");
  return kernel(basis_->eigenvalue(n), t);
}

double MildOperators::kernel(double lambda, double r) const {
  return std::pow(r, alpha_ - 1.0) * e_a_(-lambda * std::pow(r, alpha_));
}

SpectralState MildOperators::apply_S(double t, const SpectralState& c) const {
  SpectralState out{c.coefficients, c.time + t};
  for (std::size_t n = 0; n < out.coefficients.size(); ++n) out.coefficients[n] *= s_multiplier(n, t);
  return out;
}

SpectralState MildOperators::apply_K(double t, const SpectralState& c) const {
  SpectralState out{c.coefficients, c.time + t};
  for (std::size_t n = 0; n < out.coefficients.size(); ++n) out.coefficients[n] *= k_multiplier(n, t);
  return out;
}

MildOperators::Weights MildOperators::history_weights(std::size_t n, double r_old, double tau) const {
  const double lam = basis_->eigenvalue(n);
  if (lam == 0.0) {
    const auto w = detail::rl_trapezoid_weights(r_old, tau, alpha_, inv_gamma_a1_, inv_gamma_a2_);
    return {w.left, w.right};
  }
  const double r_new = std::max(0.0, r_old - tau);
  if (r_new >= 16.0 * tau) {
    const GaussRule& rule = r_new >= 1000.0 * tau ? kGauss2 : r_new >= 64.0 * tau ? kGauss3 : kGauss4;
    const double mid = 0.5 * (r_old + r_new);
    const double half = 0.5 * tau;
    double left = 0.0;
    double right = 0.0;
    for (std::size_t i = 0; i < rule.size; ++i) {
      const double r = mid + half * rule.x[i];
      const double k = rule.w[i] * half * kernel(lam, r);
      left += k * (r - r_new);
      right += k * (r_old - r);
    }
    return {left / tau, right / tau};
  }
  const auto moments = [&](double r, double& w, double& v) {
    if (r == 0.0) {
      w = v = 0.0;
      return;
    }
    const double z = -lam * std::pow(r, alpha_);
    w = std::pow(r, alpha_) * e_a1_(z);
    v = std::pow(r, alpha_ + 1.0) * e_a2_(z);
  };
  double w_old, v_old, w_new, v_new;
  moments(r_old, w_old, v_old);
  moments(r_new, w_new, v_new);
  const double mean = (v_old - v_new) / tau;
  return {w_old - mean, mean - w_new};
}

void FracProblem::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw ParameterError("FracProblem: alpha must lie in (0,1], got " + std::to_string(alpha));
  if (!(p > 0.0) || !std::isfinite(p)) throw ParameterError("FracProblem: p must be positive");
  if (!(cap > 0.0)) throw ParameterError("FracProblem: cap must be positive");
  if (max_halvings < 0) throw ParameterError("FracProblem: max_halvings must be nonnegative");
  if (!(picard_tol > 0.0) || picard_max < 1) throw ParameterError("FracProblem: invalid fixed-point settings");
}

namespace {

using detail::StepStatus;

class VolterraMarcher {
 public:
  VolterraMarcher(const FracProblem& problem, const SpectralBasis& basis, const Field& a)
      : prob_(problem), basis_(basis), ops_(basis, problem.alpha), a_coef_(basis.project(a).coefficients),
        check_sign_(a.min() >= 0.0), modes_(basis.size()) {
    t_.push_back(0.0);
    accept(a, powered(a));
  }

  StepStatus step(double t_new, bool uniform_history, double h) {
    const std::size_t n = t_.size();
    std::vector<double> base(modes_, 0.0);
    std::vector<double> diag(modes_, 0.0);
    for (std::size_t k = 0; k < modes_; ++k) base[k] = ops_.s_multiplier(k, t_new) * a_coef_[k];

    if (prob_.reaction) {
      for (std::size_t j = 1; j <= n; ++j) {
        const double tau = (j < n ? t_[j] : t_new) - t_[j - 1];
        const double r_old = t_new - t_[j - 1];
        const auto& w = uniform_history ? cached(n - j + 1, h) : fresh(r_old, tau);
        const auto& f_old = f_[j - 1];
        if (j < n) {
          const auto& f_new = f_[j];
          for (std::size_t k = 0; k < modes_; ++k) base[k] += w[k].left * f_old[k] + w[k].right * f_new[k];
        } else {
          for (std::size_t k = 0; k < modes_; ++k) {
            base[k] += w[k].left * f_old[k];
            diag[k] = w[k].right;
          }
        }
      }
    }

    SpectralState c{base, t_new};
    std::optional<Field> u;
    std::optional<Field> up;
    if (prob_.reaction) {
      for (std::size_t k = 0; k < modes_; ++k) c.coefficients[k] += diag[k] * f_.back()[k];
      bool converged = false;
      double previous = kInf;
      int growth = 0;
      for (int it = 1; it <= prob_.picard_max; ++it) {
        u.emplace(basis_.synthesize(c));
        up.emplace(powered(*u));
        const auto f = basis_.project(*up).coefficients;
        std::vector<double> g(modes_);
        for (std::size_t k = 0; k < modes_; ++k) g[k] = base[k] + diag[k] * f[k];
        if (prob_.superlinear()) {
          // Newton on the mass mode: dF_0/dc_0 = p mean(u^(p-1))
          double s = 0.0;
          for (double v : u->values) s += std::pow(std::max(v, 0.0), prob_.p - 1.0);
          const double d = 1.0 - diag[0] * prob_.p * s / double(u->values.size());
          if (d > 0.1) g[0] = c.coefficients[0] + (g[0] - c.coefficients[0]) / d;
        }
        double diff = 0.0;
        double scale = 0.0;
        for (std::size_t k = 0; k < modes_; ++k) {
          diff = std::max(diff, std::abs(g[k] - c.coefficients[k]));
          scale = std::max(scale, std::abs(g[k]));
        }
        c.coefficients = std::move(g);
        max_iterations_ = std::max(max_iterations_, it);
        if (!std::isfinite(diff) || !std::isfinite(scale)) return StepStatus::rejected;
        if (diff <= prob_.picard_tol * scale) {
          converged = true;
          break;
        }
        growth = diff > previous ? growth + 1 : 0;
        if (growth >= 3) return StepStatus::rejected;
        previous = diff;
      }
      if (!converged) return StepStatus::rejected;
    }

    for (double v : c.coefficients)
      if (!std::isfinite(v)) return StepStatus::rejected;
    u.emplace(basis_.synthesize(c));
    up.emplace(powered(*u));
    if (prob_.superlinear() && u->max() > 2.0 * linf_.back()) return StepStatus::rejected;
    if (check_sign_) detail::check_negativity(*u, t_new, "spectral");
    t_.push_back(t_new);
    accept(*u, *up);
    return StepStatus::accepted;
  }

  const std::vector<double>& t() const { return t_; }
  const std::vector<double>& eta() const { return eta_; }
  const std::vector<double>& linf() const { return linf_; }
  const std::vector<double>& l2() const { return l2_; }
  const std::vector<double>& reaction() const { return reaction_; }
  const Field& last() const { return *last_; }
  int max_iterations() const { return max_iterations_; }

 private:
  Field powered(const Field& u) const {
    std::vector<double> v(u.values.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(std::max(u.values[i], 0.0), prob_.p);
    return Field(u.domain, std::move(v));
  }

  void accept(const Field& u, const Field& up) {
    f_.push_back(prob_.reaction ? basis_.project(up).coefficients : std::vector<double>());
    eta_.push_back(u.integral());
    linf_.push_back(u.max_abs());
    l2_.push_back(u.l2_norm());
    reaction_.push_back(up.integral());
    last_.emplace(u);
  }

  const std::vector<MildOperators::Weights>& cached(std::size_t lag, double h) {
    while (cache_.size() <= lag) {
      const double r_old = double(cache_.size()) * h;
      cache_.push_back(cache_.empty() ? std::vector<MildOperators::Weights>() : fresh(r_old, h));
    }
    return cache_[lag];
  }

  const std::vector<MildOperators::Weights>& fresh(double r_old, double tau) {
    scratch_.resize(modes_);
    for (std::size_t k = 0; k < modes_; ++k) scratch_[k] = ops_.history_weights(k, r_old, tau);
    return scratch_;
  }

  const FracProblem& prob_;
  const SpectralBasis& basis_;
  MildOperators ops_;
  std::vector<double> a_coef_;
  bool check_sign_;
  std::size_t modes_;
  std::vector<double> t_;
  std::vector<std::vector<double>> f_;
  std::vector<double> eta_, linf_, l2_, reaction_;
  std::optional<Field> last_;
  std::vector<std::vector<MildOperators::Weights>> cache_;
  std::vector<MildOperators::Weights> scratch_;
  int max_iterations_ = 0;
};

}  // namespace

PdeSolution solve_semilinear(const FracProblem& problem, const SpectralBasis& basis, const Field& a,
                             const TimeMesh& mesh, const PdeOptions& options) {
  if (!(a.domain == basis.domain()))
    throw MeshMismatchError("solve_semilinear: initial value grid " + describe(a.domain) +
                            " differs from basis grid " + describe(basis.domain()));
  detail::check_pde_inputs(problem, a, "spectral");
  VolterraMarcher march(problem, basis, a);
  return detail::run_pde_march(march, problem, a, mesh, options, "spectral");
}

}  // namespace fracblow
