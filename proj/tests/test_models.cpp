#include <doctest.h>

#include <Eigen/Dense>
#include <boost/math/distributions/gamma.hpp>
#include <cmath>

#include "umsa/elliptic.hpp"
#include "umsa/errors.hpp"
#include "umsa/rk4.hpp"
#include "umsa/sir.hpp"

using namespace umsa;

namespace {

// Dense reference: assemble the full FD system and solve it with LU.
Eigen::VectorXd dense_poisson(const Eigen::VectorXd& f) {
  const Eigen::Index m = f.size() - 2;
  const double h = 2.0 * M_PI / static_cast<double>(f.size() - 1);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    a(i, i) = 2.0;
    if (i > 0) a(i, i - 1) = -1.0;
    if (i + 1 < m) a(i, i + 1) = -1.0;
  }
  const Eigen::VectorXd inner = a.fullPivLu().solve(h * h * f.segment(1, m));
  Eigen::VectorXd out = Eigen::VectorXd::Zero(f.size());
  out.segment(1, m) = inner;
  return out;
}

Eigen::VectorXd nodal_forcing(int level, double x1, double x2) {
  const Eigen::Index n = (Eigen::Index{1} << level) + 1;
  Eigen::VectorXd f(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n - 1);
    f(i) = x1 * std::sin(2.0 * t) + x2 * std::sin(t);
  }
  return f;
}

EllipticModel small_elliptic(std::uint64_t seed = 3) {
  Rng rng{seed};
  const auto data = generate_elliptic_data(100.0, 12, rng);
  return EllipticModel(data.y);
}

double mvn_logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  const Eigen::VectorXd r = llt.matrixL().solve(x - mean);
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * r.squaredNorm() - 0.5 * logdet - 0.5 * static_cast<double>(x.size()) * std::log(2.0 * M_PI);
}

SirOptions tiny_sir_options() {
  SirOptions opt;
  opt.observation_offset = 10;
  opt.observations = 8;
  return opt;
}

}  // namespace

TEST_CASE("thomas solver matches a dense solve") {
  for (int level : {2, 5, 8}) {
    const auto f = nodal_forcing(level, 0.7, -1.3);
    const Eigen::VectorXd fast = solve_dirichlet_poisson(f);
    const Eigen::VectorXd ref = dense_poisson(f);
    CHECK((fast - ref).cwiseAbs().maxCoeff() < 1e-11);
    CHECK(fast(0) == 0.0);
    CHECK(fast(fast.size() - 1) == 0.0);
  }
  CHECK_THROWS_AS(solve_dirichlet_poisson(Eigen::VectorXd::Zero(2)), DomainError);
}

TEST_CASE("zero forcing gives zero solution") {
  const Eigen::VectorXd h = solve_dirichlet_poisson(Eigen::VectorXd::Zero(33));
  CHECK(h.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("interpolation is exact for affine data") {
  Eigen::VectorXd nodal(9);
  for (int i = 0; i < 9; ++i) nodal(i) = 3.0 - 0.5 * (2.0 * M_PI * i / 8.0);
  for (double t : {0.0, 0.3, 1.7, 4.4, 2.0 * M_PI}) CHECK(interpolate_uniform(nodal, t) == doctest::Approx(3.0 - 0.5 * t));
}

TEST_CASE("forward matrix converges to the analytic limit at second order") {
  const auto times = elliptic_observation_times(50);
  CHECK(times(0) == doctest::Approx(2.0 * M_PI / 100.0));
  CHECK(times(49) == doctest::Approx(2.0 * M_PI * 99.0 / 100.0));
  const Eigen::MatrixXd exact = analytic_forward_matrix_elliptic(times);
  CHECK(exact(3, 0) == doctest::Approx(std::sin(2.0 * times(3)) / 4.0));
  CHECK(exact(3, 1) == doctest::Approx(std::sin(times(3))));
  std::vector<double> err;
  for (int l = 5; l <= 10; ++l) err.push_back((build_forward_matrix_elliptic(l, times) - exact).cwiseAbs().maxCoeff());
  for (std::size_t k = 0; k + 1 < err.size(); ++k) CHECK(err[k] / err[k + 1] == doctest::Approx(4.0).epsilon(0.25));
  CHECK((build_forward_matrix_elliptic(12, times) - exact).cwiseAbs().maxCoeff() <= 1e-5);
}

TEST_CASE("elliptic log density conventions") {
  EllipticModel zero(Eigen::VectorXd::Zero(50));
  const Latent u0 = Latent::Zero(2);
  for (double th : {0.5, 1.0, 100.0}) {
    CHECK(zero.log_gamma(Theta::Constant(1, th), u0, 5) == doctest::Approx(25.0 * std::log(th)));
  }
  const auto model = small_elliptic();
  const Theta theta = Theta::Constant(1, 100.0);
  CHECK_THROWS_AS((void)model.log_gamma(Theta::Constant(1, 0.0), u0, 5), DomainError);
  CHECK_THROWS_AS((void)model.grad_theta(Theta::Constant(1, -1.0), u0, 5), DomainError);
  Rng rng{17};
  for (int rep = 0; rep < 5; ++rep) {
    const Latent u = model.sample_prior(rng);
    const Latent v = model.sample_prior(rng);
    const int l = 4 + rep;
    const Eigen::MatrixXd& g = model.forward_matrix(l);
    // log gamma differs from log N(y; G u, I/theta) + log N(u; 0, 16 I) by a constant.
    auto reference = [&](const Latent& x) {
      return mvn_logpdf(model.data(), g * x, Eigen::MatrixXd::Identity(50, 50) / 100.0) +
             mvn_logpdf(x, Eigen::Vector2d::Zero(), 16.0 * Eigen::Matrix2d::Identity());
    };
    const double diff = model.log_gamma(theta, u, l) - model.log_gamma(theta, v, l);
    CHECK(diff == doctest::Approx(reference(u) - reference(v)).epsilon(1e-10));
    const double direct = 25.0 * std::log(100.0) - 50.0 * (model.data() - g * u).squaredNorm() - u.squaredNorm() / 32.0;
    CHECK(model.log_gamma(theta, u, l) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("elliptic gradient") {
  const auto model = small_elliptic();
  Rng rng{5};
  for (int rep = 0; rep < 20; ++rep) {
    const Latent u = model.sample_prior(rng);
    const double th = 100.0;
    const double h = 1e-4 * th;
    const double fd = (model.log_gamma(Theta::Constant(1, th + h), u, 6) -
                       model.log_gamma(Theta::Constant(1, th - h), u, 6)) / (2.0 * h);
    const double g = model.grad_theta(Theta::Constant(1, th), u, 6)(0);
    CHECK(std::abs(fd - g) <= 1e-6 * std::max(1.0, std::abs(g)));
  }
  // Zero residual: y = G u exactly.
  const Latent u = (Latent(2) << 0.4, -1.1).finished();
  EllipticModel exact_fit(build_forward_matrix_elliptic(7, elliptic_observation_times(50)) * u);
  CHECK(exact_fit.grad_theta(Theta::Constant(1, 3.0), u, 7)(0) == doctest::Approx(50.0 / 6.0));
  // Stationary point: residual J / theta.
  const auto fwd = model.forward(u, 6);
  const double th_star = 50.0 / fwd.values(0);
  CHECK(std::abs(model.grad_theta(Theta::Constant(1, th_star), fwd)(0)) < 1e-9);
}

TEST_CASE("elliptic prior and data") {
  const auto model = small_elliptic();
  Rng rng{77};
  const int n = 100'000;
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  for (int i = 0; i < n; ++i) sum += model.sample_prior(rng);
  CHECK((sum / n).cwiseAbs().maxCoeff() < 3.0 * 4.0 / std::sqrt(static_cast<double>(n)));
  Rng a{8};
  const auto noiseless = generate_elliptic_data(std::numeric_limits<double>::infinity(), 10, a);
  const Eigen::VectorXd fit = build_forward_matrix_elliptic(10, elliptic_observation_times(50)) * noiseless.x_true;
  CHECK((noiseless.y - fit).cwiseAbs().maxCoeff() < 1e-14);
  Rng b{8};
  Rng c{8};
  CHECK(generate_elliptic_data(100.0, 10, b).y == generate_elliptic_data(100.0, 10, c).y);
}

TEST_CASE("elliptic closed-form posterior") {
  const auto model = small_elliptic();
  const auto post = model.posterior(100.0, 6);
  const Eigen::MatrixXd& g = model.forward_matrix(6);
  const Eigen::Matrix2d prec = 100.0 * g.transpose() * g + Eigen::Matrix2d::Identity() / 16.0;
  CHECK((post.covariance * prec - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-10);
  // The posterior mean maximizes the log density.
  const Eigen::Vector2d grad = 100.0 * g.transpose() * (model.data() - g * post.mean) - post.mean / 16.0;
  CHECK(grad.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("rk4 step is fourth order on a scalar test equation") {
  auto f = [](double t, const Eigen::Matrix<double, 1, 1>& y) {
    return Eigen::Matrix<double, 1, 1>(std::cos(t) * y(0));
  };
  auto solve = [&](int steps) {
    Eigen::Matrix<double, 1, 1> y(1.0);
    const double h = 2.0 / steps;
    for (int k = 0; k < steps; ++k) y = rk4_step(f, k * h, y, h);
    return y(0);
  };
  const double exact = std::exp(std::sin(2.0));
  const double e1 = std::abs(solve(20) - exact);
  const double e2 = std::abs(solve(40) - exact);
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.25));
}

TEST_CASE("rk4 order on a quadrature with frozen synthetic S and I") {
  // d/dt h = S(t) I(t), S = exp(-t), I = sin(t)^2: RK4 reduces to Simpson's rule.
  using V = Eigen::Matrix<double, 1, 1>;
  auto f = [](double t, const V&) { return V(std::exp(-t) * std::sin(t) * std::sin(t)); };
  auto solve = [&](int steps) {
    V y(0.0);
    const double h = 3.0 / steps;
    for (int k = 0; k < steps; ++k) y = rk4_step(f, k * h, y, h);
    return y(0);
  };
  const double ref = solve(1 << 14);
  const double e1 = std::abs(solve(16) - ref);
  const double e2 = std::abs(solve(32) - ref);
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.25));
}

TEST_CASE("sir trajectories conserve mass and align day boundaries") {
  const SirOptions opt;
  const Latent x = (Latent(3) << 0.002, 0.3, 12.37).finished();
  for (int level : {0, 2, 4}) {
    const Trajectory traj = rk4_integrate(x, level, opt);
    CHECK(traj.times.front() == doctest::Approx(-12.37));
    CHECK(traj.step == doctest::Approx(0.1 * std::ldexp(1.0, -level)));
    for (const auto& s : traj.states) CHECK(std::abs(s.head<4>().sum() - 1.0) < 1e-10);
    CHECK(traj.infections.size() == opt.observations);
    CHECK((traj.infections - sir_infections(x, level, opt)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((traj.infections.array() > 0.0).all());
  }
  CHECK(sir_steps_per_day(3) == 80);
  CHECK_THROWS_AS(rk4_integrate(x, 2, opt, 10.0), DomainError);
}

TEST_CASE("sir with no transmission and no quarantine is static") {
  SirOptions opt;
  opt.transmission = 0.0;
  const Latent x = (Latent(3) << 0.0, 0.0, 7.25).finished();
  const Trajectory traj = rk4_integrate(x, 2, opt);
  CHECK(traj.infections.cwiseAbs().maxCoeff() == 0.0);
  CHECK(traj.states.back()(0) == doctest::Approx(1.0 - 1.0 / opt.population).epsilon(1e-15));
}

TEST_CASE("sir gamma likelihood") {
  const SirOptions opt = tiny_sir_options();
  const Latent x = (Latent(3) << 0.0015, 0.25, 8.0).finished();
  const Eigen::VectorXd g = sir_infections(x, 3, opt);
  Rng rng{4};
  Eigen::VectorXd y(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) y(i) = g(i) * std::exp(-(0.05 + 0.5 * rng.uniform()));
  const SirModel model(y, opt);
  const Theta theta = (Theta(2) << 2.0, 0.1).finished();
  double ref = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const boost::math::gamma_distribution<double> law(2.0, 0.1);
    ref += std::log(boost::math::pdf(law, std::log(g(i) / y(i))));
  }
  CHECK(model.log_gamma(theta, x, 3) == doctest::Approx(ref).epsilon(1e-12));

  Eigen::VectorXd too_big = y;
  too_big(2) = g(2) * 1.01;
  const SirModel bad(too_big, opt);
  CHECK(bad.log_gamma(theta, x, 3) == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS((void)bad.grad_theta(theta, x, 3), UndefinedGradientError);
  const Latent outside = (Latent(3) << 0.01, 0.25, 8.0).finished();
  CHECK(model.log_gamma(theta, outside, 3) == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS((void)model.log_gamma((Theta(2) << 0.0, 1.0).finished(), x, 3), DomainError);
}

TEST_CASE("sir likelihood closed-form cases") {
  // P = 1, theta = (1, 1), log(G / y) = 1 gives -1.
  SirOptions opt = tiny_sir_options();
  opt.observations = 1;
  const Latent x = (Latent(3) << 0.0015, 0.25, 8.0).finished();
  const double g = sir_infections(x, 2, opt)(0);
  const SirModel model(Eigen::VectorXd::Constant(1, g / std::exp(1.0)), opt);
  CHECK(model.log_gamma((Theta(2) << 1.0, 1.0).finished(), x, 2) == doctest::Approx(-1.0).epsilon(1e-12));
  // Digamma at one: psi(1) = -Euler-Mascheroni.
  const double gamma_em = 0.57721566490153286;
  const Theta grad = model.grad_theta((Theta(2) << 1.0, 0.3).finished(), x, 2);
  CHECK(grad(0) == doctest::Approx(gamma_em - std::log(0.3) + std::log(1.0)).epsilon(1e-12));
  // Stationarity in theta2 when sum log(G/y) = P theta1 theta2.
  const Theta stationary = (Theta(2) << 2.0, 0.5).finished();
  CHECK(std::abs(model.grad_theta(stationary, x, 2)(1)) < 1e-12);
}

TEST_CASE("sir gradient matches finite differences") {
  const SirOptions opt = tiny_sir_options();
  Rng rng{21};
  const SirData data = generate_sir_data((Theta(2) << 2.0, 0.1).finished(), 5, rng, opt);
  const SirModel model(data.y, opt);
  const auto fwd = model.forward(data.x_true, 5);
  REQUIRE(fwd.admissible);
  const Theta theta = (Theta(2) << 2.0, 0.1).finished();
  const Theta g = model.grad_theta(theta, fwd);
  for (int k = 0; k < 2; ++k) {
    const double h = 1e-5 * theta(k);
    Theta tp = theta;
    Theta tm = theta;
    tp(k) += h;
    tm(k) -= h;
    const double fd = (model.log_gamma(tp, fwd) - model.log_gamma(tm, fwd)) / (2.0 * h);
    CHECK(std::abs(fd - g(k)) <= 1e-5 * std::abs(g(k)));
  }
}

TEST_CASE("sir data and prior") {
  const SirOptions opt = tiny_sir_options();
  Rng rng{33};
  const SirData data = generate_sir_data((Theta(2) << 2.0, 0.1).finished(), 6, rng, opt);
  CHECK((data.y.array() <= sir_infections(data.x_true, 6, opt).array()).all());
  const SirModel model(data.y, opt);
  for (int i = 0; i < 1000; ++i) CHECK(model.in_prior_box(model.sample_prior(rng)));
  CHECK_THROWS_AS(SirModel(Eigen::VectorXd::Ones(3), opt), ConfigError);
}
