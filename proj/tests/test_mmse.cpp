#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

#include "cellrate/mmse.hpp"

using namespace cellrate;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

VectorXcd random_cvec(int n, RngStream& rng) {
  VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.next_cgauss();
  return v;
}

MatrixXcd random_cmat(int rows, int cols, RngStream& rng) {
  MatrixXcd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = rng.next_cgauss();
  return m;
}

double sinr_explicit_inverse(const VectorXcd& h, const MatrixXcd& g,
                             const VectorXd& p, double noise) {
  MatrixXcd cov = noise * MatrixXcd::Identity(h.size(), h.size());
  for (Eigen::Index j = 0; j < g.cols(); ++j)
    cov += p[j] * g.col(j) * g.col(j).adjoint();
  return (h.adjoint() * cov.inverse() * h)(0, 0).real();
}

}  // namespace

TEST_CASE("no interferers reduces to matched filtering against noise") {
  RngStream rng(1);
  const VectorXcd h = random_cvec(6, rng);
  const MatrixXcd g(6, 0);
  const VectorXd p(0);
  const double sinr = mmse_sinr(h, g, p, 2.5e-3);
  CHECK(sinr == doctest::Approx(h.squaredNorm() / 2.5e-3).epsilon(1e-12));
}

TEST_CASE("single antenna, single interferer scalar formula") {
  RngStream rng(2);
  const VectorXcd h = random_cvec(1, rng);
  const MatrixXcd g = random_cmat(1, 1, rng);
  VectorXd p(1);
  p << 0.7;
  const double noise = 0.05;
  const double expected = std::norm(h[0]) / (0.7 * std::norm(g(0, 0)) + noise);
  CHECK(mmse_sinr(h, g, p, noise) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("matches the explicit-inverse quadratic form") {
  RngStream rng(3);
  for (int it = 0; it < 200; ++it) {
    const int n_ant = 1 + static_cast<int>(rng.next_below(8));
    const int n = static_cast<int>(rng.next_below(21));
    const VectorXcd h = random_cvec(n_ant, rng);
    const MatrixXcd g = random_cmat(n_ant, n, rng);
    VectorXd p(n);
    for (int j = 0; j < n; ++j) p[j] = 0.01 + rng.next_double();
    const double noise = 0.001 + rng.next_double();
    const double fast = mmse_sinr(h, g, p, noise);
    const double slow = sinr_explicit_inverse(h, g, p, noise);
    CHECK(std::abs(fast - slow) / slow < 1e-10);
  }
}

TEST_CASE("an extra interferer never helps") {
  RngStream rng(4);
  for (int it = 0; it < 100; ++it) {
    const int n_ant = 2 + static_cast<int>(rng.next_below(6));
    const int n = static_cast<int>(rng.next_below(12));
    const VectorXcd h = random_cvec(n_ant, rng);
    const MatrixXcd g = random_cmat(n_ant, n + 1, rng);
    VectorXd p(n + 1);
    for (int j = 0; j <= n; ++j) p[j] = 0.01 + rng.next_double();
    const double noise = 0.01;
    const double before = mmse_sinr(h, g.leftCols(n), p.head(n), noise);
    const double after = mmse_sinr(h, g, p, noise);
    CHECK(after <= before * (1.0 + 1e-12));
  }
}

TEST_CASE("common scaling of powers and noise leaves SINR unchanged") {
  RngStream rng(5);
  const VectorXcd h = random_cvec(4, rng);
  const MatrixXcd g = random_cmat(4, 9, rng);
  VectorXd p(9);
  for (int j = 0; j < 9; ++j) p[j] = 0.1 + rng.next_double();
  const double noise = 0.03;
  const double base = mmse_sinr(h, g, p, noise);
  for (const double s : {1e-6, 1e3, 1e9}) {
    const double scaled = mmse_sinr(std::sqrt(s) * h, g, (s * p).eval(), s * noise);
    CHECK(scaled == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("mean SINR grows with the antenna count") {
  RngStream rng(6);
  VectorXd p(20);
  for (int j = 0; j < 20; ++j) p[j] = 0.05 + rng.next_double();
  const double noise = 0.01;
  const std::vector<int> ns{1, 2, 4, 8};
  std::vector<double> mean(ns.size(), 0.0), var(ns.size(), 0.0);
  const int trials = 1000;
  std::vector<std::vector<double>> samples(ns.size());
  for (int t = 0; t < trials; ++t) {
    const MatrixXcd g = random_cmat(8, 20, rng);
    const VectorXcd h = random_cvec(8, rng);
    for (std::size_t k = 0; k < ns.size(); ++k)
      samples[k].push_back(mmse_sinr(h.head(ns[k]), g.topRows(ns[k]), p, noise));
  }
  for (std::size_t k = 0; k < ns.size(); ++k) {
    for (const double v : samples[k]) mean[k] += v;
    mean[k] /= trials;
    for (const double v : samples[k]) var[k] += (v - mean[k]) * (v - mean[k]);
    var[k] /= (trials - 1);
  }
  for (std::size_t k = 0; k + 1 < ns.size(); ++k) {
    const double se = std::sqrt(var[k] / trials + var[k + 1] / trials);
    CHECK(mean[k + 1] - mean[k] > 3.0 * se);
  }
}

TEST_CASE("generate_channel: received powers, shapes, error paths") {
  const PowerControl pc{1e-12, 1e-5, 1.0, 4.0};
  RngStream rng(7);

  PointSet nodes{{5.0, 0.0}, {10.0, 0.0}};
  VectorXd tx(2);
  tx << 2e-3, 1e-3;
  const auto ch = generate_channel(nodes, tx, 0, 3, pc, 1e-15, rng);
  REQUIRE(ch.rx_power.size() == 1);
  // interferer at r=10 with P=1e-3: G_t P r^-4 = 1e-12
  CHECK(ch.rx_power[0] == doctest::Approx(1e-12).epsilon(1e-12));
  CHECK(ch.rep_channel.size() == 3);
  CHECK(ch.fading.rows() == 3);
  CHECK(ch.fading.cols() == 1);

  PointSet solo{{4.0, 3.0}};
  VectorXd tx1(1);
  tx1 << 1e-3;
  const auto ch0 = generate_channel(solo, tx1, 0, 3, pc, 1e-15, rng);
  CHECK(ch0.fading.cols() == 0);
  CHECK(ch0.rep_channel.size() == 3);

  PointSet bad{{0.0, 0.0}, {1.0, 1.0}};
  VectorXd tx2(2);
  tx2 << 1.0, 1.0;
  CHECK_THROWS_AS(generate_channel(bad, tx2, 1, 2, pc, 1e-15, rng),
                  std::invalid_argument);
}

TEST_CASE("fading entries carry unit power") {
  RngStream rng(8);
  const MatrixXcd g = random_cmat(1000, 1000, rng);
  const double mean = g.squaredNorm() / (1000.0 * 1000.0);
  CHECK(mean > 0.998);
  CHECK(mean < 1.002);
}

TEST_CASE("spectral efficiency of round SINRs") {
  CHECK(spectral_efficiency(0.0) == 0.0);
  CHECK(spectral_efficiency(1.0) == doctest::Approx(1.0));
  CHECK(spectral_efficiency(3.0) == doctest::Approx(2.0));
}
