#include <cmath>
#include <random>

#include "doctest.h"
#include "gpnet/autodiff.hpp"
#include "gpnet/error.hpp"
#include "gpnet/optim.hpp"
#include "gpnet/params.hpp"
#include "oracles.hpp"

using namespace gpnet;

namespace {

Matrix rand_mat(std::size_t r, std::size_t c, std::uint64_t seed, double lo = -1.0,
                double hi = 1.0) {
  std::mt19937_64 rng(seed);
  return random_uniform(r, c, lo, hi, rng);
}

}  // namespace

TEST_CASE("matmul values") {
  ad::Tape t;
  Matrix m = rand_mat(2, 2, 11);
  ad::Value identity = t.constant(Matrix::identity(2));
  ad::Value mm = t.constant(m);
  CHECK(max_abs_diff(ad::matmul(identity, mm).data(), m) == 0.0);

  ad::Value a = t.constant(Matrix::from_rows({{1, 2}, {3, 4}}));
  ad::Value b = t.constant(Matrix::from_rows({{1}, {1}}));
  Matrix prod = ad::matmul(a, b).data();
  CHECK(prod(0, 0) == 3.0);
  CHECK(prod(1, 0) == 7.0);

  CHECK_THROWS_AS(ad::matmul(a, t.constant(Matrix(3, 2))), ShapeError);
}

TEST_CASE("matmul gradient matches finite differences") {
  Matrix a0 = rand_mat(3, 4, 21);
  Matrix b0 = rand_mat(4, 2, 22);
  auto loss_wrt_a = [&](const Matrix& av) {
    ad::Tape t;
    return ad::sum_all(ad::matmul(t.constant(av), t.constant(b0))).data()(0, 0);
  };
  ad::Tape t;
  ad::Value a = t.leaf(a0, true);
  ad::Value b = t.leaf(b0, true);
  t.backward(ad::sum_all(ad::matmul(a, b)));
  Matrix fd = oracles::finite_difference_gradient(loss_wrt_a, a0);
  CHECK(oracles::max_rel_err(a.grad(), fd) <= 1e-5);
}

TEST_CASE("elementwise ops") {
  ad::Tape t;
  Matrix r = ad::relu(t.constant(Matrix::from_rows({{-1, 2}}))).data();
  CHECK(r(0, 0) == 0.0);
  CHECK(r(0, 1) == 2.0);

  Matrix lr = ad::leaky_relu(t.constant(Matrix::from_rows({{-10}})), 0.01).data();
  CHECK(lr(0, 0) == doctest::Approx(-0.1));

  CHECK_THROWS_AS(ad::log(t.constant(Matrix::from_rows({{0.0}}))), DomainError);
  CHECK_THROWS_AS(ad::add(t.constant(Matrix(2, 3)), t.constant(Matrix(3, 2))), ShapeError);
}

TEST_CASE("relu gradient is zero at exactly zero") {
  ad::Tape t;
  ad::Value x = t.leaf(Matrix::from_rows({{0.0, -1.0, 1.0}}), true);
  t.backward(ad::sum_all(ad::relu(x)));
  CHECK(x.grad()(0, 0) == 0.0);
  CHECK(x.grad()(0, 1) == 0.0);
  CHECK(x.grad()(0, 2) == 1.0);
}

TEST_CASE("softmax rows") {
  ad::Tape t;
  Matrix s = ad::softmax_rows(t.constant(Matrix::from_rows({{0, 0}}))).data();
  CHECK(s(0, 0) == doctest::Approx(0.5));
  CHECK(s(0, 1) == doctest::Approx(0.5));

  Matrix big = ad::softmax_rows(t.constant(Matrix::from_rows({{1000, 0}}))).data();
  CHECK(std::isfinite(big(0, 0)));
  CHECK(big(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(big(0, 1) == doctest::Approx(0.0).epsilon(1e-12));

  Matrix rnd = ad::softmax_rows(t.constant(rand_mat(5, 7, 31, -1e4, 1e4))).data();
  for (std::size_t i = 0; i < rnd.rows(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < rnd.cols(); ++j) {
      CHECK(rnd(i, j) >= 0.0);
      row += rnd(i, j);
    }
    CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("concat and reductions") {
  ad::Tape t;
  ad::Value a = t.constant(rand_mat(2, 3, 41));
  ad::Value b = t.constant(rand_mat(2, 4, 42));
  CHECK(ad::concat_cols(a, b).cols() == 7);
  CHECK_THROWS_AS(ad::concat_cols(a, t.constant(Matrix(3, 3))), ShapeError);

  ad::Value ties = t.leaf(Matrix::from_rows({{1, 5, 5}}), true);
  ad::Value mx = ad::max_over_cols(ties);
  CHECK(mx.data()(0, 0) == 5.0);
  t.backward(ad::sum_all(mx));
  CHECK(ties.grad()(0, 0) == 0.0);
  CHECK(ties.grad()(0, 1) == 1.0);  // tie resolved toward the lower index
  CHECK(ties.grad()(0, 2) == 0.0);

  ad::Value v = t.constant(Matrix::from_rows({{3, 4}}));
  CHECK(ad::l2_norm(v).data()(0, 0) == doctest::Approx(5.0));
}

TEST_CASE("max_over_rows routes ties to the lowest row") {
  ad::Tape t;
  ad::Value x = t.leaf(Matrix::from_rows({{2, 0}, {2, 1}}), true);
  t.backward(ad::sum_all(ad::max_over_rows(x)));
  CHECK(x.grad()(0, 0) == 1.0);
  CHECK(x.grad()(1, 0) == 0.0);
  CHECK(x.grad()(1, 1) == 1.0);
}

TEST_CASE("backward basics") {
  ad::Tape t;
  ad::Value w = t.leaf(rand_mat(3, 2, 51), true);

  SUBCASE("sum gradient is all ones") {
    t.backward(ad::sum_all(w));
    CHECK(max_abs_diff(w.grad(), Matrix::ones(3, 2)) == 0.0);
  }

  SUBCASE("fan-out doubles the gradient") {
    t.backward(ad::sum_all(ad::add(w, w)));
    CHECK(max_abs_diff(w.grad(), Matrix(3, 2, 2.0)) == 0.0);
  }

  SUBCASE("two backward calls without reset double the gradient") {
    ad::Value loss = ad::sum_all(w);
    t.backward(loss);
    t.backward(loss);
    CHECK(max_abs_diff(w.grad(), Matrix(3, 2, 2.0)) == 0.0);
  }

  SUBCASE("non-scalar loss is rejected") {
    CHECK_THROWS_AS(t.backward(w), ContractError);
  }
}

TEST_CASE("composite three-layer net gradient matches finite differences") {
  // x -> relu(x W1 + b1) -> relu(. W2) -> softmax . W3 -> scalar
  Matrix x0 = rand_mat(4, 5, 61);
  Matrix w1_0 = rand_mat(5, 6, 62);
  Matrix b1_0 = rand_mat(1, 6, 63);
  Matrix w2_0 = rand_mat(6, 4, 64);
  Matrix w3_0 = rand_mat(4, 3, 65);

  auto run = [&](const Matrix& w1v, const Matrix& w2v, const Matrix& w3v, const Matrix& b1v,
                 ad::Tape& t, ad::Value* w1, ad::Value* w2, ad::Value* w3, ad::Value* b1) {
    *w1 = t.leaf(w1v, true);
    *w2 = t.leaf(w2v, true);
    *w3 = t.leaf(w3v, true);
    *b1 = t.leaf(b1v, true);
    ad::Value h1 = ad::relu(ad::add(ad::matmul(t.constant(x0), *w1), *b1));
    ad::Value h2 = ad::relu(ad::matmul(h1, *w2));
    ad::Value z = ad::softmax_rows(ad::matmul(h2, *w3));
    return ad::sum_all(ad::mul(z, z));
  };

  ad::Tape t;
  ad::Value w1, w2, w3, b1;
  ad::Value loss = run(w1_0, w2_0, w3_0, b1_0, t, &w1, &w2, &w3, &b1);
  t.backward(loss);

  auto fd_for = [&](int which) {
    return oracles::finite_difference_gradient(
        [&](const Matrix& v) {
          ad::Tape tt;
          ad::Value a, b, c, d;
          const Matrix& vw1 = which == 0 ? v : w1_0;
          const Matrix& vw2 = which == 1 ? v : w2_0;
          const Matrix& vw3 = which == 2 ? v : w3_0;
          const Matrix& vb1 = which == 3 ? v : b1_0;
          return run(vw1, vw2, vw3, vb1, tt, &a, &b, &c, &d).data()(0, 0);
        },
        which == 0 ? w1_0 : which == 1 ? w2_0 : which == 2 ? w3_0 : b1_0);
  };
  CHECK(oracles::max_rel_err(w1.grad(), fd_for(0)) <= 1e-4);
  CHECK(oracles::max_rel_err(w2.grad(), fd_for(1)) <= 1e-4);
  CHECK(oracles::max_rel_err(w3.grad(), fd_for(2)) <= 1e-4);
  CHECK(oracles::max_rel_err(b1.grad(), fd_for(3)) <= 1e-4);
}

TEST_CASE("gradcheck across the op set") {
  // every differentiable op against central differences on random inputs
  std::mt19937_64 seed_rng(7321);
  auto check_unary = [&](auto&& build, std::size_t r, std::size_t c, double lo, double hi) {
    Matrix x0 = rand_mat(r, c, seed_rng(), lo, hi);
    ad::Tape t;
    ad::Value x = t.leaf(x0, true);
    t.backward(ad::sum_all(build(x)));
    Matrix fd = oracles::finite_difference_gradient(
        [&](const Matrix& v) {
          ad::Tape tt;
          return ad::sum_all(build(tt.leaf(v, false))).data()(0, 0);
        },
        x0);
    CHECK(oracles::max_rel_err(x.grad(), fd) <= 1e-4);
  };

  check_unary([](ad::Value v) { return ad::relu(v); }, 3, 4, -1, 1);
  check_unary([](ad::Value v) { return ad::leaky_relu(v, 0.2); }, 3, 4, -1, 1);
  check_unary([](ad::Value v) { return ad::exp(v); }, 2, 3, -1, 1);
  check_unary([](ad::Value v) { return ad::log(v); }, 2, 3, 0.2, 1.5);
  check_unary([](ad::Value v) { return ad::softmax_rows(v); }, 3, 5, -1, 1);
  check_unary([](ad::Value v) { return ad::mul(ad::softmax_rows(v), v); }, 3, 5, -1, 1);
  check_unary([](ad::Value v) { return ad::transpose(v); }, 3, 4, -1, 1);
  check_unary([](ad::Value v) { return ad::mean_over_rows(v); }, 4, 3, -1, 1);
  check_unary([](ad::Value v) { return ad::mean_over_cols(v); }, 4, 3, -1, 1);
  check_unary([](ad::Value v) { return ad::max_over_rows(v); }, 4, 3, -1, 1);
  check_unary([](ad::Value v) { return ad::max_over_cols(v); }, 4, 3, -1, 1);
  check_unary([](ad::Value v) { return ad::l2_norm(v); }, 3, 3, 0.5, 1.5);
  check_unary([](ad::Value v) { return ad::scale(v, -2.5); }, 3, 3, -1, 1);
  check_unary([](ad::Value v) { return ad::select_rows(v, {2, 0, 2}); }, 4, 3, -1, 1);
  check_unary([](ad::Value v) { return ad::cross_entropy_mean(v, {1, 0, 2}); }, 3, 4, -1, 1);

  auto check_binary = [&](auto&& build, std::size_t ar, std::size_t ac, std::size_t br,
                          std::size_t bc) {
    Matrix a0 = rand_mat(ar, ac, seed_rng());
    Matrix b0 = rand_mat(br, bc, seed_rng());
    ad::Tape t;
    ad::Value a = t.leaf(a0, true);
    ad::Value b = t.leaf(b0, true);
    t.backward(ad::sum_all(build(a, b)));
    for (int side = 0; side < 2; ++side) {
      Matrix fd = oracles::finite_difference_gradient(
          [&](const Matrix& v) {
            ad::Tape tt;
            ad::Value av = tt.leaf(side == 0 ? v : a0, false);
            ad::Value bv = tt.leaf(side == 0 ? b0 : v, false);
            return ad::sum_all(build(av, bv)).data()(0, 0);
          },
          side == 0 ? a0 : b0);
      CHECK(oracles::max_rel_err((side == 0 ? a : b).grad(), fd) <= 1e-4);
    }
  };

  check_binary([](ad::Value a, ad::Value b) { return ad::add(a, b); }, 3, 4, 3, 4);
  check_binary([](ad::Value a, ad::Value b) { return ad::add(a, b); }, 3, 4, 1, 4);  // broadcast
  check_binary([](ad::Value a, ad::Value b) { return ad::sub(a, b); }, 3, 4, 3, 4);
  check_binary([](ad::Value a, ad::Value b) { return ad::mul(a, b); }, 3, 4, 3, 4);
  check_binary([](ad::Value a, ad::Value b) { return ad::matmul(a, b); }, 3, 4, 4, 2);
  check_binary([](ad::Value a, ad::Value b) { return ad::concat_cols(a, b); }, 3, 2, 3, 4);
  check_binary(
      [](ad::Value a, ad::Value b) {
        std::vector<ad::Value> parts{a, b};
        return ad::concat_rows(parts);
      },
      2, 3, 4, 3);
  check_binary([](ad::Value a, ad::Value b) { return ad::scale_rows(a, b); }, 3, 4, 3, 1);
  check_binary(
      [](ad::Value a, ad::Value b) { return ad::div_by_scalar(a, ad::l2_norm(b)); }, 3, 2, 2, 2);
  check_binary([](ad::Value a, ad::Value b) { return ad::emax(a, b); }, 3, 4, 3, 4);
}

TEST_CASE("elementwise max tie goes to the first operand") {
  ad::Tape t;
  ad::Value a = t.leaf(Matrix::from_rows({{1.0}}), true);
  ad::Value b = t.leaf(Matrix::from_rows({{1.0}}), true);
  t.backward(ad::sum_all(ad::emax(a, b)));
  CHECK(a.grad()(0, 0) == 1.0);
  CHECK(b.grad()(0, 0) == 0.0);
}

TEST_CASE("cross entropy values") {
  ad::Tape t;
  const std::size_t classes = 6;
  ad::Value uniform = t.constant(Matrix(2, classes, 0.0));
  CHECK(ad::cross_entropy_mean(uniform, {0, 3}).data()(0, 0) ==
        doctest::Approx(std::log(static_cast<double>(classes))));

  Matrix sharp(1, classes, 0.0);
  sharp(0, 2) = 1e3;
  CHECK(ad::cross_entropy_mean(t.constant(sharp), {2}).data()(0, 0) ==
        doctest::Approx(0.0).epsilon(1e-9));

  // random case against a directly computed -log softmax[label]
  Matrix z = rand_mat(1, 5, 77);
  double mx = z(0, 0);
  for (std::size_t j = 1; j < 5; ++j) mx = std::max(mx, z(0, j));
  double denom = 0.0;
  for (std::size_t j = 0; j < 5; ++j) denom += std::exp(z(0, j) - mx);
  const double expected = -(z(0, 3) - mx - std::log(denom));
  CHECK(ad::cross_entropy_mean(t.constant(z), {3}).data()(0, 0) == doctest::Approx(expected));
}

TEST_CASE("adam") {
  SUBCASE("zero gradient and zero decay leave parameters unchanged") {
    ParameterSet ps;
    Parameter& w = ps.create("w", rand_mat(2, 2, 91));
    Matrix before = w.value;
    Adam opt;
    opt.update(w, Matrix(2, 2, 0.0), 0.1);
    CHECK(max_abs_diff(w.value, before) == 0.0);
  }

  SUBCASE("descends on a quadratic") {
    ParameterSet ps;
    Parameter& w = ps.create("w", Matrix::from_rows({{1.0}}));
    Adam opt;
    opt.update(w, Matrix::from_rows({{2.0}}), 0.1);  // d/dw w^2 at w=1
    CHECK(w.value(0, 0) < 1.0);
  }

  SUBCASE("rejects non-positive learning rate") {
    ParameterSet ps;
    Parameter& w = ps.create("w", Matrix::from_rows({{1.0}}));
    Adam opt;
    CHECK_THROWS_AS(opt.update(w, Matrix::from_rows({{1.0}}), 0.0), ConfigError);
  }

  SUBCASE("200 steps reach the minimizer of a convex quadratic") {
    // f(w) = 0.5 (w - target)^2, minimizer = target
    Matrix target = Matrix::from_rows({{0.3, -0.7}});
    ParameterSet ps;
    Parameter& w = ps.create("w", Matrix(1, 2, 1.0));
    Adam opt;
    for (int i = 0; i < 200; ++i) {
      Matrix grad = w.value - target;
      opt.update(w, grad, 0.05);
    }
    CHECK(max_abs_diff(w.value, target) <= 1e-3);
  }
}

TEST_CASE("tape determinism") {
  auto run = [] {
    std::mt19937_64 rng(1234);
    Matrix a = random_uniform(4, 4, -1, 1, rng);
    Matrix b = random_uniform(4, 4, -1, 1, rng);
    ad::Tape t;
    return ad::sum_all(ad::softmax_rows(ad::matmul(t.constant(a), t.constant(b)))).data()(0, 0);
  };
  CHECK(run() == run());
}
