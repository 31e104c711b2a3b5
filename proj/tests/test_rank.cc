#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "helpers.h"
#include "oracles.h"
#include "scalenest/binarize.h"
#include "scalenest/errors.h"
#include "scalenest/rank.h"

using namespace testing;

namespace {

std::vector<std::size_t> identity(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

std::vector<std::vector<std::uint8_t>> sorted_rows(const BitMatrix& m) {
  std::vector<std::vector<std::uint8_t>> rows;
  for (std::size_t i = 0; i < m.rows(); ++i) rows.emplace_back(m.row(i).begin(), m.row(i).end());
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace

TEST_CASE("all-ones matrix is a fixed point") {
  auto r = fitness_complexity(make_binary_map(BitMatrix(5, 5, 1)));
  CHECK(r.iterations == 1);
  CHECK(r.converged);
  for (double f : r.fitness) CHECK(f == doctest::Approx(1.0));
  for (double q : r.complexity) CHECK(q == doctest::Approx(1.0));
}

TEST_CASE("triangular matrix against the plain iteration") {
  auto tri = bits({{1, 1, 1}, {1, 1, 0}, {1, 0, 0}});
  auto r = fitness_complexity(make_binary_map(tri));
  auto o = oracle::fitness(tri, 1e-10);
  CHECK(r.converged);
  CHECK(r.fitness[0] > r.fitness[1]);
  CHECK(r.fitness[1] > r.fitness[2]);
  CHECK(r.complexity[0] < r.complexity[1]);
  CHECK(r.complexity[1] < r.complexity[2]);
  CHECK(o.fitness[0] > o.fitness[1]);
  CHECK(o.fitness[1] > o.fitness[2]);
  CHECK(o.complexity[0] < o.complexity[1]);
  CHECK(o.complexity[1] < o.complexity[2]);
}

TEST_CASE("dense matrices agree with the plain iteration") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = oracle::random_bits(6, 5, 0.6, rng);
    try {
      m = prune_bits(m);
    } catch (const DegenerateError&) {
      continue;
    }
    FitnessOptions opts;
    opts.tol = 1e-12;
    opts.rank_stable_iters = 1 << 20;  // values only
    opts.max_iter = 100000;
    auto r = fitness_complexity(m, opts);
    auto o = oracle::fitness(m, 1e-12);
    for (std::size_t i = 0; i < m.rows(); ++i)
      CHECK(r.fitness[i] == doctest::Approx(o.fitness[i]).epsilon(1e-6));
    for (std::size_t j = 0; j < m.cols(); ++j)
      CHECK(r.complexity[j] == doctest::Approx(o.complexity[j]).epsilon(1e-6));
  }
}

TEST_CASE("empty lines are a precondition violation") {
  CHECK_THROWS_AS(fitness_complexity(make_binary_map(bits({{1, 1}, {0, 0}}))),
                  PreconditionError);
  CHECK_THROWS_AS(fitness_complexity(make_binary_map(bits({{1, 0}, {1, 0}}))),
                  PreconditionError);
}

TEST_CASE("staircase ranks follow degrees") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 2 + rng() % 7, n = 2 + rng() % 7;
    auto M = oracle::random_staircase(m, n, rng);
    auto r = fitness_complexity(M);
    std::vector<std::size_t> rd(m, 0), cd(n, 0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        rd[i] += M(i, j);
        cd[j] += M(i, j);
      }
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        if (rd[a] > rd[b]) CHECK(r.fitness[a] > r.fitness[b]);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (cd[a] > cd[b]) CHECK(r.complexity[a] < r.complexity[b]);
  }
}

TEST_CASE("packing examples") {
  auto tri = make_binary_map(bits({{1, 1, 1}, {1, 1, 0}, {1, 0, 0}}));
  auto packed = rank_and_pack(tri);
  CHECK(packed.row_order == identity(3));
  CHECK(packed.col_order == identity(3));

  auto rev = make_binary_map(bits({{1, 0, 0}, {1, 1, 0}, {1, 1, 1}}));
  auto p2 = rank_and_pack(rev);
  CHECK(p2.row_order == std::vector<std::size_t>{2, 1, 0});
  CHECK(p2.col_order == identity(3));
  CHECK(p2.map.bits == tri.bits);
  CHECK(p2.map.row_labels[0].str() == "r2");

  auto twins = make_binary_map(bits({{1, 0}, {1, 1}, {1, 0}}));
  auto p3 = rank_and_pack(twins);
  CHECK(p3.row_order == std::vector<std::size_t>{1, 0, 2});

  FitnessResult wrong;
  wrong.fitness = {1, 1};
  wrong.complexity = {1, 1};
  CHECK_THROWS_AS(pack_matrix(tri, wrong), ShapeError);
}

TEST_CASE("packing permutes and is idempotent") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    BitMatrix m;
    try {
      m = prune_bits(oracle::random_bits(3 + rng() % 10, 3 + rng() % 10, 0.4, rng));
    } catch (const DegenerateError&) {
      continue;
    }
    auto map = make_binary_map(m);
    auto p = rank_and_pack(map);
    // Undoing both permutations recovers the input exactly.
    BitMatrix back(m.rows(), m.cols(), 0);
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j)
        back(p.row_order[i], p.col_order[j]) = p.map.bits(i, j);
    CHECK(back == m);
    auto ro = p.row_order, co = p.col_order;
    std::sort(ro.begin(), ro.end());
    std::sort(co.begin(), co.end());
    CHECK(ro == identity(m.rows()));
    CHECK(co == identity(m.cols()));
    // Row and column vectors survive as multisets once columns are matched.
    BitMatrix unsorted_cols(m.rows(), m.cols(), 0);
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) unsorted_cols(i, p.col_order[j]) = p.map.bits(i, j);
    CHECK(sorted_rows(unsorted_cols) == sorted_rows(m));
    for (std::size_t k = 0; k < p.row_order.size(); ++k)
      CHECK(p.map.row_labels[k] == map.row_labels[p.row_order[k]]);
    auto again = rank_and_pack(p.map);
    CHECK(again.row_order == identity(m.rows()));
    CHECK(again.col_order == identity(m.cols()));
  }
}

TEST_CASE("scores csv is sorted by value") {
  std::ostringstream out;
  write_scores_csv(out, {geo("A"), geo("B"), geo("C")}, {0.5, 2.0, 0.5});
  CHECK(out.str() == "label,value\nB,2\nA,0.5\nC,0.5\n");
}
