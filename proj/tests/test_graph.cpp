#include <algorithm>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "gpnet/error.hpp"
#include "gpnet/feature_maps.hpp"
#include "gpnet/graph.hpp"
#include "oracles.hpp"

using namespace gpnet;

namespace {

FeatureMapSequence random_sequence(std::size_t t, std::size_t w, std::size_t h, std::size_t c,
                                   std::uint64_t seed) {
  FeatureMapSequence seq;
  seq.t_frames = t;
  seq.width = w;
  seq.height = h;
  seq.channels = c;
  seq.data.resize(seq.value_count());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (double& v : seq.data) v = dist(rng);
  return seq;
}

Matrix random_features(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_uniform(n, d, -1.0, 1.0, rng);
}

}  // namespace

TEST_CASE("granular feature extraction") {
  SUBCASE("constant map gives constant node features") {
    FeatureMapSequence seq = random_sequence(3, 2, 8, 4, 1);
    for (double& v : seq.data) v = 2.5;
    for (int p : {1, 2, 4, 8}) {
      Matrix f = extract_granular_features(seq, p);
      CHECK(f.rows() == seq.t_frames * static_cast<std::size_t>(p));
      for (std::size_t i = 0; i < f.size(); ++i) CHECK(f.data()[i] == 2.5);
    }
  }

  SUBCASE("degenerate two-row map splits exactly") {
    FeatureMapSequence seq;
    seq.t_frames = 1;
    seq.width = 1;
    seq.height = 2;
    seq.channels = 1;
    seq.data = {0.3, -0.8};
    Matrix f = extract_granular_features(seq, 2);
    CHECK(f(0, 0) == 0.3);
    CHECK(f(1, 0) == -0.8);
  }

  SUBCASE("matches a per-band mean computed by explicit loops") {
    FeatureMapSequence seq = random_sequence(2, 4, 8, 3, 2);
    const int p = 4;
    Matrix f = extract_granular_features(seq, p);
    const std::size_t band = seq.height / p;
    for (std::size_t t = 0; t < seq.t_frames; ++t) {
      for (int q = 0; q < p; ++q) {
        for (std::size_t ch = 0; ch < seq.channels; ++ch) {
          double acc = 0.0;
          std::size_t count = 0;
          for (std::size_t y = q * band; y < (q + 1) * band; ++y)
            for (std::size_t x = 0; x < seq.width; ++x) {
              acc += seq.at(t, y, x, ch);
              ++count;
            }
          CHECK(f(t * p + q, ch) == doctest::Approx(acc / count).epsilon(1e-12));
        }
      }
    }
  }

  SUBCASE("indivisible height is rejected") {
    FeatureMapSequence seq = random_sequence(1, 2, 6, 2, 3);
    CHECK_THROWS_AS(extract_granular_features(seq, 4), ConfigError);
  }

  SUBCASE("permuting frames permutes node features frame-major") {
    FeatureMapSequence seq = random_sequence(4, 2, 4, 3, 4);
    const int p = 2;
    Matrix before = extract_granular_features(seq, p);
    const std::vector<std::size_t> perm{2, 0, 3, 1};
    FeatureMapSequence shuffled = seq;
    const std::size_t frame_sz = seq.width * seq.height * seq.channels;
    for (std::size_t t = 0; t < perm.size(); ++t) {
      std::copy_n(seq.data.begin() + static_cast<long>(perm[t] * frame_sz), frame_sz,
                  shuffled.data.begin() + static_cast<long>(t * frame_sz));
    }
    Matrix after = extract_granular_features(shuffled, p);
    for (std::size_t t = 0; t < perm.size(); ++t)
      for (int q = 0; q < p; ++q)
        for (std::size_t ch = 0; ch < 3; ++ch)
          CHECK(after(t * p + q, ch) == before(perm[t] * p + q, ch));
  }
}

TEST_CASE("temporal edges") {
  SUBCASE("chain with knn disabled") {
    // T=3, p=1: frames 0-1 and 1-2 are neighbours, both directions
    std::vector<int> frames{0, 1, 2};
    std::vector<int> parts{0, 0, 0};
    EdgeSet edges = build_dna_edges(random_features(3, 2, 5), frames, parts, 1, 0);
    EdgeSet expected{{0, 1}, {1, 0}, {1, 2}, {2, 1}};
    CHECK(edges == expected);
  }

  SUBCASE("delta zero means no temporal edges") {
    std::vector<int> frames{0, 1, 2};
    std::vector<int> parts{0, 0, 0};
    CHECK(build_tna_edges(frames, parts, 0).empty());
  }

  SUBCASE("temporal edges are symmetric") {
    FeatureMapSequence seq = random_sequence(5, 2, 4, 3, 6);
    GranularGraph g = build_granular_graph(seq, 2, EdgeRule::kTemporal, 2, 0);
    CHECK_FALSE(g.edges.empty());
    for (const auto& [src, dst] : g.edges) CHECK(g.edges.count({dst, src}) == 1);
  }
}

TEST_CASE("knn edges") {
  SUBCASE("identical features tie toward lower indices") {
    Matrix f(5, 3, 1.0);
    EdgeSet edges = build_ena_edges(f, 2);
    for (int i = 0; i < 5; ++i) {
      std::vector<int> expected = i == 0   ? std::vector<int>{1, 2}
                                  : i == 1 ? std::vector<int>{0, 2}
                                           : std::vector<int>{0, 1};
      for (int j : expected) CHECK(edges.count({j, i}) == 1);
    }
    CHECK(edges.size() == 10);
  }

  SUBCASE("matches exhaustive pairwise-distance sort") {
    Matrix f = random_features(8, 4, 7);
    const int k = 2;
    EdgeSet edges = build_ena_edges(f, k);
    for (int i = 0; i < 8; ++i) {
      std::vector<std::pair<double, int>> all;
      for (int j = 0; j < 8; ++j) {
        if (j == i) continue;
        double d2 = 0.0;
        for (std::size_t ch = 0; ch < 4; ++ch) {
          const double d =
              f(static_cast<std::size_t>(i), ch) - f(static_cast<std::size_t>(j), ch);
          d2 += d * d;
        }
        all.emplace_back(d2, j);
      }
      std::sort(all.begin(), all.end());
      for (int r = 0; r < k; ++r)
        CHECK(edges.count({all[static_cast<std::size_t>(r)].second, i}) == 1);
    }
  }

  SUBCASE("single nearest neighbour matches brute force") {
    Matrix f = random_features(6, 3, 8);
    EdgeSet edges = build_ena_edges(f, 1);
    CHECK(edges.size() == 6);
    for (int i = 0; i < 6; ++i) {
      double best = 1e300;
      int best_j = -1;
      for (int j = 0; j < 6; ++j) {
        if (j == i) continue;
        double d2 = 0.0;
        for (std::size_t ch = 0; ch < 3; ++ch) {
          const double d =
              f(static_cast<std::size_t>(i), ch) - f(static_cast<std::size_t>(j), ch);
          d2 += d * d;
        }
        if (d2 < best) {
          best = d2;
          best_j = j;
        }
      }
      CHECK(edges.count({best_j, i}) == 1);
    }
  }

  SUBCASE("knn edges can be asymmetric") {
    // 0 and 1 are close; 2 sits far away, so 2 points at 1 but nobody points
    // back at 2
    Matrix f = Matrix::from_rows({{0.0}, {0.1}, {10.0}});
    EdgeSet edges = build_ena_edges(f, 1);
    CHECK(edges.count({1, 2}) == 1);
    CHECK(edges.count({2, 1}) == 0);
  }

  SUBCASE("k >= n is a config error") {
    CHECK_THROWS_AS(build_ena_edges(random_features(3, 2, 9), 3), ConfigError);
  }
}

TEST_CASE("dual neighbourhood is exactly the union of temporal and euclidean") {
  std::mt19937_64 rng(100);
  for (int trial = 0; trial < 100; ++trial) {
    const int t = 2 + static_cast<int>(rng() % 4);
    const int p = static_cast<int>(1ull << (rng() % 3));
    const int n = t * p;
    const int delta = static_cast<int>(rng() % 3);
    const int k = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    Matrix f = random_features(static_cast<std::size_t>(n), 3, rng());
    std::vector<int> frames(static_cast<std::size_t>(n)), parts(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      frames[static_cast<std::size_t>(i)] = i / p;
      parts[static_cast<std::size_t>(i)] = i % p;
    }
    EdgeSet dna = build_dna_edges(f, frames, parts, delta, k);
    EdgeSet tna = build_tna_edges(frames, parts, delta);
    EdgeSet ena = build_ena_edges(f, k);
    EdgeSet unioned = tna;
    unioned.insert(ena.begin(), ena.end());
    CHECK(dna == unioned);
  }
}

TEST_CASE("default dual graph keeps every node well connected") {
  // delta_t = 1, k = 2: in-degree >= 3 counting the self loop
  for (std::size_t t : {std::size_t{3}, std::size_t{5}, std::size_t{8}}) {
    FeatureMapSequence seq = random_sequence(t, 2, 8, 4, 40 + t);
    for (int p : {1, 2, 4}) {
      GranularGraph g = build_granular_graph(seq, p, EdgeRule::kDual, 1, 2);
      auto nbrs = g.in_neighbors();
      for (const auto& in : nbrs) CHECK(in.size() + 1 >= 3);
    }
  }
}

TEST_CASE("adjacency and normalization") {
  SUBCASE("single node without edges") {
    Matrix a = adjacency_from_edges({}, 1);
    CHECK(a(0, 0) == 0.0);
    Matrix norm = normalized_adjacency(a);
    CHECK(norm(0, 0) == 1.0);
  }

  SUBCASE("two-node bidirectional edge gives all 0.5") {
    Matrix a = adjacency_from_edges({{0, 1}, {1, 0}}, 2);
    Matrix norm = normalized_adjacency(a);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) CHECK(norm(i, j) == doctest::Approx(0.5));
  }

  SUBCASE("random graph matches the explicit three-matrix product") {
    std::mt19937_64 rng(11);
    const std::size_t n = 7;
    EdgeSet edges;
    for (int e = 0; e < 15; ++e) {
      const int i = static_cast<int>(rng() % n);
      const int j = static_cast<int>(rng() % n);
      if (i != j) edges.insert({i, j});
    }
    Matrix a = adjacency_from_edges(edges, n);
    for (const auto& [src, dst] : edges) {
      CHECK(a(static_cast<std::size_t>(dst), static_cast<std::size_t>(src)) == 1.0);
    }
    Matrix tilde = a;
    for (std::size_t i = 0; i < n; ++i) tilde(i, i) += 1.0;
    Matrix dinv(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      double deg = 0.0;
      for (std::size_t j = 0; j < n; ++j) deg += tilde(i, j);
      dinv(i, i) = 1.0 / std::sqrt(deg);
    }
    Matrix expected = matmul(matmul(dinv, tilde), dinv);
    CHECK(max_abs_diff(normalized_adjacency(a), expected) <= 1e-14);
  }

  SUBCASE("symmetric adjacency stays symmetric after normalization") {
    Matrix a = adjacency_from_edges({{0, 1}, {1, 0}, {1, 2}, {2, 1}}, 3);
    Matrix norm = normalized_adjacency(a);
    CHECK(max_abs_diff(norm, transpose(norm)) == 0.0);
  }
}

TEST_CASE("self-attention adjacency") {
  SUBCASE("identical node features give uniform rows") {
    Matrix f(4, 3, 0.7);
    ParameterSet ps;
    std::mt19937_64 rng(21);
    Parameter& a = ps.create("a", random_uniform(6, 1, -1, 1, rng));
    Forward fwd(true);
    Matrix adj = self_attention_adjacency(fwd, f, a).data();
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) CHECK(adj(i, j) == doctest::Approx(0.25));
  }

  SUBCASE("single node gives [[1]]") {
    ParameterSet ps;
    std::mt19937_64 rng(22);
    Parameter& a = ps.create("a", random_uniform(4, 1, -1, 1, rng));
    Forward fwd(true);
    CHECK(self_attention_adjacency(fwd, random_features(1, 2, 23), a).data()(0, 0) == 1.0);
  }

  SUBCASE("rows sum to one and gradient matches finite differences") {
    Matrix f = random_features(5, 3, 24);
    Matrix a0 = random_features(6, 1, 25);
    ParameterSet ps;
    Parameter& a = ps.create("a", a0);
    Forward fwd(true);
    ad::Value adj = self_attention_adjacency(fwd, f, a);
    for (std::size_t i = 0; i < 5; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < 5; ++j) row += adj.data()(i, j);
      CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
    }
    // weight every entry so the scalar loss sees the whole matrix
    Matrix w = random_features(5, 5, 26);
    ad::Value loss = ad::sum_all(ad::mul(adj, fwd.constant(w)));
    fwd.tape().backward(loss);
    Matrix fd = oracles::finite_difference_gradient(
        [&](const Matrix& v) {
          ParameterSet ps2;
          Parameter& a2 = ps2.create("a", v);
          Forward f2(true);
          ad::Value adj2 = self_attention_adjacency(f2, f, a2);
          return ad::sum_all(ad::mul(adj2, f2.constant(w))).data()(0, 0);
        },
        a0);
    CHECK(oracles::max_rel_err(fwd.grad_of(a), fd) <= 1e-4);
  }
}

TEST_CASE("gpfm round trip") {
  FeatureMapSequence seq = random_sequence(3, 2, 4, 5, 60);
  // quantise like the synthetic generator does
  for (double& v : seq.data) v = static_cast<double>(static_cast<float>(v));
  seq.identity_label = 12;
  const std::string dir = (std::filesystem::temp_directory_path() / "gpnet_gpfm_test").string();
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/roundtrip.gpfm";
  write_gpfm(seq, path);
  FeatureMapSequence back = read_gpfm(path);
  CHECK(back.t_frames == seq.t_frames);
  CHECK(back.width == seq.width);
  CHECK(back.height == seq.height);
  CHECK(back.channels == seq.channels);
  CHECK(back.identity_label == seq.identity_label);
  REQUIRE(back.data.size() == seq.data.size());
  for (std::size_t i = 0; i < seq.data.size(); ++i) CHECK(back.data[i] == seq.data[i]);

  CHECK_THROWS_AS(read_gpfm(dir + "/nonexistent.gpfm"), FileNotFoundError);
}
