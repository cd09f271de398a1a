#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "kge/ckge/model.hpp"
#include "kge/ckge/score.hpp"
#include "kge/error.hpp"
#include "kge/simd/kernels.hpp"

using namespace kge;

namespace {

void set_row(Table& t, std::size_t r, std::vector<float> v) {
  REQUIRE(v.size() == t.cols);
  std::copy(v.begin(), v.end(), t.row(r));
}

std::vector<double> row(const Table& t, std::size_t r) { return {t.row(r), t.row(r) + t.cols}; }

// Straightforward restatement of each score formula.
double oracle(const ModelParams& p, const Triple& x) {
  const std::size_t d = p.dim;
  const auto h = row(p.entity(), std::size_t(x.h)), t = row(p.entity(), std::size_t(x.t));
  const auto r = row(p.relation(), std::size_t(x.r));
  double s = 0.0;
  switch (p.kind) {
    case ModelKind::kTransE:
      for (std::size_t i = 0; i < d; ++i) {
        const double v = h[i] + r[i] - t[i];
        s += p.p_norm == 1 ? std::fabs(v) : v * v;
      }
      return p.p_norm == 1 ? -s : -std::sqrt(s);
    case ModelKind::kTransH: {
      const auto w = row(p.table(TableId::kNormal), std::size_t(x.r));
      double wh = 0, wt = 0;
      for (std::size_t i = 0; i < d; ++i) wh += w[i] * h[i], wt += w[i] * t[i];
      for (std::size_t i = 0; i < d; ++i) {
        const double v = (h[i] - wh * w[i]) + r[i] - (t[i] - wt * w[i]);
        s += v * v;
      }
      return -s;
    }
    case ModelKind::kTransR: {
      const auto m = row(p.table(TableId::kProjection), std::size_t(x.r));
      for (std::size_t i = 0; i < d; ++i) {
        double mh = 0, mt = 0;
        for (std::size_t j = 0; j < d; ++j) mh += m[i * d + j] * h[j], mt += m[i * d + j] * t[j];
        const double v = mh + r[i] - mt;
        s += v * v;
      }
      return -s;
    }
    case ModelKind::kDistMult:
      for (std::size_t i = 0; i < d; ++i) s += h[i] * r[i] * t[i];
      return s;
    case ModelKind::kComplEx: {
      std::complex<double> acc = 0;
      for (std::size_t i = 0; i < d; ++i) {
        acc += std::complex<double>(h[i], h[d + i]) * std::complex<double>(r[i], r[d + i]) *
               std::conj(std::complex<double>(t[i], t[d + i]));
      }
      return acc.real();
    }
    case ModelKind::kRotatE:
      for (std::size_t i = 0; i < d; ++i) {
        const auto v = std::complex<double>(h[i], h[d + i]) * std::polar(1.0, r[i]) -
                       std::complex<double>(t[i], t[d + i]);
        s += std::norm(v);
      }
      return -std::sqrt(s);
    case ModelKind::kSimplE: {
      const auto ht = row(p.table(TableId::kEntityTail), std::size_t(x.h));
      const auto tt = row(p.table(TableId::kEntityTail), std::size_t(x.t));
      const auto ri = row(p.table(TableId::kRelationInv), std::size_t(x.r));
      for (std::size_t i = 0; i < d; ++i) s += h[i] * r[i] * tt[i] + t[i] * ri[i] * ht[i];
      return s / 2;
    }
  }
  return 0;
}

}  // namespace

TEST_CASE("documented score examples") {
  ModelParams te = init_params(ModelKind::kTransE, 2, 1, 2, 1);
  set_row(te.entity(), 0, {1, 0});
  set_row(te.entity(), 1, {1, 1});
  set_row(te.relation(), 0, {0, 1});
  CHECK(score(te, std::vector<Triple>{{0, 0, 1}})[0] == 0.0);

  ModelParams dm = init_params(ModelKind::kDistMult, 2, 1, 2, 1);
  set_row(dm.entity(), 0, {1, 2});
  set_row(dm.entity(), 1, {1, 1});
  set_row(dm.relation(), 0, {1, 1});
  CHECK(score(dm, std::vector<Triple>{{0, 0, 1}})[0] == 3.0);
}

TEST_CASE("ComplEx with zero imaginary parts equals DistMult") {
  const std::size_t d = 5;
  ModelParams cx = init_params(ModelKind::kComplEx, 4, 2, d, 3);
  ModelParams dm = init_params(ModelKind::kDistMult, 4, 2, d, 4);
  for (Table* t : {&cx.entity(), &cx.relation()}) {
    for (std::size_t r = 0; r < t->rows; ++r) std::fill(t->row(r) + d, t->row(r) + 2 * d, 0.0f);
  }
  for (std::size_t r = 0; r < 4; ++r) std::copy(cx.entity().row(r), cx.entity().row(r) + d, dm.entity().row(r));
  for (std::size_t r = 0; r < 2; ++r) std::copy(cx.relation().row(r), cx.relation().row(r) + d, dm.relation().row(r));
  for (EntityId h = 0; h < 4; ++h) {
    for (EntityId t = 0; t < 4; ++t) {
      const std::vector<Triple> x{{h, 1, t}};
      CHECK(score(cx, x)[0] == doctest::Approx(score(dm, x)[0]).epsilon(1e-12));
    }
  }
}

TEST_CASE("RotatE with zero phase is a plain distance") {
  ModelParams p = init_params(ModelKind::kRotatE, 3, 1, 4, 5);
  std::fill(p.relation().data.begin(), p.relation().data.end(), 0.0f);
  const auto h = row(p.entity(), 0), t = row(p.entity(), 2);
  double s = 0;
  for (std::size_t i = 0; i < h.size(); ++i) s += (h[i] - t[i]) * (h[i] - t[i]);
  CHECK(score(p, std::vector<Triple>{{0, 0, 2}})[0] == doctest::Approx(-std::sqrt(s)).epsilon(1e-12));
}

TEST_CASE("every model matches the formula oracle") {
  for (ModelKind kind : kAllModels) {
    for (int p_norm : {1, 2}) {
      if (p_norm == 2 && kind != ModelKind::kTransE) continue;
      CAPTURE(model_name(kind));
      ModelParams p = init_params(kind, 9, 3, 7, 11, p_norm);
      if (kind == ModelKind::kTransR) {
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<float> u(-1, 1);
        for (float& v : p.table(TableId::kProjection).data) v = u(rng);
      }
      std::vector<Triple> xs;
      for (EntityId h = 0; h < 9; ++h) xs.push_back({h, RelationId(h % 3), EntityId((h * 5 + 1) % 9)});
      const auto got = score(p, xs);
      for (std::size_t i = 0; i < xs.size(); ++i) CHECK(got[i] == doctest::Approx(oracle(p, xs[i])).epsilon(1e-10));
    }
  }
}

TEST_CASE("scores agree between kernel levels") {
  for (ModelKind kind : kAllModels) {
    const ModelParams p = init_params(kind, 6, 2, 33, 8);
    std::vector<Triple> xs;
    for (EntityId h = 0; h < 6; ++h) xs.push_back({h, RelationId(h % 2), EntityId(5 - h)});
    const simd::Level initial = simd::active_level();
    simd::set_level(simd::Level::kScalar);
    const auto a = score(p, xs);
    const bool have_avx2 = simd::set_level(simd::Level::kAvx2);
    const auto b = score(p, xs);
    simd::set_level(initial);
    if (!have_avx2) continue;
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }
}

TEST_CASE("DistMult is symmetric") {
  const ModelParams p = init_params(ModelKind::kDistMult, 10, 3, 8, 2);
  for (EntityId h = 0; h < 10; ++h) {
    const Triple x{h, RelationId(h % 3), EntityId((h + 3) % 10)};
    CHECK(score(p, std::vector<Triple>{x})[0] == score(p, std::vector<Triple>{{x.t, x.r, x.h}})[0]);
  }
}

TEST_CASE("RotatE inverse rotation symmetry") {
  ModelParams p = init_params(ModelKind::kRotatE, 6, 2, 8, 4);
  // relation 1 holds the negated phases of relation 0
  for (std::size_t i = 0; i < 8; ++i) p.relation().row(1)[i] = -p.relation().row(0)[i];
  for (EntityId h = 0; h < 6; ++h) {
    const EntityId t = (h + 1) % 6;
    CHECK(score(p, std::vector<Triple>{{h, 0, t}})[0] ==
          doctest::Approx(score(p, std::vector<Triple>{{t, 1, h}})[0]).epsilon(1e-6));
  }
}

TEST_CASE("SimplE is invariant under swapping roles with the paired inverse") {
  ModelParams p = init_params(ModelKind::kSimplE, 5, 2, 6, 9);
  // relation 1 is relation 0 with forward and inverse tables exchanged
  Table& r = p.relation();
  Table& ri = p.table(TableId::kRelationInv);
  std::copy(ri.row(0), ri.row(0) + 6, r.row(1));
  std::copy(r.row(0), r.row(0) + 6, ri.row(1));
  for (EntityId h = 0; h < 5; ++h) {
    const EntityId t = (h + 2) % 5;
    CHECK(score(p, std::vector<Triple>{{h, 0, t}})[0] ==
          doctest::Approx(score(p, std::vector<Triple>{{t, 1, h}})[0]).epsilon(1e-12));
  }
}

TEST_CASE("TransH projections are orthogonal to the unit normal") {
  const ModelParams p = init_params(ModelKind::kTransH, 4, 2, 9, 6);
  const auto w = row(p.table(TableId::kNormal), 1);
  double norm = 0;
  for (double v : w) norm += v * v;
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-6));
  for (std::size_t e = 0; e < 4; ++e) {
    const auto x = row(p.entity(), e);
    double wx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) wx += w[i] * x[i];
    double dot = 0;
    for (std::size_t i = 0; i < x.size(); ++i) dot += w[i] * (x[i] - wx * w[i]);
    CHECK(std::fabs(dot) < 1e-6);
  }
}

TEST_CASE("TransE is translation invariant") {
  ModelParams p = init_params(ModelKind::kTransE, 2, 1, 6, 3);
  const double before = score(p, std::vector<Triple>{{0, 0, 1}})[0];
  for (std::size_t e = 0; e < 2; ++e) {
    for (std::size_t i = 0; i < 6; ++i) p.entity().row(e)[i] += 0.25f;
  }
  CHECK(score(p, std::vector<Triple>{{0, 0, 1}})[0] == doctest::Approx(before).epsilon(1e-6));
}

TEST_CASE("init_params") {
  for (ModelKind kind : kAllModels) {
    const ModelParams a = init_params(kind, 7, 3, 16, 42);
    const ModelParams b = init_params(kind, 7, 3, 16, 42);
    const ModelParams c = init_params(kind, 7, 3, 16, 43);
    CHECK(a == b);
    CHECK_FALSE(a.entity() == c.entity());
    const float bound = 6.0f / 4.0f;
    for (float v : a.entity().data) CHECK(std::fabs(v) <= bound);
    if (kind == ModelKind::kRotatE) {
      for (float v : a.relation().data) {
        CHECK(v >= -std::numbers::pi_v<float>);
        CHECK(v <= std::numbers::pi_v<float>);
      }
    } else {
      for (float v : a.relation().data) CHECK(std::fabs(v) <= bound);
    }
    for (const Table& t : a.tables) {
      for (float v : t.data) CHECK(std::isfinite(v));
    }
  }
  const ModelParams r = init_params(ModelKind::kTransR, 2, 2, 3, 1);
  const Table& m = r.table(TableId::kProjection);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(m.row(1)[i * 3 + j] == (i == j ? 1.0f : 0.0f));
  }
  CHECK_THROWS_AS(init_params(ModelKind::kTransE, 2, 2, 0, 1), ConfigError);
}

TEST_CASE("out-of-range ids are rejected") {
  const ModelParams p = init_params(ModelKind::kDistMult, 3, 2, 4, 1);
  CHECK_THROWS_AS(score(p, std::vector<Triple>{{3, 0, 0}}), DataError);
  CHECK_THROWS_AS(score(p, std::vector<Triple>{{0, 2, 0}}), DataError);
  CHECK_THROWS_AS(score(p, std::vector<Triple>{{0, 0, -1}}), DataError);
}

TEST_CASE("sigmoid and softplus stay finite at extremes") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(800.0) == 1.0);
  CHECK(sigmoid(-800.0) == 0.0);
  CHECK(softplus(800.0) == 800.0);
  CHECK(softplus(-800.0) == 0.0);
  CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)));
}
