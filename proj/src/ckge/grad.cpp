#include "kge/ckge/grad.hpp"

#include <cmath>

#include "kge/simd/kernels.hpp"

namespace kge {

void SparseGrad::add(std::size_t table, std::int32_t row, std::span<const double> v, double scale) {
  TableGrad& tg = tables_.at(table);
  if (tg.rows.empty()) tg.cols = v.size();
  auto [it, inserted] = tg.slot.try_emplace(row, tg.rows.size());
  if (inserted) {
    tg.rows.push_back(row);
    tg.values.resize(tg.values.size() + tg.cols, 0.0);
  }
  simd::kernels().axpy_f64(scale, v.data(), tg.values.data() + it->second * tg.cols, tg.cols);
}

const double* SparseGrad::find(std::size_t table, std::int32_t row) const {
  const TableGrad& tg = tables_.at(table);
  auto it = tg.slot.find(row);
  return it == tg.slot.end() ? nullptr : tg.values.data() + it->second * tg.cols;
}

std::size_t SparseGrad::touched_rows() const {
  std::size_t n = 0;
  for (const auto& t : tables_) n += t.rows.size();
  return n;
}

void SparseGrad::merge(const SparseGrad& other, double scale) {
  for (std::size_t i = 0; i < other.tables_.size(); ++i) {
    const TableGrad& tg = other.tables_[i];
    for (std::size_t k = 0; k < tg.rows.size(); ++k) add(i, tg.rows[k], tg.row_at(k), scale);
  }
}

namespace {

constexpr std::size_t idx(TableId id) { return std::size_t(id); }

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

struct Scratch {
  std::vector<double> a, b, c, d, e, f;
  void resize(std::size_t n) {
    for (auto* v : {&a, &b, &c, &d, &e, &f}) v->assign(n, 0.0);
  }
};

}  // namespace

void accumulate_score_grad(const TripleScorer& scorer, const Triple& x, double coef, SparseGrad& out) {
  if (coef == 0.0) return;
  const ModelParams& p = scorer.params();
  const std::size_t d = p.dim;
  const float* h = p.entity().row(std::size_t(x.h));
  const float* t = p.entity().row(std::size_t(x.t));
  const float* r = p.relation().row(std::size_t(x.r));
  thread_local Scratch s;

  switch (p.kind) {
    case ModelKind::kTransE: {
      s.resize(d);
      double norm = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        s.a[i] = double(h[i]) + double(r[i]) - double(t[i]);
        norm += s.a[i] * s.a[i];
      }
      if (p.p_norm == 1) {
        for (std::size_t i = 0; i < d; ++i) s.a[i] = sign(s.a[i]);
      } else {
        norm = std::sqrt(norm);
        if (norm == 0.0) return;
        for (std::size_t i = 0; i < d; ++i) s.a[i] /= norm;
      }
      // s = -dist: ds/dh = ds/dr = -v, ds/dt = +v
      out.add(idx(TableId::kEntity), x.h, s.a, -coef);
      out.add(idx(TableId::kRelation), x.r, s.a, -coef);
      out.add(idx(TableId::kEntity), x.t, s.a, coef);
      return;
    }

    case ModelKind::kTransH: {
      s.resize(d);
      const float* w = p.table(TableId::kNormal).row(std::size_t(x.r));
      double wu = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        s.b[i] = double(h[i]) - double(t[i]);  // u
        wu += double(w[i]) * s.b[i];
      }
      double we = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        s.a[i] = s.b[i] - wu * double(w[i]) + double(r[i]);  // e
        we += double(w[i]) * s.a[i];
      }
      for (std::size_t i = 0; i < d; ++i) {
        s.c[i] = -2.0 * (s.a[i] - we * double(w[i]));  // ds/du
        s.d[i] = -2.0 * s.a[i];                        // ds/dd_r
        s.e[i] = 2.0 * (we * s.b[i] + wu * s.a[i]);    // ds/dw
      }
      out.add(idx(TableId::kEntity), x.h, s.c, coef);
      out.add(idx(TableId::kEntity), x.t, s.c, -coef);
      out.add(idx(TableId::kRelation), x.r, s.d, coef);
      out.add(idx(TableId::kNormal), x.r, s.e, coef);
      return;
    }

    case ModelKind::kTransR: {
      const auto& k = simd::kernels();
      const float* m = p.table(TableId::kProjection).row(std::size_t(x.r));
      s.resize(d);
      for (std::size_t i = 0; i < d; ++i) {
        s.a[i] = k.dot(m + i * d, h, d) - k.dot(m + i * d, t, d) + double(r[i]);  // e
        s.b[i] = double(h[i]) - double(t[i]);                                     // u
      }
      // ds/du = -2 M^T e
      for (std::size_t j = 0; j < d; ++j) s.c[j] = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double ei = -2.0 * s.a[i];
        for (std::size_t j = 0; j < d; ++j) s.c[j] += ei * double(m[i * d + j]);
        s.d[i] = ei;
      }
      out.add(idx(TableId::kEntity), x.h, s.c, coef);
      out.add(idx(TableId::kEntity), x.t, s.c, -coef);
      out.add(idx(TableId::kRelation), x.r, s.d, coef);
      std::vector<double> dm(d * d);
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) dm[i * d + j] = -2.0 * s.a[i] * s.b[j];
      }
      out.add(idx(TableId::kProjection), x.r, dm, coef);
      return;
    }

    case ModelKind::kDistMult: {
      s.resize(d);
      for (std::size_t i = 0; i < d; ++i) {
        s.a[i] = double(r[i]) * double(t[i]);
        s.b[i] = double(h[i]) * double(t[i]);
        s.c[i] = double(h[i]) * double(r[i]);
      }
      out.add(idx(TableId::kEntity), x.h, s.a, coef);
      out.add(idx(TableId::kRelation), x.r, s.b, coef);
      out.add(idx(TableId::kEntity), x.t, s.c, coef);
      return;
    }

    case ModelKind::kComplEx: {
      s.resize(2 * d);
      for (std::size_t i = 0; i < d; ++i) {
        const double hr = h[i], hi = h[d + i], rr = r[i], ri = r[d + i], tr = t[i], ti = t[d + i];
        s.a[i] = rr * tr + ri * ti;
        s.a[d + i] = rr * ti - ri * tr;
        s.b[i] = hr * tr + hi * ti;
        s.b[d + i] = hr * ti - hi * tr;
        s.c[i] = hr * rr - hi * ri;
        s.c[d + i] = hi * rr + hr * ri;
      }
      out.add(idx(TableId::kEntity), x.h, s.a, coef);
      out.add(idx(TableId::kRelation), x.r, s.b, coef);
      out.add(idx(TableId::kEntity), x.t, s.c, coef);
      return;
    }

    case ModelKind::kRotatE: {
      const double* c = scorer.cos_row(x.r);
      const double* sn = scorer.sin_row(x.r);
      s.resize(2 * d);
      double norm = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double hr = h[i], hi = h[d + i];
        s.a[i] = hr * c[i] - hi * sn[i] - double(t[i]);
        s.a[d + i] = hr * sn[i] + hi * c[i] - double(t[d + i]);
        norm += s.a[i] * s.a[i] + s.a[d + i] * s.a[d + i];
      }
      norm = std::sqrt(norm);
      if (norm == 0.0) return;
      std::vector<double> dtheta(d);
      for (std::size_t i = 0; i < d; ++i) {
        const double gr = -s.a[i] / norm, gi = -s.a[d + i] / norm;
        const double hr = h[i], hi = h[d + i];
        s.b[i] = gr * c[i] + gi * sn[i];
        s.b[d + i] = -gr * sn[i] + gi * c[i];
        s.c[i] = -gr;
        s.c[d + i] = -gi;
        dtheta[i] = gr * (-hr * sn[i] - hi * c[i]) + gi * (hr * c[i] - hi * sn[i]);
      }
      out.add(idx(TableId::kEntity), x.h, s.b, coef);
      out.add(idx(TableId::kEntity), x.t, s.c, coef);
      out.add(idx(TableId::kRelation), x.r, dtheta, coef);
      return;
    }

    case ModelKind::kSimplE: {
      const Table& tail = p.table(TableId::kEntityTail);
      const float* rinv = p.table(TableId::kRelationInv).row(std::size_t(x.r));
      const float* h_tail = tail.row(std::size_t(x.h));
      const float* t_tail = tail.row(std::size_t(x.t));
      s.resize(d);
      for (std::size_t i = 0; i < d; ++i) {
        s.a[i] = 0.5 * double(r[i]) * double(t_tail[i]);       // d/d h_head
        s.b[i] = 0.5 * double(h[i]) * double(r[i]);            // d/d t_tail
        s.c[i] = 0.5 * double(h[i]) * double(t_tail[i]);       // d/d r
        s.d[i] = 0.5 * double(rinv[i]) * double(h_tail[i]);    // d/d t_head
        s.e[i] = 0.5 * double(t[i]) * double(rinv[i]);         // d/d h_tail
        s.f[i] = 0.5 * double(t[i]) * double(h_tail[i]);       // d/d r_inv
      }
      out.add(idx(TableId::kEntity), x.h, s.a, coef);
      out.add(idx(TableId::kEntityTail), x.t, s.b, coef);
      out.add(idx(TableId::kRelation), x.r, s.c, coef);
      out.add(idx(TableId::kEntity), x.t, s.d, coef);
      out.add(idx(TableId::kEntityTail), x.h, s.e, coef);
      out.add(idx(TableId::kRelationInv), x.r, s.f, coef);
      return;
    }
  }
}

BatchLoss loss_and_grad(const ModelParams& params, const NegBatch& batch, const LossSpec& spec) {
  spec.validate();
  check_ids(params, batch.positives);
  check_ids(params, batch.negatives);
  TripleScorer scorer(params);
  std::vector<double> pos(batch.positives.size()), neg(batch.negatives.size());
  for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = scorer(batch.positives[i]);
  for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = scorer(batch.negatives[i]);

  LossGrad lg;
  switch (spec.kind) {
    case LossKind::kMargin:
      lg = margin_loss_grad(pos, neg, spec.margin);
      break;
    case LossKind::kSelfAdversarial:
      lg = self_adversarial_loss_grad(pos, neg, spec.margin, spec.adv_temperature);
      break;
    case LossKind::kBce: {
      const double eps = spec.label_smoothing;
      std::vector<double> scores(pos), labels(pos.size(), 1.0 - eps / 2.0);
      scores.insert(scores.end(), neg.begin(), neg.end());
      labels.resize(scores.size(), eps / 2.0);
      LossGrad all = bce_loss_grad(scores, labels);
      lg.loss = all.loss;
      lg.d_pos.assign(all.d_pos.begin(), all.d_pos.begin() + std::ptrdiff_t(pos.size()));
      lg.d_neg.assign(all.d_pos.begin() + std::ptrdiff_t(pos.size()), all.d_pos.end());
      break;
    }
  }

  BatchLoss out;
  out.loss = lg.loss;
  for (std::size_t i = 0; i < pos.size(); ++i) accumulate_score_grad(scorer, batch.positives[i], lg.d_pos[i], out.grad);
  for (std::size_t i = 0; i < neg.size(); ++i) accumulate_score_grad(scorer, batch.negatives[i], lg.d_neg[i], out.grad);
  return out;
}

BatchLoss labeled_loss_and_grad(const ModelParams& params, std::span<const Triple> triples,
                                std::span<const double> labels, double weight) {
  check_ids(params, triples);
  TripleScorer scorer(params);
  std::vector<double> scores(triples.size());
  for (std::size_t i = 0; i < triples.size(); ++i) scores[i] = scorer(triples[i]);
  const LossGrad lg = bce_loss_grad(scores, labels);
  BatchLoss out;
  out.loss = weight * lg.loss;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    accumulate_score_grad(scorer, triples[i], weight * lg.d_pos[i], out.grad);
  }
  return out;
}

SparseGrad grad(const ModelParams& params, const NegBatch& batch, const LossSpec& spec) {
  return loss_and_grad(params, batch, spec).grad;
}

SparseGrad grad(const ModelParams& params, std::span<const Triple> triples, std::span<const double> labels) {
  return labeled_loss_and_grad(params, triples, labels).grad;
}

}  // namespace kge
