#include "kge/ckge/score.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kge/error.hpp"
#include "kge/simd/kernels.hpp"

namespace kge {

TripleScorer::TripleScorer(const ModelParams& params) : params_(params) {
  if (params.kind != ModelKind::kRotatE) return;
  const Table& phase = params.relation();
  cos_.resize(phase.data.size());
  sin_.resize(phase.data.size());
  for (std::size_t i = 0; i < phase.data.size(); ++i) {
    cos_[i] = std::cos(double(phase.data[i]));
    sin_[i] = std::sin(double(phase.data[i]));
  }
}

double TripleScorer::operator()(const Triple& x) const {
  const auto& k = simd::kernels();
  const ModelParams& p = params_;
  const std::size_t d = p.dim;
  const Table& ent = p.entity();
  const Table& rel = p.relation();
  const float* h = ent.row(std::size_t(x.h));
  const float* t = ent.row(std::size_t(x.t));
  const float* r = rel.row(std::size_t(x.r));

  switch (p.kind) {
    case ModelKind::kTransE:
      if (p.p_norm == 1) return -k.l1_translate(h, r, t, d);
      return -std::sqrt(k.l2sq_translate(h, r, t, d));

    case ModelKind::kTransH: {
      const float* w = p.table(TableId::kNormal).row(std::size_t(x.r));
      const double wu = k.dot(w, h, d) - k.dot(w, t, d);
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double e = (double(h[i]) - double(t[i])) - wu * double(w[i]) + double(r[i]);
        s += e * e;
      }
      return -s;
    }

    case ModelKind::kTransR: {
      const float* m = p.table(TableId::kProjection).row(std::size_t(x.r));
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double e = k.dot(m + i * d, h, d) - k.dot(m + i * d, t, d) + double(r[i]);
        s += e * e;
      }
      return -s;
    }

    case ModelKind::kDistMult:
      return k.dot3(h, r, t, d);

    case ModelKind::kComplEx: {
      const float *hr = h, *hi = h + d, *rr = r, *ri = r + d, *tr = t, *ti = t + d;
      return k.dot3(hr, rr, tr, d) + k.dot3(hi, rr, ti, d) + k.dot3(hr, ri, ti, d) - k.dot3(hi, ri, tr, d);
    }

    case ModelKind::kRotatE: {
      const double* c = cos_row(x.r);
      const double* sn = sin_row(x.r);
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double hr = h[i], hi = h[d + i];
        const double er = hr * c[i] - hi * sn[i] - double(t[i]);
        const double ei = hr * sn[i] + hi * c[i] - double(t[d + i]);
        s += er * er + ei * ei;
      }
      return -std::sqrt(s);
    }

    case ModelKind::kSimplE: {
      const Table& tail = p.table(TableId::kEntityTail);
      const float* rinv = p.table(TableId::kRelationInv).row(std::size_t(x.r));
      return 0.5 * (k.dot3(h, r, tail.row(std::size_t(x.t)), d) + k.dot3(t, rinv, tail.row(std::size_t(x.h)), d));
    }
  }
  return 0.0;
}

void check_ids(const ModelParams& params, std::span<const Triple> triples) {
  const auto ne = std::int64_t(params.n_entities());
  const auto nr = std::int64_t(params.n_relations());
  for (const Triple& x : triples) {
    if (x.h < 0 || x.h >= ne || x.t < 0 || x.t >= ne || x.r < 0 || x.r >= nr) {
      throw DataError("triple (" + std::to_string(x.h) + "," + std::to_string(x.r) + "," + std::to_string(x.t) +
                      ") out of range for " + std::to_string(ne) + " entities, " + std::to_string(nr) +
                      " relations");
    }
  }
}

std::vector<double> score(const ModelParams& params, std::span<const Triple> triples) {
  check_ids(params, triples);
  TripleScorer scorer(params);
  std::vector<double> out;
  out.reserve(triples.size());
  for (const Triple& x : triples) out.push_back(scorer(x));
  return out;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::fabs(x))); }

}  // namespace kge
