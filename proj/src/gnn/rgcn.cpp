#include "kge/gnn/rgcn.hpp"

#include <cmath>
#include <random>
#include <string>

#include "kge/ckge/loss.hpp"
#include "kge/error.hpp"
#include "kge/simd/kernels.hpp"

namespace kge {
namespace {

std::vector<double> widen(const Table& t) { return std::vector<double>(t.data.begin(), t.data.end()); }

void fill_uniform(Table& t, double bound, Rng& rng) {
  std::uniform_real_distribution<float> dist(-float(bound), float(bound));
  for (float& x : t.data) x = dist(rng);
}

void check_layer(const RgcnLayerParams& L, const GraphBatch& g, std::size_t d_in) {
  if (L.d_in != d_in) throw DataError("rgcn: layer expects input width " + std::to_string(L.d_in) + ", got " +
                                      std::to_string(d_in));
  if (L.bases.cols != L.d_in * L.d_out || L.self_loop.rows != L.d_in || L.self_loop.cols != L.d_out ||
      L.coeff.cols != L.n_bases()) {
    throw DataError("rgcn: inconsistent layer parameter shapes");
  }
  for (const Triple& e : g.edges) {
    if (e.h < 0 || std::size_t(e.h) >= g.n_nodes() || e.t < 0 || std::size_t(e.t) >= g.n_nodes()) {
      throw DataError("rgcn: edge endpoint outside the graph's node set");
    }
    if (e.r < 0 || std::size_t(e.r) >= L.n_relations()) {
      throw DataError("rgcn: edge relation " + std::to_string(e.r) + " has no basis coefficients");
    }
  }
  if (g.edge_norm.size() != g.edges.size()) throw DataError("rgcn: edge_norm size mismatch");
}

}  // namespace

std::vector<Table*> RgcnModel::tables() {
  std::vector<Table*> out{&entity, &relation};
  for (auto& L : layers) {
    out.push_back(&L.bases);
    out.push_back(&L.coeff);
    out.push_back(&L.self_loop);
  }
  return out;
}

std::vector<const Table*> RgcnModel::tables() const {
  std::vector<const Table*> out{&entity, &relation};
  for (const auto& L : layers) {
    out.push_back(&L.bases);
    out.push_back(&L.coeff);
    out.push_back(&L.self_loop);
  }
  return out;
}

std::vector<std::string> RgcnModel::table_names() const {
  std::vector<std::string> out{"entity", "relation"};
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string p = "layer" + std::to_string(l) + "_";
    out.push_back(p + "bases");
    out.push_back(p + "coeff");
    out.push_back(p + "self_loop");
  }
  return out;
}

RgcnModel init_rgcn(std::size_t n_entities, std::size_t n_relations, std::size_t dim, std::size_t n_layers,
                    std::size_t n_bases, std::uint64_t seed) {
  if (dim == 0 || n_layers == 0) throw ConfigError("rgcn: dim and layer count must be >= 1");
  if (n_bases == 0 || n_bases > n_relations) throw ConfigError("rgcn: need 1 <= n_bases <= n_relations");
  Rng rng(seed);
  RgcnModel m;
  m.dim = dim;
  m.entity = Table(n_entities, dim);
  fill_uniform(m.entity, 1.0 / std::sqrt(double(dim)), rng);
  m.relation = Table(n_relations, dim);
  fill_uniform(m.relation, 6.0 / std::sqrt(double(dim)), rng);
  const double glorot = std::sqrt(6.0 / double(2 * dim));
  for (std::size_t l = 0; l < n_layers; ++l) {
    RgcnLayerParams L;
    L.d_in = dim;
    L.d_out = dim;
    L.bases = Table(n_bases, dim * dim);
    fill_uniform(L.bases, glorot, rng);
    L.coeff = Table(n_relations, n_bases);
    fill_uniform(L.coeff, std::sqrt(6.0 / double(n_relations + n_bases)), rng);
    L.self_loop = Table(dim, dim);
    fill_uniform(L.self_loop, glorot, rng);
    L.act = l + 1 == n_layers ? Activation::kIdentity : Activation::kRelu;
    m.layers.push_back(std::move(L));
  }
  return m;
}

Matrix gather_input(const Table& entity, const GraphBatch& graph) {
  Matrix x(graph.n_nodes(), entity.cols);
  for (std::size_t i = 0; i < graph.n_nodes(); ++i) {
    const auto id = std::size_t(graph.node_ids[i]);
    if (id >= entity.rows) throw DataError("rgcn: node id out of range");
    const float* src = entity.row(id);
    for (std::size_t k = 0; k < entity.cols; ++k) x.row(i)[k] = src[k];
  }
  return x;
}

Matrix rgcn_forward(std::span<const RgcnLayerParams> layers, const GraphBatch& graph, const Matrix& input,
                    RgcnCache* cache) {
  const auto& k = simd::kernels();
  if (input.rows != graph.n_nodes()) throw DataError("rgcn: input rows do not match graph nodes");
  if (cache) *cache = RgcnCache{};
  Matrix x = input;
  for (const RgcnLayerParams& L : layers) {
    check_layer(L, graph, x.cols);
    const std::size_t n = graph.n_nodes(), din = L.d_in, dout = L.d_out, nb = L.n_bases();
    const std::vector<double> bases = widen(L.bases);
    const std::vector<double> w0 = widen(L.self_loop);

    // z[j][b] = x_j V_b
    Matrix z(n, nb * dout);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t b = 0; b < nb; ++b) {
        double* zjb = z.row(j) + b * dout;
        const double* vb = bases.data() + b * din * dout;
        for (std::size_t i = 0; i < din; ++i) k.axpy_f64(x.row(j)[i], vb + i * dout, zjb, dout);
      }
    }

    Matrix pre(n, dout);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < din; ++i) k.axpy_f64(x.row(j)[i], w0.data() + i * dout, pre.row(j), dout);
    }
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
      const Triple& edge = graph.edges[e];
      const float* a = L.coeff.row(std::size_t(edge.r));
      double* dst = pre.row(std::size_t(edge.t));
      const double* zs = z.row(std::size_t(edge.h));
      for (std::size_t b = 0; b < nb; ++b) k.axpy_f64(graph.edge_norm[e] * double(a[b]), zs + b * dout, dst, dout);
    }

    Matrix out = pre;
    if (L.act == Activation::kRelu) {
      for (double& v : out.data) v = v > 0.0 ? v : 0.0;
    }
    if (cache) {
      cache->inputs.push_back(std::move(x));
      cache->basis_proj.push_back(std::move(z));
      cache->pre.push_back(std::move(pre));
    }
    x = std::move(out);
  }
  return x;
}

Matrix rgcn_backward(std::span<const RgcnLayerParams> layers, const GraphBatch& graph, const RgcnCache& cache,
                     const Matrix& d_output, SparseGrad& out) {
  const auto& k = simd::kernels();
  Matrix g_out = d_output;
  for (std::size_t li = layers.size(); li-- > 0;) {
    const RgcnLayerParams& L = layers[li];
    const Matrix& x = cache.inputs[li];
    const Matrix& z = cache.basis_proj[li];
    const Matrix& pre = cache.pre[li];
    const std::size_t n = graph.n_nodes(), din = L.d_in, dout = L.d_out, nb = L.n_bases();
    const std::size_t t_bases = 2 + 3 * li, t_coeff = t_bases + 1, t_self = t_bases + 2;

    Matrix g_pre = g_out;
    if (L.act == Activation::kRelu) {
      for (std::size_t i = 0; i < g_pre.data.size(); ++i) {
        if (!(pre.data[i] > 0.0)) g_pre.data[i] = 0.0;
      }
    }

    // Edge messages: coefficients and dL/dz.
    Matrix g_z(n, nb * dout);
    std::vector<double> g_a(nb);
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
      const Triple& edge = graph.edges[e];
      const double norm = graph.edge_norm[e];
      const float* a = L.coeff.row(std::size_t(edge.r));
      const double* gd = g_pre.row(std::size_t(edge.t));
      const double* zs = z.row(std::size_t(edge.h));
      for (std::size_t b = 0; b < nb; ++b) {
        g_a[b] = norm * k.dot_f64(gd, zs + b * dout, dout);
        k.axpy_f64(norm * double(a[b]), gd, g_z.row(std::size_t(edge.h)) + b * dout, dout);
      }
      out.add(t_coeff, edge.r, g_a);
    }

    // Bases and self loop: outer products summed over nodes.
    std::vector<double> g_bases(nb * din * dout, 0.0), g_self(din * dout, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < din; ++i) {
        const double xi = x.row(j)[i];
        if (xi == 0.0) continue;
        for (std::size_t b = 0; b < nb; ++b) {
          k.axpy_f64(xi, g_z.row(j) + b * dout, g_bases.data() + (b * din + i) * dout, dout);
        }
        k.axpy_f64(xi, g_pre.row(j), g_self.data() + i * dout, dout);
      }
    }
    for (std::size_t b = 0; b < nb; ++b) {
      out.add(t_bases, std::int32_t(b), std::span<const double>(g_bases).subspan(b * din * dout, din * dout));
    }
    for (std::size_t i = 0; i < din; ++i) {
      out.add(t_self, std::int32_t(i), std::span<const double>(g_self).subspan(i * dout, dout));
    }

    // dL/dx = sum_b g_z[b] V_b^T + g_pre W_0^T
    const std::vector<double> bases = widen(L.bases);
    const std::vector<double> w0 = widen(L.self_loop);
    Matrix g_x(n, din);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < din; ++i) {
        double acc = k.dot_f64(w0.data() + i * dout, g_pre.row(j), dout);
        for (std::size_t b = 0; b < nb; ++b) {
          acc += k.dot_f64(bases.data() + (b * din + i) * dout, g_z.row(j) + b * dout, dout);
        }
        g_x.row(j)[i] = acc;
      }
    }
    g_out = std::move(g_x);
  }
  return g_out;
}

std::vector<double> rgcn_score(const Matrix& encoded, const Table& relation, std::span<const Triple> triples) {
  if (relation.cols != encoded.cols) throw DataError("rgcn_score: relation width differs from encoding width");
  std::vector<double> out;
  out.reserve(triples.size());
  for (const Triple& x : triples) {
    if (x.h < 0 || x.t < 0 || std::size_t(x.h) >= encoded.rows || std::size_t(x.t) >= encoded.rows || x.r < 0 ||
        std::size_t(x.r) >= relation.rows) {
      throw DataError("rgcn_score: triple index out of range");
    }
    const double* h = encoded.row(std::size_t(x.h));
    const double* t = encoded.row(std::size_t(x.t));
    const float* r = relation.row(std::size_t(x.r));
    double s = 0.0;
    for (std::size_t i = 0; i < encoded.cols; ++i) s += h[i] * double(r[i]) * t[i];
    out.push_back(s);
  }
  return out;
}

RgcnBatchLoss rgcn_loss_and_grad(const RgcnModel& model, const GraphBatch& graph) {
  RgcnCache cache;
  const Matrix input = gather_input(model.entity, graph);
  const Matrix enc = rgcn_forward(model.layers, graph, input, &cache);

  std::vector<Triple> triples(graph.positives);
  triples.insert(triples.end(), graph.negatives.begin(), graph.negatives.end());
  std::vector<double> labels(triples.size(), 0.0);
  std::fill(labels.begin(), labels.begin() + std::ptrdiff_t(graph.positives.size()), 1.0);
  const std::vector<double> scores = rgcn_score(enc, model.relation, triples);
  const LossGrad lg = bce_loss_grad(scores, labels);

  RgcnBatchLoss res;
  res.loss = lg.loss;
  res.grad = SparseGrad(2 + 3 * model.layers.size());
  const std::size_t d = model.dim;
  Matrix g_enc(enc.rows, enc.cols);
  std::vector<double> g_rel(d);
  for (std::size_t n = 0; n < triples.size(); ++n) {
    const double c = lg.d_pos[n];
    if (c == 0.0) continue;
    const Triple& x = triples[n];
    const double* h = enc.row(std::size_t(x.h));
    const double* t = enc.row(std::size_t(x.t));
    const float* r = model.relation.row(std::size_t(x.r));
    double* gh = g_enc.row(std::size_t(x.h));
    double* gt = g_enc.row(std::size_t(x.t));
    for (std::size_t i = 0; i < d; ++i) {
      gh[i] += c * double(r[i]) * t[i];
      gt[i] += c * double(r[i]) * h[i];
      g_rel[i] = c * h[i] * t[i];
    }
    res.grad.add(1, x.r, g_rel);
  }
  const Matrix g_in = rgcn_backward(model.layers, graph, cache, g_enc, res.grad);
  for (std::size_t i = 0; i < graph.n_nodes(); ++i) {
    res.grad.add(0, graph.node_ids[i], std::span<const double>(g_in.row(i), g_in.cols));
  }
  return res;
}

ModelParams rgcn_export_distmult(const RgcnModel& model, const IndexedKG& kg) {
  const GraphBatch g = full_graph(kg);
  const Matrix enc = rgcn_forward(model.layers, g, gather_input(model.entity, g));
  ModelParams p;
  p.kind = ModelKind::kDistMult;
  p.dim = model.dim;
  p.entity() = Table(enc.rows, enc.cols);
  for (std::size_t i = 0; i < enc.data.size(); ++i) p.entity().data[i] = float(enc.data[i]);
  p.relation() = model.relation;
  p.version = model.version;
  return p;
}

}  // namespace kge
