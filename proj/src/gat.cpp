#include "wuigraph/gat.hpp"

#include <algorithm>
#include <cmath>

#include "wuigraph/error.hpp"
#include "wuigraph/rng.hpp"

namespace wuigraph {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double activate(HeadActivation a, double x) {
  if (a == HeadActivation::Relu) return x > 0.0 ? x : 0.0;
  return x > 0.0 ? x : std::expm1(x);
}

double activate_grad(HeadActivation a, double x) {
  if (a == HeadActivation::Relu) return x > 0.0 ? 1.0 : 0.0;
  return x > 0.0 ? 1.0 : std::exp(x);
}

std::array<double, kEdgeFeatureDim> edge_features(const EdgeWeights& w) {
  return {w.p_total, w.p_conv, w.p_rad, w.p_ember};
}

/// Everything the backward pass reads from the forward pass.
struct ForwardCache {
  std::vector<Eigen::Index> active;  // nodes with transformed features
  MatrixXd xa;        // 74 x |active| standardized inputs
  MatrixXd z;         // D x n transformed features
  MatrixXd pre_out;   // D x n aggregation + bias, before activation
  MatrixXd h;         // D x n layer output
  MatrixXd pre_e;     // m x heads, attention logits before LeakyReLU
  MatrixXd alpha;     // m x heads, softmax coefficients
  MatrixXd keep;      // m x heads, dropout scale (0 or 1/(1-p)); empty if none
  // MLP state for the nodes in `rows`.
  std::vector<NodeIndex> rows;
  MatrixXd z1, a1, z2, a2;  // columns follow `rows`; a* include dropout
  MatrixXd keep1, keep2;
  VectorXd logits;
};

void forward(const ContagionGraph& graph, const GatParams& p, const Dropout& dropout,
             std::span<const NodeIndex> rows, ForwardCache& c) {
  const auto& arch = p.arch;
  const int heads = arch.heads, hd = arch.head_dim, D = arch.output_dim();
  const auto n = static_cast<Eigen::Index>(graph.node_count());
  const auto m = static_cast<Eigen::Index>(graph.edge_count());
  const auto& edges = graph.edges();
  const bool train = dropout.rng != nullptr;

  // Only nodes in `rows` (all nodes when empty) need a layer output; only
  // they and their in-neighbors need transformed features.
  std::vector<char> is_target(static_cast<std::size_t>(n), rows.empty() ? 1 : 0);
  for (NodeIndex r : rows) is_target[r] = 1;
  std::vector<char> is_active = is_target;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!is_target[static_cast<std::size_t>(i)]) continue;
    for (auto e : graph.incoming(static_cast<NodeIndex>(i))) is_active[edges[e].source] = 1;
  }
  c.active.clear();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (is_active[static_cast<std::size_t>(i)]) c.active.push_back(i);
  }
  const auto na = static_cast<Eigen::Index>(c.active.size());
  c.xa.resize(kFeatureDim, na);
  for (Eigen::Index t = 0; t < na; ++t) {
    const auto f = graph.node(static_cast<NodeIndex>(c.active[static_cast<std::size_t>(t)])).features();
    for (std::size_t k = 0; k < kFeatureDim; ++k) {
      c.xa(static_cast<Eigen::Index>(k), t) =
          (f[k] - p.input_shift[static_cast<Eigen::Index>(k)]) / p.input_scale[static_cast<Eigen::Index>(k)];
    }
  }
  // Each output column of the product depends only on its own input column,
  // whatever its position, so node results do not depend on node order.
  const MatrixXd za = p.W * c.xa;
  c.z.setZero(D, n);
  for (Eigen::Index t = 0; t < na; ++t) c.z.col(c.active[static_cast<std::size_t>(t)]) = za.col(t);

  c.pre_e.setZero(m, heads);
  c.alpha.setZero(m, heads);
  c.keep.resize(train && dropout.gat > 0.0 ? m : 0, heads);
  c.pre_out.setZero(D, n);
  c.h.setZero(D, n);

  for (int k = 0; k < heads; ++k) {
    const auto a_center = p.attention.row(k).segment(0, hd).transpose();
    const auto a_nbr = p.attention.row(k).segment(hd, hd).transpose();
    const auto a_edge = p.attention.row(k).segment(2 * hd, hd).transpose();
    const VectorXd v = p.theta.middleRows(k * hd, hd).transpose() * a_edge;  // 4
    const auto zk = c.z.middleRows(k * hd, hd);

    VectorXd s_center = VectorXd::Zero(n), s_nbr = VectorXd::Zero(n);
    for (Eigen::Index i : c.active) {
      s_center[i] = a_center.dot(zk.col(i));
      s_nbr[i] = a_nbr.dot(zk.col(i));
    }
    for (Eigen::Index e = 0; e < m; ++e) {
      const Edge& edge = edges[static_cast<std::size_t>(e)];
      if (!is_target[edge.target]) continue;
      const auto f = edge_features(edge.weights);
      double u = 0.0;
      for (int q = 0; q < kEdgeFeatureDim; ++q) u += v[q] * f[static_cast<std::size_t>(q)];
      c.pre_e(e, k) = s_center[edge.target] + s_nbr[edge.source] + u;
    }
    if (c.keep.rows() > 0) {
      const double scale = 1.0 / (1.0 - dropout.gat);
      for (Eigen::Index e = 0; e < m; ++e) {
        c.keep(e, k) = !is_target[edges[static_cast<std::size_t>(e)].target] ? 0.0
                       : dropout.rng->bernoulli(dropout.gat)                 ? 0.0
                                                                             : scale;
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!is_target[static_cast<std::size_t>(i)]) continue;
      auto out = c.pre_out.col(i).segment(k * hd, hd);
      out = p.gat_bias.col(0).segment(k * hd, hd);
      const auto in = graph.incoming(static_cast<NodeIndex>(i));
      if (!in.empty()) {
        double mx = -std::numeric_limits<double>::infinity();
        for (auto e : in) {
          const double x = c.pre_e(e, k);
          const double lr = x > 0.0 ? x : arch.leaky_slope * x;
          c.alpha(e, k) = lr;
          mx = std::max(mx, lr);
        }
        double sum = 0.0;
        for (auto e : in) {
          c.alpha(e, k) = std::exp(c.alpha(e, k) - mx);
          sum += c.alpha(e, k);
        }
        for (auto e : in) {
          c.alpha(e, k) /= sum;
          const double a = c.keep.rows() > 0 ? c.alpha(e, k) * c.keep(e, k) : c.alpha(e, k);
          if (a != 0.0) out.noalias() += a * zk.col(edges[e].source);
        }
      }
      for (int q = 0; q < hd; ++q) c.h(k * hd + q, i) = activate(arch.activation, out[q]);
    }
  }

  // Classification head on the requested rows.
  c.rows.assign(rows.begin(), rows.end());
  const auto r = static_cast<Eigen::Index>(c.rows.size());
  const bool mlp_drop = train && dropout.mlp > 0.0;
  c.z1.resize(arch.mlp_hidden1, r);
  c.a1.resize(arch.mlp_hidden1, r);
  c.z2.resize(arch.mlp_hidden2, r);
  c.a2.resize(arch.mlp_hidden2, r);
  c.keep1.resize(mlp_drop ? arch.mlp_hidden1 : 0, r);
  c.keep2.resize(mlp_drop ? arch.mlp_hidden2 : 0, r);
  c.logits.resize(r);
  const double mlp_scale = mlp_drop ? 1.0 / (1.0 - dropout.mlp) : 1.0;
  for (Eigen::Index t = 0; t < r; ++t) {
    const auto i = static_cast<Eigen::Index>(c.rows[static_cast<std::size_t>(t)]);
    c.z1.col(t).noalias() = p.W1 * c.h.col(i);
    c.z1.col(t) += p.b1.col(0);
    for (int q = 0; q < arch.mlp_hidden1; ++q) {
      double a = std::max(0.0, c.z1(q, t));
      if (mlp_drop) {
        c.keep1(q, t) = dropout.rng->bernoulli(dropout.mlp) ? 0.0 : mlp_scale;
        a *= c.keep1(q, t);
      }
      c.a1(q, t) = a;
    }
    c.z2.col(t).noalias() = p.W2 * c.a1.col(t);
    c.z2.col(t) += p.b2.col(0);
    for (int q = 0; q < arch.mlp_hidden2; ++q) {
      double a = std::max(0.0, c.z2(q, t));
      if (mlp_drop) {
        c.keep2(q, t) = dropout.rng->bernoulli(dropout.mlp) ? 0.0 : mlp_scale;
        a *= c.keep2(q, t);
      }
      c.a2(q, t) = a;
    }
    c.logits[t] = p.W3.row(0).dot(c.a2.col(t)) + p.b3(0, 0);
  }
}

double l2_sum(const GatParams& p) {
  double s = 0.0;
  p.for_each_tensor([&](const char*, const MatrixXd& t) { s += t.squaredNorm(); });
  return s;
}

void glorot(MatrixXd& m, int fan_in, int fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.uniform(-limit, limit);
  }
}

nlohmann::json tensor_json(const MatrixXd& m) {
  std::vector<double> data(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      data[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
    }
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

MatrixXd tensor_from(const nlohmann::json& j, const char* name) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw ValidationError(std::string("gat params: tensor '") + name + "' has inconsistent size");
  }
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = data[static_cast<std::size_t>(i * cols + c)];
  }
  return m;
}

}  // namespace

void GatArchitecture::validate() const {
  if (heads < 1 || head_dim < 1 || mlp_hidden1 < 1 || mlp_hidden2 < 1) {
    throw ValidationError("gat architecture: all sizes must be >= 1");
  }
  if (!(leaky_slope >= 0.0 && leaky_slope < 1.0)) {
    throw ValidationError("gat architecture: leaky_slope must be in [0, 1)");
  }
}

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw ValidationError("train config: lr must be > 0");
  if (weight_decay < 0.0) throw ValidationError("train config: weight_decay must be >= 0");
  if (!(gat_dropout >= 0.0 && gat_dropout < 1.0) || !(mlp_dropout >= 0.0 && mlp_dropout < 1.0)) {
    throw ValidationError("train config: dropout rates must be in [0, 1)");
  }
  if (epochs < 1) throw ValidationError("train config: epochs must be >= 1");
  if (patience < 0 || patience > epochs) {
    throw ValidationError("train config: patience must be in [0, epochs]");
  }
  if (lr_decay && (!(lr_decay_factor > 0.0 && lr_decay_factor <= 1.0) || lr_decay_every < 1)) {
    throw ValidationError("train config: invalid learning-rate schedule");
  }
}

GatParams GatParams::initialize(const GatArchitecture& arch, std::uint64_t seed) {
  arch.validate();
  GatParams p;
  p.arch = arch;
  p.seed = seed;
  const int D = arch.output_dim();
  p.input_shift = VectorXd::Zero(kFeatureDim);
  p.input_scale = VectorXd::Ones(kFeatureDim);
  Rng rng(mix_seed(seed, 0x6a7));
  p.W.resize(D, kFeatureDim);
  glorot(p.W, kFeatureDim, arch.head_dim, rng);
  p.theta.resize(D, kEdgeFeatureDim);
  glorot(p.theta, kEdgeFeatureDim, arch.head_dim, rng);
  p.attention.resize(arch.heads, 3 * arch.head_dim);
  glorot(p.attention, 3 * arch.head_dim, 1, rng);
  p.gat_bias = MatrixXd::Zero(D, 1);
  p.W1.resize(arch.mlp_hidden1, D);
  glorot(p.W1, D, arch.mlp_hidden1, rng);
  p.b1 = MatrixXd::Zero(arch.mlp_hidden1, 1);
  p.W2.resize(arch.mlp_hidden2, arch.mlp_hidden1);
  glorot(p.W2, arch.mlp_hidden1, arch.mlp_hidden2, rng);
  p.b2 = MatrixXd::Zero(arch.mlp_hidden2, 1);
  p.W3.resize(1, arch.mlp_hidden2);
  glorot(p.W3, arch.mlp_hidden2, 1, rng);
  p.b3 = MatrixXd::Zero(1, 1);
  return p;
}

GatParams GatParams::zeros_like(const GatParams& src) {
  GatParams p = src;
  p.for_each_tensor([](const char*, MatrixXd& t) { t.setZero(); });
  return p;
}

void GatParams::for_each_tensor(const std::function<void(const char*, MatrixXd&)>& f) {
  f("W", W);
  f("theta", theta);
  f("attention", attention);
  f("gat_bias", gat_bias);
  f("W1", W1);
  f("b1", b1);
  f("W2", W2);
  f("b2", b2);
  f("W3", W3);
  f("b3", b3);
}

void GatParams::for_each_tensor(const std::function<void(const char*, const MatrixXd&)>& f) const {
  const_cast<GatParams*>(this)->for_each_tensor(
      [&](const char* name, MatrixXd& t) { f(name, static_cast<const MatrixXd&>(t)); });
}

std::size_t GatParams::parameter_count() const {
  std::size_t n = 0;
  for_each_tensor([&](const char*, const MatrixXd& t) { n += static_cast<std::size_t>(t.size()); });
  return n;
}

void GatParams::validate_shapes() const {
  arch.validate();
  const int D = arch.output_dim();
  auto check = [](const MatrixXd& t, Eigen::Index r, Eigen::Index c, const char* name) {
    if (t.rows() != r || t.cols() != c) {
      throw ValidationError(std::string("gat params: tensor '") + name + "' has shape " +
                            std::to_string(t.rows()) + "x" + std::to_string(t.cols()) +
                            ", expected " + std::to_string(r) + "x" + std::to_string(c));
    }
  };
  check(W, D, kFeatureDim, "W");
  check(theta, D, kEdgeFeatureDim, "theta");
  check(attention, arch.heads, 3 * arch.head_dim, "attention");
  check(gat_bias, D, 1, "gat_bias");
  check(W1, arch.mlp_hidden1, D, "W1");
  check(b1, arch.mlp_hidden1, 1, "b1");
  check(W2, arch.mlp_hidden2, arch.mlp_hidden1, "W2");
  check(b2, arch.mlp_hidden2, 1, "b2");
  check(W3, 1, arch.mlp_hidden2, "W3");
  check(b3, 1, 1, "b3");
  if (input_shift.size() != static_cast<Eigen::Index>(kFeatureDim) ||
      input_scale.size() != static_cast<Eigen::Index>(kFeatureDim)) {
    throw ValidationError("gat params: standardization vectors must have 74 entries");
  }
  if ((input_scale.array() <= 0.0).any()) {
    throw ValidationError("gat params: standardization scales must be > 0");
  }
}

nlohmann::json GatParams::to_json() const {
  nlohmann::json j;
  j["format"] = "wuigraph.gat";
  j["version"] = 1;
  j["seed"] = seed;
  j["architecture"] = {{"heads", arch.heads},
                       {"head_dim", arch.head_dim},
                       {"mlp_hidden1", arch.mlp_hidden1},
                       {"mlp_hidden2", arch.mlp_hidden2},
                       {"leaky_slope", arch.leaky_slope},
                       {"activation", arch.activation == HeadActivation::Relu ? "relu" : "elu"}};
  j["input_shift"] = std::vector<double>(input_shift.data(), input_shift.data() + input_shift.size());
  j["input_scale"] = std::vector<double>(input_scale.data(), input_scale.data() + input_scale.size());
  nlohmann::json tensors = nlohmann::json::object();
  for_each_tensor([&](const char* name, const MatrixXd& t) { tensors[name] = tensor_json(t); });
  j["tensors"] = tensors;
  return j;
}

GatParams GatParams::from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "wuigraph.gat" || j.value("version", 0) != 1) {
    throw ValidationError("gat params: unsupported format or version");
  }
  GatParams p;
  const auto& a = j.at("architecture");
  p.arch.heads = a.at("heads").get<int>();
  p.arch.head_dim = a.at("head_dim").get<int>();
  p.arch.mlp_hidden1 = a.at("mlp_hidden1").get<int>();
  p.arch.mlp_hidden2 = a.at("mlp_hidden2").get<int>();
  p.arch.leaky_slope = a.at("leaky_slope").get<double>();
  const auto act = a.at("activation").get<std::string>();
  if (act != "relu" && act != "elu") throw ValidationError("gat params: unknown activation '" + act + "'");
  p.arch.activation = act == "relu" ? HeadActivation::Relu : HeadActivation::Elu;
  p.seed = j.at("seed").get<std::uint64_t>();
  const auto shift = j.at("input_shift").get<std::vector<double>>();
  const auto scale = j.at("input_scale").get<std::vector<double>>();
  p.input_shift = Eigen::Map<const VectorXd>(shift.data(), static_cast<Eigen::Index>(shift.size()));
  p.input_scale = Eigen::Map<const VectorXd>(scale.data(), static_cast<Eigen::Index>(scale.size()));
  const auto& tensors = j.at("tensors");
  p.for_each_tensor([&](const char* name, MatrixXd& t) {
    if (!tensors.contains(name)) throw ValidationError(std::string("gat params: missing tensor '") + name + "'");
    t = tensor_from(tensors.at(name), name);
  });
  p.validate_shapes();
  return p;
}

void fit_standardization(GatParams& params, const ContagionGraph& graph) {
  const auto n = static_cast<double>(graph.node_count());
  params.input_shift = VectorXd::Zero(kFeatureDim);
  params.input_scale = VectorXd::Ones(kFeatureDim);
  if (graph.node_count() == 0) return;
  VectorXd sum = VectorXd::Zero(kFeatureDim), sq = VectorXd::Zero(kFeatureDim);
  for (const Node& node : graph.nodes()) {
    const auto f = node.features();
    for (std::size_t k = 0; k < kFeatureDim; ++k) sum[static_cast<Eigen::Index>(k)] += f[k];
  }
  const VectorXd mean = sum / n;
  for (const Node& node : graph.nodes()) {
    const auto f = node.features();
    for (std::size_t k = 0; k < kFeatureDim; ++k) {
      const double d = f[k] - mean[static_cast<Eigen::Index>(k)];
      sq[static_cast<Eigen::Index>(k)] += d * d;
    }
  }
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(kFeatureDim); ++k) {
    const double sd = std::sqrt(sq[k] / n);
    params.input_shift[k] = mean[k];
    params.input_scale[k] = sd > 1e-12 ? sd : 1.0;
  }
}

GatOutput gat_forward(const ContagionGraph& graph, const GatParams& params,
                      const Dropout& dropout) {
  params.validate_shapes();
  ForwardCache c;
  forward(graph, params, dropout, {}, c);
  GatOutput out;
  out.embeddings = std::move(c.h);
  out.attention = std::move(c.alpha);
  return out;
}

std::vector<double> predict_proba(const ContagionGraph& graph, const GatParams& params,
                                  std::span<const NodeIndex> nodes) {
  params.validate_shapes();
  ForwardCache c;
  forward(graph, params, {}, nodes, c);
  std::vector<double> out(nodes.size());
  for (std::size_t t = 0; t < nodes.size(); ++t) out[t] = sigmoid(c.logits[static_cast<Eigen::Index>(t)]);
  return out;
}

std::vector<double> predict_proba(const ContagionGraph& graph, const GatParams& params) {
  const auto buildings = graph.building_indices();
  return predict_proba(graph, params, buildings);
}

LossAndGrads loss_and_grads(const ContagionGraph& graph, const GatParams& p,
                            std::span<const NodeIndex> mask, double weight_decay,
                            const Dropout& dropout) {
  p.validate_shapes();
  if (mask.empty()) throw ValidationError("loss_and_grads: empty mask");
  for (NodeIndex i : mask) {
    if (i >= graph.node_count() || !graph.node(i).label) {
      throw ValidationError("loss_and_grads: mask contains an unlabeled node");
    }
  }
  const auto& arch = p.arch;
  const int heads = arch.heads, hd = arch.head_dim, D = arch.output_dim();
  const auto n = static_cast<Eigen::Index>(graph.node_count());
  const auto& edges = graph.edges();

  ForwardCache c;
  forward(graph, p, dropout, mask, c);

  LossAndGrads out;
  out.grads = GatParams::zeros_like(p);
  GatParams& g = out.grads;
  const double inv_n = 1.0 / static_cast<double>(mask.size());

  // Head backward; dH collects gradients w.r.t. layer outputs.
  MatrixXd dH = MatrixXd::Zero(D, n);
  VectorXd d1(arch.mlp_hidden1), d2(arch.mlp_hidden2);
  for (std::size_t t = 0; t < mask.size(); ++t) {
    const auto ti = static_cast<Eigen::Index>(t);
    const double y = static_cast<double>(*graph.node(mask[t]).label != 0);
    const double logit = c.logits[ti];
    out.data_loss += (softplus(logit) - y * logit) * inv_n;
    const double dlogit = (sigmoid(logit) - y) * inv_n;

    g.W3.row(0) += dlogit * c.a2.col(ti).transpose();
    g.b3(0, 0) += dlogit;
    d2 = p.W3.row(0).transpose() * dlogit;
    for (int q = 0; q < arch.mlp_hidden2; ++q) {
      if (c.keep2.rows() > 0) d2[q] *= c.keep2(q, ti);
      if (c.z2(q, ti) <= 0.0) d2[q] = 0.0;
    }
    g.W2.noalias() += d2 * c.a1.col(ti).transpose();
    g.b2.col(0) += d2;
    d1.noalias() = p.W2.transpose() * d2;
    for (int q = 0; q < arch.mlp_hidden1; ++q) {
      if (c.keep1.rows() > 0) d1[q] *= c.keep1(q, ti);
      if (c.z1(q, ti) <= 0.0) d1[q] = 0.0;
    }
    const auto node = static_cast<Eigen::Index>(mask[t]);
    g.W1.noalias() += d1 * c.h.col(node).transpose();
    g.b1.col(0) += d1;
    dH.col(node).noalias() += p.W1.transpose() * d1;
  }

  // Attention layer backward.
  MatrixXd dZ = MatrixXd::Zero(D, n);
  std::vector<char> has_grad(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i) has_grad[static_cast<std::size_t>(i)] = !dH.col(i).isZero(0.0);

  for (int k = 0; k < heads; ++k) {
    const auto a_center = p.attention.row(k).segment(0, hd).transpose();
    const auto a_nbr = p.attention.row(k).segment(hd, hd).transpose();
    const auto a_edge = p.attention.row(k).segment(2 * hd, hd).transpose();
    const auto zk = c.z.middleRows(k * hd, hd);
    auto dzk = dZ.middleRows(k * hd, hd);
    VectorXd ds_center = VectorXd::Zero(n), ds_nbr = VectorXd::Zero(n);
    Eigen::Matrix<double, kEdgeFeatureDim, 1> dv = Eigen::Matrix<double, kEdgeFeatureDim, 1>::Zero();
    VectorXd dagg(hd);

    for (Eigen::Index i = 0; i < n; ++i) {
      if (!has_grad[static_cast<std::size_t>(i)]) continue;
      for (int q = 0; q < hd; ++q) {
        dagg[q] = dH(k * hd + q, i) * activate_grad(arch.activation, c.pre_out(k * hd + q, i));
      }
      g.gat_bias.col(0).segment(k * hd, hd) += dagg;
      const auto in = graph.incoming(static_cast<NodeIndex>(i));
      if (in.empty()) continue;
      double dsum = 0.0;
      std::vector<double> dalpha(in.size());
      for (std::size_t t = 0; t < in.size(); ++t) {
        const auto e = in[t];
        const auto j = static_cast<Eigen::Index>(edges[e].source);
        const double keep = c.keep.rows() > 0 ? c.keep(e, k) : 1.0;
        const double a_eff = c.alpha(e, k) * keep;
        if (a_eff != 0.0) dzk.col(j) += a_eff * dagg;
        dalpha[t] = dagg.dot(zk.col(j)) * keep;
        dsum += c.alpha(e, k) * dalpha[t];
      }
      for (std::size_t t = 0; t < in.size(); ++t) {
        const auto e = in[t];
        const double de = c.alpha(e, k) * (dalpha[t] - dsum);
        const double dpre = de * (c.pre_e(e, k) > 0.0 ? 1.0 : arch.leaky_slope);
        ds_center[i] += dpre;
        ds_nbr[edges[e].source] += dpre;
        const auto f = edge_features(edges[e].weights);
        for (int q = 0; q < kEdgeFeatureDim; ++q) dv[q] += dpre * f[static_cast<std::size_t>(q)];
      }
    }
    auto g_center = g.attention.row(k).segment(0, hd);
    auto g_nbr = g.attention.row(k).segment(hd, hd);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (ds_center[i] != 0.0) {
        g_center += ds_center[i] * zk.col(i).transpose();
        dzk.col(i) += ds_center[i] * a_center;
      }
      if (ds_nbr[i] != 0.0) {
        g_nbr += ds_nbr[i] * zk.col(i).transpose();
        dzk.col(i) += ds_nbr[i] * a_nbr;
      }
    }
    // v = theta_k^T a_edge
    g.theta.middleRows(k * hd, hd).noalias() += a_edge * dv.transpose();
    g.attention.row(k).segment(2 * hd, hd) +=
        (p.theta.middleRows(k * hd, hd) * dv).transpose();
  }
  MatrixXd dza(D, static_cast<Eigen::Index>(c.active.size()));
  for (std::size_t t = 0; t < c.active.size(); ++t) dza.col(static_cast<Eigen::Index>(t)) = dZ.col(c.active[t]);
  g.W.noalias() += dza * c.xa.transpose();

  // L2 penalty.
  if (weight_decay > 0.0) {
    std::vector<const MatrixXd*> values;
    p.for_each_tensor([&](const char*, const MatrixXd& t) { values.push_back(&t); });
    std::size_t idx = 0;
    g.for_each_tensor([&](const char*, MatrixXd& gt) { gt += weight_decay * *values[idx++]; });
  }
  out.loss = out.data_loss + 0.5 * weight_decay * l2_sum(p);
  return out;
}

double evaluate_loss(const ContagionGraph& graph, const GatParams& params,
                     std::span<const NodeIndex> mask, double weight_decay) {
  if (mask.empty()) throw ValidationError("evaluate_loss: empty mask");
  ForwardCache c;
  forward(graph, params, {}, mask, c);
  double loss = 0.0;
  for (std::size_t t = 0; t < mask.size(); ++t) {
    const double y = static_cast<double>(graph.node(mask[t]).label.value_or(0) != 0);
    const double logit = c.logits[static_cast<Eigen::Index>(t)];
    loss += softplus(logit) - y * logit;
  }
  return loss / static_cast<double>(mask.size()) + 0.5 * weight_decay * l2_sum(params);
}

TrainResult train(const ContagionGraph& graph, const TrainConfig& cfg,
                  const GatArchitecture& arch) {
  cfg.validate();
  const auto& masks = graph.masks();
  if (masks.train.empty()) throw ValidationError("train: the training mask is empty");
  const bool monitor_val = !masks.val.empty();

  GatParams params = GatParams::initialize(arch, cfg.seed);
  fit_standardization(params, graph);

  // Adam state mirrors the parameter tensors.
  GatParams m1 = GatParams::zeros_like(params), m2 = GatParams::zeros_like(params);
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  Rng dropout_rng(mix_seed(cfg.seed, 0xd409));

  TrainResult result;
  result.params = params;
  double best = std::numeric_limits<double>::infinity();
  int waited = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double lr = cfg.lr;
    if (cfg.lr_decay) lr *= std::pow(cfg.lr_decay_factor, epoch / cfg.lr_decay_every);

    LossAndGrads lg = loss_and_grads(graph, params, masks.train, cfg.weight_decay,
                                     {cfg.gat_dropout, cfg.mlp_dropout, &dropout_rng});
    if (!std::isfinite(lg.loss)) {
      throw ComputationError("train: non-finite loss at epoch " + std::to_string(epoch) +
                             " (lr " + std::to_string(lr) + ")");
    }
    const int step = epoch + 1;
    const double bc1 = 1.0 - std::pow(beta1, step), bc2 = 1.0 - std::pow(beta2, step);
    std::vector<MatrixXd*> ps, gs, s1, s2;
    params.for_each_tensor([&](const char*, MatrixXd& t) { ps.push_back(&t); });
    lg.grads.for_each_tensor([&](const char*, MatrixXd& t) { gs.push_back(&t); });
    m1.for_each_tensor([&](const char*, MatrixXd& t) { s1.push_back(&t); });
    m2.for_each_tensor([&](const char*, MatrixXd& t) { s2.push_back(&t); });
    for (std::size_t t = 0; t < ps.size(); ++t) {
      *s1[t] = beta1 * *s1[t] + (1.0 - beta1) * *gs[t];
      *s2[t] = beta2 * *s2[t] + (1.0 - beta2) * gs[t]->cwiseProduct(*gs[t]);
      *ps[t] -= (lr * (s1[t]->array() / bc1) / ((s2[t]->array() / bc2).sqrt() + eps)).matrix();
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr;
    rec.train_loss = lg.data_loss;
    rec.val_loss = monitor_val ? evaluate_loss(graph, params, masks.val)
                               : evaluate_loss(graph, params, masks.train);
    if (!std::isfinite(rec.val_loss)) {
      throw ComputationError("train: non-finite validation loss at epoch " + std::to_string(epoch));
    }
    result.history.push_back(rec);
    if (rec.val_loss < best) {
      best = rec.val_loss;
      result.params = params;
      result.best_epoch = epoch;
      waited = 0;
    } else if (++waited >= std::max(cfg.patience, 1)) {
      result.early_stopped = true;
      break;
    }
  }
  return result;
}

std::array<double, kFeatureDim> input_column_importance(const GatParams& params) {
  std::array<double, kFeatureDim> out{};
  for (std::size_t k = 0; k < kFeatureDim; ++k) {
    out[k] = params.W.col(static_cast<Eigen::Index>(k)).cwiseAbs().sum();
  }
  return out;
}

GroupImportance attention_feature_importance(const GatParams& params) {
  const auto cols = input_column_importance(params);
  GroupImportance g;
  for (std::size_t k = 0; k < kFeatureDim; ++k) {
    if (k < kEmbeddingDim) {
      g.embeddings += cols[k];
    } else if (k < kStructuralOffset) {
      g.topographic += cols[k];
    } else {
      g.structural += cols[k];
    }
  }
  return g;
}

}  // namespace wuigraph
