#include "globest/channels.hpp"

#include <Eigen/QR>
#include <cmath>
#include <numbers>
#include <random>

namespace globest {

ChannelSpec ChannelSpec::phase_unitary() {
  ChannelSpec c;
  c.kind = Kind::phase_unitary;
  c.label = "phase_unitary";
  return c;
}

ChannelSpec ChannelSpec::bit_flip(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("eta", "must lie in [0, 1]");
  ChannelSpec c;
  c.kind = Kind::bit_flip;
  c.eta = eta;
  c.label = "bit_flip";
  return c;
}

ChannelSpec ChannelSpec::amplitude_damping(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma", "must lie in [0, 1]");
  ChannelSpec c;
  c.kind = Kind::amplitude_damping;
  c.gamma = gamma;
  c.label = "amplitude_damping";
  return c;
}

ChannelSpec ChannelSpec::compose(std::vector<ChannelSpec> in_order) {
  if (in_order.empty()) throw ConfigError("components", "composition needs at least one component");
  for (std::size_t i = 1; i < in_order.size(); ++i)
    if (in_order[i].input_dim() != in_order[i - 1].output_dim())
      throw ConfigError("components", "dimension mismatch between composed channels");
  ChannelSpec c;
  c.kind = Kind::composition;
  c.components = std::move(in_order);
  c.label = "composition";
  return c;
}

ChannelSpec ChannelSpec::custom(std::vector<CMat> kraus) {
  if (kraus.empty()) throw ConfigError("kraus", "need at least one Kraus operator");
  for (const auto& k : kraus)
    if (k.rows() != kraus[0].rows() || k.cols() != kraus[0].cols()) throw ConfigError("kraus", "inconsistent shapes");
  check_completeness(kraus);
  ChannelSpec c;
  c.kind = Kind::custom_kraus;
  c.kraus = std::move(kraus);
  c.label = "custom_kraus";
  return c;
}

ChannelSpec ChannelSpec::preset(const std::string& name) {
  if (name == "flagship") {
    auto c = compose({phase_unitary(), bit_flip(0.5), amplitude_damping(0.7)});
    c.label = "flagship";
    return c;
  }
  if (name == "unitary") return phase_unitary();
  throw ConfigError("preset", "unknown preset '" + name + "'");
}

int ChannelSpec::input_dim() const {
  switch (kind) {
    case Kind::composition: return components.front().input_dim();
    case Kind::custom_kraus:
    case Kind::random_stinespring: return static_cast<int>(kraus.front().cols());
    default: return 2;
  }
}

int ChannelSpec::output_dim() const {
  switch (kind) {
    case Kind::composition: return components.back().output_dim();
    case Kind::custom_kraus:
    case Kind::random_stinespring: return static_cast<int>(kraus.front().rows());
    default: return 2;
  }
}

void check_completeness(const std::vector<CMat>& kraus, double tol) {
  const long d = kraus.front().cols();
  CMat s = CMat::Zero(d, d);
  for (const auto& k : kraus) s += k.adjoint() * k;
  double err = (s - CMat::Identity(d, d)).cwiseAbs().maxCoeff();
  if (err > tol)
    throw std::invalid_argument("Kraus completeness violated by " + std::to_string(err));
}

namespace {

std::vector<CMat> kraus_unchecked(const ChannelSpec& ch, double theta) {
  using K = ChannelSpec::Kind;
  switch (ch.kind) {
    case K::phase_unitary: {
      CMat u = CMat::Zero(2, 2);
      u(0, 0) = std::polar(1.0, -theta / 2);
      u(1, 1) = std::polar(1.0, theta / 2);
      return {u};
    }
    case K::bit_flip: {
      CMat a = std::sqrt(ch.eta) * CMat::Identity(2, 2);
      CMat b = CMat::Zero(2, 2);
      b(0, 1) = b(1, 0) = std::sqrt(1.0 - ch.eta);
      return {a, b};
    }
    case K::amplitude_damping: {
      CMat a = CMat::Zero(2, 2), b = CMat::Zero(2, 2);
      a(0, 0) = 1.0;
      a(1, 1) = std::sqrt(1.0 - ch.gamma);
      b(0, 1) = std::sqrt(ch.gamma);
      return {a, b};
    }
    case K::composition: {
      std::vector<CMat> acc = kraus_unchecked(ch.components.front(), theta);
      for (std::size_t i = 1; i < ch.components.size(); ++i) {
        auto next = kraus_unchecked(ch.components[i], theta);
        std::vector<CMat> out;
        for (const auto& k2 : next)
          for (const auto& k1 : acc) out.push_back(k2 * k1);
        acc = std::move(out);
      }
      return acc;
    }
    case K::custom_kraus:
    case K::random_stinespring: return ch.kraus;
  }
  return {};
}

}  // namespace

std::vector<CMat> kraus_at(const ChannelSpec& ch, double theta) {
  auto k = kraus_unchecked(ch, theta);
  check_completeness(k);
  return k;
}

CMat choi_from_kraus(const std::vector<CMat>& kraus) {
  const long din = kraus.front().cols(), dout = kraus.front().rows();
  CMat e = CMat::Zero(din * dout, din * dout);
  CVec v(din * dout);
  for (const auto& k : kraus) {
    for (long j = 0; j < din; ++j)
      for (long a = 0; a < dout; ++a) v(j * dout + a) = k(a, j);
    e.noalias() += v * v.adjoint();
  }
  return e;
}

LabeledOperator kraus_to_choi(const ChannelSpec& ch, double theta) {
  auto k = kraus_at(ch, theta);
  SpaceRegistry reg({{"I", static_cast<int>(k.front().cols())}, {"O", static_cast<int>(k.front().rows())}});
  return LabeledOperator(reg, choi_from_kraus(k));
}

LabeledOperator tensor_power_choi(const LabeledOperator& e, int n) {
  if (n < 1) throw std::invalid_argument("tensor_power_choi: n must be positive");
  if (e.registry().size() != 2) throw std::invalid_argument("tensor_power_choi: expected a single-channel Choi operator");
  std::vector<Subsystem> parts;
  CMat acc = e.matrix();
  for (int k = 1; k <= n; ++k) {
    parts.push_back({"I" + std::to_string(k), e.registry()[0].dim});
    parts.push_back({"O" + std::to_string(k), e.registry()[1].dim});
    if (k > 1) acc = kron(acc, e.matrix());
  }
  return LabeledOperator(SpaceRegistry(parts), acc);
}

LabeledOperator link_product(const LabeledOperator& a, const LabeledOperator& b) {
  const auto& ra = a.registry();
  const auto& rb = b.registry();
  std::vector<std::string> shared, free_a, free_b;
  for (const auto& p : ra.parts()) {
    if (rb.contains(p.name)) {
      if (rb[rb.index_of(p.name)].dim != p.dim) throw std::invalid_argument("link_product: dimension mismatch on " + p.name);
      shared.push_back(p.name);
    } else {
      free_a.push_back(p.name);
    }
  }
  for (const auto& p : rb.parts())
    if (!ra.contains(p.name)) free_b.push_back(p.name);

  std::vector<std::string> order_a = shared, order_b = shared;
  order_a.insert(order_a.end(), free_a.begin(), free_a.end());
  order_b.insert(order_b.end(), free_b.begin(), free_b.end());
  LabeledOperator pa = permute(a, order_a);
  LabeledOperator pb = permute(b, order_b);

  long ds = 1;
  for (const auto& n : shared) ds *= ra[ra.index_of(n)].dim;
  const long fa = pa.dim() / ds, fb = pb.dim() / ds;
  const CMat& ma = pa.matrix();
  const CMat& mb = pb.matrix();
  // out((x,y),(x',y')) = sum_{s,s'} A((s',x),(s,x')) B((s',y),(s,y'))
  CMat out = CMat::Zero(fa * fb, fa * fb);
  for (long s1 = 0; s1 < ds; ++s1)
    for (long s2 = 0; s2 < ds; ++s2) {
      auto blk_a = ma.block(s1 * fa, s2 * fa, fa, fa);
      auto blk_b = mb.block(s1 * fb, s2 * fb, fb, fb);
      if (blk_a.cwiseAbs().maxCoeff() == 0.0 || blk_b.cwiseAbs().maxCoeff() == 0.0) continue;
      out.noalias() += kron(CMat(blk_a), CMat(blk_b));
    }

  std::vector<Subsystem> parts;
  for (const auto& n : free_a) parts.push_back(ra[ra.index_of(n)]);
  for (const auto& n : free_b) parts.push_back(rb[rb.index_of(n)]);
  return LabeledOperator(SpaceRegistry(parts), out);
}

CMat haar_unitary(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  CMat z(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) {
      double re = nd(rng);
      double im = nd(rng);
      z(i, j) = cd(re, im);
    }
  Eigen::HouseholderQR<CMat> qr(z);
  CMat q = qr.householderQ() * CMat::Identity(d, d);
  CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    cd ph = r(i, i) / std::abs(r(i, i));
    q.col(i) *= ph;
  }
  return q;
}

ChannelSpec random_channel(std::uint64_t seed, int ancilla_dim) {
  if (ancilla_dim < 1) throw ConfigError("ancilla_dim", "must be positive");
  CMat u = haar_unitary(2 * ancilla_dim, seed);
  std::vector<CMat> kraus;
  for (int a = 0; a < ancilla_dim; ++a) {
    CMat k(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) k(i, j) = u(i * ancilla_dim + a, j * ancilla_dim);
    kraus.push_back(k);
  }
  check_completeness(kraus);
  ChannelSpec c;
  c.kind = ChannelSpec::Kind::random_stinespring;
  c.seed = seed;
  c.ancilla_dim = ancilla_dim;
  c.kraus = std::move(kraus);
  c.label = "random_stinespring";
  return c;
}

ChannelSpec random_parametrized_channel(std::uint64_t seed, int ancilla_dim) {
  auto c = ChannelSpec::compose({ChannelSpec::phase_unitary(), random_channel(seed, ancilla_dim)});
  c.label = "random";
  return c;
}

json channel_to_json(const ChannelSpec& ch) {
  using K = ChannelSpec::Kind;
  json j;
  switch (ch.kind) {
    case K::phase_unitary: j["kind"] = "phase_unitary"; break;
    case K::bit_flip:
      j["kind"] = "bit_flip";
      j["params"] = {{"eta", ch.eta}};
      break;
    case K::amplitude_damping:
      j["kind"] = "amplitude_damping";
      j["params"] = {{"gamma", ch.gamma}};
      break;
    case K::composition: {
      j["kind"] = "composition";
      json comps = json::array();
      for (const auto& c : ch.components) comps.push_back(channel_to_json(c));
      j["params"] = {{"components", comps}};
      break;
    }
    case K::random_stinespring:
      j["kind"] = "random_stinespring";
      j["params"] = {{"seed", ch.seed}, {"ancilla_dim", ch.ancilla_dim}};
      break;
    case K::custom_kraus: j["kind"] = "custom_kraus"; break;
  }
  if (ch.kind == K::custom_kraus || ch.kind == K::random_stinespring) {
    json ks = json::array();
    for (const auto& k : ch.kraus) ks.push_back(cmat_to_json(k));
    j["kraus"] = ks;
  }
  if (!ch.label.empty()) j["label"] = ch.label;
  return j;
}

namespace {

double param(const json& j, const std::string& name) {
  if (!j.contains("params") || !j["params"].contains(name) || !j["params"][name].is_number())
    throw ConfigError(name, "missing numeric channel parameter");
  return j["params"][name].get<double>();
}

}  // namespace

ChannelSpec channel_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("channel", "expected a JSON object");
  if (j.contains("preset")) {
    if (!j["preset"].is_string()) throw ConfigError("preset", "expected a string");
    return ChannelSpec::preset(j["preset"].get<std::string>());
  }
  if (!j.contains("kind") || !j["kind"].is_string()) throw ConfigError("kind", "missing channel kind");
  const std::string kind = j["kind"].get<std::string>();
  ChannelSpec c;
  if (kind == "phase_unitary") {
    c = ChannelSpec::phase_unitary();
  } else if (kind == "bit_flip") {
    c = ChannelSpec::bit_flip(param(j, "eta"));
  } else if (kind == "amplitude_damping") {
    c = ChannelSpec::amplitude_damping(param(j, "gamma"));
  } else if (kind == "composition") {
    if (!j.contains("params") || !j["params"].contains("components") || !j["params"]["components"].is_array())
      throw ConfigError("components", "composition needs params.components");
    std::vector<ChannelSpec> comps;
    for (const auto& cj : j["params"]["components"]) comps.push_back(channel_from_json(cj));
    c = ChannelSpec::compose(std::move(comps));
  } else if (kind == "random_stinespring") {
    if (!j.contains("params") || !j["params"].contains("seed") || !j["params"]["seed"].is_number_unsigned())
      throw ConfigError("seed", "random_stinespring needs a non-negative integer seed");
    int anc = j["params"].contains("ancilla_dim") ? static_cast<int>(param(j, "ancilla_dim")) : 4;
    c = random_channel(j["params"]["seed"].get<std::uint64_t>(), anc);
  } else if (kind == "custom_kraus") {
    if (!j.contains("kraus") || !j["kraus"].is_array()) throw ConfigError("kraus", "custom_kraus needs a kraus list");
    std::vector<CMat> ks;
    for (const auto& kj : j["kraus"]) ks.push_back(cmat_from_json(kj, "kraus"));
    try {
      c = ChannelSpec::custom(std::move(ks));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("kraus", e.what());
    }
  } else {
    throw ConfigError("kind", "unknown channel kind '" + kind + "'");
  }
  if (j.contains("label") && j["label"].is_string()) c.label = j["label"].get<std::string>();
  return c;
}

}  // namespace globest
