#include "globest/conic.hpp"

namespace globest {

long ConicProblem::vec_length() const {
  long n = free_count;
  for (int s : block_sizes) n += static_cast<long>(s) * s;
  return n;
}

long ConicProblem::block_offset(std::size_t k) const {
  long off = free_count;
  for (std::size_t i = 0; i < k; ++i) off += static_cast<long>(block_sizes[i]) * block_sizes[i];
  return off;
}

void ConicProblem::validate() const {
  const long len = vec_length();
  if (a.rows() != b.size()) throw std::invalid_argument("conic problem: A has " + std::to_string(a.rows()) + " rows but b has " + std::to_string(b.size()));
  if (a.cols() != len) throw std::invalid_argument("conic problem: A column count does not match the cone layout");
  if (c.size() != len) throw std::invalid_argument("conic problem: objective length does not match the cone layout");
  for (int s : block_sizes)
    if (s < 1) throw std::invalid_argument("conic problem: block sizes must be positive");
  if (!block_names.empty() && block_names.size() != block_sizes.size())
    throw std::invalid_argument("conic problem: block_names must name every block");
  for (std::size_t k = 0; k < block_sizes.size(); ++k) {
    const long n = block_sizes[k];
    Eigen::Map<const RMat> ck(c.data() + block_offset(k), n, n);
    const double scale = std::max(1.0, ck.cwiseAbs().maxCoeff());
    if ((ck - ck.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw std::invalid_argument("conic problem: objective block " + std::to_string(k) + " is not symmetric");
  }
  // Each constraint row must be symmetric on every block.
  for (long i = 0; i < a.outerSize(); ++i) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(a, i); it; ++it) {
      long col = it.col();
      if (col < free_count) continue;
      std::size_t k = 0;
      while (k + 1 < block_sizes.size() && col >= block_offset(k + 1)) ++k;
      const long n = block_sizes[k];
      const long off = col - block_offset(k);
      const long r = off % n, cc = off / n;
      if (r == cc) continue;
      const double mirror = a.coeff(i, block_offset(k) + r * n + cc);
      if (std::abs(mirror - it.value()) > 1e-12 * std::max(1.0, std::abs(it.value())))
        throw std::invalid_argument("conic problem: constraint " + std::to_string(i) + " is not symmetric");
    }
  }
}

std::vector<RMat> unpack_blocks(const ConicProblem& p, const RVec& x) {
  std::vector<RMat> out;
  for (std::size_t k = 0; k < p.block_sizes.size(); ++k) {
    const long n = p.block_sizes[k];
    out.push_back(Eigen::Map<const RMat>(x.data() + p.block_offset(k), n, n));
  }
  return out;
}

RVec pack_blocks(const ConicProblem& p, const RVec& free_part, const std::vector<RMat>& blocks) {
  RVec x(p.vec_length());
  x.head(p.free_count) = free_part;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const long n = p.block_sizes[k];
    Eigen::Map<RMat>(x.data() + p.block_offset(k), n, n) = blocks[k];
  }
  return x;
}

json export_problem(const ConicProblem& p) {
  p.validate();
  json j;
  j["format"] = "globest-conic-1";
  j["sense"] = "minimize c.x + offset subject to A x = b, x in cone";
  j["layout"] = "x = [free; vec(X_1); ...; vec(X_k)], each block column-major with both triangles stored";
  j["free"] = p.free_count;
  j["blocks"] = p.block_sizes;
  j["block_names"] = p.block_names;
  j["offset"] = p.offset;
  json c = json::array();
  for (long i = 0; i < p.c.size(); ++i)
    if (p.c(i) != 0.0) c.push_back({i, p.c(i)});
  j["c"] = c;
  j["b"] = rvec_to_json(p.b);
  json ent = json::array();
  for (long r = 0; r < p.a.outerSize(); ++r)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(p.a, r); it; ++it)
      ent.push_back({it.row(), it.col(), it.value()});
  j["A"] = {{"rows", p.a.rows()}, {"cols", p.a.cols()}, {"entries", ent}};
  json groups = json::array();
  for (const auto& g : p.y_groups) groups.push_back({{"name", g.name}, {"begin", g.begin}, {"count", g.count}});
  j["y_groups"] = groups;
  return j;
}

ConicProblem import_problem(const json& j) {
  if (!j.is_object() || j.value("format", "") != "globest-conic-1") throw ConfigError("format", "not a conic problem export");
  ConicProblem p;
  p.free_count = j.at("free").get<long>();
  p.block_sizes = j.at("blocks").get<std::vector<int>>();
  p.block_names = j.at("block_names").get<std::vector<std::string>>();
  p.offset = j.at("offset").get<double>();
  p.b = rvec_from_json(j.at("b"), "b");
  const long len = p.vec_length();
  p.c = RVec::Zero(len);
  for (const auto& e : j.at("c")) p.c(e[0].get<long>()) = e[1].get<double>();
  const auto& aj = j.at("A");
  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& e : aj.at("entries")) trip.emplace_back(e[0].get<long>(), e[1].get<long>(), e[2].get<double>());
  p.a.resize(aj.at("rows").get<long>(), aj.at("cols").get<long>());
  p.a.setFromTriplets(trip.begin(), trip.end());
  for (const auto& g : j.at("y_groups")) p.y_groups.push_back({g.at("name"), g.at("begin"), g.at("count")});
  p.validate();
  return p;
}

}  // namespace globest
