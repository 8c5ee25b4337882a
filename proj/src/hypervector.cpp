#include "hdcml/hypervector.h"

#include <stdexcept>

namespace hdcml {

namespace {

void require_same_dimension(const Hypervector& x, const Hypervector& y, const char* op) {
  if (x.size() != y.size()) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()) + ")");
  }
}

}  // namespace

Hypervector random_bipolar(int d, Rng& rng) {
  if (d < 1) throw std::invalid_argument("random_bipolar: dimension must be >= 1");
  Hypervector v(d);
  // 64 fair bits per engine draw; mt19937_64 output is fully specified, so
  // bipolar vectors are identical across standard libraries.
  std::uint64_t bits = 0;
  for (int i = 0; i < d; ++i) {
    if (i % 64 == 0) bits = rng();
    v[i] = (bits & 1ULL) ? 1.0 : -1.0;
    bits >>= 1;
  }
  return v;
}

Hypervector zeros(int d) { return Hypervector::Zero(d); }

Hypervector ones(int d) { return Hypervector::Ones(d); }

bool is_bipolar(const Hypervector& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] != 1.0 && x[i] != -1.0) return false;
  }
  return true;
}

bool is_zero(const Hypervector& x) { return (x.array() == 0.0).all(); }

double cosine_similarity(const Hypervector& x, const Hypervector& y) {
  require_same_dimension(x, y, "cosine_similarity");
  const double nx = x.norm();
  const double ny = y.norm();
  if (nx == 0.0 || ny == 0.0) return 0.0;
  return x.dot(y) / (nx * ny);
}

Hypervector sign(const Hypervector& x) {
  return x.unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

Hypervector bundle(std::span<const Hypervector> vs, Rng& rng) {
  if (vs.empty()) throw std::invalid_argument("bundle: empty list");
  Hypervector sum = vs.front();
  for (std::size_t i = 1; i < vs.size(); ++i) {
    require_same_dimension(sum, vs[i], "bundle");
    sum += vs[i];
  }
  if (vs.size() % 2 == 0) sum += random_bipolar(static_cast<int>(sum.size()), rng);
  return sign(sum);
}

Hypervector bind(const Hypervector& x, const Hypervector& y) {
  require_same_dimension(x, y, "bind");
  return x.cwiseProduct(y);
}

Hypervector permute(const Hypervector& x, long k) {
  const long d = static_cast<long>(x.size());
  if (d == 0) return x;
  long shift = k % d;
  if (shift < 0) shift += d;
  Hypervector out(d);
  // out[(i + shift) mod d] = x[i]
  out.tail(d - shift) = x.head(d - shift);
  out.head(shift) = x.tail(shift);
  return out;
}

void Dictionary::add(std::string label, Hypervector vector) {
  if (!entries_.empty() && vector.size() != dimension_) {
    throw std::invalid_argument("Dictionary::add: dimension mismatch for '" + label + "'");
  }
  for (const auto& e : entries_) {
    if (e.label == label) throw std::invalid_argument("Dictionary::add: duplicate label '" + label + "'");
  }
  dimension_ = static_cast<int>(vector.size());
  entries_.push_back({std::move(label), std::move(vector)});
}

std::optional<Recovered> recover(const Hypervector& query, const Dictionary& dict,
                                 double threshold) {
  if (threshold < 0.0 || threshold > 1.0) {
    throw std::invalid_argument("recover: threshold must lie in [0, 1]");
  }
  if (dict.empty()) return std::nullopt;
  std::size_t best = 0;
  double best_sim = -2.0;
  for (std::size_t i = 0; i < dict.size(); ++i) {
    const double s = cosine_similarity(query, dict[i].vector);
    if (s > best_sim) {
      best_sim = s;
      best = i;
    }
  }
  if (best_sim < threshold) return std::nullopt;
  return Recovered{best, dict[best].label, dict[best].vector, best_sim};
}

}  // namespace hdcml
