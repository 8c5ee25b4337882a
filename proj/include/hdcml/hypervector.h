#pragma once

// MAP (multiply-add-permute) hyperdimensional algebra over real-valued
// hypervectors. Bipolar vectors are stored as doubles in {-1, +1}.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hdcml/random.h"

namespace hdcml {

using Hypervector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

constexpr int kDefaultDimension = 1000;

Hypervector random_bipolar(int d, Rng& rng);
Hypervector zeros(int d);
Hypervector ones(int d);

bool is_bipolar(const Hypervector& x);
bool is_zero(const Hypervector& x);

// Cosine similarity. A zero-norm operand yields 0 so that the zeros vector
// stays below every recognition threshold.
double cosine_similarity(const Hypervector& x, const Hypervector& y);

// Elementwise -1 / 0 / +1.
Hypervector sign(const Hypervector& x);

// Signed superposition sgn(sum). An even-sized list gets one extra random
// bipolar vector drawn from `rng` to break ties.
Hypervector bundle(std::span<const Hypervector> vs, Rng& rng);

// Elementwise product; self-inverse for bipolar operands.
Hypervector bind(const Hypervector& x, const Hypervector& y);

// Circular shift: result[(i + k) mod d] = x[i]. Negative k shifts back.
Hypervector permute(const Hypervector& x, long k);

class Dictionary {
 public:
  struct Entry {
    std::string label;
    Hypervector vector;
  };

  Dictionary() = default;

  void add(std::string label, Hypervector vector);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  int dimension() const { return dimension_; }
  const Entry& operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
  int dimension_ = 0;
};

struct Recovered {
  std::size_t index;
  std::string label;
  Hypervector vector;
  double similarity;
};

// Cleanup memory: the most similar entry if its similarity reaches
// `threshold`, otherwise nothing. Exact ties resolve to the earliest entry.
std::optional<Recovered> recover(const Hypervector& query, const Dictionary& dict,
                                 double threshold);

}  // namespace hdcml
