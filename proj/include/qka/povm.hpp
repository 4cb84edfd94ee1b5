#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qka/cluster.hpp"
#include "qka/linalg.hpp"
#include "qka/qcore.hpp"
#include "qka/rng.hpp"

namespace qka {

// Raised when the cluster coefficients collapse the four family states into a
// linearly dependent set, which makes unambiguous discrimination impossible.
class LinearlyDependentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The four basis indices supporting family `f` (1..4), ascending.
std::array<int, 4> family_support(int family);

// Family of a 4-qubit basis index via the parity pair (q1^q2, q3^q4):
// (0,0)->1, (0,1)->2, (1,0)->3, (1,1)->4.
int family_of_basis_index(int basis_index);

// Projective measurement of the two parities (q1^q2) and (q3^q4). Returns the
// family picked by Born sampling and the projected, renormalized state. Works
// on any 4-qubit state, including ones an eavesdropper has disturbed.
std::pair<int, StateVector> parity_project(const StateVector& state,
                                           RandomSource& rng);

// Strict variant for protocol states: requires the state to be supported on a
// single family and throws std::invalid_argument otherwise (that situation
// signals a simulator bug, not physics). The returned state is unchanged up
// to normalization noise.
std::pair<int, StateVector> identify_family(const StateVector& state,
                                            RandomSource& rng);

// Unambiguous discrimination of the four cluster states in one family:
// conclusive outcomes never misidentify, at the price of an inconclusive
// element. Built from the reciprocal (dual) basis of the family states with a
// single scale chosen as large as positivity of the inconclusive element
// allows; that choice makes the conclusive probability the same for every
// state in the family.
struct UsdPovm {
  int family = 0;
  ClusterParams params;
  std::array<int, 4> ids{};               // cluster ids, tagging `conclusive`
  std::array<CMatrix, 4> conclusive;      // 16x16 operators
  CMatrix inconclusive;                   // 16x16
  double conclusive_probability = 0.0;    // per family state
};

UsdPovm build_usd_povm(const ClusterParams& params, int family);

// Conclusive(id) or nullopt for the inconclusive outcome.
using DiscriminationOutcome = std::optional<int>;

DiscriminationOutcome povm_measure(const StateVector& state,
                                   const UsdPovm& povm, RandomSource& rng);

// Parity projection followed by the selected family's USD measurement.
class Discriminator {
 public:
  explicit Discriminator(const ClusterParams& params);

  DiscriminationOutcome discriminate(const StateVector& state,
                                     RandomSource& rng) const;
  const UsdPovm& povm(int family) const { return povms_.at(family - 1); }
  const ClusterParams& params() const { return params_; }

 private:
  ClusterParams params_;
  std::vector<UsdPovm> povms_;
};

DiscriminationOutcome discriminate(const StateVector& state,
                                   const ClusterParams& params,
                                   RandomSource& rng);

}  // namespace qka
