#include "qka/povm.hpp"

#include <cmath>
#include <string>

namespace qka {

namespace {

constexpr const char* kCoeffNames[4] = {"a", "b", "c", "d"};

std::array<double, 4> family_probabilities(const StateVector& state) {
  std::array<double, 4> p{};
  for (int idx = 0; idx < 16; ++idx)
    p[family_of_basis_index(idx) - 1] += std::norm(state.amp(idx));
  return p;
}

StateVector project_onto_family(const StateVector& state, int family,
                                double mass) {
  std::vector<cx> amps(16, cx{0, 0});
  const double scale = mass > 0.0 ? 1.0 / std::sqrt(mass) : 0.0;
  for (int idx = 0; idx < 16; ++idx)
    if (family_of_basis_index(idx) == family) amps[idx] = state.amp(idx) * scale;
  return StateVector(4, std::move(amps));
}

}  // namespace

std::array<int, 4> family_support(int family) {
  const auto& terms = cluster_terms((family - 1) * 4 + 1);
  std::array<int, 4> support{terms[0].basis_index, terms[1].basis_index,
                             terms[2].basis_index, terms[3].basis_index};
  return support;
}

int family_of_basis_index(int basis_index) {
  const int q1 = (basis_index >> 3) & 1;
  const int q2 = (basis_index >> 2) & 1;
  const int q3 = (basis_index >> 1) & 1;
  const int q4 = basis_index & 1;
  return ((q1 ^ q2) << 1 | (q3 ^ q4)) + 1;
}

std::pair<int, StateVector> parity_project(const StateVector& state,
                                           RandomSource& rng) {
  if (state.qubit_count() != 4)
    throw std::invalid_argument("parity measurement expects a 4-qubit state");
  const std::array<double, 4> p = family_probabilities(state);
  const double u = rng.uniform();
  double acc = 0.0;
  int family = 4;
  for (int f = 1; f <= 4; ++f) {
    acc += p[f - 1];
    if (u < acc) {
      family = f;
      break;
    }
  }
  return {family, project_onto_family(state, family, p[family - 1])};
}

std::pair<int, StateVector> identify_family(const StateVector& state,
                                            RandomSource& rng) {
  if (state.qubit_count() != 4)
    throw std::invalid_argument("parity measurement expects a 4-qubit state");
  const std::array<double, 4> p = family_probabilities(state);
  int populated = 0;
  for (double v : p)
    if (v > kTol) ++populated;
  if (populated > 1)
    throw std::invalid_argument(
        "identify_family: state has support across parity families");
  return parity_project(state, rng);
}

UsdPovm build_usd_povm(const ClusterParams& params, int family) {
  params.validate();
  if (family < 1 || family > 4) throw std::out_of_range("family must be 1..4");
  const auto coeff = params.coeffs();
  for (int k = 0; k < 4; ++k)
    if (coeff[k] <= kTol)
      throw LinearlyDependentError(
          std::string("family states are linearly dependent: coefficient ") +
          kCoeffNames[k] + " is zero");

  UsdPovm povm;
  povm.family = family;
  povm.params = params;
  for (int i = 0; i < 4; ++i) povm.ids[i] = (family - 1) * 4 + 1 + i;

  const std::array<int, 4> support = family_support(family);

  // Family states as columns of V in the 4-dim support basis.
  CMatrix v(4);
  for (int col = 0; col < 4; ++col) {
    const auto& terms = cluster_terms(povm.ids[col]);
    for (int k = 0; k < 4; ++k)
      v.at(k, col) = cx{terms[k].sign * coeff[k], 0};
  }

  const CMatrix gram = v.adjoint() * v;
  const CMatrix gram_inv = inverse(gram);
  const CMatrix dual = v * gram_inv;  // columns: <dual_i|psi_j> = delta_ij

  // Subnormalized projectors onto the dual vectors; the largest admissible
  // common scale is 1/max_eig of their sum.
  std::array<std::vector<cx>, 4> dual_cols;
  std::array<double, 4> dual_norm_sq{};
  for (int i = 0; i < 4; ++i) {
    dual_cols[i].resize(4);
    for (int k = 0; k < 4; ++k) dual_cols[i][k] = dual.at(k, i);
    dual_norm_sq[i] = gram_inv.at(i, i).real();
  }
  CMatrix sum_unscaled(4);
  for (int i = 0; i < 4; ++i)
    sum_unscaled += CMatrix::outer(dual_cols[i], dual_cols[i]) *
                    cx{1.0 / dual_norm_sq[i], 0};
  const double lambda = 1.0 / hermitian_eigenvalues(sum_unscaled).back();

  // Embed the 4x4 subspace operators at the family's support indices.
  auto embed = [&support](const CMatrix& small) {
    CMatrix big(16);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) big.at(support[i], support[j]) = small.at(i, j);
    return big;
  };

  CMatrix residual = CMatrix::identity(4);
  for (int i = 0; i < 4; ++i) {
    CMatrix element = CMatrix::outer(dual_cols[i], dual_cols[i]) *
                      cx{lambda / dual_norm_sq[i], 0};
    residual -= element;
    povm.conclusive[i] = embed(element);
  }
  povm.inconclusive = embed(residual);
  povm.conclusive_probability = lambda / dual_norm_sq[0];
  return povm;
}

DiscriminationOutcome povm_measure(const StateVector& state,
                                   const UsdPovm& povm, RandomSource& rng) {
  if (state.qubit_count() != 4)
    throw std::invalid_argument("povm_measure expects a 4-qubit state");
  const double u = rng.uniform();
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    acc += expectation(povm.conclusive[i], state.amps());
    if (u < acc) return povm.ids[i];
  }
  return std::nullopt;  // residual probability mass is the inconclusive event
}

Discriminator::Discriminator(const ClusterParams& params) : params_(params) {
  povms_.reserve(4);
  for (int f = 1; f <= 4; ++f) povms_.push_back(build_usd_povm(params_, f));
}

DiscriminationOutcome Discriminator::discriminate(const StateVector& state,
                                                  RandomSource& rng) const {
  const auto [family, projected] = parity_project(state, rng);
  return povm_measure(projected, povms_[family - 1], rng);
}

DiscriminationOutcome discriminate(const StateVector& state,
                                   const ClusterParams& params,
                                   RandomSource& rng) {
  return Discriminator(params).discriminate(state, rng);
}

}  // namespace qka
