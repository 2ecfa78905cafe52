#pragma once

#include <string>
#include <vector>

#include "qmarkov/channel.hpp"
#include "qmarkov/idempotent.hpp"

namespace qmarkov {

struct CommutativityReport {
  double compressed_residual = 0.0;    // max ||[b_i, b_j]|| on p_R Fix T p_R
  double uncompressed_residual = 0.0;  // same on an orthonormal basis of Fix T
  int compressed_dim = 0;
  bool commutative = false;            // compressed_residual <= tol.residual
};

struct HolevoCertificate {
  HolevoForm form;
  /// [tr(rho_i a_j)]
  RealMat biorthogonality;
  std::vector<Projection> minimal_projections;
  bool states_independent = false;
  bool effects_independent = false;
  double states_gram_min = 0.0;
  double effects_gram_min = 0.0;
  double reconstruction_residual = 0.0;  // ||super(form) - super(P)||
};

struct Assertion {
  std::string name;
  bool passed = false;
  double residual = 0.0;
  std::string witness;
};

struct UniquenessReport {
  std::vector<Assertion> assertions;
  bool passed() const;
};

/// Throws NotHolevoProvenance unless `t` was built from a HolevoForm.
CommutativityReport fixed_commutativity_check(const QuantumChannel& t, const Tolerances& tol = {});

/// Throws NotIdempotent or RangeNotCommutative. `seed` drives the random
/// combination used for simultaneous diagonalisation.
HolevoCertificate holevo_from_idempotent(const QuantumChannel& p, const Tolerances& tol = {},
                                         unsigned long long seed = 0x5eed);

/// Never throws for well-formed data; every failure is reported.
UniquenessReport verify_uniqueness(const HolevoCertificate& cert, const Tolerances& tol = {});

}  // namespace qmarkov
