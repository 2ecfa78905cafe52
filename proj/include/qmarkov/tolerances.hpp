#pragma once

namespace qmarkov {

/// Numerical tolerances shared by every analysis. All values are absolute
/// unless a function documents a relative use (eigen_cluster is relative to
/// the spectral scale of the matrix it is applied to).
struct Tolerances {
  double hermitian = 1e-9;
  double psd = 1e-9;
  double projection = 1e-9;
  double eigen_cluster = 1e-9;
  double convergence = 1e-10;
  double residual = 1e-9;

  /// Throws InvalidArgument unless every field is strictly positive.
  void validate() const;

  /// Copy with every tolerance set to `value` except convergence, which
  /// keeps its default ratio to the residual tolerance.
  static Tolerances uniform(double value);
};

}  // namespace qmarkov
