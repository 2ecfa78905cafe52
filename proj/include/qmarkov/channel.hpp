#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "qmarkov/core.hpp"

namespace qmarkov {

/// Measure-and-prepare data x -> sum_i tr(rho_i x) a_i.
struct HolevoForm {
  std::vector<Mat> states;   // density matrices rho_i
  std::vector<Mat> effects;  // PSD a_i with sum a_i = 1

  /// Throws NotAState / NotPsd / EffectsDontSumToIdentity / DimensionMismatch.
  void validate(const Tolerances& tol = {}) const;
  int dim() const { return states.empty() ? 0 : static_cast<int>(states.front().rows()); }
  std::size_t size() const { return states.size(); }
};

enum class Provenance { Superoperator, Kraus, Choi, Holevo, Stochastic, Derived };
std::string_view to_string(Provenance p);

/// Superoperator of the pre-adjoint T_* (Schroedinger picture), acting on
/// vectorised density matrices. It is the Hilbert-Schmidt adjoint of T.
struct PreAdjoint {
  Mat super;
  int dim = 0;
  Mat apply(const Mat& rho) const;
};

/// A unital completely positive map on d x d matrices (a Markov operator).
///
/// The canonical form is the d^2 x d^2 superoperator under column stacking
/// (see kernels.hpp). Choi and Kraus forms are derived on demand and cached;
/// the cache is filled at most once and is safe to read concurrently.
///
/// Channels built with `raw` skip validation so that negative tests can
/// construct non-unital or non-CP maps; `require_markov` re-runs the checks
/// and every analysis entry point calls it.
class QuantumChannel {
 public:
  static QuantumChannel from_superoperator(Mat super, const Tolerances& tol = {});
  static QuantumChannel raw(Mat super, Provenance provenance = Provenance::Superoperator);

  static QuantumChannel from_kraus(std::span<const Mat> kraus, const Tolerances& tol = {});
  static QuantumChannel from_holevo(const HolevoForm& form, const Tolerances& tol = {});
  /// Same map as from_holevo without any validation of the form.
  static QuantumChannel from_holevo_raw(const HolevoForm& form);
  static QuantumChannel from_choi(const Mat& choi, const Tolerances& tol = {});
  /// Diagonal embedding of a row-stochastic matrix:
  /// T(x) = sum_i (sum_j P_ij x_jj) e_ii.
  static QuantumChannel from_stochastic(const RealMat& p, const Tolerances& tol = {});
  static QuantumChannel identity_channel(int d);

  int dim() const { return dim_; }
  const Mat& super() const { return super_; }
  Provenance provenance() const { return provenance_; }
  bool validated() const { return validated_; }
  /// The Holevo data the channel was built from, if any.
  const std::optional<HolevoForm>& holevo_form() const { return holevo_; }

  Mat apply(const Mat& x) const;
  PreAdjoint preadjoint() const;

  const Mat& choi() const;
  /// At most d^2 Kraus operators from the eigendecomposition of the Choi
  /// matrix. Throws NotCompletelyPositive for non-CP raw channels.
  const std::vector<Mat>& kraus(const Tolerances& tol = {}) const;

  /// ||T(1) - 1||_F.
  double unital_residual() const;
  /// Smallest eigenvalue of the Choi matrix.
  double choi_min_eigenvalue() const;

  /// Throws NotUnital / NotCompletelyPositive (with the witness value).
  void validate(const Tolerances& tol = {}) const;

 private:
  QuantumChannel(Mat super, Provenance provenance, bool validated);

  struct Cache;
  int dim_ = 0;
  Mat super_;
  Provenance provenance_ = Provenance::Superoperator;
  bool validated_ = false;
  std::optional<HolevoForm> holevo_;
  std::shared_ptr<Cache> cache_;
};

/// Re-validates a channel before analysis; refuses channels that fail.
void require_markov(const QuantumChannel& t, const Tolerances& tol);

/// (t o s)(x) = t(s(x)).
QuantumChannel compose(const QuantumChannel& t, const QuantumChannel& s);
/// n-fold composition; power(t, 0) is the identity channel.
QuantumChannel power(const QuantumChannel& t, int n);
Mat superop_power(const Mat& super, int n);

/// Superoperator of an arbitrary linear map, assembled column by column.
template <typename F>
Mat superop_of(int d, F&& f) {
  Mat s(d * d, d * d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) {
      Mat y = f(matrix_unit(d, i, j));
      s.col(i + j * d) = Eigen::Map<const Vec>(y.data(), d * d);
    }
  return s;
}

/// Apply a d^2 x d^2 superoperator to a d x d matrix.
Mat apply_super(const Mat& super, const Mat& x);

/// Advisory only: positive partial transpose of the Choi matrix. Every
/// entanglement-breaking channel passes; passing does not certify it.
struct PptAdvisory {
  bool ppt = false;
  double min_eigenvalue = 0.0;
};
PptAdvisory ppt_advisory(const QuantumChannel& t, const Tolerances& tol = {});

}  // namespace qmarkov
