#pragma once

#include <array>
#include <numbers>
#include <string>

#include "qkdsim/analyzer.hpp"
#include "qkdsim/qstate.hpp"

namespace qkdsim {

/// Post-selected HOM source. `hom_visibility` scales the coherence between
/// the two terms of the labeled Bell state (partial distinguishability as
/// dephasing); `epsilon` sets the populations cos^2 / sin^2.
struct SourceModel {
  BellLabel label = BellLabel::PhiPlus;
  double epsilon = std::numbers::pi / 4.0;
  double hom_visibility = 1.0;

  void validate() const;
};

enum class Arm { A, B, Both };

class ChannelModel {
 public:
  enum class Kind { Identity, Depolarizing, InterceptResend };

  static ChannelModel identity() { return ChannelModel(Kind::Identity, 0.0, Arm::A); }
  /// rho -> (1-p) rho + p (I/2 (x) Tr_arm rho), applied to `arm`.
  static ChannelModel depolarizing(double p, Arm arm = Arm::A);
  /// Werner visibility W: single-arm depolarizing with p = 1 - W. On a
  /// maximal Bell state this gives W |Bell><Bell| + (1 - W) I/4.
  static ChannelModel werner(double visibility) { return depolarizing(1.0 - visibility, Arm::A); }
  /// Eve intercepts this fraction of Bob's photons. Acts at sampling level;
  /// apply_channel leaves the state untouched.
  static ChannelModel intercept_resend(double fraction);

  Kind kind() const noexcept { return kind_; }
  double parameter() const noexcept { return parameter_; }
  Arm arm() const noexcept { return arm_; }
  double eve_fraction() const noexcept { return kind_ == Kind::InterceptResend ? parameter_ : 0.0; }

  std::string describe() const;

 private:
  ChannelModel(Kind kind, double parameter, Arm arm) : kind_(kind), parameter_(parameter), arm_(arm) {}
  Kind kind_;
  double parameter_;
  Arm arm_;
};

TwoQubitState generate(const SourceModel& source);

TwoQubitState apply_channel(const TwoQubitState& state, const ChannelModel& channel);

/// Single-arm depolarizing map.
TwoQubitState depolarize(const TwoQubitState& state, double p, Arm arm);

/// Eve's measurement of Bob's photon in one basis: the two outcome branches
/// with their Born probabilities and the re-prepared product states.
struct InterceptBranch {
  double probability = 0.0;
  TwoQubitState state = TwoQubitState::maximally_mixed();
};
std::array<InterceptBranch, 2> intercept_branches(const TwoQubitState& state,
                                                  const AnalyzerSetting& eve_basis);

/// Eve's basis choices: H/V and D/A.
std::array<AnalyzerSetting, 2> eve_bases();

/// Ensemble state seen by Alice and Bob when Eve intercepts `fraction` of
/// pairs with a uniformly random basis. Used for analytic expectations.
TwoQubitState intercept_average(const TwoQubitState& state, double fraction);

}  // namespace qkdsim
