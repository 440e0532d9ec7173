#include "qkdsim/optics.hpp"

#include <cmath>
#include <sstream>

#include "qkdsim/errors.hpp"

namespace qkdsim {
namespace {

bool unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

// Indices of the two product terms making up the labeled Bell state.
std::pair<int, int> coherence_indices(BellLabel label) {
  return is_phi(label) ? std::pair{kHH, kVV} : std::pair{kHV, kVH};
}

}  // namespace

void SourceModel::validate() const {
  if (!unit_interval(hom_visibility)) throw DomainError("source: HOM visibility must lie in [0, 1]");
  if (!(epsilon >= 0.0 && epsilon <= std::numbers::pi / 2.0)) {
    throw DomainError("source: epsilon must lie in [0, pi/2]");
  }
}

ChannelModel ChannelModel::depolarizing(double p, Arm arm) {
  if (!unit_interval(p)) throw DomainError("channel: depolarizing probability must lie in [0, 1]");
  return ChannelModel(Kind::Depolarizing, p, arm);
}

ChannelModel ChannelModel::intercept_resend(double fraction) {
  if (!unit_interval(fraction)) throw DomainError("channel: intercept fraction must lie in [0, 1]");
  return ChannelModel(Kind::InterceptResend, fraction, Arm::B);
}

std::string ChannelModel::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Identity: os << "identity"; break;
    case Kind::Depolarizing:
      os << "depolarizing(p=" << parameter_ << ", arm="
         << (arm_ == Arm::A ? "A" : arm_ == Arm::B ? "B" : "both") << ")";
      break;
    case Kind::InterceptResend: os << "intercept_resend(fraction=" << parameter_ << ")"; break;
  }
  return os.str();
}

TwoQubitState generate(const SourceModel& source) {
  source.validate();
  DensityMatrix rho = to_density(bell_state(source.label, source.epsilon)).rho();
  const auto [i, j] = coherence_indices(source.label);
  rho(i, j) *= source.hom_visibility;
  rho(j, i) *= source.hom_visibility;
  return TwoQubitState::from_matrix(rho);
}

TwoQubitState depolarize(const TwoQubitState& state, double p, Arm arm) {
  if (!unit_interval(p)) throw DomainError("depolarize: p must lie in [0, 1]");
  if (arm == Arm::Both) return depolarize(depolarize(state, p, Arm::A), p, Arm::B);
  const DensityMatrix& rho = state.rho();
  const Eigen::Matrix2cd half_identity = Eigen::Matrix2cd::Identity() / 2.0;
  DensityMatrix mixed;
  if (arm == Arm::A) {
    mixed = kron(half_identity, reduce_to_b(rho));
  } else {
    mixed = kron(reduce_to_a(rho), half_identity);
  }
  return TwoQubitState::from_matrix((1.0 - p) * rho + p * mixed);
}

TwoQubitState apply_channel(const TwoQubitState& state, const ChannelModel& channel) {
  switch (channel.kind()) {
    case ChannelModel::Kind::Identity:
    case ChannelModel::Kind::InterceptResend:
      return state;
    case ChannelModel::Kind::Depolarizing:
      return depolarize(state, channel.parameter(), channel.arm());
  }
  return state;
}

std::array<AnalyzerSetting, 2> eve_bases() {
  return {AnalyzerSetting::from_hwp(0.0), AnalyzerSetting::from_hwp(22.5)};
}

std::array<InterceptBranch, 2> intercept_branches(const TwoQubitState& state,
                                                  const AnalyzerSetting& eve_basis) {
  std::array<InterceptBranch, 2> out;
  for (int k = 0; k < 2; ++k) {
    const Eigen::Vector2d ket = polarization_ket(eve_basis, k == 0);
    const Eigen::Matrix2cd proj = (ket * ket.transpose()).cast<std::complex<double>>();
    DensityMatrix op = DensityMatrix::Zero();
    op.block<2, 2>(0, 0) = proj;
    op.block<2, 2>(2, 2) = proj;  // I (x) Pi_k
    const DensityMatrix projected = op * state.rho() * op;
    const double prob = projected.trace().real();
    out[k].probability = prob;
    if (prob > 0.0) {
      out[k].state = TwoQubitState::from_matrix(projected / prob);
    }
  }
  return out;
}

TwoQubitState intercept_average(const TwoQubitState& state, double fraction) {
  if (!unit_interval(fraction)) throw DomainError("intercept_average: fraction must lie in [0, 1]");
  DensityMatrix eve = DensityMatrix::Zero();
  for (const AnalyzerSetting& basis : eve_bases()) {
    for (const InterceptBranch& branch : intercept_branches(state, basis)) {
      eve += 0.5 * branch.probability * branch.state.rho();
    }
  }
  return TwoQubitState::from_matrix((1.0 - fraction) * state.rho() + fraction * eve);
}

}  // namespace qkdsim
