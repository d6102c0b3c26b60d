#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "globest/json_io.hpp"
#include "globest/spaces.hpp"

namespace globest {

// A parametrized qubit-level channel E_theta. Only phase_unitary components depend on theta.
struct ChannelSpec {
  enum class Kind { phase_unitary, bit_flip, amplitude_damping, composition, random_stinespring, custom_kraus };

  Kind kind = Kind::phase_unitary;
  double eta = 1.0;                     // bit_flip
  double gamma = 0.0;                   // amplitude_damping
  std::vector<ChannelSpec> components;  // composition, in order of application
  std::uint64_t seed = 0;               // random_stinespring
  int ancilla_dim = 4;                  // random_stinespring
  std::vector<CMat> kraus;              // custom_kraus and random_stinespring (cached)
  std::string label;

  static ChannelSpec phase_unitary();
  static ChannelSpec bit_flip(double eta);
  static ChannelSpec amplitude_damping(double gamma);
  static ChannelSpec compose(std::vector<ChannelSpec> in_order);
  static ChannelSpec custom(std::vector<CMat> kraus);
  static ChannelSpec preset(const std::string& name);

  int input_dim() const;
  int output_dim() const;
};

// Kraus operators of E_theta; throws if completeness fails by more than 1e-12.
std::vector<CMat> kraus_at(const ChannelSpec& ch, double theta);
void check_completeness(const std::vector<CMat>& kraus, double tol = 1e-12);

// Choi operator on (I, O); input factor first.
CMat choi_from_kraus(const std::vector<CMat>& kraus);
LabeledOperator kraus_to_choi(const ChannelSpec& ch, double theta);

// E^{(x)N} on I1,O1,...,IN,ON.
LabeledOperator tensor_power_choi(const LabeledOperator& e, int n);

// Generalized link product; shared names are contracted. Result lists a's free
// factors followed by b's free factors.
LabeledOperator link_product(const LabeledOperator& a, const LabeledOperator& b);

CMat haar_unitary(int d, std::uint64_t seed);
ChannelSpec random_channel(std::uint64_t seed, int ancilla_dim = 4);
// E o U_theta with E drawn from a Haar Stinespring dilation.
ChannelSpec random_parametrized_channel(std::uint64_t seed, int ancilla_dim = 4);

json channel_to_json(const ChannelSpec& ch);
ChannelSpec channel_from_json(const json& j);

}  // namespace globest
