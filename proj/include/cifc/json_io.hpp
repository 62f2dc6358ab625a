#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "json.hpp"

#include "cifc/dmc_regions.hpp"
#include "cifc/dpc.hpp"
#include "cifc/gaussian.hpp"

namespace cifc {

using json = nlohmann::ordered_json;

// {"axes": [["X1", 2], ...], "probs": [...]}, row-major.
json to_json(const JointDist& d);
JointDist joint_from_json(const json& j);

// Same layout; the axes start with X1 and X2, probs are P(outputs | x1, x2).
// An optional "class" key names the channel class (default multi_primary).
json to_json(const DmcChannel& c, ChannelClass cls = ChannelClass::multi_primary);
DmcChannel dmc_from_json(const json& j);

json to_json(const GaussianMultiPrimary& c);
json to_json(const GaussianMultiSecondary& c);
GaussianMultiPrimary multi_primary_from_json(const json& j);
GaussianMultiSecondary multi_secondary_from_json(const json& j);

// Keys P1, P2, a1, a2, b, eta, rho, x, sqrt_penalty; all optional, defaults as
// in DpcConfig. Sweep keys eta_points, x_scan, t_points are read by sweep_from_json.
DpcConfig dpc_from_json(const json& j);
SweepConfig sweep_from_json(const json& j);
json to_json(const DpcConfig& c);

json to_json(const RegimeReport& r);
json to_json(const SamplingConfig& c);
SamplingConfig sampling_from_json(const json& j);

json to_json(const CounterexampleWitness& w);
CounterexampleWitness witness_from_json(const json& j);

// Any channel document the CLI accepts, told apart by its keys.
using ChannelDoc = std::variant<DmcChannel, GaussianMultiPrimary, GaussianMultiSecondary>;
ChannelDoc channel_from_json(const json& j);
ChannelClass dmc_class_of(const json& j);

json read_json(const std::filesystem::path& p);
void write_text(const std::filesystem::path& p, const std::string& s);

}  // namespace cifc
