#include "cifc/json_io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "cifc/parallel.hpp"

namespace cifc {

namespace {

void require_object(const json& j, const char* what) {
  if (!j.is_object()) throw validation_error(std::string(what) + " must be a JSON object");
}

void check_keys(const json& j, std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw validation_error("unexpected key \"" + it.key() + "\"");
  }
}

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw validation_error(std::string("missing key \"") + key + "\"");
  return *it;
}

double number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) throw validation_error(std::string("\"") + key + "\" must be a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double dflt) {
  return j.contains(key) ? number(j, key) : dflt;
}

long long integer_or(const json& j, const char* key, long long dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j[key];
  if (!v.is_number_integer()) throw validation_error(std::string("\"") + key + "\" must be an integer");
  return v.get<long long>();
}

std::uint64_t unsigned_or(const json& j, const char* key, std::uint64_t dflt) {
  long long v = integer_or(j, key, static_cast<long long>(dflt));
  if (v < 0) throw validation_error(std::string("\"") + key + "\" must be >= 0");
  return static_cast<std::uint64_t>(v);
}

std::vector<double> numbers(const json& v, const char* key) {
  if (!v.is_array()) throw validation_error(std::string("\"") + key + "\" must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw validation_error(std::string("\"") + key + "\" must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<Axis> axes_from(const json& v) {
  if (!v.is_array()) throw validation_error("\"axes\" must be an array of [name, size] pairs");
  std::vector<Axis> out;
  for (const auto& a : v) {
    if (!a.is_array() || a.size() != 2 || !a[0].is_string() || !a[1].is_number_integer())
      throw validation_error("each axis must be [name, size]");
    long long n = a[1].get<long long>();
    if (n < 1 || n > static_cast<long long>(max_alphabet_product)) throw validation_error("axis size out of range");
    out.push_back({a[0].get<std::string>(), static_cast<int>(n)});
  }
  return out;
}

json axes_to(const std::vector<Axis>& axes) {
  json a = json::array();
  for (const auto& x : axes) a.push_back(json::array({x.name, x.size}));
  return a;
}

std::string class_of(const json& j) {
  if (!j.contains("class")) return "";
  if (!j["class"].is_string()) throw validation_error("\"class\" must be a string");
  return j["class"].get<std::string>();
}

}  // namespace

json to_json(const JointDist& d) {
  json j;
  j["axes"] = axes_to(d.axes());
  j["probs"] = d.probs();
  return j;
}

JointDist joint_from_json(const json& j) {
  require_object(j, "distribution");
  check_keys(j, {"axes", "probs"});
  return JointDist(axes_from(field(j, "axes")), numbers(field(j, "probs"), "probs"));
}

json to_json(const DmcChannel& c, ChannelClass cls) {
  std::vector<Axis> axes{{"X1", c.x1_size()}, {"X2", c.x2_size()}};
  axes.insert(axes.end(), c.outputs().begin(), c.outputs().end());
  json j;
  j["class"] = to_string(cls);
  j["axes"] = axes_to(axes);
  j["probs"] = c.probs();
  return j;
}

ChannelClass dmc_class_of(const json& j) {
  std::string c = class_of(j);
  return c.empty() ? ChannelClass::multi_primary : parse_channel_class(c);
}

DmcChannel dmc_from_json(const json& j) {
  require_object(j, "channel");
  check_keys(j, {"class", "axes", "probs"});
  dmc_class_of(j);
  std::vector<Axis> axes = axes_from(field(j, "axes"));
  if (axes.size() < 4 || axes[0].name != "X1" || axes[1].name != "X2")
    throw validation_error("channel axes must be X1, X2, then the outputs");
  std::vector<Axis> outs(axes.begin() + 2, axes.end());
  return DmcChannel(axes[0].size, axes[1].size, std::move(outs), numbers(field(j, "probs"), "probs"));
}

json to_json(const GaussianMultiPrimary& c) {
  json j;
  j["class"] = "multi_primary";
  j["b"] = c.b;
  j["a"] = c.a;
  j["P1"] = c.P1;
  j["P2"] = c.P2;
  return j;
}

json to_json(const GaussianMultiSecondary& c) {
  json j;
  j["class"] = "multi_secondary";
  j["b"] = c.b;
  j["a"] = c.a;
  j["P1"] = c.P1;
  j["P2"] = c.P2;
  return j;
}

GaussianMultiPrimary multi_primary_from_json(const json& j) {
  require_object(j, "channel");
  check_keys(j, {"class", "b", "a", "P1", "P2", "partition"});
  if (class_of(j) != "multi_primary") throw validation_error("expected class multi_primary");
  GaussianMultiPrimary c;
  c.b = numbers(field(j, "b"), "b");
  c.a = number(j, "a");
  c.P1 = number(j, "P1");
  c.P2 = number(j, "P2");
  c.validate();
  return c;
}

GaussianMultiSecondary multi_secondary_from_json(const json& j) {
  require_object(j, "channel");
  check_keys(j, {"class", "b", "a", "P1", "P2", "partition"});
  if (class_of(j) != "multi_secondary") throw validation_error("expected class multi_secondary");
  GaussianMultiSecondary c;
  c.b = number(j, "b");
  c.a = numbers(field(j, "a"), "a");
  c.P1 = number(j, "P1");
  c.P2 = number(j, "P2");
  c.validate();
  return c;
}

DpcConfig dpc_from_json(const json& j) {
  require_object(j, "DPC config");
  check_keys(j, {"P1", "P2", "a1", "a2", "b", "eta", "rho", "x", "sqrt_penalty", "eta_points", "x_scan",
                 "t_points"});
  DpcConfig c;
  c.P1 = number_or(j, "P1", c.P1);
  c.P2 = number_or(j, "P2", c.P2);
  c.a1 = number_or(j, "a1", c.a1);
  c.a2 = number_or(j, "a2", c.a2);
  c.b = number_or(j, "b", c.b);
  c.eta = number_or(j, "eta", c.eta);
  c.rho = number_or(j, "rho", c.rho);
  c.x = number_or(j, "x", c.x);
  if (j.contains("sqrt_penalty")) {
    if (!j["sqrt_penalty"].is_boolean()) throw validation_error("\"sqrt_penalty\" must be a boolean");
    c.sqrt_penalty = j["sqrt_penalty"].get<bool>();
  }
  c.validate();
  return c;
}

SweepConfig sweep_from_json(const json& j) {
  require_object(j, "DPC config");
  SweepConfig s;
  s.eta_points = static_cast<int>(integer_or(j, "eta_points", s.eta_points));
  s.x_scan = static_cast<int>(integer_or(j, "x_scan", s.x_scan));
  s.t_points = static_cast<int>(integer_or(j, "t_points", s.t_points));
  if (s.eta_points < 2 || s.x_scan < 2 || s.t_points < 2) throw validation_error("sweep grids need >= 2 points");
  return s;
}

json to_json(const DpcConfig& c) {
  json j;
  j["P1"] = c.P1;
  j["P2"] = c.P2;
  j["a1"] = c.a1;
  j["a2"] = c.a2;
  j["b"] = c.b;
  j["eta"] = c.eta;
  j["rho"] = c.rho;
  j["x"] = c.x;
  j["sqrt_penalty"] = c.sqrt_penalty;
  return j;
}

json to_json(const SamplingConfig& c) {
  json j;
  j["samples"] = c.samples;
  j["aux_card"] = c.aux_card;
  j["seed"] = c.seed;
  j["grid"] = c.grid;
  return j;
}

SamplingConfig sampling_from_json(const json& j) {
  require_object(j, "sampling config");
  check_keys(j, {"samples", "aux_card", "seed", "grid"});
  SamplingConfig c;
  c.samples = unsigned_or(j, "samples", c.samples);
  c.aux_card = static_cast<int>(integer_or(j, "aux_card", c.aux_card));
  c.seed = unsigned_or(j, "seed", c.seed);
  if (j.contains("grid")) {
    if (!j["grid"].is_boolean()) throw validation_error("\"grid\" must be a boolean");
    c.grid = j["grid"].get<bool>();
  }
  return c;
}

json to_json(const RegimeReport& r) {
  json j;
  j["class"] = to_string(r.query.cls);
  j["regime"] = to_string(r.query.regime);
  if (r.query.partition) j["partition"] = format_partition(*r.query.partition);
  j["passed"] = r.passed();
  j["label"] = to_string(r.label);
  j["samples_checked"] = r.samples_checked;
  if (r.witness) {
    json w;
    w["condition"] = r.witness->condition;
    w["receiver"] = r.witness->receiver;
    w["margin"] = r.witness->margin;
    w["sample_index"] = r.witness->sample_index;
    w["input"] = to_json(r.witness->input);
    j["witness"] = w;
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

json to_json(const CounterexampleWitness& w) {
  json j;
  j["channel"] = to_json(w.channel);
  j["input"] = to_json(w.input);
  j["receiver"] = w.receiver;
  j["margin"] = w.margin;
  j["channel_index"] = w.channel_index;
  j["vsi_check"] = to_json(w.vsi_check);
  return j;
}

CounterexampleWitness witness_from_json(const json& j) {
  require_object(j, "witness");
  check_keys(j, {"channel", "input", "receiver", "margin", "channel_index", "vsi_check"});
  CounterexampleWitness w;
  w.channel = dmc_from_json(field(j, "channel"));
  w.input = joint_from_json(field(j, "input"));
  for (const char* a : {"U", "X1", "X2"})
    if (!w.input.has_axis(a)) throw validation_error(std::string("witness input lacks axis ") + a);
  w.receiver = unsigned_or(j, "receiver", 0);
  if (w.receiver >= w.channel.primary_names().size()) throw validation_error("witness receiver out of range");
  w.margin = number(j, "margin");
  w.channel_index = unsigned_or(j, "channel_index", 0);
  w.vsi_check = sampling_from_json(field(j, "vsi_check"));
  return w;
}

ChannelDoc channel_from_json(const json& j) {
  require_object(j, "channel");
  if (j.contains("axes")) return dmc_from_json(j);
  std::string c = class_of(j);
  if (c == "multi_primary") return multi_primary_from_json(j);
  if (c == "multi_secondary") return multi_secondary_from_json(j);
  throw validation_error("channel needs \"axes\" (discrete) or a Gaussian \"class\"");
}

json read_json(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw validation_error("cannot read " + p.string());
  std::stringstream ss;
  ss << is.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw validation_error(p.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream os(p, std::ios::binary);
  os << s;
  if (!os) throw validation_error("cannot write " + p.string());
}

}  // namespace cifc
