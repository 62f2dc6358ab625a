#include "cifc/cli.hpp"

#include <algorithm>
#include <chrono>
#include <optional>

#include "CLI11.hpp"

#include "cifc/json_io.hpp"
#include "cifc/parallel.hpp"

namespace cifc {

namespace {

struct Options {
  std::string in, out, regime, partition;
  std::uint64_t seed = 0;
  std::optional<std::size_t> samples, budget;
  std::optional<int> grid;
};

void emit(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

// CSV to --out when given, else to stdout.
void put_csv(const Options& o, std::ostream& out, const std::string& csv) {
  if (o.out.empty())
    out << csv;
  else
    write_text(o.out, csv);
}

json summary(const Frontier2D& f) {
  json j;
  j["points"] = f.points().size();
  j["r1_max"] = f.empty() ? 0.0 : f.r1_max();
  j["r2_max"] = f.empty() ? 0.0 : f.r2_max();
  return j;
}

std::optional<Partition> partition_of(const Options& o, const json& doc) {
  if (!o.partition.empty()) return parse_partition(o.partition);
  if (doc.is_object() && doc.contains("partition")) {
    if (!doc["partition"].is_string()) throw validation_error("\"partition\" must be a string like \"1|2\"");
    return parse_partition(doc["partition"].get<std::string>());
  }
  return std::nullopt;
}

json require_in(const Options& o) {
  if (o.in.empty()) throw validation_error("--in is required");
  return read_json(o.in);
}

SamplingConfig sampling_of(const Options& o) {
  SamplingConfig c;
  if (o.samples) c.samples = *o.samples;
  c.seed = o.seed;
  return c;
}

GaussianGrid gaussian_grid_of(const Options& o) {
  GaussianGrid g;
  if (o.grid) {
    if (*o.grid < 2) throw validation_error("--grid needs at least 2 points");
    g.eta = g.rho = *o.grid;
  }
  return g;
}

int cmd_classify(const Options& o, std::ostream& out) {
  json doc = require_in(o);
  auto part = partition_of(o, doc);
  ChannelDoc ch = channel_from_json(doc);
  json res;
  if (auto* mp = std::get_if<GaussianMultiPrimary>(&ch)) {
    if (part) validate_partition(*part, mp->b.size());
    res["regime"] = to_string(classify_gaussian(*mp, part));
  } else if (auto* ms = std::get_if<GaussianMultiSecondary>(&ch)) {
    res["regime"] = to_string(classify_gaussian(*ms));
  } else {
    const auto& chan = std::get<DmcChannel>(ch);
    ChannelClass cls = dmc_class_of(doc);
    std::vector<Regime> order;
    if (!o.regime.empty()) {
      order.push_back(parse_regime(o.regime));
    } else {
      order = {Regime::vsi, Regime::vwi};
      if (part) order.push_back(Regime::mixed);
    }
    json reports = json::array();
    Regime label = Regime::none;
    for (Regime r : order) {
      RegimeReport rep = check_regime(chan, {cls, r, r == Regime::mixed ? part : std::nullopt}, sampling_of(o));
      reports.push_back(to_json(rep));
      if (rep.passed()) {
        label = r;
        break;
      }
    }
    res["regime"] = to_string(label);
    res["class"] = to_string(cls);
    res["reports"] = reports;
  }
  emit(out, res);
  return exit_ok;
}

int dmc_region(const Options& o, const json& doc, std::ostream& out) {
  DmcChannel chan = dmc_from_json(doc);
  if (o.regime.empty()) throw validation_error("--regime is required for a discrete channel");
  RegimeQuery q{dmc_class_of(doc), parse_regime(o.regime), std::nullopt};
  if (q.regime == Regime::mixed) q.partition = partition_of(o, doc);
  RegimeReport rep = check_regime(chan, q, sampling_of(o));
  json res;
  res["report"] = to_json(rep);
  if (!rep.passed()) {
    res["status"] = "regime check failed";
    emit(out, res);
    return exit_verification_failed;
  }
  RegionSearch s;
  s.seed = o.seed;
  if (o.grid) s.grid = *o.grid;
  if (o.budget) s.samples = *o.budget;
  Frontier2D f = dmc_capacity_region(chan, rep, s);
  put_csv(o, out, to_csv(f));
  if (!o.out.empty()) {
    res["region"] = summary(f);
    res["out"] = o.out;
    emit(out, res);
  }
  return exit_ok;
}

int cmd_region(const Options& o, std::ostream& out) {
  json doc = require_in(o);
  if (doc.is_object() && doc.contains("aux")) {
    // {"aux": PD over (Q1, Q, U, V, X1, X2), "channel": ...}: the inner bound.
    for (auto it = doc.begin(); it != doc.end(); ++it)
      if (it.key() != "aux" && it.key() != "channel") throw validation_error("unexpected key \"" + it.key() + "\"");
    if (!doc.contains("channel")) throw validation_error("missing key \"channel\"");
    Frontier2D f = theorem1_region(AuxAssignment(joint_from_json(doc["aux"])), dmc_from_json(doc["channel"]));
    put_csv(o, out, to_csv(f));
    if (!o.out.empty()) emit(out, summary(f));
    return exit_ok;
  }
  ChannelDoc ch = channel_from_json(doc);
  if (std::holds_alternative<DmcChannel>(ch)) return dmc_region(o, doc, out);
  GaussianGrid g = gaussian_grid_of(o);
  Frontier2D f;
  std::string regime;
  if (auto* ms = std::get_if<GaussianMultiSecondary>(&ch)) {
    if (!o.regime.empty() && parse_gaussian_regime(o.regime) != GaussianRegime::vsi)
      throw validation_error("only the VSI region is available for a multi-secondary channel");
    f = region_ms_vsi(*ms, g);
    regime = "VSI";
  } else {
    const auto& mp = std::get<GaussianMultiPrimary>(ch);
    auto part = partition_of(o, doc);
    GaussianRegime r = o.regime.empty() ? classify_gaussian(mp, part) : parse_gaussian_regime(o.regime);
    switch (r) {
      case GaussianRegime::vsi: f = region_mp_vsi(mp, g); break;
      case GaussianRegime::wi: f = region_mp_wi(mp, g); break;
      case GaussianRegime::mixed:
        if (!part) throw validation_error("the mixed regime needs --partition");
        f = region_mp_mixed(mp, *part, g);
        break;
      default: throw regime_error("channel matches no regime with a known region");
    }
    regime = to_string(r);
  }
  put_csv(o, out, to_csv(f));
  if (!o.out.empty()) {
    json res = summary(f);
    res["regime"] = regime;
    emit(out, res);
  }
  return exit_ok;
}

int cmd_dmc_capacity(const Options& o, std::ostream& out) { return dmc_region(o, require_in(o), out); }

int cmd_dpc_compare(const Options& o, std::ostream& out) {
  json doc = o.in.empty() ? json::object() : read_json(o.in);
  DpcConfig cfg = dpc_from_json(doc);
  SweepConfig sw = sweep_from_json(doc);
  if (o.grid) {
    if (*o.grid < 2) throw validation_error("--grid needs at least 2 points");
    sw.eta_points = *o.grid;
  }
  auto rows = comparison_sweep(cfg, sw);
  bool ordered = true;
  double best = 0, best_eta = 0;
  for (const auto& r : rows) {
    ordered = ordered && r.r2_cd <= r.r2_md && r.r2_md <= r.r2_outer + 1e-9 && r.r2_block <= r.r2_outer + 1e-9;
    if (r.r2_md - r.r2_cd > best) best = r.r2_md - r.r2_cd, best_eta = r.eta;
  }
  if (o.out.empty()) {
    out << sweep_csv(rows);
  } else {
    write_sweep(o.out, cfg, sw, rows);
    json res;
    res["rows"] = rows.size();
    res["ordered"] = ordered;
    res["max_md_gain"] = best;
    res["eta_at_max_gain"] = best_eta;
    res["out"] = o.out;
    emit(out, res);
  }
  return ordered ? exit_ok : exit_verification_failed;
}

int cmd_verify_fme(const Options& o, std::ostream& out) {
  json res;
  bool ok = true;
  if (!o.in.empty()) {
    json doc = read_json(o.in);
    if (!doc.is_object() || !doc.contains("aux") || !doc.contains("channel"))
      throw validation_error("verify-fme --in expects {\"aux\": ..., \"channel\": ...}");
    ok = verify_fme_appendix_b(AuxAssignment(joint_from_json(doc["aux"])), dmc_from_json(doc["channel"]));
    res["instances"] = 1;
    res["passes"] = ok ? 1 : 0;
  } else {
    std::size_t n = o.samples.value_or(100);
    auto results = parallel_map(n, [&](std::size_t i) {
      FmeInstance inst = sample_fme_instance(o.seed + i);
      return verify_fme_appendix_b(inst.aux, inst.channel);
    });
    json failures = json::array();
    std::size_t passes = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (results[i])
        ++passes;
      else
        failures.push_back(o.seed + i);
    ok = passes == n;
    res["instances"] = n;
    res["seed"] = o.seed;
    res["passes"] = passes;
    res["failed_seeds"] = failures;
  }
  res["status"] = ok ? "pass" : "mismatch";
  if (!o.out.empty()) write_text(o.out, res.dump(2) + "\n");
  emit(out, res);
  return ok ? exit_ok : exit_verification_failed;
}

int cmd_counterexample(const Options& o, std::ostream& out) {
  if (!o.in.empty()) {
    CounterexampleWitness w = witness_from_json(read_json(o.in));
    bool ok = verify_counterexample(w);
    json res;
    res["verified"] = ok;
    res["margin"] = weak_condition_margin(w.channel, w.input, w.receiver);
    emit(out, res);
    return ok ? exit_ok : exit_verification_failed;
  }
  CounterexampleSearch s;
  s.seed = o.seed;
  if (o.budget) s.budget = *o.budget;
  if (o.samples) s.regime_samples = *o.samples;
  auto w = vaezi_counterexample_search(s);
  if (!w) {
    json res;
    res["found"] = false;
    res["budget"] = s.budget;
    emit(out, res);
    return exit_verification_failed;
  }
  json wj = to_json(*w);
  if (!o.out.empty()) write_text(o.out, wj.dump(2) + "\n");
  emit(out, wj);
  return exit_ok;
}

void error_body(std::ostream& err, const char* kind, const std::string& msg) {
  json j;
  j["error"] = kind;
  j["message"] = msg;
  err << j.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rate regions of the multicast cognitive interference channel"};
  app.name("cifc");
  app.require_subcommand(1);
  Options o;

  auto in = [&](CLI::App* c, bool required) {
    auto* opt = c->add_option("--in", o.in, "input JSON");
    if (required) opt->required();
  };
  auto outp = [&](CLI::App* c) { c->add_option("--out", o.out, "output path"); };
  auto seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "RNG seed (default 0)"); };
  auto samples = [&](CLI::App* c, const char* what) { c->add_option("--samples", o.samples, what); };
  auto grid = [&](CLI::App* c, const char* what) { c->add_option("--grid", o.grid, what); };
  auto regime = [&](CLI::App* c) { c->add_option("--regime", o.regime, "VSI, VWI/WI or mixed"); };
  auto part = [&](CLI::App* c) { c->add_option("--partition", o.partition, "weak|strong receivers, e.g. \"1,2|3\""); };

  auto* classify = app.add_subcommand("classify", "interference regime of a channel");
  in(classify, true), regime(classify), part(classify), seed(classify);
  samples(classify, "random input PDs per regime check (discrete channels)");

  auto* region = app.add_subcommand("region", "rate-region frontier as CSV (R2,R1)");
  in(region, true), outp(region), regime(region), part(region), seed(region);
  samples(region, "regime-check samples (discrete channels)");
  grid(region, "eta and rho points (Gaussian) or simplex denominator (discrete)");
  region->add_option("--budget", o.budget, "random input PDs for the region search (discrete)");

  auto* dmc = app.add_subcommand("dmc-capacity", "capacity region of a discrete channel in a checked regime");
  in(dmc, true), outp(dmc), regime(dmc), part(dmc), seed(dmc);
  samples(dmc, "regime-check samples");
  grid(dmc, "simplex denominator for the input grid, 0 disables");
  dmc->add_option("--budget", o.budget, "random input PDs for the region search");

  auto* dpc = app.add_subcommand("dpc-compare", "CD/MD-DPC, block expansion and outer bound over eta");
  in(dpc, false), outp(dpc);
  grid(dpc, "eta points");

  auto* fme = app.add_subcommand("verify-fme", "projected codebook constraints against the inner bound");
  in(fme, false), outp(fme), seed(fme);
  samples(fme, "seeded instances (default 100)");

  auto* cex = app.add_subcommand("counterexample", "search or re-verify a VSI channel violating VWI");
  in(cex, false), outp(cex), seed(cex);
  samples(cex, "VSI-check samples per channel");
  cex->add_option("--budget", o.budget, "channels examined");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << app.help();
    error_body(err, "usage", e.what());
    return exit_invalid;
  }

  try {
    if (classify->parsed()) return cmd_classify(o, out);
    if (region->parsed()) return cmd_region(o, out);
    if (dmc->parsed()) return cmd_dmc_capacity(o, out);
    if (dpc->parsed()) return cmd_dpc_compare(o, out);
    if (fme->parsed()) return cmd_verify_fme(o, out);
    return cmd_counterexample(o, out);
  } catch (const validation_error& e) {
    error_body(err, "validation", e.what());
  } catch (const regime_error& e) {
    error_body(err, "regime", e.what());
  } catch (const numeric_error& e) {
    error_body(err, "numeric", e.what());
  } catch (const nlohmann::json::exception& e) {
    error_body(err, "validation", e.what());
  }
  return exit_invalid;
}

}  // namespace cifc
