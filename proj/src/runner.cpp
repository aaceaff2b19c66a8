#include "fpp/runner.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fpp/animals.hpp"
#include "fpp/experiments.hpp"
#include "fpp/influence.hpp"
#include "fpp/util.hpp"

namespace fpp {

namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct RunCommon {
  std::string out_dir;
  std::uint64_t seed = 1;
  int threads = 1;
};

RunCommon read_common(ConfigView& v) {
  RunCommon c;
  c.out_dir = v.get_string("run", "output_dir", "out");
  const std::string seed_s = v.get_string("run", "seed", "1");
  const char* last = seed_s.data() + seed_s.size();
  const auto [p, ec] = std::from_chars(seed_s.data(), last, c.seed, 10);
  if (ec != std::errc() || p != last)
    throw ConfigError("run.seed must be an unsigned 64-bit integer, got '" + seed_s + "'");
  c.threads = static_cast<int>(v.get_int("run", "threads", 1));
  if (c.threads < 0) throw ConfigError("run.threads must be >= 0 (0 = all cores)");
  if (c.out_dir.empty()) throw ConfigError("run.output_dir must not be empty");
  return c;
}

Indexing parse_indexing(const std::string& s, const char* what) {
  if (s == "site") return Indexing::site;
  if (s == "bond") return Indexing::bond;
  throw ConfigError(std::string(what) + " must be 'site' or 'bond', got '" + s + "'");
}

InitState parse_init(const std::string& s) {
  if (s == "all-plus") return InitState::all_plus;
  if (s == "all-minus") return InitState::all_minus;
  if (s == "random") return InitState::random;
  throw ConfigError("model.init must be all-plus/all-minus/random, got '" + s + "'");
}

LocalKernel read_kernel_cfg(ConfigView& v, const std::string& sec, int dim, Indexing version,
                            bool force_positive_alphabet) {
  const std::string kind = v.get_string(sec, "kernel", "ising");
  const int slots = version == Indexing::site ? 2 * dim : 4 * dim - 2;
  if (kind == "ising") {
    const double beta = v.get_double(sec, "beta", 0.2);
    const double h = v.get_double(sec, "h", 0.0);
    LocalKernel k = version == Indexing::site ? LocalKernel::ising(dim, beta, h)
                                              : LocalKernel::ising_bond(dim, beta, h);
    if (force_positive_alphabet || v.has(sec, "alphabet"))
      k = k.with_alphabet(v.get_doubles(sec, "alphabet", "1,2"));
    return k;
  }
  if (kind == "iid") {
    auto alphabet = v.get_doubles(sec, "alphabet", "1,2");
    auto probs = v.get_doubles(sec, "probs", "0.5,0.5");
    return LocalKernel::iid(dim, slots, std::move(alphabet), std::move(probs));
  }
  if (kind == "file") return read_kernel_file(v.require_string(sec, "kernel_file"));
  throw ConfigError(sec + ".kernel must be ising/iid/file, got '" + kind + "'");
}

ModelSpec read_model(ConfigView& v) {
  ModelSpec m;
  const std::string kind = v.get_string("model", "kind", "iid");
  if (kind == "iid") {
    m.kind = ModelKind::iid;
    m.iid_indexing = parse_indexing(v.get_string("model", "indexing", "bond"), "model.indexing");
    m.values = v.get_doubles("model", "values", "1,2");
    m.probs = v.get_doubles("model", "probs", "0.5,0.5");
  } else if (kind == "ising-site" || kind == "ising-bond" || kind == "ising-signchange") {
    m.kind = kind == "ising-site"  ? ModelKind::ising_site
             : kind == "ising-bond" ? ModelKind::ising_bond
                                    : ModelKind::ising_signchange;
    m.beta = v.get_double("model", "beta", 0.2);
    m.h = v.get_double("model", "h", 0.0);
    if (m.kind != ModelKind::ising_signchange) {
      m.a = v.get_double("model", "a", 1.0);
      m.b = v.get_double("model", "b", 2.0);
    }
    const std::string sampler = v.get_string("model", "sampler", "gibbs");
    if (sampler == "gibbs") m.sampler = SamplerKind::gibbs;
    else if (sampler == "cftp") m.sampler = SamplerKind::cftp;
    else throw ConfigError("model.sampler must be gibbs or cftp, got '" + sampler + "'");
    m.sweeps = static_cast<int>(v.get_int("model", "sweeps", 64));
    m.init = parse_init(v.get_string("model", "init", "random"));
  } else if (kind == "mrf") {
    m.kind = ModelKind::mrf;
    const int dim = static_cast<int>(v.get_int("model", "dim", 2));
    m.kernel = read_kernel_cfg(v, "model", dim, Indexing::site, /*force_positive_alphabet=*/true);
    m.sweeps = static_cast<int>(v.get_int("model", "sweeps", 64));
    m.init = parse_init(v.get_string("model", "init", "random"));
  } else {
    throw ConfigError("model.kind must be iid/ising-site/ising-bond/ising-signchange/mrf, got '" + kind +
                      "'");
  }
  m.validate();
  return m;
}

std::vector<Coord> read_coords(ConfigView& v, const std::string& sec, const std::string& key,
                               const std::string& def) {
  std::vector<Coord> out;
  for (std::int64_t x : v.get_ints(sec, key, def)) out.push_back(static_cast<Coord>(x));
  return out;
}

Vertex read_vertex(ConfigView& v, const std::string& sec, const std::string& key, const std::string& def) {
  const auto cs = read_coords(v, sec, key, def);
  return Vertex(std::span<const Coord>(cs.data(), cs.size()));
}

void write_text(const fs::path& p, const std::string& content) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw ConfigError("cannot open for writing: " + p.string());
  os << content;
  os.flush();
  if (!os) throw ConfigError("write failed: " + p.string());
}

ordered_json materialized_json(const ConfigView& v) {
  ordered_json o = ordered_json::object();
  for (const auto& [k, val] : v.materialized()) o[k] = val;
  return o;
}

ordered_json envelope(const std::string& sub, const ConfigView& v, std::vector<std::string> outputs) {
  ordered_json j;
  j["tool"] = "fpplab";
  j["subcommand"] = sub;
  j["config_fingerprint"] = hex16(v.fingerprint());
  j["config"] = materialized_json(v);
  j["outputs"] = outputs;
  return j;
}

RunOutcome finish(const std::string& sub, const ConfigView& v, const RunCommon& common,
                  std::vector<std::string> outputs, ordered_json results, int status = 0,
                  std::string error = {}) {
  ordered_json j = envelope(sub, v, std::move(outputs));
  j["results"] = std::move(results);
  if (status != 0) j["error"] = error;
  RunOutcome out;
  out.status = status;
  out.error = std::move(error);
  out.summary_json = j.dump(2) + "\n";
  fs::create_directories(common.out_dir);
  write_text(fs::path(common.out_dir) / "summary.json", out.summary_json);
  return out;
}

// --- subcommands ---

RunOutcome run_generate(const Config& cfg) {
  ConfigView v(cfg);
  const RunCommon common = read_common(v);
  const ModelSpec model = read_model(v);
  const auto lo = read_coords(v, "generate", "box_lo", "-8,-8");
  const auto hi = read_coords(v, "generate", "box_hi", "8,8");
  const std::string boundary = v.get_string("generate", "boundary", "open");
  const std::string file = v.get_string("generate", "file", "field.txt");
  const auto rep = static_cast<std::uint64_t>(v.get_int("generate", "rep", 0));
  if (boundary != "open" && boundary != "torus")
    throw ConfigError("generate.boundary must be open or torus");
  const BoxSpec box(lo, hi, boundary == "open" ? Boundary::open : Boundary::torus);
  const WeightField field = boundary == "open" ? sample_weight_field(model, box, common.seed, rep)
                                               : sample_weight_field_torus(model, box, common.seed, rep);
  fs::create_directories(common.out_dir);
  write_field_file((fs::path(common.out_dir) / file).string(), field);

  double total = 0;
  std::int64_t count = 0;
  if (field.indexing() == Indexing::site) {
    for (double x : field.raw()) total += x;
    count = box.num_vertices();
  } else {
    for (Index vi = 0; vi < box.num_vertices(); ++vi)
      for (int ax = 0; ax < box.dim(); ++ax)
        if (field.bond_present(vi, ax)) {
          total += field.bond(vi, ax);
          ++count;
        }
  }
  ordered_json res;
  res["model"] = to_string(model.kind);
  res["box"] = box.to_string();
  res["indexing"] = to_string(field.indexing());
  res["weight_count"] = count;
  res["mean_weight"] = total / static_cast<double>(count);
  return finish("generate", v, common, {file}, std::move(res));
}

RunOutcome run_passage(const Config& cfg) {
  ConfigView v(cfg);
  const RunCommon common = read_common(v);
  const std::string field_file = v.get_string("passage", "field_file", "");
  const Vertex dst = read_vertex(v, "passage", "v", "8,0");
  const double c1 = v.get_double("passage", "c1", 0.0);
  const std::string export_name = v.get_string("passage", "export", "geodesic.txt");

  Vertex src = Vertex::zero(dst.dim());
  WeightField field = [&]() {
    if (!field_file.empty()) {
      WeightField f = read_field_file(field_file);
      src = read_vertex(v, "passage", "src", "0,0");
      return f.box().mode() == Boundary::torus ? open_window(f) : f;
    }
    const ModelSpec model = read_model(v);
    const double margin = v.get_double("passage", "margin_factor", 1.5);
    const auto rep = static_cast<std::uint64_t>(v.get_int("passage", "rep", 0));
    return sample_weight_field(model, scan_window(dst, margin), common.seed, rep);
  }();
  if (src.dim() != dst.dim()) throw ConfigError("passage: src/v dimension mismatch");

  const PassageResult res = c1 > 0 ? passage_time_hop_constrained(field, src, dst, c1)
                                   : passage_time(field, src, dst);
  fs::create_directories(common.out_dir);
  write_geodesic_file((fs::path(common.out_dir) / export_name).string(), res);

  ordered_json r;
  r["src"] = src.to_string();
  r["dst"] = dst.to_string();
  r["indexing"] = to_string(res.indexing);
  r["value"] = res.value;
  r["edge_count"] = res.edge_count;
  r["touched_boundary"] = res.touched_boundary;
  r["hop_budget"] = c1 > 0 ? ordered_json(static_cast<std::int64_t>(
                                 std::ceil(c1 * static_cast<double>(l1_norm(dst - src)) - 1e-9)))
                           : ordered_json(nullptr);
  return finish("passage", v, common, {export_name}, std::move(r));
}

RunOutcome run_variance_scan(const Config& cfg) {
  ConfigView v(cfg);
  const RunCommon common = read_common(v);
  ScanSpec spec;
  spec.model = read_model(v);
  spec.direction = read_coords(v, "scan", "direction", "1,0");
  spec.v_norms = v.get_ints("scan", "v_list", "16,32,64");
  spec.replications = static_cast<int>(v.get_int("scan", "replications", 400));
  spec.margin_factor = v.get_double("scan", "margin_factor", 1.5);
  spec.boundary_threshold = v.get_double("scan", "boundary_threshold", 0.001);
  spec.bootstrap_resamples = static_cast<int>(v.get_int("scan", "bootstrap", 2000));
  spec.seed = common.seed;
  spec.threads = common.threads;
  spec.path_c1 = v.get_double("scan", "path_c1", 0.0);
  spec.record_raw = v.get_bool("scan", "raw", false);

  const ScanResult result = variance_scan(spec);

  fs::create_directories(common.out_dir);
  std::vector<std::string> outputs{"scan.csv"};
  {
    std::ostringstream ss;
    write_scan_csv(ss, result, v.fingerprint());
    write_text(fs::path(common.out_dir) / "scan.csv", ss.str());
  }
  if (spec.record_raw) {
    std::ostringstream ss;
    write_raw_jsonl(ss, result);
    write_text(fs::path(common.out_dir) / "raw.jsonl", ss.str());
    outputs.push_back("raw.jsonl");
  }

  ordered_json rows = ordered_json::array();
  std::string violation;
  for (const ScanRow& r : result.rows) {
    ordered_json jr;
    jr["v"] = r.v_norm;
    jr["replications"] = r.replications;
    jr["mean_t"] = r.mean_t;
    jr["var_t"] = r.var_t;
    jr["var_ci_lo"] = r.var_ci_lo;
    jr["var_ci_hi"] = r.var_ci_hi;
    jr["var_over_v"] = r.var_over_v;
    jr["var_logv_over_v"] = r.var_logv_over_v;
    jr["boundary_fraction"] = r.boundary_fraction;
    jr["valid"] = r.valid;
    if (r.geodesic_violations >= 0) jr["geodesic_violations"] = r.geodesic_violations;
    if (r.connectivity_agreement >= 0) jr["connectivity_agreement"] = r.connectivity_agreement;
    if (r.path_exceed_fraction >= 0) jr["path_exceed_fraction"] = r.path_exceed_fraction;
    rows.push_back(std::move(jr));
    if (!r.valid && violation.empty())
      violation = "validity: boundary touch fraction " + fmt_double(r.boundary_fraction) + " at |v|=" +
                  std::to_string(r.v_norm) + " exceeds threshold " + fmt_double(spec.boundary_threshold);
  }
  ordered_json res;
  res["model"] = to_string(spec.model.kind);
  res["rows"] = std::move(rows);
  res["valid"] = result.valid();
  if (!result.valid())
    return finish("variance-scan", v, common, std::move(outputs), std::move(res), 3, violation);
  return finish("variance-scan", v, common, std::move(outputs), std::move(res));
}

RunOutcome run_shift_test(const Config& cfg) {
  ConfigView v(cfg);
  const RunCommon common = read_common(v);
  const ModelSpec model = read_model(v);
  const auto direction = read_coords(v, "shift", "direction", "1,0");
  const std::int64_t v_norm = v.get_int("shift", "v", 64);
  const int samples = static_cast<int>(v.get_int("shift", "samples", 500));
  const double margin = v.get_double("shift", "margin_factor", 1.5);
  const int bootstrap = static_cast<int>(v.get_int("shift", "bootstrap", 2000));
  const Vertex target = scan_target(direction, v_norm);
  const ShiftReport rep =
      shift_invariance_test(model, target, samples, margin, bootstrap, common.seed, common.threads);
  fs::create_directories(common.out_dir);
  ordered_json res;
  res["model"] = to_string(model.kind);
  res["v"] = rep.v_norm;
  res["samples"] = rep.samples;
  res["m"] = rep.m;
  res["ks_stat"] = rep.ks_stat;
  res["ks_p"] = rep.ks_p;
  res["var_plain"] = rep.var_plain;
  res["var_shifted"] = rep.var_shifted;
  res["var_diff"] = rep.var_diff;
  res["var_diff_ci_lo"] = rep.diff_ci_lo;
  res["var_diff_ci_hi"] = rep.diff_ci_hi;
  return finish("shift-test", v, common, {}, std::move(res));
}

RunOutcome run_animals(const Config& cfg) {
  ConfigView v(cfg);
  const RunCommon common = read_common(v);
  const int d = static_cast<int>(v.get_int("animals", "dim", 2));
  const auto ns64 = v.get_ints("animals", "n_list", "2,3,4,5,6,7,8");
  std::vector<int> ns;
  for (std::int64_t n : ns64) ns.push_back(static_cast<int>(n));
  const int reps = static_cast<int>(v.get_int("animals", "replications", 200));
  const auto values = v.get_doubles("animals", "values", "0,1");
  const auto probs = v.get_doubles("animals", "probs", "0.5,0.5");
  const Index cap = v.get_int("animals", "cap", 4'000'000);
  const Distribution dist = Distribution::finite(values, probs);
  const auto rows = martin_ratio_experiment(dist, d, ns, reps, common.seed, cap);

  fs::create_directories(common.out_dir);
  std::ostringstream csv;
  csv << "# fpplab animals config=" << hex16(v.fingerprint()) << "\n";
  csv << "n,replications,mean_score_over_n,ci_lo,ci_hi,integral,ratio\n";
  for (const MartinRow& r : rows)
    csv << r.n << ',' << r.replications << ',' << fmt_double(r.mean_score_over_n) << ','
        << fmt_double(r.ci_lo) << ',' << fmt_double(r.ci_hi) << ',' << fmt_double(r.integral) << ','
        << fmt_double(r.ratio) << "\n";
  write_text(fs::path(common.out_dir) / "animals.csv", csv.str());

  ordered_json jrows = ordered_json::array();
  for (const MartinRow& r : rows) {
    ordered_json jr;
    jr["n"] = r.n;
    jr["replications"] = r.replications;
    jr["mean_score_over_n"] = r.mean_score_over_n;
    jr["ci_lo"] = r.ci_lo;
    jr["ci_hi"] = r.ci_hi;
    jr["ratio"] = r.ratio;
    jrows.push_back(std::move(jr));
  }
  ordered_json res;
  res["dim"] = d;
  res["integral"] = rows.empty() ? 0.0 : rows[0].integral;
  res["rows"] = std::move(jrows);
  return finish("animals", v, common, {"animals.csv"}, std::move(res));
}

RunOutcome run_influence_check(const Config& cfg) {
  ConfigView v(cfg);
  const RunCommon common = read_common(v);
  const std::string source = v.get_string("influence", "source", "passage");
  const std::string export_table = v.get_string("influence", "export_table", "");
  FunctionTable table = [&]() {
    if (source == "file") return read_function_table_file(v.require_string("influence", "table_file"));
    if (source != "passage")
      throw ConfigError("influence.source must be passage or file, got '" + source + "'");
    const auto lo = read_coords(v, "influence", "box_lo", "0,0");
    const auto hi = read_coords(v, "influence", "box_hi", "2,2");
    const Vertex src = read_vertex(v, "influence", "src", "0,0");
    const Vertex dst = read_vertex(v, "influence", "dst", "2,2");
    const auto values = v.get_doubles("influence", "values", "1,2");
    const auto probs = v.get_doubles("influence", "probs", "0.5,0.5");
    return passage_function_table(BoxSpec(lo, hi, Boundary::open), src, dst, values, probs);
  }();

  const EfronSteinReport es = efron_stein_check(table);
  const TalagrandReport tal = talagrand_functional(table);
  int holds = 0, vacuous = 0;
  std::vector<int> fails;
  for (int i = 0; i < table.n(); ++i) {
    switch (second_moment_check(delta(table, i))) {
      case SecondMomentVerdict::holds: ++holds; break;
      case SecondMomentVerdict::vacuous: ++vacuous; break;
      case SecondMomentVerdict::fails: fails.push_back(i); break;
    }
  }

  fs::create_directories(common.out_dir);
  std::vector<std::string> outputs;
  if (!export_table.empty()) {
    write_function_table_file((fs::path(common.out_dir) / export_table).string(), table);
    outputs.push_back(export_table);
  }

  ordered_json res;
  res["n"] = table.n();
  res["q"] = table.q();
  res["variance"] = es.variance;
  res["efron_stein_sum"] = es.sum_sq;
  res["efron_stein_holds"] = es.holds;
  res["talagrand_sum"] = tal.sum_terms;
  res["talagrand_ratio"] = tal.ratio;
  res["second_moment_holds"] = holds;
  res["second_moment_vacuous"] = vacuous;
  res["second_moment_fails"] = fails;
  return finish("influence-check", v, common, std::move(outputs), std::move(res));
}

RunOutcome run_hn_check(const Config& cfg) {
  ConfigView v(cfg);
  const RunCommon common = read_common(v);
  const int dim = static_cast<int>(v.get_int("hn", "dim", 2));
  const Indexing version = parse_indexing(v.get_string("hn", "version", "site"), "hn.version");
  const LocalKernel kernel = read_kernel_cfg(v, "hn", dim, version, /*force_positive_alphabet=*/false);
  const HnReport rep = hn_gamma(kernel, version);
  fs::create_directories(common.out_dir);
  ordered_json res;
  res["dim"] = dim;
  res["version"] = to_string(version);
  res["gamma"] = rep.gamma;
  res["threshold"] = rep.threshold;
  res["satisfied"] = rep.satisfied;
  return finish("hn-check", v, common, {}, std::move(res));
}

RunOutcome run_probe(const Config& cfg) {
  ConfigView v(cfg);
  const RunCommon common = read_common(v);
  const ModelSpec model = read_model(v);
  const auto lo = read_coords(v, "probe", "box_lo", "0,0");
  const auto hi = read_coords(v, "probe", "box_hi", "15,15");
  const BoxSpec torus(lo, hi, Boundary::torus);
  const std::string vspec = v.get_string("probe", "v", "center");
  Vertex target = Vertex::zero(torus.dim());
  if (vspec == "center") {
    for (int a = 0; a < torus.dim(); ++a)
      target[a] = static_cast<Coord>(torus.lo(a) + torus.extent(a) / 2);
  } else {
    const auto toks = split(vspec, ',');
    if (static_cast<int>(toks.size()) != torus.dim())
      throw ConfigError("probe.v needs 'center' or " + std::to_string(torus.dim()) + " coordinates");
    for (int a = 0; a < torus.dim(); ++a) {
      const auto c = parse_int(toks[static_cast<std::size_t>(a)]);
      if (!c) throw ConfigError("probe.v has a bad coordinate: " + toks[static_cast<std::size_t>(a)]);
      target[a] = static_cast<Coord>(*c);
    }
  }
  const auto k64 = v.get_ints("probe", "k_list", "1,2,4,8");
  std::vector<int> klist;
  for (std::int64_t k : k64) klist.push_back(static_cast<int>(k));
  const std::int64_t reps = v.get_int("probe", "replications", 10000);

  const auto rows = determination_probe(model, torus, target, klist, reps, common.seed);

  fs::create_directories(common.out_dir);
  std::ostringstream csv;
  csv << "# fpplab probe-determination config=" << hex16(v.fingerprint()) << "\n";
  csv << "k,replications,undetermined,estimate,ci_lo,ci_hi\n";
  for (const ProbeRow& r : rows)
    csv << r.k << ',' << r.replications << ',' << r.undetermined << ',' << fmt_double(r.estimate) << ','
        << fmt_double(r.ci_lo) << ',' << fmt_double(r.ci_hi) << "\n";
  write_text(fs::path(common.out_dir) / "probe.csv", csv.str());

  bool nonincreasing = true;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].estimate > rows[i - 1].estimate) nonincreasing = false;

  ordered_json jrows = ordered_json::array();
  for (const ProbeRow& r : rows) {
    ordered_json jr;
    jr["k"] = r.k;
    jr["replications"] = r.replications;
    jr["undetermined"] = r.undetermined;
    jr["estimate"] = r.estimate;
    jr["ci_lo"] = r.ci_lo;
    jr["ci_hi"] = r.ci_hi;
    jrows.push_back(std::move(jr));
  }
  ordered_json res;
  res["model"] = to_string(model.kind);
  res["box"] = torus.to_string();
  res["v"] = target.to_string();
  res["nonincreasing"] = nonincreasing;
  res["rows"] = std::move(jrows);
  return finish("probe-determination", v, common, {"probe.csv"}, std::move(res));
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names{"generate",       "passage",      "variance-scan",
                                              "shift-test",     "animals",      "influence-check",
                                              "hn-check",       "probe-determination"};
  return names;
}

RunOutcome run_subcommand(const std::string& subcommand, const Config& cfg) {
  try {
    if (subcommand == "generate") return run_generate(cfg);
    if (subcommand == "passage") return run_passage(cfg);
    if (subcommand == "variance-scan") return run_variance_scan(cfg);
    if (subcommand == "shift-test") return run_shift_test(cfg);
    if (subcommand == "animals") return run_animals(cfg);
    if (subcommand == "influence-check") return run_influence_check(cfg);
    if (subcommand == "hn-check") return run_hn_check(cfg);
    if (subcommand == "probe-determination") return run_probe(cfg);
    RunOutcome out;
    out.status = 2;
    out.error = "unknown subcommand '" + subcommand + "'";
    return out;
  } catch (const ValidityError& e) {
    return RunOutcome{3, "", std::string("validity: ") + e.what()};
  } catch (const ConfigError& e) {
    return RunOutcome{2, "", std::string("usage: ") + e.what()};
  } catch (const DomainError& e) {
    return RunOutcome{2, "", std::string("usage: ") + e.what()};
  } catch (const CoalescenceError& e) {
    return RunOutcome{3, "", std::string("validity: ") + e.what()};
  } catch (const std::exception& e) {
    return RunOutcome{1, "", std::string("error: ") + e.what()};
  }
}

}  // namespace fpp
