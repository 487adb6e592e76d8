// Command-line front end: declarative JSON configs in, abstract
// distributions, operator dumps and comparison reports out.
//
// Exit codes: 0 success, 2 config/parse problem, 3 enumeration budget
// refusal, 1 anything else. Errors go to stderr as one JSON line.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pai/pai.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using nlohmann::json;

namespace {

struct CommonArgs {
  std::string network_path;
  std::string config_path;
  std::string out_dir;
  bool exact = false;
  bool emit_plot_data = false;
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
};

std::string slurp(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw pai::ConfigError(std::string("cannot open ") + what + ": " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json parse_config_json(const std::string& text, const std::string& path) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw pai::ParseError("config " + path + ": " + e.what());
  }
}

template <class S>
S scalar_from_json(const json& v, const std::string& where) {
  if constexpr (pai::scalar_traits<S>::is_exact) {
    if (v.is_string()) return pai::rational_from_decimal(v.get<std::string>());
    if (v.is_number_integer()) return pai::Rational(v.get<long long>());
    if (v.is_number_float()) return pai::nearest_rational(v.get<double>());
  } else {
    if (v.is_string()) return std::stod(v.get<std::string>());
    if (v.is_number()) return v.get<double>();
  }
  throw pai::ConfigError(where + ": expected a number");
}

template <class S>
pai::GridSpec<S> parse_grid_spec(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("axes") || !j["axes"].is_array() || j["axes"].empty())
    throw pai::ConfigError(where + ": expected {\"axes\": [...]}");
  pai::GridSpec<S> spec;
  for (std::size_t a = 0; a < j["axes"].size(); ++a) {
    const auto& ja = j["axes"][a];
    std::string axis_where = where + ".axes[" + std::to_string(a) + "]";
    if (ja.contains("values")) {
      pai::AxisValues<S> values;
      for (const auto& v : ja["values"])
        values.values.push_back(scalar_from_json<S>(v, axis_where));
      spec.axes.push_back(std::move(values));
    } else if (ja.contains("low") && ja.contains("high") && ja.contains("step")) {
      spec.axes.push_back(pai::AxisRange<S>{scalar_from_json<S>(ja["low"], axis_where),
                                            scalar_from_json<S>(ja["high"], axis_where),
                                            scalar_from_json<S>(ja["step"], axis_where)});
    } else {
      throw pai::ConfigError(axis_where + ": need either values or low/high/step");
    }
  }
  return spec;
}

template <class S>
pai::PartitionChoice<S> parse_partition_choice(const json& j, const std::string& where) {
  pai::PartitionChoice<S> choice;
  if (!j.is_object() || !j.contains("kind"))
    throw pai::ConfigError(where + ": expected {\"kind\": ...}");
  std::string kind = j["kind"].get<std::string>();
  if (kind == "sign") {
    choice.kind = pai::PartitionChoice<S>::Kind::sign;
  } else if (kind == "identity") {
    choice.kind = pai::PartitionChoice<S>::Kind::identity;
  } else if (kind == "grid") {
    choice.kind = pai::PartitionChoice<S>::Kind::grid;
    if (!j.contains("cell_size"))
      throw pai::ConfigError(where + ": grid partition needs cell_size");
    for (const auto& v : j["cell_size"])
      choice.cell_size.push_back(scalar_from_json<S>(v, where + ".cell_size"));
    if (j.contains("anchor"))
      for (const auto& v : j["anchor"])
        choice.anchor.push_back(scalar_from_json<S>(v, where + ".anchor"));
  } else {
    throw pai::ConfigError(where + ": unknown partition kind '" + kind + "'");
  }
  return choice;
}

pai::Rational lattice_step_from(const json& v, const std::string& where) {
  if (v.is_string()) return pai::rational_from_decimal(v.get<std::string>());
  if (v.is_number_integer()) return pai::Rational(v.get<long long>());
  if (v.is_number_float()) return pai::nearest_rational(v.get<double>());
  throw pai::ConfigError(where + ": expected a lattice step");
}

template <class S>
struct LoadedRun {
  pai::AnyDomain<S> domain;
  pai::Distribution<S> dist;
  pai::PipelinePlan<S> plan;
  std::size_t budget = 10'000'000;
};

template <class S>
LoadedRun<S> load_run(const json& cfg, const fs::path& config_dir, const CommonArgs& args,
                      std::size_t layer_count) {
  if (!cfg.is_object()) throw pai::ConfigError("config: top level must be an object");
  if (!cfg.contains("input")) throw pai::ConfigError("config: missing 'input'");
  const auto& input = cfg["input"];

  pai::AnyDomain<S> domain = [&]() -> pai::AnyDomain<S> {
    if (input.contains("grid"))
      return pai::discretize(parse_grid_spec<S>(input["grid"], "input.grid"));
    if (input.contains("zonotope")) {
      const auto& jz = input["zonotope"];
      pai::Zonotope z;
      if (jz.contains("file"))
        z = pai::load_zonotope_file((config_dir / jz["file"].get<std::string>()).string());
      else
        z = pai::parse_zonotope(jz.dump());
      if (!jz.contains("lattice"))
        throw pai::ConfigError("input.zonotope: missing 'lattice' step");
      auto step = lattice_step_from(jz["lattice"], "input.zonotope.lattice");
      auto points = pai::zonotope_lattice_points(z, step);
      if (points.empty()) throw pai::ConfigError("input.zonotope: no lattice points inside");
      return pai::lattice_point_domain<S>(points);
    }
    if (input.contains("points")) {
      std::vector<std::vector<S>> points;
      for (const auto& jp : input["points"]) {
        std::vector<S> p;
        for (const auto& v : jp) p.push_back(scalar_from_json<S>(v, "input.points"));
        points.push_back(std::move(p));
      }
      if (points.empty()) throw pai::ConfigError("input.points: empty");
      const std::size_t dim = points.front().size();
      return pai::PointDomain<S>(dim, std::move(points));
    }
    throw pai::ConfigError("config: input needs 'grid', 'zonotope' or 'points'");
  }();

  const std::size_t n = pai::domain_size(domain);
  pai::Distribution<S> dist = [&]() -> pai::Distribution<S> {
    if (!cfg.contains("distribution") || cfg["distribution"] == "uniform")
      return pai::Distribution<S>::uniform(n);
    const auto& jd = cfg["distribution"];
    if (jd.is_object() && jd.contains("index"))
      return pai::Distribution<S>::point_mass(n, jd["index"].get<std::size_t>());
    if (jd.is_object() && jd.contains("point")) {
      std::vector<S> p;
      for (const auto& v : jd["point"])
        p.push_back(scalar_from_json<S>(v, "distribution.point"));
      return pai::Distribution<S>::point_mass(n, pai::domain_snap(domain, p));
    }
    if (jd.is_object() && jd.contains("csv")) {
      std::ifstream in(config_dir / jd["csv"].get<std::string>());
      if (!in) throw pai::ConfigError("distribution.csv: cannot open file");
      return pai::read_distribution_csv<S>(in, n);
    }
    throw pai::ConfigError("config: unsupported 'distribution'");
  }();
  if (!dist.is_normalized())
    throw pai::ConfigError("config: input distribution is not normalized");

  pai::PipelinePlan<S> plan;
  if (cfg.contains("partitions")) {
    const auto& jp = cfg["partitions"];
    if (jp.contains("input"))
      plan.input_partition = parse_partition_choice<S>(jp["input"], "partitions.input");
    if (jp.contains("output"))
      plan.output_partition = parse_partition_choice<S>(jp["output"], "partitions.output");
  }
  if (cfg.contains("output_domains")) {
    const auto& jo = cfg["output_domains"];
    std::string kind = jo.value("kind", "image");
    if (kind == "grids") {
      plan.output_domains.exact_image = false;
      if (!jo.contains("layers") || jo["layers"].size() != layer_count)
        throw pai::ConfigError("output_domains.layers: need one grid per network layer");
      for (std::size_t t = 0; t < layer_count; ++t)
        plan.output_domains.layer_grids.push_back(parse_grid_spec<S>(
            jo["layers"][t], "output_domains.layers[" + std::to_string(t) + "]"));
    } else if (kind != "image") {
      throw pai::ConfigError("output_domains.kind: expected 'image' or 'grids'");
    }
  }
  if (cfg.contains("transformer")) {
    const auto& jt = cfg["transformer"];
    std::string mode = jt.value("mode", "exact");
    if (mode == "sampled") {
      plan.transformer.sampled = true;
      plan.transformer.sample_count = jt.value("samples", std::size_t{256});
      plan.transformer.seed = jt.value("seed", std::uint64_t{0});
    } else if (mode != "exact") {
      throw pai::ConfigError("transformer.mode: expected 'exact' or 'sampled'");
    }
  }
  if (args.samples) plan.transformer.sample_count = *args.samples;
  if (args.seed) plan.transformer.seed = *args.seed;
  plan.threads = args.threads ? args.threads : cfg.value("threads", 0u);

  LoadedRun<S> run{std::move(domain), std::move(dist), std::move(plan), 10'000'000};
  if (cfg.contains("budget"))
    run.budget = cfg["budget"].value("max_evaluations", std::size_t{10'000'000});
  return run;
}

std::string config_hash(const std::string& network_text, const std::string& config_text) {
  return pai::hex64(pai::fnv1a64(config_text, pai::fnv1a64(network_text)));
}

template <class S>
ojson dist_to_json(const pai::Distribution<S>& d, const pai::Partition& p) {
  ojson out = ojson::object();
  for (const auto& [cell, mass] : d.entries())
    out[p.cells()[cell].label] = pai::scalar_traits<S>::to_double(mass);
  return out;
}

ojson provenance_to_json(const pai::Provenance& prov) {
  if (prov.kind == pai::Provenance::Kind::exact) return ojson("exact");
  ojson out = ojson::object();
  out["sampled"] = ojson{{"k", prov.sample_count}, {"seed", prov.seed}};
  return out;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw pai::Error("cannot write " + path.string());
  out << text;
}

template <class S>
void write_distribution_file(const fs::path& path, const pai::Distribution<S>& d) {
  std::ostringstream out;
  pai::write_distribution_csv(out, d);
  write_text_file(path, out.str());
}

template <class S>
void write_operator_file(const fs::path& path, const pai::LinearOperator<S>& op) {
  std::ostringstream out;
  pai::write_operator_csv(out, op);
  write_text_file(path, out.str());
}

// gnuplot-friendly table: cell index, probability, label.
template <class S>
void write_plot_data(const fs::path& path, const pai::Distribution<S>& d,
                     const pai::Partition& p) {
  std::ostringstream out;
  out << "# cell probability label\n";
  if (p.cell_count() <= 4096) {
    for (std::size_t c = 0; c < p.cell_count(); ++c)
      out << c << ' ' << pai::format_probability(pai::scalar_traits<S>::to_double(d.at(c)))
          << ' ' << p.cells()[c].label << '\n';
  } else {
    for (const auto& [cell, mass] : d.entries())
      out << cell << ' ' << pai::format_probability(pai::scalar_traits<S>::to_double(mass))
          << ' ' << p.cells()[cell].label << '\n';
  }
  write_text_file(path, out.str());
}

std::string layer_tag(std::size_t t) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "layer_%02zu", t);
  return buf;
}

template <class S>
int run_analyze(const CommonArgs& args) {
  const std::string network_text = slurp(args.network_path, "network file");
  const std::string config_text = slurp(args.config_path, "config file");
  pai::Network net = pai::load_network(network_text);
  json cfg = parse_config_json(config_text, args.config_path);
  auto run = load_run<S>(cfg, fs::path(args.config_path).parent_path(), args,
                         net.layer_count());

  auto result = pai::run_pipeline<S>(net, run.domain, run.dist, run.plan);

  fs::create_directories(args.out_dir);
  write_distribution_file(fs::path(args.out_dir) / "input_abstract.csv",
                          result.input_abstract);
  for (std::size_t t = 0; t < result.layers.size(); ++t)
    write_distribution_file(fs::path(args.out_dir) / (layer_tag(t) + ".csv"),
                            result.layers[t].abstract_dist);
  if (args.emit_plot_data) {
    write_plot_data(fs::path(args.out_dir) / "plot_input.dat", result.input_abstract,
                    *result.input_partition);
    for (std::size_t t = 0; t < result.layers.size(); ++t)
      write_plot_data(fs::path(args.out_dir) / ("plot_" + layer_tag(t) + ".dat"),
                      result.layers[t].abstract_dist, *result.layers[t].partition);
  }

  ojson report;
  report["command"] = "analyze";
  report["config_hash"] = config_hash(network_text, config_text);
  report["exact_arithmetic"] = pai::scalar_traits<S>::is_exact;
  report["input"] = ojson{{"states", pai::domain_size(run.domain)},
                          {"cells", result.input_partition->cell_count()},
                          {"abstract", dist_to_json(result.input_abstract,
                                                    *result.input_partition)}};
  ojson layers = ojson::array();
  for (std::size_t t = 0; t < result.layers.size(); ++t) {
    const auto& trace = result.layers[t];
    layers.push_back(ojson{{"index", t},
                           {"cells", trace.partition->cell_count()},
                           {"provenance", provenance_to_json(trace.provenance)},
                           {"abstract", dist_to_json(trace.abstract_dist, *trace.partition)}});
  }
  report["layers"] = std::move(layers);
  report["final"] = dist_to_json(result.final_abstract(), *result.final_partition());
  write_text_file(fs::path(args.out_dir) / "report.json", report.dump(2) + "\n");
  return 0;
}

template <class S>
int run_oracle(const CommonArgs& args) {
  const std::string network_text = slurp(args.network_path, "network file");
  const std::string config_text = slurp(args.config_path, "config file");
  pai::Network net = pai::load_network(network_text);
  json cfg = parse_config_json(config_text, args.config_path);
  auto run = load_run<S>(cfg, fs::path(args.config_path).parent_path(), args,
                         net.layer_count());

  auto report_data = pai::compare_abstract<S>(net, run.domain, run.dist, run.plan, run.budget);

  fs::create_directories(args.out_dir);
  write_distribution_file(fs::path(args.out_dir) / "oracle_abstract.csv",
                          report_data.oracle_abstracted);
  ojson report;
  report["command"] = "oracle";
  report["config_hash"] = config_hash(network_text, config_text);
  report["oracle"] =
      dist_to_json(report_data.oracle_abstracted, *report_data.pipeline.final_partition());
  write_text_file(fs::path(args.out_dir) / "report.json", report.dump(2) + "\n");
  return 0;
}

template <class S>
int run_compare(const CommonArgs& args) {
  const std::string network_text = slurp(args.network_path, "network file");
  const std::string config_text = slurp(args.config_path, "config file");
  pai::Network net = pai::load_network(network_text);
  json cfg = parse_config_json(config_text, args.config_path);
  auto run = load_run<S>(cfg, fs::path(args.config_path).parent_path(), args,
                         net.layer_count());

  auto result = pai::compare_abstract<S>(net, run.domain, run.dist, run.plan, run.budget);
  const auto& partition = *result.pipeline.final_partition();

  fs::create_directories(args.out_dir);
  write_distribution_file(fs::path(args.out_dir) / "abstract.csv", result.composed_abstract);
  write_distribution_file(fs::path(args.out_dir) / "oracle_abstract.csv",
                          result.oracle_abstracted);
  if (args.emit_plot_data) {
    write_plot_data(fs::path(args.out_dir) / "plot_abstract.dat", result.composed_abstract,
                    partition);
    write_plot_data(fs::path(args.out_dir) / "plot_oracle.dat", result.oracle_abstracted,
                    partition);
  }

  ojson report;
  report["tv"] = pai::scalar_traits<S>::to_double(result.tv);
  report["oracle"] = dist_to_json(result.oracle_abstracted, partition);
  report["abstract"] = dist_to_json(result.composed_abstract, partition);
  report["config_hash"] = config_hash(network_text, config_text);
  ojson delta = ojson::object();
  for (std::size_t c = 0; c < result.per_cell_delta.size(); ++c)
    if (result.per_cell_delta[c] != pai::scalar_traits<S>::zero())
      delta[partition.cells()[c].label] =
          pai::scalar_traits<S>::to_double(result.per_cell_delta[c]);
  report["delta"] = std::move(delta);
  write_text_file(fs::path(args.out_dir) / "report.json", report.dump(2) + "\n");
  std::printf("tv %s\n", pai::format_probability(pai::scalar_traits<S>::to_double(result.tv)).c_str());
  return 0;
}

template <class S>
int run_lift(const CommonArgs& args) {
  const std::string network_text = slurp(args.network_path, "network file");
  const std::string config_text = slurp(args.config_path, "config file");
  pai::Network net = pai::load_network(network_text);
  json cfg = parse_config_json(config_text, args.config_path);
  auto run = load_run<S>(cfg, fs::path(args.config_path).parent_path(), args,
                         net.layer_count());

  fs::create_directories(args.out_dir);
  pai::AnyDomain<S> current = run.domain;
  auto in_part = std::make_shared<const pai::Partition>(
      pai::make_partition(run.plan.input_partition, current));
  write_operator_file(fs::path(args.out_dir) / "input_abstraction.csv",
                      pai::build_abstraction<S>(*in_part));
  write_operator_file(fs::path(args.out_dir) / "input_concretization.csv",
                      pai::build_concretization<S>(*in_part));
  {
    std::ostringstream out;
    pai::write_partition_csv(out, *in_part);
    write_text_file(fs::path(args.out_dir) / "input_partition.csv", out.str());
  }

  for (std::size_t t = 0; t < net.layer_count(); ++t) {
    const pai::Layer& layer = net.layers()[t];
    pai::AnyDomain<S> out_domain =
        run.plan.output_domains.exact_image
            ? pai::AnyDomain<S>(std::visit(
                  [&](const auto& d) { return pai::layer_image<S>(layer, d, run.plan.threads); },
                  current))
            : pai::AnyDomain<S>(pai::discretize(run.plan.output_domains.layer_grids[t]));
    auto out_part = std::make_shared<const pai::Partition>(
        pai::make_partition(run.plan.output_partition, out_domain));
    auto pushforward = std::visit(
        [&](const auto& din, const auto& dout) {
          return pai::lift_layer<S>(layer, din, dout, run.plan.threads);
        },
        current, out_domain);
    auto transformer = pai::make_abstract_transformer<S>(pushforward, in_part, out_part);

    const std::string tag = layer_tag(t);
    write_operator_file(fs::path(args.out_dir) / (tag + "_pushforward.csv"), pushforward);
    write_operator_file(fs::path(args.out_dir) / (tag + "_abstraction.csv"),
                        pai::build_abstraction<S>(*out_part));
    write_operator_file(fs::path(args.out_dir) / (tag + "_concretization.csv"),
                        pai::build_concretization<S>(*out_part));
    {
      std::ostringstream partition_csv;
      pai::write_partition_csv(partition_csv, *out_part);
      write_text_file(fs::path(args.out_dir) / (tag + "_partition.csv"), partition_csv.str());
    }
    write_operator_file(fs::path(args.out_dir) / (tag + "_transformer.csv"), transformer.op());
    ojson sidecar;
    sidecar["provenance"] = provenance_to_json(transformer.provenance());
    write_text_file(fs::path(args.out_dir) / (tag + "_transformer.json"),
                    sidecar.dump(2) + "\n");

    current = std::move(out_domain);
    in_part = out_part;
  }
  return 0;
}

int run_zonotope(const std::string& spec_path, const std::string& lattice, bool count_only,
                 const std::string& dump_path) {
  pai::Zonotope z = pai::load_zonotope_file(spec_path);
  auto step = pai::rational_from_decimal(lattice);
  auto points = pai::zonotope_lattice_points(z, step);
  std::printf("%zu\n", points.size());
  if (!count_only && !dump_path.empty()) {
    std::ostringstream out;
    out << "x,y\n";
    for (const auto& p : points)
      out << pai::format_probability(pai::scalar_traits<pai::Rational>::to_double(p[0])) << ','
          << pai::format_probability(pai::scalar_traits<pai::Rational>::to_double(p[1]))
          << '\n';
    write_text_file(dump_path, out.str());
  }
  return 0;
}

int run_mnist(const CommonArgs& args, const std::string& csv_path) {
  const std::string network_text = slurp(args.network_path, "network file");
  const std::string config_text = slurp(args.config_path, "config file");
  pai::Network net = pai::load_network(network_text);
  json cfg = parse_config_json(config_text, args.config_path);

  pai::ImageAbstractionConfig image_cfg;
  if (cfg.contains("image")) {
    const auto& ji = cfg["image"];
    if (ji.contains("shape")) {
      image_cfg.image_h = ji["shape"][0].get<std::size_t>();
      image_cfg.image_w = ji["shape"][1].get<std::size_t>();
    }
    if (ji.contains("block")) {
      image_cfg.block_h = ji["block"][0].get<std::size_t>();
      image_cfg.block_w = ji["block"][1].get<std::size_t>();
    }
    image_cfg.brightness_threshold = ji.value("threshold", 127);
    image_cfg.dark_value = ji.value("dark", 0);
    image_cfg.bright_value = ji.value("bright", 255);
  }
  image_cfg.validate();

  const std::size_t samples = args.samples.value_or(cfg.value("samples", std::size_t{256}));
  const std::uint64_t seed = args.seed.value_or(cfg.value("seed", std::uint64_t{0}));

  std::ifstream csv(csv_path);
  if (!csv) throw pai::ConfigError("cannot open mnist csv: " + csv_path);
  auto images = pai::load_mnist_csv(csv, image_cfg.pixel_count());
  auto cell_dist = pai::init_distribution<double>(images, image_cfg);
  auto analysis = pai::analyze_classifier<double>(net, cell_dist, image_cfg, samples, seed);

  fs::create_directories(args.out_dir);
  write_distribution_file(fs::path(args.out_dir) / "cell_distribution.csv", cell_dist);
  write_distribution_file(fs::path(args.out_dir) / "class_distribution.csv",
                          analysis.class_distribution);

  ojson report;
  report["command"] = "mnist";
  report["config_hash"] = config_hash(network_text, config_text);
  report["config"] = ojson{{"image_shape", {image_cfg.image_h, image_cfg.image_w}},
                           {"block_shape", {image_cfg.block_h, image_cfg.block_w}},
                           {"threshold", image_cfg.brightness_threshold},
                           {"dark", image_cfg.dark_value},
                           {"bright", image_cfg.bright_value},
                           {"groups", image_cfg.group_count()}};
  report["samples"] = samples;
  report["seed"] = seed;
  report["dataset"] = ojson{{"images", images.size()},
                            {"support_cells", cell_dist.support_size()}};
  ojson classes = ojson::object();
  for (const auto& [cls, mass] : analysis.class_distribution.entries())
    classes[std::to_string(cls)] = mass;
  report["class_distribution"] = std::move(classes);
  ojson cells = ojson::array();
  for (const auto& contribution : analysis.per_cell) {
    ojson freq = ojson::object();
    for (std::size_t c = 0; c < contribution.class_frequencies.size(); ++c)
      if (contribution.class_frequencies[c] != 0.0)
        freq[std::to_string(c)] = contribution.class_frequencies[c];
    cells.push_back(ojson{{"cell", contribution.cell},
                          {"mass", contribution.mass},
                          {"class_frequencies", std::move(freq)}});
  }
  report["per_cell"] = std::move(cells);
  write_text_file(fs::path(args.out_dir) / "report.json", report.dump(2) + "\n");
  return 0;
}

void emit_error(const char* type, const std::string& message, ojson extra = ojson::object()) {
  ojson line;
  line["error"] = ojson{{"type", type}, {"message", message}};
  for (auto& [k, v] : extra.items()) line["error"][k] = v;
  std::fprintf(stderr, "%s\n", line.dump().c_str());
}

template <class Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const pai::BudgetError& e) {
    emit_error("budget", e.what(),
               ojson{{"required", e.required()}, {"cap", e.cap()}});
    return 3;
  } catch (const pai::ParseError& e) {
    ojson extra = ojson::object();
    if (e.line() > 0) extra = ojson{{"line", e.line()}, {"column", e.column()}};
    emit_error("parse", e.what(), extra);
    return 2;
  } catch (const pai::ConfigError& e) {
    emit_error("config", e.what());
    return 2;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return 1;
  }
}

void add_common_options(CLI::App* cmd, CommonArgs& args, bool needs_out) {
  cmd->add_option("--network", args.network_path, "network JSON file")->required();
  cmd->add_option("--config", args.config_path, "analysis config JSON")->required();
  if (needs_out) cmd->add_option("--out", args.out_dir, "output directory")->required();
  cmd->add_flag("--exact", args.exact, "use exact rational arithmetic");
  cmd->add_flag("--emit-plot-data", args.emit_plot_data,
                "write gnuplot tables of per-cell probabilities");
  cmd->add_option("--threads", args.threads, "worker thread cap (PAI_THREADS as fallback)");
  cmd->add_option("--seed", args.seed, "sampling seed override");
  cmd->add_option("--samples", args.samples, "samples per cell override");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"probability-density flow analysis for small feed-forward networks"};
  app.require_subcommand(1);

  CommonArgs analyze_args, oracle_args, compare_args, lift_args, mnist_args;
  std::string zonotope_spec, zonotope_lattice = "1", zonotope_dump, mnist_csv;
  bool zonotope_count = false;

  auto* analyze_cmd = app.add_subcommand("analyze", "full abstract propagation");
  add_common_options(analyze_cmd, analyze_args, true);

  auto* oracle_cmd = app.add_subcommand("oracle", "brute-force enumeration run");
  add_common_options(oracle_cmd, oracle_args, true);

  auto* compare_cmd = app.add_subcommand("compare", "abstract vs oracle with tv report");
  add_common_options(compare_cmd, compare_args, true);

  auto* lift_cmd = app.add_subcommand("lift", "dump abstraction, concretization, pushforward "
                                              "and transformer operators");
  lift_cmd->add_option("--network", lift_args.network_path, "network JSON file")->required();
  lift_cmd->add_option("--config", lift_args.config_path, "analysis config JSON")->required();
  lift_cmd->add_option("--dump-ops", lift_args.out_dir, "operator output directory")->required();
  lift_cmd->add_flag("--exact", lift_args.exact, "use exact rational arithmetic");
  lift_cmd->add_option("--threads", lift_args.threads, "worker thread cap");

  auto* zonotope_cmd = app.add_subcommand("zonotope", "lattice points of a 2-d zonotope");
  zonotope_cmd->add_option("--spec", zonotope_spec, "zonotope JSON file")->required();
  zonotope_cmd->add_option("--lattice", zonotope_lattice, "lattice step (decimal)")->required();
  zonotope_cmd->add_flag("--count", zonotope_count, "print the point count only");
  zonotope_cmd->add_option("--dump", zonotope_dump, "write the points as CSV");

  auto* mnist_cmd = app.add_subcommand("mnist", "block abstraction of an image dataset");
  mnist_cmd->add_option("--csv", mnist_csv, "dataset CSV (label,pixel0,...)")->required();
  mnist_cmd->add_option("--network", mnist_args.network_path, "classifier network")->required();
  mnist_cmd->add_option("--config", mnist_args.config_path, "config JSON")->required();
  mnist_cmd->add_option("--out", mnist_args.out_dir, "output directory")->required();
  mnist_cmd->add_option("--samples", mnist_args.samples, "samples per cell");
  mnist_cmd->add_option("--seed", mnist_args.seed, "sampling seed");
  mnist_cmd->add_option("--threads", mnist_args.threads, "worker thread cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("parse", e.what());
    return 2;
  }

  if (*analyze_cmd)
    return guarded([&] {
      return analyze_args.exact ? run_analyze<pai::Rational>(analyze_args)
                                : run_analyze<double>(analyze_args);
    });
  if (*oracle_cmd)
    return guarded([&] {
      return oracle_args.exact ? run_oracle<pai::Rational>(oracle_args)
                               : run_oracle<double>(oracle_args);
    });
  if (*compare_cmd)
    return guarded([&] {
      return compare_args.exact ? run_compare<pai::Rational>(compare_args)
                                : run_compare<double>(compare_args);
    });
  if (*lift_cmd)
    return guarded([&] {
      return lift_args.exact ? run_lift<pai::Rational>(lift_args) : run_lift<double>(lift_args);
    });
  if (*zonotope_cmd)
    return guarded(
        [&] { return run_zonotope(zonotope_spec, zonotope_lattice, zonotope_count,
                                  zonotope_dump); });
  if (*mnist_cmd) return guarded([&] { return run_mnist(mnist_args, mnist_csv); });
  return 1;
}
