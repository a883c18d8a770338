// mmr command-line tool: compile, sonify, tree, validate, infer, orders, serve.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "mmr/http.hpp"
#include "mmr/mmr.hpp"

namespace fs = std::filesystem;
using namespace mmr;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitParse = 2;
constexpr int kExitInvalidSpec = 3;

struct Inputs {
  std::string data_path;
  std::string spec_path;
  bool defaults = false;
  std::vector<std::string> fields;
};

void add_inputs(CLI::App* cmd, Inputs& in) {
  cmd->add_option("data", in.data_path, "Dataset (.csv or .json records)")->required();
  auto* spec = cmd->add_option("--spec", in.spec_path, "Spec JSON file");
  auto* defaults = cmd->add_flag("--defaults", in.defaults, "Use generated defaults");
  spec->excludes(defaults);
  cmd->add_option("--fields", in.fields, "Fields selected for defaults (default: all)")->delimiter(',');
}

class InvalidSpec : public std::runtime_error {
 public:
  explicit InvalidSpec(ValidationReport r) : std::runtime_error("invalid spec"), report(std::move(r)) {}
  ValidationReport report;
};

Json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    throw ParseError("malformed JSON in " + what, detail::line_of(text, offset), offset);
  }
}

std::pair<Spec, Dataset> load_inputs(const Inputs& in) {
  Dataset data = load_typed_file(in.data_path);
  Spec spec;
  if (!in.spec_path.empty()) {
    spec = spec_from_json(parse_json_text(read_file(in.spec_path), in.spec_path));
  } else if (in.fields.empty()) {
    spec = default_spec(data);
  } else {
    spec = default_spec(data, in.fields);
  }
  if (auto report = validate(spec); !report.empty()) throw InvalidSpec(std::move(report));
  return {std::move(spec), std::move(data)};
}

Predicate parse_filter(const std::string& text) {
  if (text.empty()) return always();
  return predicate_from_json(parse_json_text(text, "--filter"));
}

void write_files(const fs::path& dir, const std::map<std::string, std::string>& files) {
  fs::create_directories(dir);
  for (const auto& [name, bytes] : files) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error("io-error", "cannot write " + (dir / name).string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    std::cout << (dir / name).string() << "\n";
  }
}

bool parse_ticks(const std::string& s) {
  if (s == "on") return true;
  if (s == "off") return false;
  throw Error("invalid-argument", "--ticks must be on or off");
}

int report_error(const std::exception& e) {
  if (const auto* inv = dynamic_cast<const InvalidSpec*>(&e)) {
    std::cerr << "error: invalid spec\n";
    for (const auto& v : inv->report) std::cerr << "  " << v.code << " at " << v.path << ": " << v.message << "\n";
    std::cout << to_json(inv->report).dump(2) << "\n";
    return kExitInvalidSpec;
  }
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    std::cerr << "error: " << err->code() << ": " << err->what() << "\n";
    const auto& c = err->code();
    if (c == "invalid-spec") return kExitInvalidSpec;
    if (c == "parse-error" || c == "ragged-rows" || c.rfind("malformed-", 0) == 0) return kExitParse;
    return kExitOther;
  }
  std::cerr << "error: " << e.what() << "\n";
  return kExitOther;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mmr: multimodal data representations (visual, text, audio) from one spec"};
  app.require_subcommand(1);

  Inputs in;
  std::string out_dir = "out";
  std::string filter_text;
  std::string order;
  std::string ticks = "on";
  double rate = 1.0;
  int sample_rate = wav::kDefaultSampleRate;
  bool with_wav = false;
  std::string spec_file;
  std::string host;
  int port = 0;

  auto* compile = app.add_subcommand("compile", "Write visual, text, and audio artifacts");
  add_inputs(compile, in);
  compile->add_option("-o,--out", out_dir, "Output directory");
  compile->add_flag("--wav", with_wav, "Also render WAV files and cue sidecars");
  compile->add_option("--sample-rate", sample_rate, "WAV sample rate");

  auto* sonify = app.add_subcommand("sonify", "Render WAV files and cue sidecars");
  add_inputs(sonify, in);
  sonify->add_option("-o,--out", out_dir, "Output directory");
  sonify->add_option("--order", order, "Playback order descriptor (see `orders`)");
  sonify->add_option("--filter", filter_text, "Predicate JSON");
  sonify->add_option("--rate", rate, "Playback rate multiplier");
  sonify->add_option("--ticks", ticks, "Audio axis ticks: on|off");
  sonify->add_option("--sample-rate", sample_rate, "WAV sample rate");

  auto* tree = app.add_subcommand("tree", "Print the textual structure");
  add_inputs(tree, in);
  tree->add_option("--filter", filter_text, "Predicate JSON to zoom the tree to");
  bool tree_json = false;
  tree->add_flag("--json", tree_json, "Print JSON instead of indented text");

  auto* orders = app.add_subcommand("orders", "List playback orders of each audio unit");
  add_inputs(orders, in);
  orders->add_option("--filter", filter_text, "Predicate JSON holding the current selection");

  auto* validate_cmd = app.add_subcommand("validate", "Validate a spec file");
  validate_cmd->add_option("spec", spec_file, "Spec JSON file")->required();

  auto* infer = app.add_subcommand("infer", "Print inferred types, key, matched rule, and default spec");
  infer->add_option("data", in.data_path, "Dataset")->required();
  infer->add_option("--fields", in.fields, "Selected fields (default: all)")->delimiter(',');

  auto* serve = app.add_subcommand("serve", "Run the HTTP session service (MMR_HOST, MMR_PORT)");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*compile) {
      auto [spec, data] = load_inputs(in);
      ArtifactOptions options;
      options.wav = with_wav;
      options.sample_rate = sample_rate;
      write_files(out_dir, compile_artifacts(spec, data, options).files());
    } else if (*sonify) {
      auto [spec, data] = load_inputs(in);
      ArtifactOptions options;
      options.wav = true;
      options.sample_rate = sample_rate;
      options.audio.rate = rate;
      options.audio.ticks = parse_ticks(ticks);
      options.audio.filter = parse_filter(filter_text);
      if (!order.empty()) options.order = order;
      const auto art = compile_artifacts(spec, data, options);
      std::map<std::string, std::string> files;
      for (const auto& [name, bytes] : art.files()) {
        if (name.ends_with(".wav") || name.ends_with(".cues.json") || name == "audio.json") files[name] = bytes;
      }
      write_files(out_dir, files);
    } else if (*tree) {
      auto [spec, data] = load_inputs(in);
      const Dataset typed = drop_invalid_rows(spec, typed_for(spec, data));
      auto t = rescope_tree(build_tree(spec, typed), parse_filter(filter_text), typed);
      if (tree_json) std::cout << to_json(t).dump(2) << "\n";
      else std::cout << render_text(t.root);
    } else if (*orders) {
      auto [spec, data] = load_inputs(in);
      const Dataset typed = drop_invalid_rows(spec, typed_for(spec, data));
      const Predicate filter = parse_filter(filter_text);
      check_predicate(filter, typed);
      std::vector<StepPosition> selection;
      std::vector<Predicate> terms;
      if (const auto* a = std::get_if<AndPredicate>(&filter.node)) terms = a->terms;
      else terms = {filter};
      for (const auto& t : terms) {
        if (const auto* eq = std::get_if<FieldEqual>(&t.node)) selection.push_back({eq->field, eq->value, std::nullopt, false});
      }
      Json out = Json::object();
      for (const auto& u : spec.audio_units) {
        Json list = Json::array();
        for (const auto& o : enumerate_playback_orders(u, typed, selection)) list.push_back(to_json(o));
        out[u.id] = list;
      }
      std::cout << out.dump(2) << "\n";
    } else if (*validate_cmd) {
      const Spec spec = spec_from_json(parse_json_text(read_file(spec_file), spec_file));
      const auto report = validate(spec);
      std::cout << to_json(report).dump(2) << "\n";
      if (!report.empty()) {
        for (const auto& v : report) std::cerr << v.code << " at " << v.path << ": " << v.message << "\n";
        return kExitInvalidSpec;
      }
    } else if (*infer) {
      const Dataset data = load_typed_file(in.data_path);
      std::vector<std::string> selected = in.fields;
      if (selected.empty()) {
        for (const auto& c : data.columns()) selected.push_back(c.name);
      }
      Json types = Json::object();
      for (const auto& c : data.columns()) types[c.name] = to_string(c.type.value_or(MeasureType::nominal));
      const auto fields = field_defs(data, selected);
      std::vector<std::string> ordered;
      for (const auto& f : fields) ordered.push_back(f.name);
      const auto key = infer_key(data, ordered);
      std::vector<KeyFieldInfo> key_info;
      std::vector<MeasureType> value_types;
      for (const auto& f : fields) {
        if (std::find(key.begin(), key.end(), f.name) != key.end()) {
          key_info.push_back({f.type, distinct_count(data, f.name)});
        } else {
          value_types.push_back(f.type);
        }
      }
      const auto rule = match_rule(key_info, value_types);
      std::cout << Json{{"types", types},
                        {"key", key},
                        {"rule", rule ? Json(*rule) : Json(nullptr)},
                        {"spec", to_json(generate_default(fields, key, data))}}
                       .dump(2)
                << "\n";
    } else if (*serve) {
      BindAddress bind = bind_address_from_env();
      if (!host.empty()) bind.host = host;
      if (port > 0) bind.port = port;
      SessionService service;
      httplib::Server server;
      install_routes(server, service);
      std::cerr << "listening on " << bind.host << ":" << bind.port << "\n";
      if (!server.listen(bind.host, bind.port)) {
        std::cerr << "error: cannot bind " << bind.host << ":" << bind.port << "\n";
        return kExitOther;
      }
    }
  } catch (const std::exception& e) {
    return report_error(e);
  }
  return kExitOk;
}
