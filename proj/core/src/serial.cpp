#include "tmac/serial.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tmac/version.hpp"

namespace tmac {

namespace {

using nlohmann::json;

constexpr char kModelMagic[4] = {'T', 'M', 'A', 'C'};
constexpr std::uint32_t kModelVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
void put_string(std::ostream& os, const std::string& s) {
  put<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}
std::string get_string(std::istream& is) {
  const auto n = get<std::uint32_t>(is);
  std::string s(n, '\0');
  is.read(s.data(), n);
  return s;
}

json hyperparams_to_json(const Hyperparams& hp) {
  return json{{"clauses_per_class", hp.clauses_per_class},
              {"threshold", hp.threshold},
              {"specificity", hp.specificity},
              {"states_per_action", hp.states_per_action},
              {"epochs", hp.epochs},
              {"seed", hp.seed}};
}

Hyperparams hyperparams_from_json(const json& j, Hyperparams base = {}) {
  if (j.contains("clauses_per_class")) base.clauses_per_class = j["clauses_per_class"];
  if (j.contains("threshold")) base.threshold = j["threshold"];
  if (j.contains("specificity")) base.specificity = j["specificity"];
  if (j.contains("states_per_action")) base.states_per_action = j["states_per_action"];
  if (j.contains("epochs")) base.epochs = j["epochs"];
  if (j.contains("seed")) base.seed = j["seed"];
  return base;
}

}  // namespace

void save_model(const std::filesystem::path& path, const ModelFile& mf) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f.write(kModelMagic, 4);
  put<std::uint32_t>(f, kModelVersion);
  put<std::uint32_t>(f, mf.model.classes());
  put<std::uint32_t>(f, mf.model.clauses_per_class());
  put<std::uint32_t>(f, mf.model.features());
  put<std::uint32_t>(f, mf.model.states_per_action());
  put<std::uint32_t>(f, mf.hp.threshold);
  put<double>(f, mf.hp.specificity);
  put<std::uint32_t>(f, mf.hp.epochs);
  put<std::uint64_t>(f, mf.hp.seed);
  put_string(f, mf.config_hash);
  put_string(f, mf.tool_version.empty() ? std::string(kToolVersion) : mf.tool_version);
  const auto states = mf.model.raw();
  f.write(reinterpret_cast<const char*>(states.data()),
          static_cast<std::streamsize>(states.size() * sizeof(std::int16_t)));
  if (!f) throw std::runtime_error("short write to " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, kModelMagic, 4) != 0) {
    throw std::runtime_error("not a model file: " + path.string());
  }
  const auto version = get<std::uint32_t>(f);
  if (version != kModelVersion) {
    throw std::runtime_error("unsupported model version " + std::to_string(version));
  }
  const auto classes = get<std::uint32_t>(f);
  const auto clauses = get<std::uint32_t>(f);
  const auto features = get<std::uint32_t>(f);
  const auto n_states = get<std::uint32_t>(f);

  ModelFile mf;
  mf.hp.clauses_per_class = clauses;
  mf.hp.states_per_action = n_states;
  mf.hp.threshold = get<std::uint32_t>(f);
  mf.hp.specificity = get<double>(f);
  mf.hp.epochs = get<std::uint32_t>(f);
  mf.hp.seed = get<std::uint64_t>(f);
  mf.config_hash = get_string(f);
  mf.tool_version = get_string(f);
  mf.model = TaStateMatrix(classes, clauses, features, n_states);
  auto states = mf.model.raw();
  f.read(reinterpret_cast<char*>(states.data()),
         static_cast<std::streamsize>(states.size() * sizeof(std::int16_t)));
  if (!f) throw std::runtime_error("model file truncated: " + path.string());
  return mf;
}

ModelFile import_state_matrix_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  json j;
  f >> j;
  const std::uint32_t classes = j.at("classes");
  const std::uint32_t clauses = j.at("clauses_per_class");
  const std::uint32_t features = j.at("features");
  const std::uint32_t n_states = j.at("states_per_action");

  ModelFile mf;
  mf.model = TaStateMatrix(classes, clauses, features, n_states);
  if (j.contains("hyperparams")) mf.hp = hyperparams_from_json(j["hyperparams"]);
  mf.hp.clauses_per_class = clauses;
  mf.hp.states_per_action = n_states;
  mf.tool_version = std::string(kToolVersion);

  const auto& states = j.at("states");
  const std::size_t expect = static_cast<std::size_t>(classes) * clauses * 2 * features;
  if (states.size() != expect) {
    throw std::runtime_error("states array holds " + std::to_string(states.size()) +
                             " entries, expected " + std::to_string(expect));
  }
  auto raw = mf.model.raw();
  for (std::size_t i = 0; i < expect; ++i) {
    const int v = states[i];
    if (v < 1 || v > 2 * static_cast<int>(n_states)) {
      throw std::runtime_error("state " + std::to_string(v) + " at index " + std::to_string(i) +
                               " outside [1, 2N]");
    }
    raw[i] = static_cast<std::int16_t>(v);
  }
  return mf;
}

void export_state_matrix_json(const std::filesystem::path& path, const ModelFile& mf) {
  json j;
  j["classes"] = mf.model.classes();
  j["clauses_per_class"] = mf.model.clauses_per_class();
  j["features"] = mf.model.features();
  j["states_per_action"] = mf.model.states_per_action();
  j["hyperparams"] = hyperparams_to_json(mf.hp);
  j["states"] = json::array();
  for (std::int16_t s : mf.model.raw()) j["states"].push_back(s);
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << j.dump(2) << "\n";
}

void save_compiled(const std::filesystem::path& path, const CompiledModel& model,
                   const PacketPlan& plan) {
  json j;
  j["format"] = "tmac-compiled";
  j["version"] = 1;
  j["meta"] = {{"seed", model.seed},
               {"config_hash", model.config_hash},
               {"tool_version", model.tool_version.empty() ? std::string(kToolVersion)
                                                           : model.tool_version}};
  j["classes"] = model.classes;
  j["clauses_per_class"] = model.clauses_per_class;
  j["features"] = model.feature_count;
  j["pruned"] = model.pruned;
  j["packet_plan"] = {{"bandwidth", plan.bandwidth},
                      {"packet_count", plan.packet_count},
                      {"pad_bits", plan.pad_bits}};
  json clauses = json::array();
  for (const ClauseExpr& c : model.clauses) {
    clauses.push_back({{"class", c.cls},
                       {"clause", c.clause},
                       {"polarity", c.polarity},
                       {"pos", c.pos_includes},
                       {"neg", c.neg_includes}});
  }
  j["clauses"] = std::move(clauses);
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << j.dump(2) << "\n";
}

CompiledFile load_compiled(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  json j;
  f >> j;
  if (j.value("format", "") != "tmac-compiled") {
    throw std::runtime_error("not a compiled model: " + path.string());
  }
  CompiledFile out;
  out.model.classes = j.at("classes");
  out.model.clauses_per_class = j.at("clauses_per_class");
  out.model.feature_count = j.at("features");
  out.model.pruned = j.value("pruned", false);
  out.model.seed = j["meta"].value("seed", 0ull);
  out.model.config_hash = j["meta"].value("config_hash", "");
  out.model.tool_version = j["meta"].value("tool_version", "");
  for (const auto& c : j.at("clauses")) {
    ClauseExpr expr;
    expr.cls = c.at("class");
    expr.clause = c.at("clause");
    expr.polarity = c.at("polarity");
    expr.pos_includes = c.at("pos").get<std::vector<std::uint32_t>>();
    expr.neg_includes = c.at("neg").get<std::vector<std::uint32_t>>();
    out.model.clauses.push_back(std::move(expr));
  }
  out.plan = plan_packets(out.model.feature_count, j.at("packet_plan").at("bandwidth"));
  return out;
}

std::string sparsity_to_json(const SparsityReport& r) {
  json j;
  j["total_actions"] = r.total_actions;
  j["include_count"] = r.include_count;
  j["include_density"] = r.include_density;
  j["includes_per_class"] = r.includes_per_class;
  j["empty_clauses"] = r.empty_clauses;
  j["empty_clause_convention"] = "constant-1";  // matches the hardware seeding
  json contra = json::array();
  for (const auto& [cls, clause] : r.contradictory) {
    contra.push_back({{"class", cls}, {"clause", clause}});
  }
  j["contradictory_clauses"] = std::move(contra);
  j["sharing"] = {{"flat_and_nodes", r.flat_and_nodes},
                  {"shared_and_nodes", r.shared_and_nodes},
                  {"luts_unshared", r.luts_unshared},
                  {"luts_shared", r.luts_shared},
                  {"lut_inputs", r.lut_inputs}};
  return j.dump(2) + "\n";
}

std::string sparsity_to_text(const SparsityReport& r) {
  std::ostringstream os;
  os << "include density: " << r.include_density * 100.0 << "% (" << r.include_count << " / "
     << r.total_actions << " actions)\n";
  os << "empty clauses (constant 1): " << r.empty_clauses << "\n";
  os << "contradictory clauses (constant 0): " << r.contradictory.size() << "\n";
  os << "includes per class:";
  for (std::uint64_t n : r.includes_per_class) os << " " << n;
  os << "\n";
  if (r.flat_and_nodes) {
    os << "AND nodes: " << r.shared_and_nodes << " shared vs " << r.flat_and_nodes
       << " flat (saved " << (r.flat_and_nodes - r.shared_and_nodes) << ")\n";
    os << "LUT estimate (" << r.lut_inputs << "-input): " << r.luts_shared << " shared vs "
       << r.luts_unshared << " unshared\n";
  }
  return os.str();
}

}  // namespace tmac
