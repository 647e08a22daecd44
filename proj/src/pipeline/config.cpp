#include "pgjr/pipeline/config.hpp"

#include <functional>
#include <map>

#include "pgjr/error.hpp"
#include "pgjr/pipeline/binary_io.hpp"

namespace pgjr {

using nlohmann::json;

void TrainConfig::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw UsageError("config: " + msg);
  };
  require(tau1 > 0.0, "tau1 must be positive");
  require(tau2 > 0.0, "tau2 must be positive");
  require(blocks >= 1, "block must be >= 1");
  require(grid >= 2, "grid must be >= 2");
  require(n_out >= 1, "n_out must be >= 1");
  require(batch_size >= 2, "batch_size must be >= 2");
  require(lr0 >= 0.0 && lr1 >= 0.0, "learning rates must be non-negative");
  require(momentum >= 0.0 && momentum < 1.0, "momentum must lie in [0, 1)");
  require(weight_decay >= 0.0, "weight_decay must be non-negative");
  require(bank_momentum >= 0.0 && bank_momentum < 1.0, "bank_momentum must lie in [0, 1)");
  require(restarts >= 1 && eval_restarts >= 1, "restarts must be >= 1");
  require(kmeans_max_iter >= 1, "kmeans_max_iter must be >= 1");
  require(kmeans_tol >= 0.0, "kmeans_tol must be non-negative");
  require(k >= 2, "k must be >= 2");
  require(eval_every >= 1, "eval_every must be >= 1");
  require(!(freeze_gjr && head == HeadKind::Linear), "freeze_gjr requires head \"pgjr\"");
}

void TrainConfig::validate_for(std::size_t n, std::size_t dim) const {
  validate();
  if (batch_size > n)
    throw UsageError("config: batch_size " + std::to_string(batch_size) + " exceeds n=" +
                     std::to_string(n));
  if (k > n) throw UsageError("config: k exceeds the number of samples");
  if (head == HeadKind::Pgjr) GjrGeometry::for_input(dim, blocks, grid);
}

HeadInit TrainConfig::head_init(std::size_t n_in) const {
  HeadInit init;
  init.kind = head;
  init.n_in = n_in;
  init.n_out = n_out;
  init.blocks = blocks;
  init.rows = grid;
  init.gjr_init = gjr_init;
  init.freeze_gjr = freeze_gjr;
  return init;
}

namespace {

std::size_t get_count(const json& v, const std::string& key) {
  if (!v.is_number_unsigned()) throw UsageError("config: " + key + " must be a non-negative integer");
  return v.get<std::size_t>();
}

double get_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw UsageError("config: " + key + " must be a number");
  return v.get<double>();
}

std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw UsageError("config: " + key + " must be a string");
  return v.get<std::string>();
}

template <typename E>
E get_enum(const json& v, const std::string& key, const std::map<std::string, E>& names) {
  const std::string s = get_string(v, key);
  auto it = names.find(s);
  if (it == names.end()) throw UsageError("config: invalid value \"" + s + "\" for " + key);
  return it->second;
}

const std::map<std::string, LossReduction> kReductions{{"sum", LossReduction::Sum},
                                                       {"mean", LossReduction::Mean}};
const std::map<std::string, HeadKind> kHeads{{"pgjr", HeadKind::Pgjr},
                                             {"linear", HeadKind::Linear}};
const std::map<std::string, GjrInit> kInits{{"fan_in", GjrInit::FanIn}, {"zero", GjrInit::Zero}};

template <typename E>
std::string name_of(E value, const std::map<std::string, E>& names) {
  for (const auto& [k, v] : names)
    if (v == value) return k;
  return "";
}

}  // namespace

TrainConfig config_from_json(const json& j) {
  if (!j.is_object()) throw UsageError("config: top level must be a JSON object");
  TrainConfig c;
  using Setter = std::function<void(const json&, const std::string&)>;
  const std::map<std::string, Setter> fields{
      {"tau1", [&](const json& v, const std::string& k) { c.tau1 = get_number(v, k); }},
      {"tau2", [&](const json& v, const std::string& k) { c.tau2 = get_number(v, k); }},
      {"block", [&](const json& v, const std::string& k) { c.blocks = get_count(v, k); }},
      {"grid", [&](const json& v, const std::string& k) { c.grid = get_count(v, k); }},
      {"n_out", [&](const json& v, const std::string& k) { c.n_out = get_count(v, k); }},
      {"batch_size", [&](const json& v, const std::string& k) { c.batch_size = get_count(v, k); }},
      {"epochs", [&](const json& v, const std::string& k) { c.epochs = get_count(v, k); }},
      {"lr0", [&](const json& v, const std::string& k) { c.lr0 = get_number(v, k); }},
      {"lr1", [&](const json& v, const std::string& k) { c.lr1 = get_number(v, k); }},
      {"lr1_epoch", [&](const json& v, const std::string& k) { c.lr1_epoch = get_count(v, k); }},
      {"momentum", [&](const json& v, const std::string& k) { c.momentum = get_number(v, k); }},
      {"weight_decay",
       [&](const json& v, const std::string& k) { c.weight_decay = get_number(v, k); }},
      {"bank_momentum",
       [&](const json& v, const std::string& k) { c.bank_momentum = get_number(v, k); }},
      {"restarts", [&](const json& v, const std::string& k) { c.restarts = get_count(v, k); }},
      {"eval_restarts",
       [&](const json& v, const std::string& k) { c.eval_restarts = get_count(v, k); }},
      {"kmeans_max_iter",
       [&](const json& v, const std::string& k) { c.kmeans_max_iter = get_count(v, k); }},
      {"kmeans_tol", [&](const json& v, const std::string& k) { c.kmeans_tol = get_number(v, k); }},
      {"k", [&](const json& v, const std::string& k) { c.k = get_count(v, k); }},
      {"seed", [&](const json& v, const std::string& k) { c.seed = get_count(v, k); }},
      {"eval_every", [&](const json& v, const std::string& k) { c.eval_every = get_count(v, k); }},
      {"loss_reduction",
       [&](const json& v, const std::string& k) { c.loss_reduction = get_enum(v, k, kReductions); }},
      {"head", [&](const json& v, const std::string& k) { c.head = get_enum(v, k, kHeads); }},
      {"gjr_init", [&](const json& v, const std::string& k) { c.gjr_init = get_enum(v, k, kInits); }},
      {"freeze_gjr",
       [&](const json& v, const std::string& k) {
         if (!v.is_boolean()) throw UsageError("config: " + k + " must be a boolean");
         c.freeze_gjr = v.get<bool>();
       }},
  };
  for (const auto& [key, value] : j.items()) {
    auto it = fields.find(key);
    if (it == fields.end()) throw UsageError("config: unknown key \"" + key + "\"");
    it->second(value, key);
  }
  c.validate();
  return c;
}

TrainConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config: invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

TrainConfig load_config(const std::string& path) {
  const auto bytes = io::read_file(path);
  return parse_config(std::string(bytes.begin(), bytes.end()));
}

json config_to_json(const TrainConfig& c) {
  return json{
      {"tau1", c.tau1},
      {"tau2", c.tau2},
      {"block", c.blocks},
      {"grid", c.grid},
      {"n_out", c.n_out},
      {"batch_size", c.batch_size},
      {"epochs", c.epochs},
      {"lr0", c.lr0},
      {"lr1", c.lr1},
      {"lr1_epoch", c.lr1_epoch},
      {"momentum", c.momentum},
      {"weight_decay", c.weight_decay},
      {"bank_momentum", c.bank_momentum},
      {"restarts", c.restarts},
      {"eval_restarts", c.eval_restarts},
      {"kmeans_max_iter", c.kmeans_max_iter},
      {"kmeans_tol", c.kmeans_tol},
      {"k", c.k},
      {"seed", c.seed},
      {"eval_every", c.eval_every},
      {"loss_reduction", name_of(c.loss_reduction, kReductions)},
      {"head", name_of(c.head, kHeads)},
      {"gjr_init", name_of(c.gjr_init, kInits)},
      {"freeze_gjr", c.freeze_gjr},
  };
}

std::uint64_t config_hash(const TrainConfig& cfg) {
  json j = config_to_json(cfg);
  j.erase("epochs");
  const std::string canonical = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace pgjr
