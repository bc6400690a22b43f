#include "tailsearch/cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tailsearch/errors.hpp"

namespace tailsearch::cli {

namespace {

using nlohmann::json;

template <typename T>
T get(const json& node, const std::string& field) {
  try {
    return node.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(field, std::string("wrong type (") + e.what() + ")");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

std::size_t get_count(const json& node, const std::string& field) {
  if (!node.is_number_integer() || node.get<long long>() < 0)
    throw ConfigError(field, "expected a nonnegative integer");
  return node.get<std::size_t>();
}

SyntheticCorpusParams parse_synthetic(const json& node, std::uint64_t default_seed) {
  if (!node.is_object()) throw ConfigError("synthetic", "expected an object");
  SyntheticCorpusParams params;
  params.seed = default_seed;
  static const std::set<std::string> known = {"n_docs",    "vocab_size", "n_clusters",
                                              "doc_len_mean", "seed",    "core_size",
                                              "core_share"};
  for (const auto& [key, value] : node.items()) {
    const std::string field = "synthetic." + key;
    if (!known.contains(key)) throw ConfigError(field, "unknown field");
    if (key == "n_docs") params.n_docs = get_count(value, field);
    if (key == "vocab_size") params.vocab_size = get_count(value, field);
    if (key == "n_clusters") params.n_clusters = get_count(value, field);
    if (key == "doc_len_mean") params.doc_len_mean = get<double>(value, field);
    if (key == "seed") params.seed = get<std::uint64_t>(value, field);
    if (key == "core_size") params.core_size = get_count(value, field);
    if (key == "core_share") params.core_share = get<double>(value, field);
  }
  return params;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config", "expected a JSON object");

  ExperimentConfig c;
  if (auto it = root.find("seed"); it != root.end()) c.seed = get<std::uint64_t>(*it, "seed");

  for (const auto& [key, value] : root.items()) {
    if (key == "seed") continue;
    if (key == "corpus") {
      c.corpus_path = resolve(base_dir, get<std::string>(value, key));
    } else if (key == "synthetic") {
      c.synthetic = parse_synthetic(value, c.seed);
    } else if (key == "queries") {
      c.queries_path = resolve(base_dir, get<std::string>(value, key));
    } else if (key == "n_queries") {
      c.n_queries = get_count(value, key);
    } else if (key == "stopwords") {
      for (const auto& w : get<std::vector<std::string>>(value, key)) c.stopwords.insert(w);
    } else if (key == "k") {
      c.k = static_cast<unsigned>(get_count(value, key));
    } else if (key == "r") {
      c.r = get_count(value, key);
    } else if (key == "t") {
      c.t = value.is_array() ? get<std::vector<std::size_t>>(value, key)
                             : std::vector<std::size_t>{get_count(value, key)};
    } else if (key == "f") {
      c.f = value.is_array() ? get<std::vector<double>>(value, key)
                             : std::vector<double>{get<double>(value, key)};
    } else if (key == "schemes") {
      c.schemes.clear();
      for (const auto& name : get<std::vector<std::string>>(value, key)) {
        auto s = parse_scheme(name);
        if (!s) throw ConfigError(key, "unknown scheme '" + name + "'");
        c.schemes.push_back(*s);
      }
    } else if (key == "deployments") {
      c.deployments.clear();
      for (const auto& name : get<std::vector<std::string>>(value, key)) {
        try {
          c.deployments.push_back(parse_deployment_kind(name));
        } catch (const Error& e) {
          throw ConfigError(key, e.what());
        }
      }
    } else if (key == "distribution") {
      const auto name = get<std::string>(value, key);
      if (name == "crcs") {
        c.distribution = DistributionSource::Crcs;
      } else if (name == "uniform") {
        c.distribution = DistributionSource::Uniform;
      } else {
        throw ConfigError(key, "expected 'crcs' or 'uniform'");
      }
    } else if (key == "m") {
      c.m = get_count(value, key);
    } else if (key == "k_per_shard") {
      c.k_per_shard = get_count(value, key);
    } else if (key == "gamma") {
      c.gamma = get_count(value, key);
    } else if (key == "sample_prob") {
      c.sample_prob = get<double>(value, key);
    } else if (key == "hash_dim") {
      c.hash_dim = get_count(value, key);
    } else if (key == "threads") {
      c.threads = get_count(value, key);
    } else if (key == "output_dir") {
      c.output_dir = resolve(base_dir, get<std::string>(value, key));
    } else if (key == "suite") {
      c.suite = get<bool>(value, key);
    } else if (key == "detail") {
      c.detail = get<bool>(value, key);
    } else {
      throw ConfigError(key, "unknown field");
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read config file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

}  // namespace tailsearch::cli
