#include <json.hpp>

#include "stereotax/atomic_file.hpp"
#include "stereotax/digest.hpp"
#include "stereotax/error.hpp"
#include "stereotax/report.hpp"
#include "stereotax/version.hpp"

namespace stereotax::report {

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "stereotax-manifest/1";
  j["run_id"] = run_id;
  j["toolkit_version"] = toolkit_version;
  j["created"] = created;
  j["endpoint_id"] = endpoint_id;
  j["digests"] = {{"config", config_digest}, {"stimuli", stimuli_digest}, {"lexicon", lexicon_digest}};
  j["seeds"] = {{"clustering", seeds.clustering}, {"stats", seeds.stats}};
  j["excluded_categories"] = nlohmann::ordered_json::object();
  for (const auto& [c, why] : excluded) j["excluded_categories"][c] = why;
  j["artifacts"] = nlohmann::ordered_json::object();
  for (const auto& [name, digest] : artifacts) j["artifacts"][name] = digest;
  return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("format", "") != "stereotax-manifest/1") {
      throw Error(ErrorKind::kSchema, "manifest has an unknown format tag");
    }
    RunManifest m;
    m.run_id = j.at("run_id").get<std::string>();
    m.toolkit_version = j.at("toolkit_version").get<std::string>();
    m.created = j.at("created").get<std::string>();
    m.endpoint_id = j.at("endpoint_id").get<std::string>();
    const auto& d = j.at("digests");
    m.config_digest = d.at("config").get<std::string>();
    m.stimuli_digest = d.at("stimuli").get<std::string>();
    m.lexicon_digest = d.at("lexicon").get<std::string>();
    m.seeds.clustering = j.at("seeds").at("clustering").get<std::uint64_t>();
    m.seeds.stats = j.at("seeds").at("stats").get<std::uint64_t>();
    for (const auto& [c, why] : j.at("excluded_categories").items()) m.excluded[c] = why.get<std::string>();
    for (const auto& [name, digest] : j.at("artifacts").items()) m.artifacts[name] = digest.get<std::string>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kSchema, std::string("malformed manifest: ") + e.what());
  }
}

std::string provenance_line(const RunManifest& m) {
  return "# manifest_id=" + m.run_id + "\ttoolkit_version=" + m.toolkit_version +
         "\tseed_clustering=" + std::to_string(m.seeds.clustering) + "\tseed_stats=" + std::to_string(m.seeds.stats);
}

RunManifest make_manifest(const RunConfig& config, const std::string& lexicon_digest) {
  RunManifest m;
  m.config_digest = config.digest();
  std::vector<std::string> parts{sha256_file(config.stimuli)};
  if (config.categories) parts.push_back(sha256_file(*config.categories));
  m.stimuli_digest = combine_digests(parts);
  m.lexicon_digest = lexicon_digest;
  m.endpoint_id = config.endpoint.endpoint_id();
  m.seeds = config.seeds;
  m.toolkit_version = kToolkitVersion;
  const std::vector<std::string> identity{m.config_digest,
                                          m.stimuli_digest,
                                          m.lexicon_digest,
                                          sha256_hex(m.endpoint_id),
                                          sha256_hex(std::to_string(m.seeds.clustering) + "/" +
                                                     std::to_string(m.seeds.stats)),
                                          sha256_hex(m.toolkit_version)};
  m.run_id = combine_digests(identity).substr(0, 16);
  return m;
}

RunManifest open_manifest(const std::filesystem::path& output_dir, const RunManifest& expected) {
  const auto path = output_dir / "manifest.json";
  if (!std::filesystem::exists(path)) {
    RunManifest m = expected;
    m.created = harness::utc_timestamp();
    return m;
  }
  RunManifest m = RunManifest::from_json(read_file(path));
  auto check = [&](const char* what, const std::string& have, const std::string& want) {
    if (have != want) {
      throw Error(ErrorKind::kConfig, std::string(what) + " digest mismatch with " + path.string() + " (manifest " +
                                          have + ", current " + want + "); use a fresh output directory");
    }
  };
  check("config", m.config_digest, expected.config_digest);
  check("stimuli", m.stimuli_digest, expected.stimuli_digest);
  // The audit stage runs before a lexicon may be configured.
  if (!m.lexicon_digest.empty() && !expected.lexicon_digest.empty()) {
    check("lexicon", m.lexicon_digest, expected.lexicon_digest);
  }
  check("endpoint", m.endpoint_id, expected.endpoint_id);
  if (m.seeds.clustering != expected.seeds.clustering || m.seeds.stats != expected.seeds.stats) {
    throw Error(ErrorKind::kConfig, "seed mismatch with " + path.string() + "; use a fresh output directory");
  }
  if (m.lexicon_digest.empty() && !expected.lexicon_digest.empty()) {
    m.lexicon_digest = expected.lexicon_digest;
    m.run_id = expected.run_id;
  }
  m.toolkit_version = expected.toolkit_version;
  return m;
}

void verify_artifact(const std::filesystem::path& output_dir, const RunManifest& manifest, const std::string& name) {
  const auto path = output_dir / name;
  const auto it = manifest.artifacts.find(name);
  if (it == manifest.artifacts.end()) {
    throw Error(ErrorKind::kConfig, "manifest has no record of " + name + "; run the producing stage first");
  }
  if (!std::filesystem::exists(path)) throw Error(ErrorKind::kIo, "missing artifact " + path.string());
  const auto digest = sha256_file(path);
  if (digest != it->second) {
    throw Error(ErrorKind::kConfig, name + " digest mismatch with manifest (manifest " + it->second + ", file " +
                                        digest + ")");
  }
}

void write_manifest(const std::filesystem::path& output_dir, const RunManifest& manifest) {
  std::filesystem::create_directories(output_dir);
  write_file_atomic(output_dir / "manifest.json", manifest.to_json());
}

void emit(const std::filesystem::path& output_dir, RunManifest& manifest, const std::string& name,
          const std::string& contents) {
  std::filesystem::create_directories(output_dir);
  write_file_atomic(output_dir / name, contents);
  manifest.artifacts[name] = sha256_hex(contents);
}

}  // namespace stereotax::report
