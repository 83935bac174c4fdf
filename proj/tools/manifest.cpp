#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace gascap::tools {

std::string git_blob_hash(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  const bool ok = ctx && EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) &&
                  EVP_DigestFinal_ex(ctx, md.data(), &len);
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("sha1 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int j = 0; j < len; ++j) {
    out += hex[md[j] >> 4];
    out += hex[md[j] & 0xF];
  }
  return out;
}

void RunManifest::write(const std::filesystem::path& dir, const std::string& name,
                        const std::string& content) {
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
  f << content;
  outputs_.emplace_back(name, git_blob_hash(content));
}

void RunManifest::finish(const std::filesystem::path& dir) const {
  nlohmann::json j;
  j["command"] = command_;
  j["args"] = args_;
  j["seed"] = seed_;
  if (!instance_source_.empty()) {
    j["instance"] = {{"source", instance_source_}, {"hash", instance_hash_}};
  }
  auto& outs = j["outputs"] = nlohmann::json::object();
  for (const auto& [name, hash] : outputs_) outs[name] = hash;
  std::ofstream f(dir / "manifest.json", std::ios::binary);
  if (!f) throw std::runtime_error("cannot write manifest.json");
  f << j.dump(2) << '\n';
}

}  // namespace gascap::tools
