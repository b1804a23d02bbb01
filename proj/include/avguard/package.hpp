#ifndef AVGUARD_PACKAGE_HPP
#define AVGUARD_PACKAGE_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "avguard/ir.hpp"
#include "avguard/manifest.hpp"

namespace avguard {

// The unit that flows through the pipeline: manifest + IR program + assets,
// stored on disk as a directory with manifest.xml, program.avir, assets/,
// version and (after market signing) signature.bin.
struct AppPackage {
  AppManifest manifest;
  AppProgram program;  // asset tables bound from `assets`
  std::map<std::string, std::string> assets;  // name -> raw bytes
  std::string version = "1.0.0";
  std::vector<uint8_t> signature;  // detached; empty when unsigned
};

// Loads and binds a package directory. Parse or validation failures of the
// contained files surface as the underlying AvError; unreadable layout as
// PackageUnreadable. The manifest/program app_id agreement is enforced.
AppPackage load_package(const std::filesystem::path& dir);

void store_package(const AppPackage& pkg, const std::filesystem::path& dir);

// Deterministic byte serialization covering manifest, program, version and
// assets (sorted by name). Signatures are computed over exactly these bytes.
std::string canonical_package_bytes(const AppPackage& pkg);

// SHA-256 of the canonical bytes, lowercase hex.
std::string package_hash_hex(const AppPackage& pkg);

struct MarketKeys {
  std::vector<uint8_t> public_key;  // Ed25519, 32 bytes
  std::vector<uint8_t> secret_key;  // Ed25519, 64 bytes (empty on verify-only side)
};

MarketKeys generate_market_keys();
void save_market_keys(const MarketKeys& keys, const std::filesystem::path& dir);
MarketKeys load_market_keys(const std::filesystem::path& dir, bool need_secret);
std::vector<uint8_t> load_public_key(const std::filesystem::path& file);

std::vector<uint8_t> sign_detached(const std::string& bytes, const MarketKeys& keys);
bool verify_detached(const std::string& bytes, const std::vector<uint8_t>& signature,
                     const std::vector<uint8_t>& public_key);

}  // namespace avguard

#endif  // AVGUARD_PACKAGE_HPP
