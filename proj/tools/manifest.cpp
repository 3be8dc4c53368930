#include "manifest.hpp"

#include <array>
#include <fstream>
#include <memory>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "densekit/error.hpp"

namespace densekit::cli {

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open input for hashing: " + path.string());
    }
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256: digest initialisation failed");
    }
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) {
            EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
        }
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        hex.push_back(kHex[md[i] >> 4]);
        hex.push_back(kHex[md[i] & 0xF]);
    }
    return hex;
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = "densekit";
    j["tool_version"] = tool_version;
    j["subcommand"] = subcommand;
    j["flags"] = flags;
    j["seed"] = seed;
    auto& in = j["inputs"] = nlohmann::ordered_json::array();
    for (const auto& p : inputs) {
        in.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
    }
    j["outputs"] = outputs;
    j["wall_clock_seconds"] = wall_clock_seconds;
    return j.dump(2) + "\n";
}

}  // namespace densekit::cli
