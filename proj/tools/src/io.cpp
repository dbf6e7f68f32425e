#include "io.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>

#include "opgrowth/error.hpp"

namespace opgrowth::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::invalid_argument, "cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md;
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", md[i]);
    hex += byte;
  }
  return hex;
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

OutputDir::OutputDir(std::filesystem::path dir) : dir_(std::move(dir)), start_(std::chrono::steady_clock::now()) {
  std::filesystem::create_directories(dir_);
}

void OutputDir::write_csv(const std::string& name, const std::vector<std::string>& header,
                          const std::vector<std::vector<double>>& rows) {
  std::ofstream out(dir_ / name);
  if (!out) throw Error(ErrorCode::invalid_argument, "cannot write " + (dir_ / name).string());
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_real(row[i]);
    out << '\n';
  }
  out.close();
  record(name);
}

void OutputDir::write_json(const std::string& name, const nlohmann::json& j) {
  std::ofstream out(dir_ / name);
  if (!out) throw Error(ErrorCode::invalid_argument, "cannot write " + (dir_ / name).string());
  out << j.dump(2) << '\n';
  out.close();
  record(name);
}

void OutputDir::warn_all(const std::vector<std::string>& messages, const std::string& prefix) {
  for (const auto& m : messages) warnings_.push_back(prefix.empty() ? m : prefix + ": " + m);
}

void OutputDir::record(const std::string& name) {
  for (const auto& f : files_)
    if (f == name) return;
  files_.push_back(name);
}

void OutputDir::finish(const std::string& command, const nlohmann::json& config) {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& f : files_) files.push_back({{"path", f}, {"sha256", sha256_file(dir_ / f)}});
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  nlohmann::json m{{"tool", "opgrowth"},
                   {"version", OPGROWTH_VERSION},
                   {"command", command},
                   {"config", config},
                   {"files", files},
                   {"wall_time_s", wall},
                   {"warnings", warnings_}};
  for (auto it = extra_.begin(); it != extra_.end(); ++it) m[it.key()] = it.value();
  std::ofstream out(dir_ / "manifest.json");
  out << m.dump(2) << '\n';
}

}  // namespace opgrowth::cli
