#include "run_context.hpp"

#include "homog/io.hpp"
#include "homog/types.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#ifndef HOMOG_VERSION
#define HOMOG_VERSION "unknown"
#endif

namespace homog::cli {

namespace fs = std::filesystem;

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

RunContext::RunContext(std::string command, const GlobalOptions& global)
    : command_(std::move(command)), global_(global), started_(utc_timestamp()) {
  if (!global.out.empty()) {
    out_dir_ = global.out;
    out_source_ = "flag";
  } else if (const char* env = std::getenv("HOMOG_OUT_DIR"); env && *env) {
    out_dir_ = env;
    out_source_ = "HOMOG_OUT_DIR";
  } else {
    out_dir_ = "homog_out";
    out_source_ = "default";
  }
  std::error_code ec;
  fs::create_directories(out_dir_, ec);
  if (ec) throw ConfigError("cannot create output directory " + out_dir_.string());
}

fs::path RunContext::output(const std::string& name) {
  if (std::find(outputs_.begin(), outputs_.end(), name) == outputs_.end()) outputs_.push_back(name);
  return out_dir_ / name;
}

void RunContext::add_input(const fs::path& path) {
  inputs_.push_back({{"path", path.string()}, {"sha256", sha256_file(path)}});
}

void RunContext::finish(int exit_code, const std::string& error) {
  output("manifest.json");
  std::vector<std::string> files;
  for (const auto& name : outputs_)
    if (name == "manifest.json" || fs::exists(out_dir_ / name)) files.push_back(name);
  nlohmann::json m;
  m["command"] = command_;
  m["tool_version"] = HOMOG_VERSION;
  m["started"] = started_;
  m["finished"] = utc_timestamp();
  m["configuration"] = config_;
  m["global"] = {{"config", global_.config},
                 {"out", out_dir_.string()},
                 {"out_source", out_source_},
                 {"threads", global_.threads},
                 {"tol", global_.tol},
                 {"strict", global_.strict},
                 {"seed", global_.seed}};
  m["inputs"] = inputs_;
  m["outputs"] = files;
  m["exit_code"] = exit_code;
  if (!error.empty()) m["error"] = error;
  m["results"] = results_;
  write_json(out_dir_ / "manifest.json", m);
}

}  // namespace homog::cli
