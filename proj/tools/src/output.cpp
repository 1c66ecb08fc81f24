#include <magbill/errors.hpp>
#include <magbill_cli/output.hpp>

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace magbill::cli {

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

std::string csv_row(std::initializer_list<double> values) {
  std::string row;
  bool first = true;
  for (double v : values) {
    if (!first) row += ',';
    row += format_number(v);
    first = false;
  }
  row += '\n';
  return row;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::InvalidConfig, "sha256 failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

namespace {

void write_file(const std::filesystem::path& file, const std::string& content) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw Error(ErrorCode::InvalidConfig, "cannot open '" + file.string() + "' for writing");
  os << content;
  if (!os) throw Error(ErrorCode::InvalidConfig, "failed writing '" + file.string() + "'");
}

}  // namespace

std::filesystem::path write_artifact(const std::filesystem::path& file, const std::string& content,
                                     const nlohmann::json& meta) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  write_file(file, content);
  const std::filesystem::path sidecar = file.parent_path() / (file.stem().string() + ".meta.json");
  nlohmann::json m = meta;
  m["data_file"] = file.filename().string();
  write_file(sidecar, m.dump(2) + "\n");
  return sidecar;
}

}  // namespace magbill::cli
