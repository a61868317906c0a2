#include "twolink/trace.hpp"

#include <openssl/evp.h>

#include <array>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace twolink {

Json to_json(const Trace& t) {
  Json arr = Json::array();
  for (const auto& s : t.steps) {
    Json j;
    j["op"] = s.op;
    j["params"] = s.params;
    j["citations"] = s.citations;
    j["deltas"] = s.deltas;
    j["digest"] = s.digest;
    arr.push_back(std::move(j));
  }
  return arr;
}

Trace trace_from_json(const Json& j) {
  Trace t;
  for (const auto& s : j) {
    TraceStep step;
    step.op = s.at("op").get<std::string>();
    step.params = s.at("params");
    step.citations = s.at("citations").get<std::vector<std::string>>();
    step.deltas = s.at("deltas");
    step.digest = s.at("digest").get<std::string>();
    t.steps.push_back(std::move(step));
  }
  return t;
}

std::string sha256_hex(const std::string& data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

}  // namespace twolink
