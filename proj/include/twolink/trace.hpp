#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace twolink {

using Json = nlohmann::ordered_json;

struct TraceStep {
  std::string op;
  Json params = Json::object();
  std::vector<std::string> citations;
  Json deltas = Json::object();
  std::string digest;  // sha256 of the record state after this step
};

struct Trace {
  std::vector<TraceStep> steps;
};

Json to_json(const Trace& t);
Trace trace_from_json(const Json& j);

std::string sha256_hex(const std::string& data);

// Literature results the rewrite rules rely on.
namespace cite {
inline constexpr const char* kKnotSurgery = "Fintushel-Stern knot surgery formula SW(M_K) = SW(M) * Delta_K(t^2)";
inline constexpr const char* kTaubesGluing = "Taubes gluing formula for SW invariants of fiber sums along square-zero tori";
inline constexpr const char* kParkRelative = "B.D. Park: SW(T^2 x Sigma_g) = (t^-1 - t)^(2g-2), relative SW(T^2 x Sigma_g^0) = (t^-1 - t)^(2g-1)";
inline constexpr const char* kTaubesSymplectic = "Taubes: closed symplectic 4-manifolds with b+ > 1 have nonzero SW invariant";
inline constexpr const char* kFiberSum = "Gompf generalized fiber sum; Seifert-van Kampen for the glued fundamental group";
inline constexpr const char* kNovikov = "Novikov additivity of the signature";
inline constexpr const char* kLoopSurgery = "Wallace/Milnor surgery on framed loops";
inline constexpr const char* kLogTransform = "Multiplicity zero log transform (Gompf-Stipsicz)";
inline constexpr const char* kMoishezon = "Moishezon: a loop surgery splits as a zero log transform followed by a loop surgery";
inline constexpr const char* kDissolve = "Akbulut / Auckly / Baykur: knot surgery dissolves after one S^2 x S^2 stabilization";
inline constexpr const char* kMandelbaumGompf = "Mandelbaum-Gompf: F # S^2xS^2 is diffeomorphic to X # B* for a fiber sum F = X #_T B";
inline constexpr const char* kFreedman = "Freedman classification of simply connected topological 4-manifolds";
inline constexpr const char* kWall = "Wall: automorphisms of indefinite unimodular forms are realized after stabilization";
inline constexpr const char* kQuinnPerron = "Quinn / Perron: pseudo-isotopy implies topological isotopy for simply connected 4-manifolds";
inline constexpr const char* kSerreClassification = "Classification of indefinite unimodular forms by rank, signature and type";
}  // namespace cite

}  // namespace twolink
