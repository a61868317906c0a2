#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "twolink/knots.hpp"
#include "twolink/surgery.hpp"

namespace twolink {

// ---------------------------------------------------------------------------
// Lemma suite

struct LemmaCheck {
  std::string name;
  int g = 0;
  InvariantTuple expected, actual;
  bool pass = false;
  std::string detail;
};

struct LemmaOptions {
  bool corrupt_relator = false;  // negative control: breaks one relator of pi1(N_g)
  TietzeOptions tietze;
};

struct LemmaReport {
  std::vector<LemmaCheck> checks;
  bool all_pass() const;
};

LemmaReport verify_lemma_suite(int g_max, const LemmaOptions& opts = {});
Json to_json(const LemmaReport& r);
std::string render_table(const LemmaReport& r);

// Fiber sum of g copies of T2 x Sigma_1 along the product tori.
ManifoldRecord iterated_product_sum(int g);
// N_1 #_T ... #_T N_1, left-nested.
ManifoldRecord iterated_N1_sum(int g);

// ---------------------------------------------------------------------------
// Recipe

struct GroupSpec {
  enum class Kind { free, surface };
  Kind kind = Kind::free;
  int g = 1;
  int components() const { return kind == Kind::free ? g : 2 * g; }
  std::string to_string() const;
};

GroupSpec parse_group_spec(std::string_view text);
// "twist:a..b" (a must be 0) or "list:<braid>;<braid>;..." (first knot must have trivial Alexander polynomial).
std::vector<KnotRecord> parse_knot_spec(std::string_view text);

enum class CompareMode { strict, conjugation };

struct RecipeConfig {
  std::string spec_text;
  std::string spec_name;
  GroupSpec group;
  std::vector<KnotRecord> knots;
  std::string knots_spec;
  CompareMode compare = CompareMode::conjugation;
  TietzeOptions tietze;
};

struct ReportEntry {
  enum class Kind { computed, trusted };
  std::string id;
  Kind kind = Kind::computed;
  std::string claim;
  std::string status;  // computed: "pass" / "fail"; trusted: "cited" / "withheld"
  std::vector<std::string> citations;
  std::string trace_ref;
  std::vector<std::string> depends_on;
};

struct KnotResult {
  KnotRecord knot;
  ManifoldRecord z, z_star;
  std::vector<std::string> gamma;
  std::string link_group;
  bool link_group_ok = false;
  InvariantTuple ambient;
  bool ambient_ok = false;
  bool reconstruction_ok = false;
};

struct SwVerdict {
  std::size_t a = 0, b = 0;
  std::string verdict;  // "distinct", "equal" or "incomparable"
  std::optional<UnitWitness> witness;
};

struct CertificateReport {
  RecipeConfig config;
  std::string knot_torus = "T1", fiber_torus = "T2";
  bool roles_swapped = false;
  std::string roles_reason;
  std::vector<KnotResult> results;
  InvariantTuple reference;  // M # n(S2xS2)
  std::vector<SwVerdict> sw;
  Json symmetry = Json::object();
  Json brunnian = Json::object();
  std::vector<ReportEntry> entries;
  std::vector<std::string> partition_errors;
  bool all_computed_pass() const;
};

CertificateReport run_recipe(const RecipeConfig& cfg);
// Fills report.brunnian (and its entries) for the free configuration.
void brunnian_certificate(CertificateReport& report, const ManifoldRecord& m);
std::vector<std::string> validate_partition(const std::vector<ReportEntry>& entries);

Json to_json(const CertificateReport& r);
std::string render_report(const Json& report);

struct TraceVerification {
  bool ok = true;
  std::vector<std::string> lines;
};

// Replays every record stored in a report JSON and compares it byte for byte.
TraceVerification verify_report_traces(const Json& report, std::optional<std::size_t> step = std::nullopt);

// Brunnian bucket bookkeeping: minimum over all assignments of framing classes to
// `buckets` diffeomorphism types of the largest bucket.
struct PigeonholeResult {
  std::size_t guaranteed = 0;
  std::vector<int> worst_assignment;  // bucket per class
  std::size_t assignments_explored = 0;
};
PigeonholeResult pigeonhole(const std::vector<std::size_t>& class_sizes, int buckets = 4);

}  // namespace twolink
