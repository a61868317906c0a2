#include "twolink/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "twolink/pipeline.hpp"

namespace twolink {

namespace {

constexpr const char* kGrammar =
    "braid grammar:   \"<strands>: s<i>^<e> s<j>^<e> ...\"   e.g. \"2: s1^3\", \"3: s1 s2^-1 s1 s2^-1\"\n"
    "group spec:      free:<g> | surface:<g>\n"
    "knot spec:       twist:0..<b> | list:<braid>;<braid>;...   (first knot must have Delta = 1)\n"
    "blocks:          S4 S2xS2 S2xS2_twisted T2xS2 S1xS3 T2xSigma N   (last two take --g)\n";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw UsageError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::size_t default_budget() {
  if (const char* env = std::getenv("TWOLINK_TIETZE_BUDGET")) {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return TietzeOptions{}.move_budget;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"twolink: exotic 2-link certificates from knot surgery and fiber sums"};
  app.name("twolink");
  app.require_subcommand(1);
  app.footer(kGrammar);

  TietzeOptions tietze;
  tietze.move_budget = default_budget();

  auto* knots = app.add_subcommand("knots", "knot utilities");
  knots->require_subcommand(1);
  std::string braid_text;
  auto* kpoly = knots->add_subcommand("poly", "normalized Alexander polynomial of a braid closure");
  kpoly->add_option("braid", braid_text, "braid word")->required();
  std::string family_text;
  auto* kfamily = knots->add_subcommand("family", "knot family as JSON");
  kfamily->add_option("spec", family_text, "knot spec")->required();

  std::string block_name;
  int block_g = 1;
  auto* blocks = app.add_subcommand("blocks", "standard building block as a JSON record");
  blocks->add_option("name", block_name, "block name")->required();
  blocks->add_option("--g", block_g, "genus for T2xSigma and N")->check(CLI::PositiveNumber);

  auto* recipe = app.add_subcommand("recipe", "exotic 2-link recipe");
  recipe->require_subcommand(1);
  auto* run = recipe->add_subcommand("run", "run the recipe and write the report JSON");
  std::string spec_path, group_text, knots_text, out_path, compare_text = "conjugation";
  run->add_option("--spec", spec_path, "manifold spec JSON")->required();
  run->add_option("--group", group_text, "free:<g> or surface:<g>")->required();
  run->add_option("--knots", knots_text, "knot family")->required();
  run->add_option("--out", out_path, "report path (stdout if omitted)");
  run->add_option("--compare", compare_text, "SW comparison mode")->check(CLI::IsMember({"strict", "conjugation"}));
  run->add_option("--budget-tietze", tietze.move_budget, "Tietze move budget")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "verification suites");
  verify->require_subcommand(1);
  auto* lemmas = verify->add_subcommand("lemmas", "run the lemma suite and print the pass table");
  int gmax = 4;
  bool lemmas_json = false, corrupt = false;
  lemmas->add_option("--gmax", gmax, "largest genus")->check(CLI::PositiveNumber);
  lemmas->add_flag("--json", lemmas_json, "print JSON instead of the table");
  lemmas->add_flag("--corrupt-relator", corrupt, "negative control: break one relator of pi1(N_g)");
  lemmas->add_option("--budget-tietze", tietze.move_budget, "Tietze move budget")->check(CLI::PositiveNumber);

  auto* vtrace = app.add_subcommand("verify-trace", "replay every record stored in a report");
  std::string report_path;
  std::optional<std::size_t> step;
  vtrace->add_option("report", report_path, "report JSON")->required();
  vtrace->add_option("--step", step, "replay only the first k steps");

  auto* report = app.add_subcommand("report", "report utilities");
  report->require_subcommand(1);
  auto* render = report->add_subcommand("render", "human-readable summary of a report");
  std::string render_path;
  render->add_option("report", render_path, "report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (kpoly->parsed()) {
      out << to_string(alexander_poly(parse_braid(braid_text))) << "\n";
      return 0;
    }
    if (kfamily->parsed()) {
      Json arr = Json::array();
      for (const auto& k : parse_knot_spec(family_text))
        arr.push_back({{"name", k.name}, {"braid", to_string(k.braid)}, {"alexander", to_string(k.alexander)}});
      out << arr.dump(2) << "\n";
      return 0;
    }
    if (blocks->parsed()) {
      ManifoldRecord r;
      if (block_name == "T2xSigma") r = product_T2_Sigma_g(block_g);
      else if (block_name == "N") r = N_g(block_g);
      else r = standard_block(block_name);
      out << to_json(r).dump(2) << "\n";
      return 0;
    }
    if (run->parsed()) {
      RecipeConfig cfg;
      cfg.spec_text = read_file(spec_path);
      cfg.spec_name = spec_path.substr(spec_path.find_last_of('/') + 1);
      cfg.group = parse_group_spec(group_text);
      cfg.knots_spec = knots_text;
      cfg.knots = parse_knot_spec(knots_text);
      cfg.compare = compare_text == "strict" ? CompareMode::strict : CompareMode::conjugation;
      cfg.tietze = tietze;
      const auto rep = run_recipe(cfg);
      const auto text = to_json(rep).dump(2) + "\n";
      if (out_path.empty()) {
        out << text;
      } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw UsageError("cannot write '" + out_path + "'");
        f << text;
      }
      for (const auto& e : rep.partition_errors) err << "partition: " << e << "\n";
      for (const auto& e : rep.entries)
        if (e.kind == ReportEntry::Kind::computed && e.status != "pass") err << "failed: " << e.id << "\n";
      return rep.all_computed_pass() && rep.partition_errors.empty() ? 0 : 1;
    }
    if (lemmas->parsed()) {
      LemmaOptions opts;
      opts.corrupt_relator = corrupt;
      opts.tietze = tietze;
      const auto rep = verify_lemma_suite(gmax, opts);
      out << (lemmas_json ? to_json(rep).dump(2) + "\n" : render_table(rep));
      return rep.all_pass() ? 0 : 1;
    }
    if (vtrace->parsed()) {
      const auto res = verify_report_traces(read_json(report_path), step);
      for (const auto& l : res.lines) out << l << "\n";
      return res.ok ? 0 : 1;
    }
    if (render->parsed()) {
      out << render_report(read_json(render_path));
      return 0;
    }
  } catch (const AdmissibilityError& e) {
    err << "spec rejected: " << e.what() << "\n";
    for (const auto& c : e.clauses) err << "  violated: " << c << "\n";
    return 1;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n" << kGrammar;
    return 2;
  } catch (const Json::exception& e) {
    err << "malformed JSON input: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n" << kGrammar;
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace twolink
