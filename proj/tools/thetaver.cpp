// Command-line front end for the theta identity verifier.
//
//   thetaver verify    <file.theta> [--order N] [--shifts F] [--mode M] [--json]
//   thetaver relations <file.theta> [--shifts F] [--json]
//   thetaver pi        <"(w1);(w2);..." or file> [--json]
//   thetaver expand    <file.theta> [--order N] [--eta "(e1,..,er)"]
//   thetaver discover  <relations file> <candidates file> [--order N] [--json]
//   thetaver explain   <file.theta> [--order N] [--shifts F] [--mode M]
//
// Exit codes: 0 proved / clean, 2 verified to order only, 1 failed or
// unsupported, 3 input could not be read or parsed.
#include "thetaver/certificate_io.hpp"
#include "thetaver/files.hpp"
#include "thetaver/prover.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using namespace thetaver;

constexpr int kExitProved = 0;
constexpr int kExitVerifiedToOrder = 2;
constexpr int kExitFailed = 1;
constexpr int kExitParse = 3;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_parse_error(const std::string& path, const std::string& text, const ParseError& e) {
  std::size_t line = 1, col = 1, line_start = 0;
  for (std::size_t i = 0; i < e.span.start && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
      line_start = i + 1;
    } else {
      ++col;
    }
  }
  std::cerr << path << ":" << line << ":" << col << ": error: " << e.message << "\n";
  std::size_t line_end = text.find('\n', line_start);
  if (line_end == std::string::npos) line_end = text.size();
  std::cerr << "  " << text.substr(line_start, line_end - line_start) << "\n";
  std::cerr << "  " << std::string(col - 1, ' ') << "^\n";
}

std::optional<Identity> load_identity_or_report(const std::string& path, int& exit_code) {
  auto text = read_file(path);
  if (!text) {
    std::cerr << "error: cannot read " << path << "\n";
    exit_code = kExitParse;
    return std::nullopt;
  }
  auto parsed = parse_identity(*text);
  if (!parsed.ok()) {
    print_parse_error(path, *text, parsed.error());
    exit_code = kExitParse;
    return std::nullopt;
  }
  return parsed.value();
}

std::optional<std::vector<RatVec>> load_shifts_or_report(const std::string& path,
                                                         int& exit_code) {
  auto text = read_file(path);
  if (!text) {
    std::cerr << "error: cannot read " << path << "\n";
    exit_code = kExitParse;
    return std::nullopt;
  }
  auto parsed = parse_shifts_file(*text);
  if (!parsed.ok()) {
    std::cerr << path << ":" << parsed.error().line << ": error: " << parsed.error().message
              << "\n";
    exit_code = kExitParse;
    return std::nullopt;
  }
  return parsed.value();
}

std::optional<ProofMode> parse_mode(const std::string& mode) {
  if (mode == "exact") return ProofMode::Exact;
  if (mode == "series") return ProofMode::Series;
  return std::nullopt;
}

std::optional<std::vector<IntVec>> parse_w_argument(const std::string& arg) {
  // "(1,1);(0,2)" — or a file whose contents look like that / one per line
  std::string text = arg;
  if (auto file = read_file(arg)) text = *file;
  std::vector<IntVec> w;
  std::string cur;
  auto flush = [&]() -> bool {
    std::size_t a = cur.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) {
      cur.clear();
      return true;
    }
    std::size_t b = cur.find_last_not_of(" \t\r\n");
    RatVec v;
    if (!files_detail::parse_vec(std::string_view(cur).substr(a, b - a + 1), v)) return false;
    IntVec iv;
    for (const Rat& x : v) {
      if (!is_integer(x)) return false;
      iv.push_back(numerator(x));
    }
    w.push_back(std::move(iv));
    cur.clear();
    return true;
  };
  for (char c : text) {
    if (c == ';' || c == '\n') {
      if (!flush()) return std::nullopt;
    } else if (c == '#') {
      cur += ';';  // comment terminates a vector like a separator would
    } else {
      cur += c;
    }
  }
  if (!flush()) return std::nullopt;
  if (w.empty()) return std::nullopt;
  for (const IntVec& v : w)
    if (v.size() != w.front().size()) return std::nullopt;
  return w;
}

int cmd_verify(const std::string& path, const Rat& order,
               const std::optional<std::string>& shifts_path, const std::string& mode,
               bool json, bool explain_text) {
  int code = kExitParse;
  auto id = load_identity_or_report(path, code);
  if (!id) return code;
  VerifyOptions opt;
  opt.order = order;
  if (shifts_path) {
    auto shifts = load_shifts_or_report(*shifts_path, code);
    if (!shifts) return code;
    opt.shifts = shifts;
  }
  if (!mode.empty()) {
    auto m = parse_mode(mode);
    if (!m) {
      std::cerr << "error: --mode must be 'exact' or 'series'\n";
      return kExitParse;
    }
    opt.mode_override = m;
  }
  Certificate cert = verify(*id, opt);
  if (json)
    std::cout << certificate_json_text(cert);
  else if (explain_text)
    std::cout << explain(cert);
  else {
    std::cout << "identity: " << path << "\n";
    std::cout << "mode: " << (cert.mode == ProofMode::Exact ? "exact" : "series") << "\n";
    std::cout << "relations: " << cert.relations.relations.size()
              << ", |Pi_W| = " << cert.pi.size() << "\n";
    std::cout << "status: " << status_str(cert.status) << "\n";
  }
  return status_exit_code(cert.status);
}

int cmd_relations(const std::string& path, const std::optional<std::string>& shifts_path,
                  bool json) {
  int code = kExitParse;
  auto id = load_identity_or_report(path, code);
  if (!id) return code;
  std::optional<std::vector<RatVec>> shifts;
  if (shifts_path) {
    auto s = load_shifts_or_report(*shifts_path, code);
    if (!s) return code;
    shifts = s;
  }
  auto res = common_relation_system(*id, shifts);
  if (json) {
    ordered_json j;
    ordered_json rels = ordered_json::array();
    for (std::size_t i = 0; i < res.system.relations.size(); ++i) {
      const ContiguousRelation& rel = res.system.relations[i];
      ordered_json rj;
      rj["alpha"] = cert_io_detail::rat_vec_json(rel.alpha);
      rj["rho"] = std::to_string(rel.rho);
      rj["w"] = cert_io_detail::int_vec_json(rel.w);
      rj["s"] = rel.s.str();
      ordered_json ok = ordered_json::array();
      if (i < res.per_term_ok.size())
        for (bool b : res.per_term_ok[i]) ok.push_back(b);
      rj["per_term_ok"] = ok;
      rj["alpha_integral"] = rel.alpha_integral();
      rels.push_back(rj);
    }
    j["relations"] = rels;
    j["mismatch"] = res.mismatch
                        ? ordered_json("term " + std::to_string(res.mismatch->term_index + 1) +
                                       ", relation " +
                                       std::to_string(res.mismatch->relation_index + 1) + ": " +
                                       res.mismatch->detail)
                        : ordered_json(nullptr);
    std::cout << j.dump(2) << "\n";
  } else {
    for (const ContiguousRelation& rel : res.system.relations) {
      std::cout << format_relation(rel, id->vars) << "   [alpha = " << vec_str(rel.alpha)
                << "]";
      if (!rel.alpha_integral()) std::cout << "  (non-integral shift)";
      std::cout << "\n";
    }
    if (res.mismatch)
      std::cout << "mismatch at term " << res.mismatch->term_index + 1 << ", relation "
                << res.mismatch->relation_index + 1 << ": " << res.mismatch->detail << "\n";
  }
  return res.mismatch ? kExitFailed : kExitProved;
}

int cmd_pi(const std::string& arg, bool json) {
  auto w = parse_w_argument(arg);
  if (!w) {
    std::cerr << "error: expected generators like \"(1,1);(0,2)\" or a file of vectors\n";
    return kExitParse;
  }
  try {
    PiSet pi = pi_points(*w);
    if (json) {
      ordered_json j;
      ordered_json ws = ordered_json::array();
      for (const IntVec& v : pi.w) ws.push_back(cert_io_detail::int_vec_json(v));
      j["W"] = ws;
      j["count"] = pi.saturation_index.str();
      ordered_json pts = ordered_json::array();
      for (const IntVec& v : pi.points) pts.push_back(cert_io_detail::int_vec_json(v));
      j["pi"] = pts;
      std::cout << j.dump(2) << "\n";
    } else {
      std::cout << "|Pi_W| = " << pi.saturation_index.str() << "\n";
      for (const IntVec& p : pi.points) std::cout << vec_str(p) << "\n";
    }
    return kExitProved;
  } catch (const DependentW& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailed;
  }
}

int cmd_expand(const std::string& path, const Rat& order, const std::string& eta_arg) {
  int code = kExitParse;
  auto id = load_identity_or_report(path, code);
  if (!id) return code;
  std::optional<IntVec> eta;
  if (!eta_arg.empty()) {
    RatVec v;
    if (!files_detail::parse_vec(eta_arg, v) || v.size() != id->vars.size()) {
      std::cerr << "error: --eta expects an integer vector over the declared variables\n";
      return kExitParse;
    }
    IntVec iv;
    for (const Rat& x : v) {
      if (!is_integer(x)) {
        std::cerr << "error: --eta entries must be integers\n";
        return kExitParse;
      }
      iv.push_back(numerator(x));
    }
    eta = iv;
  }
  Int d = identity_denominator(*id);
  auto show = [&](const LaurentMap& m) {
    if (eta) {
      auto it = m.find(*eta);
      std::cout << vec_str(*eta) << " : " << (it == m.end() ? "0" : series_str(it->second))
                << "\n";
    } else {
      std::cout << laurent_str(m);
    }
  };
  LaurentMap sum;
  for (std::size_t k = 0; k < id->terms.size(); ++k) {
    std::cout << "term " << k + 1 << ":\n";
    LaurentMap m = expand_term(id->terms[k], order, d);
    show(m);
    for (const auto& [e, s] : m) laurent_detail::accumulate(sum, e, s);
  }
  std::cout << "sum:\n";
  show(sum);
  return kExitProved;
}

int cmd_discover(const std::string& rel_path, const std::string& cand_path, const Rat& order,
                 bool json) {
  auto rel_text = read_file(rel_path);
  if (!rel_text) {
    std::cerr << "error: cannot read " << rel_path << "\n";
    return kExitParse;
  }
  auto rels = parse_relations_file(*rel_text);
  if (!rels.ok()) {
    std::cerr << rel_path << ":" << rels.error().line << ": error: " << rels.error().message
              << "\n";
    return kExitParse;
  }
  auto cand_text = read_file(cand_path);
  if (!cand_text) {
    std::cerr << "error: cannot read " << cand_path << "\n";
    return kExitParse;
  }
  auto cands = parse_candidates_file(*cand_text);
  if (!cands.ok()) {
    std::cerr << cand_path << ":" << cands.error().line << ": error: " << cands.error().message
              << "\n";
    return kExitParse;
  }
  RelationSystem sys;
  sys.relations = rels.value();
  for (const ContiguousRelation& rel : sys.relations)
    if (rel.alpha.size() != cands.value().vars.size()) {
      std::cerr << "error: relation vectors and candidate variables disagree in length\n";
      return kExitParse;
    }
  DiscoverOptions opt;
  opt.order = order;
  auto res = discover(sys, cands.value().candidates, cands.value().vars, opt);
  if (!res.ok()) {
    std::cerr << "no candidates survive the relation filter:\n";
    for (const std::string& r : res.error().rejections) std::cerr << "  " << r << "\n";
    return kExitFailed;
  }
  const DiscoveryResult& d = res.value();
  if (json) {
    ordered_json j;
    ordered_json survivors = ordered_json::array();
    for (std::size_t i : d.survivor_index) survivors.push_back(i + 1);
    j["survivors"] = survivors;
    ordered_json pts = ordered_json::array();
    for (const IntVec& v : d.pi.points) pts.push_back(cert_io_detail::int_vec_json(v));
    j["pi"] = pts;
    ordered_json deps = ordered_json::array();
    for (const DiscoveryDependency& dep : d.dependencies) {
      ordered_json dj;
      dj["coeffs"] = cert_io_detail::rat_vec_json(dep.coeffs);
      dj["certificate"] = certificate_json(dep.certificate);
      deps.push_back(dj);
    }
    j["dependencies"] = deps;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << d.survivors.size() << " of " << cands.value().candidates.size()
              << " candidates satisfy the relations; |Pi_W| = " << d.pi.points.size() << "\n";
    if (d.dependencies.empty()) {
      std::cout << "no dependencies found\n";
    }
    for (const DiscoveryDependency& dep : d.dependencies) {
      std::cout << "dependency " << vec_str(dep.coeffs) << "\n";
      std::cout << "  status: " << status_str(dep.certificate.status) << "\n";
      std::cout << "  identity: " << dep.certificate.identity_text << "\n";
    }
  }
  return kExitProved;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact verifier and discovery engine for multiple theta function identities"};
  app.require_subcommand(1);

  std::string path, shifts_path, mode, eta_arg, w_arg, rel_path, cand_path;
  long order_long = 100;
  long discover_order_long = 60;
  bool json = false;

  auto add_order = [&](CLI::App* cmd) {
    cmd->add_option("--order", order_long, "truncation order N")->check(CLI::PositiveNumber);
  };

  CLI::App* verify_cmd = app.add_subcommand("verify", "verify an identity file");
  verify_cmd->add_option("file", path, "identity file (.theta)")->required();
  add_order(verify_cmd);
  verify_cmd->add_option("--shifts", shifts_path, "file of shift vectors");
  verify_cmd->add_option("--mode", mode, "exact|series override");
  verify_cmd->add_flag("--json", json, "emit the JSON certificate");

  CLI::App* relations_cmd = app.add_subcommand("relations", "print the shared relation system");
  relations_cmd->add_option("file", path, "identity file (.theta)")->required();
  relations_cmd->add_option("--shifts", shifts_path, "file of shift vectors");
  relations_cmd->add_flag("--json", json, "emit JSON");

  CLI::App* pi_cmd = app.add_subcommand("pi", "integer points of the fundamental parallelepiped");
  pi_cmd->add_option("generators", w_arg, "\"(w1);(w2);...\" or a file of vectors")->required();
  pi_cmd->add_flag("--json", json, "emit JSON");

  CLI::App* expand_cmd = app.add_subcommand("expand", "series-expand the terms of an identity");
  expand_cmd->add_option("file", path, "identity file (.theta)")->required();
  add_order(expand_cmd);
  expand_cmd->add_option("--eta", eta_arg, "only the entry at this a-exponent vector");

  CLI::App* discover_cmd = app.add_subcommand("discover", "find dependencies among candidates");
  discover_cmd->add_option("relations", rel_path, "relations file")->required();
  discover_cmd->add_option("candidates", cand_path, "candidates file")->required();
  discover_cmd->add_option("--order", discover_order_long, "matrix truncation order")
      ->check(CLI::PositiveNumber);
  discover_cmd->add_flag("--json", json, "emit JSON");

  CLI::App* explain_cmd = app.add_subcommand("explain", "verify and print a proof transcript");
  explain_cmd->add_option("file", path, "identity file (.theta)")->required();
  add_order(explain_cmd);
  explain_cmd->add_option("--shifts", shifts_path, "file of shift vectors");
  explain_cmd->add_option("--mode", mode, "exact|series override");

  CLI11_PARSE(app, argc, argv);

  Rat order(order_long);
  std::optional<std::string> shifts =
      shifts_path.empty() ? std::nullopt : std::optional<std::string>(shifts_path);

  try {
    if (verify_cmd->parsed())
      return cmd_verify(path, order, shifts, mode, json, /*explain_text=*/false);
    if (relations_cmd->parsed()) return cmd_relations(path, shifts, json);
    if (pi_cmd->parsed()) return cmd_pi(w_arg, json);
    if (expand_cmd->parsed()) return cmd_expand(path, order, eta_arg);
    if (discover_cmd->parsed())
      return cmd_discover(rel_path, cand_path, Rat(discover_order_long), json);
    if (explain_cmd->parsed())
      return cmd_verify(path, order, shifts, mode, /*json=*/false, /*explain_text=*/true);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailed;
  }
  return kExitFailed;
}
