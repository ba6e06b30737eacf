#pragma once

// The cantor_perm command line. run() never calls exit; it returns the
// status: 0 ok, 1 bad arguments, 2 over budget, 3 integrity failure.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cantorperm/errors.hpp"
#include "cantorperm/finsets.hpp"
#include "cantorperm/gsets.hpp"
#include "cantorperm/linmon.hpp"
#include "cantorperm/measures.hpp"
#include "cantorperm/permcat.hpp"
#include "cantorperm/selftest.hpp"
#include "cantorperm/serialize.hpp"

namespace cantorperm::cli {

using json::Json;

enum ExitCode : int { ok = 0, argument_error = 1, capacity_error = 2, integrity_error = 3 };

namespace detail {

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ArgumentError(path + ": " + e.what());
  }
}

/// "0,0,1" -> surjection table.
inline std::vector<std::size_t> parse_table(const std::string& text) {
  std::vector<std::size_t> t;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
      throw ArgumentError("map table must be comma-separated non-negative integers, got \"" + text + "\"");
    t.push_back(std::stoul(item));
  }
  if (t.empty()) throw ArgumentError("empty map table");
  return t;
}

inline std::string scalar_text(const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

/// Key/value lines with aligned values; nested containers stay on one line.
inline void print_pretty(const Json& j, std::ostream& out) {
  if (!j.is_object()) {
    out << scalar_text(j) << '\n';
    return;
  }
  std::size_t width = 0;
  for (auto it = j.begin(); it != j.end(); ++it) width = std::max(width, it.key().size());
  for (auto it = j.begin(); it != j.end(); ++it)
    out << it.key() << std::string(width - it.key().size() + 2, ' ') << scalar_text(it.value()) << '\n';
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Exact orbit, measure and tensor-category computations for the Cantor-set homeomorphism group",
               "cantor_perm"};
  app.require_subcommand(1);
  bool pretty = false;
  app.add_flag("--pretty", pretty, "aligned text instead of JSON");
  app.fallthrough();

  // ample count
  auto* ample = app.add_subcommand("ample", "ample subsets of products");
  ample->require_subcommand(1);
  auto* ample_count = ample->add_subcommand("count", "number of ample subsets of [2]^n");
  std::size_t ample_n = 0;
  std::string ample_method = "ie";
  ample_count->add_option("--n", ample_n, "number of factors")->required();
  ample_count->add_option("--method", ample_method, "enum or ie")->check(CLI::IsMember({"enum", "ie"}));

  // decompose product
  auto* decompose = app.add_subcommand("decompose", "orbit decompositions");
  decompose->require_subcommand(1);
  auto* dec_product = decompose->add_subcommand("product", "X(A) x_X(C) X(B) for surjections f, g");
  std::string table_f, table_g;
  dec_product->add_option("--f", table_f, "table of f: A -> C, e.g. 0,0,1")->required();
  dec_product->add_option("--g", table_g, "table of g: B -> C")->required();

  // measure eval / solve
  auto* measure = app.add_subcommand("measure", "measures");
  measure->require_subcommand(1);
  auto* m_eval = measure->add_subcommand("eval", "measure of a G-set");
  std::string m_name, gset_file;
  m_eval->add_option("--measure", m_name, "mu or nu")->required()->check(CLI::IsMember({"mu", "nu"}));
  m_eval->add_option("--gset", gset_file, "G-set JSON file")->required();
  auto* m_solve = measure->add_subcommand("solve", "solve the regularity constraints");

  // perm compose / trace
  auto* perm = app.add_subcommand("perm", "matrices of the permutation-module category");
  perm->require_subcommand(1);
  auto* p_compose = perm->add_subcommand("compose", "lhs after rhs");
  std::string lhs_file, rhs_file, compose_mode = "fast";
  p_compose->add_option("--lhs", lhs_file, "matrix JSON applied second")->required();
  p_compose->add_option("--rhs", rhs_file, "matrix JSON applied first")->required();
  p_compose->add_option("--mode", compose_mode, "oracle, lemma or fast")->check(CLI::IsMember({"oracle", "lemma", "fast"}));
  auto* p_trace = perm->add_subcommand("trace", "categorical trace of an endomorphism");
  std::string trace_file, trace_mode = "categorical";
  p_trace->add_option("--in", trace_file, "matrix JSON")->required();
  p_trace->add_option("--mode", trace_mode, "categorical or closed")->check(CLI::IsMember({"categorical", "closed"}));

  // alg report / witness
  auto* alg = app.add_subcommand("alg", "contracted monoid algebras");
  alg->require_subcommand(1);
  auto* a_report = alg->add_subcommand("report", "radical and semisimplicity");
  std::string kind = "f2", report_out;
  std::size_t alg_n = 0;
  a_report->add_option("--kind", kind, "f2 or bool")->required()->check(CLI::IsMember({"f2", "bool"}));
  a_report->add_option("--n", alg_n, "matrix size")->required();
  a_report->add_option("--out", report_out, "also write the report to this file");
  auto* a_witness = alg->add_subcommand("witness", "nilpotent Boolean element with non-zero trace");
  std::size_t witness_n = 3;
  a_witness->add_option("--n", witness_n, "matrix size")->required();

  // classify
  auto* classify = app.add_subcommand("classify", "identify X(A)/R with some X(B)/Gamma");
  std::string relation_file;
  classify->add_option("--relation", relation_file, "equivalence family JSON")->required();

  // selftest
  auto* selftest = app.add_subcommand("selftest", "replay every claim");
  std::string level = "quick";
  selftest->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));

  std::vector<const char*> argv{"cantor_perm"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return argument_error;
  }

  try {
    Limits lim = Limits::from_env();
    Json result;
    if (ample_count->parsed()) {
      auto method = ample_method == "enum" ? CountMethod::enumerate : CountMethod::inclusion_exclusion;
      result = Json{{"n", ample_n}, {"method", ample_method}, {"count", count_ample_power2(ample_n, method, lim).get_str()}};
    } else if (dec_product->parsed()) {
      auto tf = detail::parse_table(table_f), tg = detail::parse_table(table_g);
      std::size_t cod = 1 + std::max(*std::max_element(tf.begin(), tf.end()), *std::max_element(tg.begin(), tg.end()));
      GMap f(SetMap(cod, tf)), g(SetMap(cod, tg));
      auto s = x_product_decompose(f, g, lim);
      Json profile = Json::object();
      for (const auto& [size, mult] : s.size_profile()) profile[std::to_string(size)] = mult;
      result = Json{{"piece_count", s.piece_count()}, {"size_profile", profile}, {"pieces", json::to_json(s)}};
    } else if (m_eval->parsed()) {
      auto m = MeasureSpec::from_name(m_name);
      auto s = json::gset_from_json(detail::read_json_file(gset_file));
      result = Json{{"measure", m.name()}, {"value", to_string(eval_measure(m, s))}};
    } else if (m_solve->parsed()) {
      Json alphas = Json::array();
      for (const auto& a : solve_regular_parameters(lim))
        alphas.push_back(a.get_den() == 1 ? a.get_num().get_str() : to_string(a));
      result = Json{{"alphas", alphas}};
    } else if (p_compose->parsed()) {
      auto b = json::perm_matrix_from_json(detail::read_json_file(lhs_file), lim);
      auto a = json::perm_matrix_from_json(detail::read_json_file(rhs_file), lim);
      auto mode = compose_mode == "oracle" ? ComposeMode::oracle
                  : compose_mode == "lemma" ? ComposeMode::lemma
                                            : ComposeMode::fast;
      result = json::to_json(compose(b, a, mode, lim));
    } else if (p_trace->parsed()) {
      auto m = json::perm_matrix_from_json(detail::read_json_file(trace_file), lim);
      auto mode = trace_mode == "closed" ? TraceMode::closed_form : TraceMode::categorical;
      result = Json{{"measure", m.measure().name()}, {"mode", trace_mode}, {"trace", to_string(trace(m, mode, lim))}};
    } else if (a_report->parsed()) {
      result = json::to_json(semisimplicity_report(kind_from_name(kind), alg_n, lim));
      if (!report_out.empty()) {
        std::ofstream f(report_out);
        if (!f) throw ArgumentError("cannot write " + report_out);
        f << result.dump(2) << '\n';
      }
    } else if (a_witness->parsed()) {
      auto w = find_trace_witness(witness_n, SemiringKind::Bool, lim);
      result = Json{{"kind", "bool"}, {"n", witness_n}};
      if (w) {
        result["witness"] = json::to_json(*w);
        result["trace"] = to_string(w->trace);
      } else {
        result["witness"] = nullptr;
      }
    } else if (classify->parsed()) {
      auto f = json::eqrel_from_json(detail::read_json_file(relation_file));
      bool valid = eqrel_validate(f, lim);
      result = Json{{"valid", valid}};
      if (valid) result["quotient"] = json::to_json(eqrel_classify(f, lim));
    } else if (selftest->parsed()) {
      SelftestOptions o;
      o.level = level == "full" ? SelftestLevel::full : SelftestLevel::quick;
      o.limits = lim;
      return run_selftest(o, out) ? ok : integrity_error;
    }
    if (pretty) detail::print_pretty(result, out);
    else out << result.dump(2) << '\n';
    return ok;
  } catch (const ArgumentError& e) {
    err << "argument error: " << e.what() << '\n';
    return argument_error;
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << '\n';
    return capacity_error;
  } catch (const IntegrityError& e) {
    err << "integrity error: " << e.what() << '\n';
    return integrity_error;
  }
}

}  // namespace cantorperm::cli
