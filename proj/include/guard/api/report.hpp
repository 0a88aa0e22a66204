#ifndef GUARD_API_REPORT_HPP
#define GUARD_API_REPORT_HPP

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "guard/api/artifact.hpp"
#include "guard/verdict.hpp"

namespace guard::api {

inline constexpr const char *version = "0.1.0";

struct Report {
  Kind kind = Kind::Command;
  Verdict verdict = Verified{};
  std::vector<ObligationRecord> obligations;
  double timing_ms = 0;
  std::string solver;
  std::string version = api::version;
  nlohmann::json details = nlohmann::json::object(); // kind-specific

  bool operator==(const Report &) const = default;
};

using nlohmann::json;

// Values: Bool as JSON bool, Int and Real as exact decimal / "p/q" strings,
// bitvectors as hex, strings verbatim, arrays as {default, entries}.
inline json value_to_json(const smt::Value &v)
{
  json out;
  out["sort"] = v.sort_name();
  if (v.is_bool()) {
    out["value"] = v.as_bool();
  } else if (v.is_int() || v.is_real()) {
    out["value"] = v.to_string();
  } else if (v.is_bv()) {
    out["value"] = smt::hex_string(v.as_bv().bits, v.as_bv().width);
  } else if (v.is_string()) {
    out["value"] = v.as_string();
  } else if (v.is_array()) {
    const auto &a = v.as_array();
    json entries = json::array();
    for (auto &[k, e] : a.entries)
      entries.push_back({smt::hex_string(k, a.index_width), smt::hex_string(e, a.fallback.width)});
    out["value"] = {{"default", smt::hex_string(a.fallback.bits, a.fallback.width)},
                    {"entries", entries}};
  } else {
    out["value"] = {{"algebraic", v.as_algebraic().text}};
  }
  return out;
}

namespace detail {

inline uint64_t parse_hex(const std::string &s)
{
  if (s.size() < 3 || s.compare(0, 2, "0x") != 0)
    throw Error("expected a hex literal, got '" + s + "'");
  return std::stoull(s.substr(2), nullptr, 16);
}

inline smt::Rational parse_rational(const std::string &s)
{
  auto slash = s.find('/');
  if (slash == std::string::npos)
    return smt::Rational{smt::Integer{s}};
  return smt::Rational{smt::Integer{s.substr(0, slash)}, smt::Integer{s.substr(slash + 1)}};
}

} // namespace detail

inline smt::Value value_from_json(const json &j)
{
  const std::string sort = j.at("sort").get<std::string>();
  const json &v = j.at("value");
  unsigned w = 0, ew = 0;
  if (sort == "Bool")
    return smt::Value{v.get<bool>()};
  if (sort == "Int")
    return smt::Value{smt::Integer{v.get<std::string>()}};
  if (sort == "Real") {
    if (v.is_object())
      return smt::Value{smt::AlgebraicValue{v.at("algebraic").get<std::string>()}};
    return smt::Value{detail::parse_rational(v.get<std::string>())};
  }
  if (sort == "String")
    return smt::Value{v.get<std::string>()};
  if (std::sscanf(sort.c_str(), "(_ BitVec %u)", &w) == 1)
    return smt::Value::from_bv(detail::parse_hex(v.get<std::string>()), w);
  if (std::sscanf(sort.c_str(), "(Array (_ BitVec %u) (_ BitVec %u))", &w, &ew) == 2) {
    smt::ArrayValue a{smt::BitVecValue{detail::parse_hex(v.at("default").get<std::string>()), ew}, w, {}};
    for (auto &e : v.at("entries"))
      a.entries[detail::parse_hex(e.at(0).get<std::string>())] = detail::parse_hex(e.at(1).get<std::string>());
    return smt::Value{std::move(a)};
  }
  throw Error("unknown sort '" + sort + "' in report model");
}

inline json model_to_json(const smt::Model &m)
{
  json out = json::object();
  for (auto &[name, v] : m)
    out[name] = value_to_json(v);
  return out;
}

inline smt::Model model_from_json(const json &j)
{
  smt::Model m;
  for (auto &[name, v] : j.items())
    m.set(name, value_from_json(v));
  return m;
}

inline json verdict_to_json(const Verdict &v)
{
  json out;
  out["status"] = status_name(status_of(v));
  out["obligation"] = nullptr;
  out["witness"] = nullptr;
  out["model"] = json::object();
  if (auto *u = std::get_if<Unsafe>(&v)) {
    out["obligation"] = u->obligation;
    out["witness"] = u->witness;
    out["model"] = model_to_json(u->model);
  } else if (auto *n = std::get_if<Unsupported>(&v)) {
    out["feature"] = n->feature;
    out["line"] = n->line ? json(*n->line) : json(nullptr);
  } else if (auto *k = std::get_if<Unknown>(&v)) {
    out["obligation"] = k->obligation;
    out["reason"] = k->reason;
  }
  return out;
}

inline Verdict verdict_from_json(const json &j)
{
  auto st = parse_status(j.at("status").get<std::string>());
  if (!st)
    throw Error("unknown verdict status '" + j.at("status").get<std::string>() + "'");
  switch (*st) {
  case Status::Verified: return Verified{};
  case Status::Unsafe:
    return Unsafe{j.at("obligation").get<std::string>(), model_from_json(j.at("model")),
                  j.at("witness").get<std::string>()};
  case Status::Unsupported: {
    std::optional<int> line;
    if (!j.at("line").is_null())
      line = j.at("line").get<int>();
    return Unsupported{j.at("feature").get<std::string>(), line};
  }
  case Status::Unknown:
    return Unknown{j.at("obligation").get<std::string>(), j.at("reason").get<std::string>()};
  }
  throw Error("unreachable verdict status");
}

inline json to_json(const Report &r)
{
  json obs = json::array();
  for (auto &o : r.obligations)
    obs.push_back({{"label", o.label}, {"status", status_name(o.status)}, {"time_ms", o.time_ms}});
  return {{"kind", kind_name(r.kind)},
          {"verdict", verdict_to_json(r.verdict)},
          {"obligations", obs},
          {"timing_ms", r.timing_ms},
          {"solver", r.solver},
          {"version", r.version},
          {"details", r.details}};
}

inline Report report_from_json(const json &j)
{
  Report r;
  auto kind = parse_kind(j.at("kind").get<std::string>());
  if (!kind)
    throw Error("unknown artifact kind '" + j.at("kind").get<std::string>() + "'");
  r.kind = *kind;
  r.verdict = verdict_from_json(j.at("verdict"));
  for (auto &o : j.at("obligations")) {
    auto st = parse_status(o.at("status").get<std::string>());
    if (!st)
      throw Error("unknown obligation status");
    r.obligations.push_back({o.at("label").get<std::string>(), *st, o.at("time_ms").get<double>()});
  }
  r.timing_ms = j.at("timing_ms").get<double>();
  r.solver = j.at("solver").get<std::string>();
  r.version = j.at("version").get<std::string>();
  r.details = j.value("details", json::object());
  return r;
}

} // namespace guard::api

#endif // GUARD_API_REPORT_HPP
