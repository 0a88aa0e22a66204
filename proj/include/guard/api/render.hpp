#ifndef GUARD_API_RENDER_HPP
#define GUARD_API_RENDER_HPP

#include <iomanip>
#include <sstream>

#include "guard/api/report.hpp"

namespace guard::api {

inline std::string upper(std::string s)
{
  for (auto &c : s)
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

// Terminal rendering of a report.
inline std::string render_report(const Report &r)
{
  std::ostringstream os;
  os << std::left;
  auto field = [&](const std::string &name, const std::string &value) {
    os << std::setw(12) << (name + ":") << value << "\n";
  };
  field("kind", kind_name(r.kind));
  field("verdict", upper(status_name(status_of(r.verdict))));
  if (auto *u = std::get_if<Unsafe>(&r.verdict)) {
    field("obligation", u->obligation);
    field("witness", u->witness);
    if (r.kind != Kind::Command) // pattern flags are listed with the matches below
      for (auto &[name, v] : u->model)
        field("  " + name, v.to_string());
  } else if (auto *n = std::get_if<Unsupported>(&r.verdict)) {
    field("feature", n->feature + (n->line ? " (line " + std::to_string(*n->line) + ")" : ""));
  } else if (auto *k = std::get_if<Unknown>(&r.verdict)) {
    field("obligation", k->obligation);
    field("reason", k->reason);
  }

  const json &d = r.details;
  if (d.contains("divergence") && !d["divergence"].is_null())
    field("divergence", "step " + std::to_string(d["divergence"].get<size_t>()));
  auto steps = [&](const std::string &title, const json &t) {
    if (!t.contains("steps"))
      return;
    os << title << ":\n";
    for (auto &s : t["steps"]) {
      os << "  " << std::setw(4) << s["index"].get<size_t>() << std::setw(9) << s["status"].get<std::string>();
      if (s.contains("witness"))
        os << " x = " << s["witness"]["value"].get<std::string>();
      if (s["downstream"].get<bool>())
        os << " (after the first invalid step)";
      os << "\n";
    }
  };
  if (r.kind == Kind::Trace)
    steps("steps", d);
  if (r.kind == Kind::TracePair) {
    steps("reference", d["reference"]);
    steps("distilled", d["distilled"]);
  }
  if (d.contains("matches"))
    for (auto &m : d["matches"])
      field("  p" + std::to_string(m["id"].get<int>()),
            m["name"].get<std::string>() + ": " + m["text"].get<std::string>());
  if (d.contains("findings"))
    for (auto &f : d["findings"])
      field("finding", f["param"].get<std::string>() + ": " + f["message"].get<std::string>());

  if (!r.obligations.empty()) {
    os << "obligations:\n";
    for (auto &o : r.obligations) {
      std::ostringstream t;
      t << std::fixed << std::setprecision(1) << o.time_ms << " ms";
      os << "  " << std::setw(12) << status_name(o.status) << std::setw(10) << t.str() << o.label << "\n";
    }
  }
  std::ostringstream total;
  total << std::fixed << std::setprecision(1) << r.timing_ms << " ms";
  field("time", total.str());
  field("solver", r.solver);
  return os.str();
}

} // namespace guard::api

#endif // GUARD_API_RENDER_HPP
