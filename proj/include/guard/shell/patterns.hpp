#ifndef GUARD_SHELL_PATTERNS_HPP
#define GUARD_SHELL_PATTERNS_HPP

#include <cctype>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "guard/error.hpp"

namespace guard::shell {

inline constexpr int category_count = 10;

struct PatternRegex {
  std::string source;
  std::regex re;
};

struct PatternCategory {
  int id;
  std::string name;
  std::string description;
  std::vector<PatternRegex> regexes;
};

namespace rx {

// Command names match case-insensitively; everything else (paths, devices)
// keeps its case. std::regex has no inline flags, hence the bracket classes.
inline std::string ci(const std::string &word)
{
  std::string out;
  for (char c : word) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      out += '[';
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      out += ']';
    } else if (std::string("\\^$.|?*+()[]{}").find(c) != std::string::npos) {
      out += '\\';
      out += c;
    } else {
      out += c;
    }
  }
  return out;
}

inline std::string alt(const std::vector<std::string> &words)
{
  std::string out = "(?:";
  for (size_t i = 0; i < words.size(); ++i)
    out += (i ? "|" : "") + ci(words[i]);
  return out + ")";
}

// Start of a simple command: line start or a shell separator, then any
// wrappers (sudo, env, xargs, ...) and an optional absolute binary path.
inline std::string cmd_start()
{
  return R"((?:^|[;&|(`{!"']|\$\()\s*(?:)" + alt({"sudo", "doas", "env", "exec", "nohup", "time",
                                                 "command", "busybox", "xargs", "nice", "ionice"})
       + R"((?:\s+-{1,2}[^\s;&|]*|\s+[A-Za-z_][A-Za-z0-9_]*=[^\s;&|]*)*\s+)*(?:/usr)?(?:/s?bin/)?)";
}

inline std::string cmd(const std::vector<std::string> &names)
{
  return cmd_start() + alt(names) + R"((?=[\s;&|)`]|$))";
}

inline const std::string end = R"((?=["']?(?:\s|$|[;&|)`])))";
inline const std::string args = R"((?:\s+[^\s;&|]+)*?)"; // further words of the same command

// System roots whose destruction is catastrophic; `/` and home included.
inline std::string root_target()
{
  return R"(\s+["']?(?:/\*?|~/?\*?|\$\{?HOME\}?/?\*?|/(?:bin|boot|dev|etc|home|lib|lib32|lib64|opt|proc|root|sbin|srv|sys|usr|var)/?\*?))"
       + end;
}

inline const std::string block_device =
  R"(/dev/(?:sd[a-z]+|hd[a-z]+|vd[a-z]+|xvd[a-z]+|nvme\d+n\d+(?:p\d+)?|mmcblk\d+(?:p\d+)?|disk\d+(?:s\d+)?|rdisk\d+|md\d+|dm-\d+|mapper/\S+|sr\d+)\d*)";

inline const std::string recursive_flag =
  R"((?:\s+(?:-[A-Za-z]*[rR][A-Za-z]*|--recursive)))";

inline const std::string any_flags = R"((?:\s+-{1,2}[^\s;&|]*)*)";

} // namespace rx

namespace detail {

inline PatternCategory make_category(int id, std::string name, std::string description,
                                     const std::vector<std::string> &sources)
{
  PatternCategory c{id, std::move(name), std::move(description), {}};
  for (auto &s : sources) {
    try {
      c.regexes.push_back({s, std::regex(s, std::regex::ECMAScript | std::regex::optimize)});
    } catch (const std::regex_error &e) {
      throw Error("category " + std::to_string(id) + ": regex does not compile: " + s + ": "
                  + e.what());
    }
  }
  return c;
}

inline std::vector<PatternCategory> build_categories()
{
  using namespace rx;
  std::vector<PatternCategory> c;
  c.push_back(make_category(
    1, "recursive filesystem destruction",
    "recursive deletion aimed at / , home or a top-level system directory",
    {
      cmd({"rm"}) + any_flags + recursive_flag + any_flags + args + root_target(),
      cmd({"rm"}) + args + R"(\s+--no-preserve-root)" + end,
      cmd({"find"}) + root_target() + args + R"(\s+(?:-delete|-exec\s+(?:/bin/)?)" + ci("rm") + ")",
    }));
  c.push_back(make_category(
    2, "raw block-device write",
    "writes straight onto a disk device, bypassing the filesystem",
    {
      cmd({"dd"}) + args + R"(\s+of=["']?)" + block_device,
      R"((?:^|[^<>&0-9])(?:\d?>|&>)\s*["']?)" + block_device,
      cmd({"tee"}) + any_flags + args + R"(\s+["']?)" + block_device,
      cmd({"shred", "blkdiscard"}) + args + R"(\s+["']?)" + block_device,
      cmd({"cp", "cat", "pv"}) + args + R"(\s+["']?)" + block_device + "\\s*$",
    }));
  c.push_back(make_category(
    3, "filesystem format or repartition",
    "creates a filesystem or rewrites a partition table",
    {
      cmd_start() + ci("mkfs") + R"((?:\.[A-Za-z0-9]+)?(?=[\s;&|)`]|$))",
      cmd({"mke2fs", "mkswap", "mkdosfs", "mkntfs", "wipefs", "sfdisk", "sgdisk"}),
      cmd({"parted"}) + args + R"(\s+(?:)" + alt({"mklabel", "mkpart", "rm", "resizepart"}) + ")",
      R"(\|\s*(?:sudo\s+)?(?:/s?bin/)?)" + alt({"fdisk", "gdisk", "parted"}) + R"(\b)",
      cmd({"fdisk", "gdisk"}) + args + R"(\s*<)",
      cmd({"format"}) + R"(\s+[A-Za-z]:)",
    }));
  c.push_back(make_category(
    4, "fork bomb",
    "self-replicating process spawn that exhausts the process table",
    {
      R"(([A-Za-z_][A-Za-z0-9_]*|:)\s*\(\)\s*\{\s*\1\s*\|\s*\1\s*&\s*\}\s*;?\s*\1)",
      R"(\bfork\s+while\s+fork\b)",
      R"(\$0\s*\|\s*\$0\s*&)",
      R"(while\s*(?:\(\s*)?(?:True|true|1)\s*(?:\))?\s*:?\s*(?:os\.)?fork\(\))",
    }));
  c.push_back(make_category(
    5, "remote download piped to interpreter",
    "fetches code over the network and executes it unseen",
    {
      cmd({"curl", "wget", "fetch"}) + R"([^;&]*?\|\s*(?:sudo\s+(?:-\S+\s+)*)?(?:env\s+)?(?:/usr)?(?:/s?bin/)?)"
        + alt({"sh", "bash", "zsh", "ksh", "dash", "fish", "python", "python2", "python3", "perl",
               "ruby", "node", "php"})
        + R"((?=[\s;&|)]|$|-))",
      R"(\b)" + alt({"sh", "bash", "zsh", "ksh", "dash"}) + R"(\s+(?:-\S+\s+)*["']?(?:<\(|\$\(|`)\s*)"
        + alt({"curl", "wget", "fetch"}) + R"(\b)",
      R"(\b)" + alt({"source", "eval"}) + R"(\s+["']?(?:<\(|\$\(|`)\s*)" + alt({"curl", "wget"})
        + R"(\b)",
    }));
  c.push_back(make_category(
    6, "recursive permission or ownership destruction",
    "recursive chmod/chown/chgrp on / , home or a top-level system directory",
    {
      cmd({"chmod", "chown", "chgrp"}) + any_flags + recursive_flag + any_flags + args
        + root_target(),
      cmd({"setfacl"}) + any_flags + recursive_flag + any_flags + args + root_target(),
    }));
  c.push_back(make_category(
    7, "privileged destructive invocation",
    "sudo, doas or su running a deletion, disk-write or format command",
    {
      R"((?:^|[;&|(`]|\$\()\s*)" + alt({"sudo", "doas"})
        + R"((?:\s+-\S+(?:\s+[A-Za-z0-9_]+(?=\s))?)*\s+(?:/usr)?(?:/s?bin/)?(?:)"
        + ci("rm") + recursive_flag + "|" + ci("dd") + R"(\s+[^;&|]*\bof=|)" + ci("mkfs") + "|"
        + alt({"mke2fs", "mkswap", "wipefs", "fdisk", "sfdisk", "sgdisk", "parted", "shred"})
        + R"((?=[\s;&|)]|$)))",
      R"(\b)" + ci("su") + R"(\s+(?:-\S*\s+)*-c\s+["']?\s*(?:)" + ci("rm") + recursive_flag + "|"
        + ci("dd") + R"(\s+[^;&|]*\bof=|)" + ci("mkfs") + ")",
    }));
  c.push_back(make_category(
    8, "system power-state change",
    "shutdown, reboot, halt or suspend of the host",
    {
      cmd({"shutdown", "reboot", "halt", "poweroff"}),
      cmd({"init", "telinit"}) + R"(\s+[06](?=[\s;&|)]|$))",
      cmd({"systemctl"}) + any_flags + R"(\s+)"
        + alt({"poweroff", "reboot", "halt", "suspend", "hibernate", "kexec", "hybrid-sleep"})
        + R"(\b)",
    }));
  c.push_back(make_category(
    9, "mass process termination",
    "signals every process the user can reach, or kills by a catch-all match",
    {
      cmd({"kill"}) + R"((?:\s+(?:-s\s+\S+|-[A-Za-z0-9]+))*\s+(?:--\s+)?-1(?=\s*(?:$|[;&|)`])))",
      cmd({"killall5"}),
      cmd({"killall", "pkill"}) + args + R"(\s+(?:-r\s+)?["']?\.[*+]["']?)" + end,
      cmd({"pkill", "killall"}) + args + R"(\s+-u\s+["']?root["']?)" + end,
    }));
  c.push_back(make_category(
    10, "critical-file overwrite or truncation",
    "redirects onto, truncates or replaces files under /etc or /boot",
    {
      R"((?:^|[^<>&0-9])(?:\d?>|&>|>\|)\s*["']?/(?:etc|boot)/)",
      cmd({"tee"}) + R"((?:\s+(?!-[A-Za-z]*a[A-Za-z]*(?=\s)|--append)[^\s;&|]+)*?\s+["']?/(?:etc|boot)/)",
      cmd({"truncate"}) + args + R"(\s+["']?/(?:etc|boot)/)",
      cmd({"dd"}) + args + R"(\s+of=["']?/(?:etc|boot)/)",
      cmd({"cp", "mv", "install", "ln"}) + args + R"(\s+["']?/(?:etc|boot)/[^\s;&|]*)" + end
        + R"(\s*(?:$|[;&|)]))",
    }));
  return c;
}

} // namespace detail

// Throws unless the table holds exactly ids 1..10, each with at least one regex.
inline void validate_categories(const std::vector<PatternCategory> &cats)
{
  if (cats.size() != category_count)
    throw Error("pattern table has " + std::to_string(cats.size()) + " categories, expected "
                + std::to_string(category_count));
  std::set<int> ids;
  for (auto &c : cats) {
    if (c.id < 1 || c.id > category_count || !ids.insert(c.id).second)
      throw Error("pattern table: bad or duplicate category id " + std::to_string(c.id));
    if (c.regexes.empty())
      throw Error("pattern table: category " + std::to_string(c.id) + " has no regex");
  }
}

// The embedded table, validated once on first use.
inline const std::vector<PatternCategory> &categories()
{
  static const std::vector<PatternCategory> table = [] {
    auto t = detail::build_categories();
    validate_categories(t);
    return t;
  }();
  return table;
}

} // namespace guard::shell

#endif // GUARD_SHELL_PATTERNS_HPP
