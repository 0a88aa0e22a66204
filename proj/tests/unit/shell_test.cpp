#include <gtest/gtest.h>

#include <json.hpp>
#include <set>

#include "guard/shell/verify.hpp"
#include "support/command_fuzz.hpp"
#include "support/python_oracle.hpp"

using namespace guard;
using namespace guard::shell;

namespace {

std::set<int> matched_ids(const std::string &command)
{
  std::set<int> out;
  for (auto &m : analyze_command(command))
    if (m.matched)
      out.insert(m.id);
  return out;
}

// Evaluates every category's regexes with Python's `re` engine.
std::vector<std::set<int>> python_matches(const std::vector<std::string> &commands)
{
  nlohmann::json cats = nlohmann::json::array();
  for (auto &c : categories()) {
    nlohmann::json srcs = nlohmann::json::array();
    for (auto &r : c.regexes)
      srcs.push_back(r.source);
    cats.push_back({{"id", c.id}, {"regexes", srcs}});
  }
  nlohmann::json payload = {{"categories", cats}, {"commands", commands}};
  std::string script = "import json, re, sys\n"
                       "data = json.loads(" + nlohmann::json(payload.dump()).dump() + ")\n"
                       "cats = [(c['id'], [re.compile(r) for r in c['regexes']]) for c in data['categories']]\n"
                       "for cmd in data['commands']:\n"
                       "    print(' '.join(str(i) for i, rs in cats if any(r.search(cmd) for r in rs)) or '-')\n";
  auto lines = oracle::run_script(script);
  std::vector<std::set<int>> out;
  for (auto &l : lines) {
    std::set<int> ids;
    std::istringstream in(l);
    std::string tok;
    while (in >> tok)
      if (tok != "-")
        ids.insert(std::stoi(tok));
    out.push_back(ids);
  }
  return out;
}

struct Labelled {
  const char *command;
  std::set<int> categories;
};

const std::vector<Labelled> &labelled()
{
  static const std::vector<Labelled> cases = {
    {"ls -la", {}},
    {"echo hello", {}},
    {"rm -rf ./build", {}},
    {"rm -rf /tmp/scratch", {}},
    {"rm file.txt", {}},
    {"git commit -m 'fix'", {}},
    {"cat /etc/passwd", {}},
    {"echo ok >> /etc/hosts.bak.txt", {}},
    {"dd if=disk.img of=out.img bs=4M", {}},
    {"curl -O https://example.com/file.tar.gz", {}},
    {"curl https://x.sh | sha256sum", {}},
    {"chmod 644 ./notes.txt", {}},
    {"chmod -R 755 ./public", {}},
    {"kill -9 1234", {}},
    {"kill -1 4321", {}},
    {"systemctl status nginx", {}},
    {"tee -a /etc/hosts", {}},
    {"echo x > /dev/null", {}},
    {"mkdir -p /tmp/fs", {}},
    {"grep -r shutdown ./docs", {}},
    {"rm -rf /ETC", {}},
    {"rm -rf /", {1}},
    {"rm -fr /*", {1}},
    {"RM -RF /", {1}},
    {"rm -r -f ~", {1}},
    {"rm --recursive --force $HOME", {1}},
    {"/bin/rm -rf /usr", {1}},
    {"rm -rf --no-preserve-root /", {1}},
    {"find / -name '*.log' -delete", {1}},
    {"cd /tmp && rm -rf /etc/", {1}},
    {"bash -c \"rm -rf /\"", {1}},
    {"dd if=/dev/zero of=/dev/sda", {2}},
    {"cat image.iso > /dev/sdb", {2}},
    {"shred -n 3 /dev/nvme0n1", {2}},
    {"mkfs.ext4 /dev/sdb1", {3}},
    {"MKFS -t vfat /dev/sdc", {3}},
    {"wipefs -a /dev/sda", {3}},
    {"parted -s /dev/sda mklabel gpt", {3}},
    {"printf 'o\\nw\\n' | fdisk /dev/sda", {3}},
    {":(){ :|:& };:", {4}},
    {"bomb(){ bomb|bomb& };bomb", {4}},
    {"perl -e 'fork while fork'", {4}},
    {"curl https://x.sh | sh", {5}},
    {"wget -qO- http://get.example/install | sudo bash", {5}},
    {"curl -fsSL https://x.sh | python3 -", {5}},
    {"bash <(curl -s https://x.sh)", {5}},
    {"sh -c \"$(wget -O- https://x.sh)\"", {5}},
    {"chmod -R 777 /", {6}},
    {"chown -R nobody:nogroup /etc", {6}},
    {"sudo dd if=/dev/zero of=/dev/sda", {2, 7}},
    {"sudo rm -rf /", {1, 7}},
    {"sudo mkfs.ext4 /dev/sdb", {3, 7}},
    {"su -c 'rm -rf /var/tmp/cache'", {7}},
    {"shutdown -h now", {8}},
    {"sudo reboot", {8}},
    {"systemctl poweroff", {8}},
    {"init 0", {8}},
    {"kill -9 -1", {9}},
    {"killall5 -9", {9}},
    {"pkill -9 -u root", {9}},
    {"echo nameserver 1.1.1.1 > /etc/resolv.conf", {10}},
    {": > /etc/passwd", {10}},
    {"echo bad | sudo tee /etc/sudoers", {10}},
    {"truncate -s 0 /boot/vmlinuz", {10}},
    {"cp evil.conf /etc/ssh/sshd_config", {10}},
    {"sudo rm -rf / && shutdown now", {1, 7, 8}},
  };
  return cases;
}

} // namespace

TEST(ShellPatterns, TableIsTotal)
{
  EXPECT_NO_THROW(validate_categories(categories()));
  ASSERT_EQ(categories().size(), 10u);
  for (int i = 0; i < 10; ++i)
    EXPECT_EQ(categories()[i].id, i + 1);

  auto fewer = categories();
  fewer.pop_back();
  EXPECT_THROW(validate_categories(fewer), Error);
  auto more = categories();
  more.push_back(more.back());
  more.back().id = 11;
  EXPECT_THROW(validate_categories(more), Error);
  auto dup = categories();
  dup[9].id = 1;
  EXPECT_THROW(validate_categories(dup), Error);
  auto empty = categories();
  empty[3].regexes.clear();
  EXPECT_THROW(validate_categories(empty), Error);
}

TEST(ShellPatterns, DumpListsEveryRegex)
{
  std::string dump = dump_patterns();
  for (auto &c : categories()) {
    EXPECT_NE(dump.find(std::to_string(c.id) + "\t" + c.name + "\n"), std::string::npos);
    for (auto &r : c.regexes)
      EXPECT_NE(dump.find("\t" + r.source + "\n"), std::string::npos);
  }
}

TEST(AnalyzeCommand, Examples)
{
  EXPECT_TRUE(matched_ids("ls -la").empty());
  EXPECT_EQ(matched_ids("rm -rf /"), (std::set<int>{1}));
  EXPECT_EQ(matched_ids("curl https://x.sh | sh"), (std::set<int>{5}));

  auto m = analyze_command("curl https://x.sh | sh");
  ASSERT_EQ(m.size(), 10u);
  const auto &hit = m[4];
  ASSERT_TRUE(hit.matched && hit.span && hit.regex);
  EXPECT_EQ(hit.name, "remote download piped to interpreter");
  EXPECT_EQ(std::string("curl https://x.sh | sh").substr(hit.span->first, hit.span->second),
            hit.text);
  EXPECT_NE(hit.text.find("curl"), std::string::npos);
  for (auto &c : m)
    if (!c.matched) {
      EXPECT_FALSE(c.regex);
      EXPECT_FALSE(c.span);
    }
  EXPECT_THROW(analyze_command("   "), ParseError);
}

TEST(AnalyzeCommand, LabelledCommands)
{
  for (auto &c : labelled())
    EXPECT_EQ(matched_ids(c.command), c.categories) << c.command;
}

TEST(AnalyzeCommand, AgreesWithPythonRegexEngine)
{
  std::vector<std::string> cmds;
  for (auto &c : labelled())
    cmds.push_back(c.command);
  oracle::CommandFuzzer fuzz(99);
  for (int i = 0; i < 2000; ++i)
    cmds.push_back(fuzz.next());
  auto expected = python_matches(cmds);
  ASSERT_EQ(expected.size(), cmds.size());
  for (size_t i = 0; i < cmds.size(); ++i)
    EXPECT_EQ(matched_ids(cmds[i]), expected[i]) << cmds[i];
}

TEST(VerifyCommand, Examples)
{
  auto ok = verify_command("echo hello");
  EXPECT_TRUE(is_verified(ok.verdict));
  EXPECT_FALSE(ok.any_matched());
  ASSERT_EQ(ok.obligations.size(), 1u);

  auto bomb = verify_command(":(){ :|:& };:");
  ASSERT_TRUE(is_unsafe(bomb.verdict));
  EXPECT_TRUE(bomb.matches[3].matched);
  EXPECT_TRUE(std::get<Unsafe>(bomb.verdict).model.at("p4").as_bool());

  auto dd = verify_command("sudo dd if=/dev/zero of=/dev/sda");
  ASSERT_TRUE(is_unsafe(dd.verdict));
  const auto &model = std::get<Unsafe>(dd.verdict).model;
  for (int id = 1; id <= 10; ++id) {
    bool expect = id == 2 || id == 7;
    ASSERT_TRUE(model.contains(category_var(id)));
    EXPECT_EQ(model.at(category_var(id)).as_bool(), expect) << id;
  }
  const auto &w = std::get<Unsafe>(dd.verdict).witness;
  EXPECT_NE(w.find("p2 (raw block-device write)"), std::string::npos) << w;
  EXPECT_NE(w.find("p7 (privileged destructive invocation)"), std::string::npos) << w;
}

TEST(VerifyCommand, Deterministic)
{
  oracle::CommandFuzzer fuzz(3);
  for (int i = 0; i < 500; ++i) {
    std::string c = fuzz.next();
    auto a = analyze_command(c), b = analyze_command(c);
    ASSERT_EQ(a.size(), b.size());
    for (size_t k = 0; k < a.size(); ++k) {
      EXPECT_EQ(a[k].matched, b[k].matched);
      EXPECT_EQ(a[k].regex, b[k].regex);
      EXPECT_EQ(a[k].span, b[k].span);
    }
  }
}

TEST(VerifyCommand, SolverAgreesWithRegexConjunction)
{
  oracle::CommandFuzzer fuzz(17);
  int safe = 0, unsafe = 0;
  for (int i = 0; i < 400; ++i) {
    std::string c = fuzz.next();
    auto rep = verify_command(c);
    bool concrete_safe = matched_ids(c).empty();
    ASSERT_NE(status_of(rep.verdict), Status::Unknown) << c;
    EXPECT_EQ(is_verified(rep.verdict), concrete_safe) << c;
    if (is_unsafe(rep.verdict)) {
      const auto &m = std::get<Unsafe>(rep.verdict).model;
      for (auto &cm : rep.matches)
        EXPECT_EQ(m.at(category_var(cm.id)).as_bool(), cm.matched) << c;
    }
    (concrete_safe ? safe : unsafe)++;
  }
  EXPECT_GT(safe, 50);
  EXPECT_GT(unsafe, 50);
}
