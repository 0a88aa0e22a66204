#ifndef GUARD_TESTS_COMMAND_FUZZ_HPP
#define GUARD_TESTS_COMMAND_FUZZ_HPP

#include <random>
#include <string>
#include <vector>

namespace guard::oracle {

// Random shell-ish strings stitched from fragments that sit near the
// category boundaries, so both outcomes are common.
class CommandFuzzer {
public:
  explicit CommandFuzzer(unsigned seed) : rng_(seed) {}

  std::string next()
  {
    static const std::vector<std::string> words = {
      "rm", "ls", "dd", "sudo", "curl", "wget", "sh", "bash", "python3", "chmod", "chown",
      "kill", "killall", "pkill", "shutdown", "reboot", "echo", "tee", "mkfs.ext4", "fdisk",
      "parted", "cat", "cp", "mv", "find", "systemctl", "init", "truncate", "git", "make",
      "grep", "xargs", "env", "doas", "su", "-c", "-rf", "-fr", "-r", "-R", "-la", "-9", "-1",
      "-s", "-a", "--", "--no-preserve-root", "-delete", "/", "/*", "~", "$HOME", "/etc",
      "/etc/passwd", "/etc/hosts", "/boot/grub.cfg", "/dev/sda", "/dev/null", "/dev/zero",
      "/tmp/x", "./build", "/home", "/usr", "of=/dev/sda", "if=/dev/zero", "of=out.img",
      "https://x.sh", "http://get.example/install", "-qO-", "-fsSL", "777", "0", "6",
      "reboot", "now", "-h", ".*", "root", "-u", "mklabel", "gpt", "1", "hello", "file.txt",
      ":(){ :|:& };:", "fork while fork", "$(curl", "<(wget", ")", "\"", "'"};
    static const std::vector<std::string> joins = {" ", " ", " ", " ", " | ", "; ", " && ",
                                                   " > ", " >> ", "|", ";", ""};
    int n = std::uniform_int_distribution<int>(1, 7)(rng_);
    std::string out;
    for (int i = 0; i < n; ++i) {
      if (i)
        out += joins[pick(joins.size())];
      std::string w = words[pick(words.size())];
      if (pick(8) == 0)
        for (auto &c : w)
          c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      out += w;
    }
    return out;
  }

private:
  size_t pick(size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng_); }

  std::mt19937 rng_;
};

} // namespace guard::oracle

#endif // GUARD_TESTS_COMMAND_FUZZ_HPP
