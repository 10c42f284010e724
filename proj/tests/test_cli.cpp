#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <thread>
#include <vector>

namespace {

namespace fs = std::filesystem;

pid_t spawn(const std::vector<std::string>& args) {
  std::vector<char*> argv;
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);
  pid_t pid = fork();
  if (pid == 0) {
    execv(argv[0], argv.data());
    _exit(127);
  }
  return pid;
}

bool wait_for_port(uint16_t port, int attempts = 200) {
  for (int i = 0; i < attempts; ++i) {
    int fd = socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
    const bool up = connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0;
    close(fd);
    if (up) return true;
    std::this_thread::sleep_for(std::chrono::milliseconds(25));
  }
  return false;
}

}  // namespace

TEST_CASE("cli: serve handles SIGTERM with exit code 0") {
  const uint16_t port = 39471;
  pid_t pid = spawn({EVSTREAM_BIN, "serve", "--listen", "127.0.0.1:" + std::to_string(port)});
  REQUIRE(pid > 0);
  REQUIRE(wait_for_port(port));

  kill(pid, SIGTERM);
  int status = 0;
  REQUIRE(waitpid(pid, &status, 0) == pid);
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
}

TEST_CASE("cli: second serve on the same port exits nonzero") {
  const uint16_t port = 39472;
  pid_t first = spawn({EVSTREAM_BIN, "serve", "--listen", "127.0.0.1:" + std::to_string(port)});
  REQUIRE(first > 0);
  REQUIRE(wait_for_port(port));

  pid_t second = spawn({EVSTREAM_BIN, "serve", "--listen", "127.0.0.1:" + std::to_string(port)});
  int status = 0;
  REQUIRE(waitpid(second, &status, 0) == second);
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 1);

  kill(first, SIGTERM);
  waitpid(first, &status, 0);
}

TEST_CASE("cli: bench against an unreachable server fails every cell and exits nonzero") {
  const auto dir = fs::temp_directory_path() / "evstream_cli_unreachable";
  fs::remove_all(dir);
  pid_t pid = spawn({EVSTREAM_BIN, "bench", "--connect", "127.0.0.1:1", "--rates", "100",
                     "--sizes", "64", "--duration", "0.2", "--out", dir.string()});
  int status = 0;
  REQUIRE(waitpid(pid, &status, 0) == pid);
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 1);

  // The manifest still records every cell, as a failure.
  std::ifstream manifest(dir / "manifest.json");
  REQUIRE(manifest.good());
  std::string all((std::istreambuf_iterator<char>(manifest)), std::istreambuf_iterator<char>());
  CHECK(all.find("\"failed\"") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cli: EVSTREAM_OUT provides the output directory") {
  const auto dir = fs::temp_directory_path() / "evstream_cli_envdir";
  fs::remove_all(dir);
  setenv("EVSTREAM_OUT", dir.string().c_str(), 1);
  pid_t pid = spawn({EVSTREAM_BIN, "bench", "--rates", "200", "--sizes", "64", "--duration",
                     "0.2"});
  int status = 0;
  REQUIRE(waitpid(pid, &status, 0) == pid);
  unsetenv("EVSTREAM_OUT");
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(fs::exists(dir / "energy.csv"));
  fs::remove_all(dir);
}
