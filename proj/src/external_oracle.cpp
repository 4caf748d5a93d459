#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "weq/mus.h"

namespace weq {

namespace {

using Clock = std::chrono::steady_clock;

std::string shellQuote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    return out + "'";
}

class TempFile {
public:
    explicit TempFile(const std::string& contents) {
        std::string pattern = (std::filesystem::temp_directory_path() / "weq-XXXXXX.smt2").string();
        int fd = ::mkstemps(pattern.data(), 5);
        if (fd < 0)
            throw Error(std::string("cannot create temporary file: ") + std::strerror(errno));
        ::close(fd);
        path_ = pattern;
        std::ofstream out(path_);
        out << contents;
        if (!out)
            throw Error("cannot write temporary file " + path_);
    }
    ~TempFile() { ::unlink(path_.c_str()); }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

Status parseAnswer(const std::string& output) {
    std::size_t pos = 0;
    while (pos < output.size()) {
        std::size_t end = output.find('\n', pos);
        if (end == std::string::npos)
            end = output.size();
        std::string line = output.substr(pos, end - pos);
        pos = end + 1;
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos)
            continue;
        auto e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        if (line == "sat")
            return Status::Sat;
        if (line == "unsat")
            return Status::Unsat;
        return Status::Unknown;
    }
    return Status::Unknown;
}

}  // namespace

OracleAnswer checkExternal(const Formula& f, const std::string& commandTemplate,
                           double timeoutSeconds) {
    TempFile file(emitSmtlib(f));
    std::string command;
    const std::string placeholder = "{file}";
    for (std::size_t i = 0; i < commandTemplate.size();) {
        if (commandTemplate.compare(i, placeholder.size(), placeholder) == 0) {
            command += shellQuote(file.path());
            i += placeholder.size();
        } else {
            command += commandTemplate[i++];
        }
    }

    int fds[2];
    if (::pipe2(fds, O_CLOEXEC) != 0)
        throw Error(std::string("pipe failed: ") + std::strerror(errno));
    const auto start = Clock::now();
    pid_t pid = ::fork();
    if (pid < 0) {
        ::close(fds[0]);
        ::close(fds[1]);
        throw Error(std::string("fork failed: ") + std::strerror(errno));
    }
    if (pid == 0) {
        ::setpgid(0, 0);
        ::dup2(fds[1], STDOUT_FILENO);
        int devnull = ::open("/dev/null", O_WRONLY);
        if (devnull >= 0)
            ::dup2(devnull, STDERR_FILENO);
        ::close(fds[0]);
        ::close(fds[1]);
        ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::setpgid(pid, pid);
    ::close(fds[1]);

    std::string output;
    bool timedOut = false;
    char buf[4096];
    while (true) {
        const double left =
            timeoutSeconds - std::chrono::duration<double>(Clock::now() - start).count();
        if (left <= 0) {
            timedOut = true;
            break;
        }
        pollfd p{fds[0], POLLIN, 0};
        int r = ::poll(&p, 1, static_cast<int>(left * 1000) + 1);
        if (r < 0 && errno == EINTR)
            continue;
        if (r == 0)
            continue;
        ssize_t n = ::read(fds[0], buf, sizeof buf);
        if (n <= 0)
            break;
        output.append(buf, static_cast<std::size_t>(n));
    }
    if (timedOut)
        ::kill(-pid, SIGKILL);
    ::close(fds[0]);
    int wstatus = 0;
    while (::waitpid(pid, &wstatus, 0) < 0 && errno == EINTR) {
    }
    if (!timedOut)
        ::kill(-pid, SIGKILL);  // stray children of the shell
    OracleAnswer answer;
    answer.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (timedOut)
        return answer;
    if (WIFEXITED(wstatus) && WEXITSTATUS(wstatus) == 127 && output.empty())
        throw Error("could not run solver command: " + command);
    answer.status = parseAnswer(output);
    return answer;
}

ExternalOracle::ExternalOracle(std::string name, std::string commandTemplate,
                               double timeoutSeconds)
    : name_(std::move(name)), command_(std::move(commandTemplate)), timeout_(timeoutSeconds) {
    if (command_.find("{file}") == std::string::npos)
        throw ConfigError("solver command for '" + name_ + "' has no {file} placeholder");
    if (!(timeout_ > 0))
        throw ConfigError("solver timeout must be positive");
}

OracleAnswer ExternalOracle::check(const Formula& f) const {
    return checkExternal(f, command_, timeout_);
}

}  // namespace weq
