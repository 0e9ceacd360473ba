#pragma once

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "coreforge/optmodel.hpp"

namespace coreforge {

struct BackendConfig {
    std::string solver;           // empty = CORE_FORGE_SOLVER env var, default "scipy"
    double tolerance = 1e-4;      // MIP relative gap target
    double time_limit_sec = 0.0;  // 0 = no limit
    int threads = 1;
    unsigned seed = 0;

    void validate() const {
        if (tolerance <= 0) throw std::invalid_argument("tolerance must be positive");
    }
};

enum class SolveStatus { optimal, time_limit, infeasible, unbounded, error };

struct SolveResult {
    SolveStatus status = SolveStatus::error;
    double objective = 0.0;
    double best_bound = 0.0;
    std::vector<double> values;  // per model variable, on optimal / time_limit incumbents
    std::vector<double> duals;   // per constraint, absolute values; LP solves only
    std::string message;

    bool ok() const { return status == SolveStatus::optimal; }
};

inline std::string solve_status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::time_limit: return "time_limit";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::error: return "error";
    }
    return "error";
}

class SolverBackend {
public:
    virtual ~SolverBackend() = default;
    virtual std::string name() const = 0;
    virtual bool supports_bilinear() const = 0;
    virtual SolveResult solve(const OptModel& model, const BackendConfig& cfg) = 0;
};

namespace detail {

/// A child process with line-oriented stdin/stdout pipes. One request line in,
/// one response line out.
class LineWorker {
public:
    LineWorker(std::vector<std::string> argv) : argv_(std::move(argv)) {}

    ~LineWorker() { shutdown(); }

    LineWorker(const LineWorker&) = delete;
    LineWorker& operator=(const LineWorker&) = delete;

    std::string round_trip(const std::string& line) {
        ensure_started();
        std::string request = line + "\n";
        if (!write_all(request)) {
            shutdown();
            throw std::runtime_error("solver worker closed its input pipe");
        }
        std::string response;
        if (!read_line(response)) {
            shutdown();
            throw std::runtime_error("solver worker produced no response (did it crash on startup?)");
        }
        return response;
    }

private:
    void ensure_started() {
        if (pid_ > 0) return;
        int to_child[2];
        int from_child[2];
        if (pipe(to_child) != 0 || pipe(from_child) != 0)
            throw std::runtime_error("failed to create worker pipes");
        pid_t pid = fork();
        if (pid < 0) throw std::runtime_error("failed to fork solver worker");
        if (pid == 0) {
            dup2(to_child[0], STDIN_FILENO);
            dup2(from_child[1], STDOUT_FILENO);
            close(to_child[0]);
            close(to_child[1]);
            close(from_child[0]);
            close(from_child[1]);
            std::vector<char*> argv;
            for (auto& a : argv_) argv.push_back(a.data());
            argv.push_back(nullptr);
            execvp(argv[0], argv.data());
            std::perror("coreforge: exec solver worker");
            _exit(127);
        }
        close(to_child[0]);
        close(from_child[1]);
        write_fd_ = to_child[1];
        read_fd_ = from_child[0];
        pid_ = pid;
    }

    bool write_all(const std::string& data) {
        std::size_t done = 0;
        while (done < data.size()) {
            ssize_t n = ::write(write_fd_, data.data() + done, data.size() - done);
            if (n < 0) {
                if (errno == EINTR) continue;
                return false;
            }
            done += static_cast<std::size_t>(n);
        }
        return true;
    }

    bool read_line(std::string& out) {
        out.clear();
        while (true) {
            auto nl = buffer_.find('\n');
            if (nl != std::string::npos) {
                out = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                return true;
            }
            char chunk[4096];
            ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
            if (n < 0) {
                if (errno == EINTR) continue;
                return false;
            }
            if (n == 0) return false;
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

    void shutdown() {
        if (write_fd_ >= 0) close(write_fd_);
        if (read_fd_ >= 0) close(read_fd_);
        write_fd_ = read_fd_ = -1;
        if (pid_ > 0) {
            int status = 0;
            waitpid(pid_, &status, 0);
            pid_ = -1;
        }
        buffer_.clear();
    }

    std::vector<std::string> argv_;
    pid_t pid_ = -1;
    int write_fd_ = -1;
    int read_fd_ = -1;
    std::string buffer_;
};

}  // namespace detail

/// Open-source backend: a persistent Python worker solving LPs and MILPs with
/// scipy's HiGHS bindings. No bilinear support.
class ScipyBackend final : public SolverBackend {
public:
    explicit ScipyBackend(std::string worker_script = "")
        : worker_({"python3", resolve_script(std::move(worker_script))}) {}

    std::string name() const override { return "scipy"; }
    bool supports_bilinear() const override { return false; }

    SolveResult solve(const OptModel& model, const BackendConfig& cfg) override {
        cfg.validate();
        if (model.has_bilinear() && !supports_bilinear()) {
            SolveResult r;
            r.status = SolveStatus::error;
            r.message = "bilinear unsupported by backend '" + name() + "'";
            return r;
        }
        nlohmann::json request = model.to_json();
        request["options"] = {{"tolerance", cfg.tolerance},
                              {"time_limit", cfg.time_limit_sec},
                              {"want_duals", !model.has_integer_vars()}};
        nlohmann::json response;
        try {
            response = nlohmann::json::parse(worker_.round_trip(request.dump()));
        } catch (const std::exception& e) {
            SolveResult r;
            r.status = SolveStatus::error;
            r.message = std::string("solver worker failure: ") + e.what();
            return r;
        }
        return parse_response(response);
    }

    static std::string resolve_script(std::string explicit_path) {
        if (!explicit_path.empty()) return explicit_path;
        if (const char* env = std::getenv("CORE_FORGE_SOLVER_WORKER")) return env;
#ifdef CORE_FORGE_WORKER_SCRIPT
        return CORE_FORGE_WORKER_SCRIPT;
#else
        return "backend_worker.py";
#endif
    }

private:
    static SolveResult parse_response(const nlohmann::json& j) {
        SolveResult r;
        std::string status = j.value("status", "error");
        if (status == "optimal")
            r.status = SolveStatus::optimal;
        else if (status == "time_limit")
            r.status = SolveStatus::time_limit;
        else if (status == "infeasible")
            r.status = SolveStatus::infeasible;
        else if (status == "unbounded")
            r.status = SolveStatus::unbounded;
        else
            r.status = SolveStatus::error;
        r.objective = j.value("objective", 0.0);
        r.best_bound = j.value("bound", r.objective);
        r.message = j.value("message", "");
        if (j.contains("values") && j["values"].is_array())
            r.values = j["values"].get<std::vector<double>>();
        if (j.contains("duals") && j["duals"].is_array())
            r.duals = j["duals"].get<std::vector<double>>();
        return r;
    }

    detail::LineWorker worker_;
};

/// Backend registry keyed by CORE_FORGE_SOLVER (or an explicit id).
inline std::unique_ptr<SolverBackend> make_backend(const std::string& id = "") {
    std::string solver = id;
    if (solver.empty()) {
        const char* env = std::getenv("CORE_FORGE_SOLVER");
        solver = env ? env : "scipy";
    }
    if (solver == "scipy") return std::make_unique<ScipyBackend>();
    throw std::invalid_argument("unknown solver backend: " + solver);
}

}  // namespace coreforge
