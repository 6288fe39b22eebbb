// Runs the qflo executable through the shell and captures its streams.
#pragma once

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace cli {

struct Outcome {
    int exit_code = -1;
    std::string out;
    std::string err;
};

inline std::string slurp(const std::filesystem::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline std::string data(const std::string &name) { return std::string(QFLO_DATA_DIR) + "/" + name; }

/// `env` is prepended verbatim, e.g. "QFLO_THREADS=2".
inline Outcome run(const std::string &args, const std::string &env = "")
{
    static int counter = 0;
    const auto dir = std::filesystem::temp_directory_path();
    const std::string tag = std::to_string(::getpid()) + "_" + std::to_string(counter++);
    const auto out_path = dir / ("qflo_out_" + tag);
    const auto err_path = dir / ("qflo_err_" + tag);
    const std::string cmd = (env.empty() ? "" : env + " ") + "\"" + QFLO_CLI + "\" " + args + " >\"" +
                            out_path.string() + "\" 2>\"" + err_path.string() + "\"";
    const int status = std::system(cmd.c_str());
    Outcome o;
    o.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    o.out = slurp(out_path);
    o.err = slurp(err_path);
    std::filesystem::remove(out_path);
    std::filesystem::remove(err_path);
    return o;
}

} // namespace cli
