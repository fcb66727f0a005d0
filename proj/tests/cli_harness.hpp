#pragma once

// Drives the ernst binary through the shell and collects exit codes and output.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace cli_harness {

struct ScratchDir {
    std::filesystem::path path;
    ScratchDir()
    {
        std::string tmpl = (std::filesystem::temp_directory_path() / "ernst-cli-XXXXXX").string();
        if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
        path = tmpl;
    }
    ~ScratchDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

inline std::filesystem::path scratch_dir()
{
    static const ScratchDir dir;
    return dir.path;
}

inline std::string write_file(const std::string& name, const std::string& text)
{
    const auto p = scratch_dir() / name;
    std::ofstream(p) << text;
    return p.string();
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

inline Run run(const std::string& args)
{
    static int counter = 0;
    const std::string stem = (scratch_dir() / ("run" + std::to_string(counter++))).string();
    const std::string cmd = std::string(ERNST_CLI_PATH) + " " + args + " > " + stem + ".out 2> " + stem + ".err";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_file(stem + ".out");
    r.err = read_file(stem + ".err");
    return r;
}

}  // namespace cli_harness
