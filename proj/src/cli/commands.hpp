#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "cli/io.hpp"

namespace lvkit::cli {

struct RunContext {
    std::optional<std::uint64_t> seed;

    /// The run seed; ConfigError when a stochastic command was started without one.
    std::uint64_t require_seed(const std::string& command) const;
};

struct CommandOutput {
    Trace trace;
    json result;
    /// Additional files (name, content) written next to trace.csv and result.json.
    std::vector<std::pair<std::string, std::string>> extra_files;
};

class Command {
   public:
    virtual ~Command() = default;
    virtual std::string name() const = 0;
    /// Library module the command exercises; used in error messages.
    virtual std::string module() const = 0;
    virtual std::string description() const = 0;
    virtual void add_options(CLI::App& app) = 0;
    virtual CommandOutput execute(const RunContext& context) = 0;
};

std::vector<std::unique_ptr<Command>> make_commands();

}  // namespace lvkit::cli
