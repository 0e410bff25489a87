#include "cli/run.hpp"

#include <algorithm>
#include <filesystem>
#include <ostream>

#include "cli/commands.hpp"

namespace lvkit::cli {

namespace {

namespace fs = std::filesystem;

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

std::optional<std::string> flag_value(const std::vector<std::string>& args, const std::string& flag) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == flag && i + 1 < args.size()) {
            return args[i + 1];
        }
        if (args[i].rfind(flag + "=", 0) == 0) {
            return args[i].substr(flag.size() + 1);
        }
    }
    return std::nullopt;
}

std::string scalar_text(const json& v) {
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_number_integer() || v.is_number_unsigned()) {
        return v.dump();
    }
    if (v.is_number_float()) {
        return format_double(v.get<double>());
    }
    throw ConfigError("config values must be strings, numbers, booleans or arrays of numbers");
}

// Config file keys become flags unless the same flag was given on the command line.
std::vector<std::string> merge_config(std::vector<std::string> args) {
    const auto path = flag_value(args, "--config");
    if (!path) {
        return args;
    }
    const json config = read_json(*path);
    if (!config.is_object()) {
        throw ConfigError("config file must hold a JSON object");
    }
    for (const auto& [key, value] : config.items()) {
        const std::string flag = "--" + key;
        if (key == "config" || has_flag(args, flag)) {
            continue;
        }
        if (value.is_boolean()) {
            if (value.get<bool>()) {
                args.push_back(flag);
            }
            continue;
        }
        std::string text;
        if (value.is_array()) {
            for (const auto& item : value) {
                text += (text.empty() ? "" : ",") + scalar_text(item);
            }
        } else {
            text = scalar_text(value);
        }
        args.push_back(flag + "=" + text);
    }
    return args;
}

}  // namespace

std::uint64_t RunContext::require_seed(const std::string& command) const {
    if (!seed) {
        throw ConfigError(command + " is stochastic and needs --seed");
    }
    return *seed;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    auto commands = make_commands();
    CLI::App app{"lvkit: latent-variable model experiments"};
    app.require_subcommand(1, 1);
    std::optional<std::uint64_t> seed;
    std::string config_path;
    std::string out_dir;
    bool force = false;
    app.add_option("--seed", seed, "64-bit run seed");
    app.add_option("--config", config_path, "JSON file of flag values; explicit flags win");
    app.add_option("--out", out_dir, "output directory (default lvkit-out/<command>)");
    app.add_flag("--force", force, "overwrite existing outputs");
    std::vector<std::pair<CLI::App*, Command*>> subs;
    for (auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c->name(), c->description());
        sub->fallthrough();
        c->add_options(*sub);
        subs.emplace_back(sub, c.get());
    }

    std::string command_name = "lvkit";
    try {
        std::vector<std::string> args = merge_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "lvkit: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const std::exception& e) {
        err << "lvkit: configuration error: " << e.what() << "\n";
        return kExitBadConfig;
    }

    Command* command = nullptr;
    for (const auto& [sub, c] : subs) {
        if (sub->parsed()) {
            command = c;
        }
    }
    command_name = command->name();
    const fs::path dir = out_dir.empty() ? fs::path("lvkit-out") / command_name : fs::path(out_dir);

    try {
        for (const char* name : {"trace.csv", "result.json"}) {
            if (!force && fs::exists(dir / name)) {
                throw ConfigError((dir / name).string() + " exists; pass --force to overwrite");
            }
        }
        CommandOutput output = command->execute(RunContext{seed});
        for (const auto& [name, content] : output.extra_files) {
            if (!force && fs::exists(dir / name)) {
                throw ConfigError((dir / name).string() + " exists; pass --force to overwrite");
            }
        }
        fs::create_directories(dir);
        write_text(dir / "trace.csv", to_csv(output.trace));
        json doc;
        doc["command"] = command_name;
        doc["seed"] = seed ? json(*seed) : json(nullptr);
        doc["result"] = std::move(output.result);
        write_text(dir / "result.json", doc.dump(2) + "\n");
        for (const auto& [name, content] : output.extra_files) {
            write_text(dir / name, content);
        }
        out << "lvkit " << command_name << ": wrote " << dir.string() << "\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "lvkit " << command_name << ": configuration error: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const DomainError& e) {
        err << "lvkit " << command_name << ": invalid input (" << command->module() << "): " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const NumericError& e) {
        err << "lvkit " << command_name << ": numeric error in " << command->module() << ": " << e.what() << "\n";
        return kExitNumeric;
    } catch (const EstimationError& e) {
        err << "lvkit " << command_name << ": estimation error in " << command->module() << ": " << e.what() << "\n";
        return kExitNumeric;
    } catch (const fs::filesystem_error& e) {
        err << "lvkit " << command_name << ": " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const std::exception& e) {
        err << "lvkit " << command_name << ": internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace lvkit::cli
