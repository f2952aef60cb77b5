#pragma once

#include <CLI11.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>
#include <string>

namespace dronepaint::cli {

// Each register_* adds a subcommand and returns the action to run when it is selected.
using Action = std::function<int()>;

Action register_synth_data(CLI::App& app);
Action register_train(CLI::App& app);
Action register_eval(CLI::App& app);
Action register_classify(CLI::App& app);
Action register_simulate(CLI::App& app);
Action register_render(CLI::App& app);
Action register_metrics(CLI::App& app);
Action register_serve(CLI::App& app);

nlohmann::json read_json(const std::filesystem::path& path);

} // namespace dronepaint::cli
