#include "commands.hpp"

#include "dronepaint/error.hpp"

#include <iostream>
#include <map>

int main(int argc, char** argv) {
    using namespace dronepaint;

    CLI::App app{"dronepaint: gesture-driven swarm light painting, headless"};
    app.require_subcommand(1, 1);

    std::map<CLI::App*, cli::Action> actions;
    auto add = [&](cli::Action (*reg)(CLI::App&)) {
        const auto before = app.get_subcommands({}).size();
        cli::Action action = reg(app);
        actions.emplace(app.get_subcommands({}).at(before), std::move(action));
    };
    add(cli::register_synth_data);
    add(cli::register_train);
    add(cli::register_eval);
    add(cli::register_classify);
    add(cli::register_simulate);
    add(cli::register_render);
    add(cli::register_metrics);
    add(cli::register_serve);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n";
        const auto selected = app.get_subcommands();
        std::cerr << (selected.empty() ? app.help() : selected.front()->help());
        return 1;
    }

    try {
        return actions.at(app.get_subcommands().front())();
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
