#include "commands.hpp"

#include "dronepaint/error.hpp"
#include "dronepaint/util/text_io.hpp"

namespace dronepaint::cli {

nlohmann::json read_json(const std::filesystem::path& path) {
    try {
        return nlohmann::json::parse(util::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
}

} // namespace dronepaint::cli
