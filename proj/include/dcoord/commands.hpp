// Command implementations behind the CLI verbs, callable from tests.
// Exit codes: 0 success, 2 validation or scenario-format failure, 3 runtime
// failure.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>

namespace dcoord {

int cmd_validate(const std::filesystem::path& scenario_path, std::ostream& out);

int cmd_bounds(const std::filesystem::path& scenario_path, std::ostream& out);

int cmd_run(const std::filesystem::path& scenario_path,
            const std::filesystem::path& output_dir,
            std::optional<std::uint64_t> seed, std::optional<long> stride,
            std::ostream& out);

}  // namespace dcoord
