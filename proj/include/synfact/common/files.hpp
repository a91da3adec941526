#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

namespace synfact {

/// Writes `contents` to `path` via a sibling temp file and rename, so readers
/// never observe a truncated file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

/// Calls `fn` for each complete line (without the newline). A final line with
/// no terminating newline is treated as a torn write and skipped when
/// `skip_torn_tail` is set.
void for_each_line(const std::filesystem::path& path, const std::function<void(std::string_view)>& fn,
                   bool skip_torn_tail = false);

}  // namespace synfact
