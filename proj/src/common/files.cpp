#include "synfact/common/files.hpp"

#include <fstream>
#include <sstream>

#include "synfact/common/errors.hpp"

namespace synfact {

namespace fs = std::filesystem;

void write_file_atomic(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void for_each_line(const fs::path& path, const std::function<void(std::string_view)>& fn, bool skip_torn_tail) {
  const std::string data = read_file(path);
  std::size_t start = 0;
  while (start < data.size()) {
    const auto nl = data.find('\n', start);
    if (nl == std::string::npos) {
      if (!skip_torn_tail) fn(std::string_view(data).substr(start));
      break;
    }
    fn(std::string_view(data).substr(start, nl - start));
    start = nl + 1;
  }
}

}  // namespace synfact
