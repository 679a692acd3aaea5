#include "hbs/registry/discovery.hpp"

#include <sys/stat.h>

#include <algorithm>
#include <set>
#include <system_error>
#include <utility>

#include "hbs/error.hpp"

namespace hbs::registry {

namespace fs = std::filesystem;

namespace {

using FileId = std::pair<dev_t, ino_t>;

bool file_id(const fs::path& p, FileId& id) {
  struct stat st {};
  if (::stat(p.c_str(), &st) != 0) return false;
  id = {st.st_dev, st.st_ino};
  return true;
}

void walk(const fs::path& root, const fs::path& rel, std::set<FileId>& active, DiscoveryList& out) {
  const fs::path dir = rel.empty() ? root : root / rel;
  FileId id;
  if (!file_id(dir, id)) throw Error(Errc::io_error, "cannot stat directory " + dir.string());
  if (active.contains(id)) {
    out.warnings.push_back("skipping symlink cycle at " + dir.string());
    return;
  }
  active.insert(id);

  std::error_code ec;
  fs::directory_iterator it(dir, ec);
  if (ec) throw Error(Errc::io_error, "cannot read directory " + dir.string() + ": " + ec.message());
  std::vector<fs::directory_entry> entries;
  for (; it != fs::directory_iterator(); it.increment(ec)) {
    if (ec) break;
    entries.push_back(*it);
  }
  if (ec) throw Error(Errc::io_error, "cannot read directory " + dir.string() + ": " + ec.message());

  for (const auto& entry : entries) {
    const std::string name = entry.path().filename().string();
    const fs::path child = rel / name;
    std::error_code sec;
    if (entry.is_directory(sec)) {  // follows symlinks
      if (name.front() == '.') continue;
      walk(root, child, active, out);
    } else if (entry.is_regular_file(sec) && name.size() > 4 && name.ends_with(".hbs")) {
      out.files.push_back(child);
    }
  }
  active.erase(id);
}

}  // namespace

std::size_t path_depth(const fs::path& relative) {
  const std::string s = relative.generic_string();
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '/'));
}

bool sources_before(const fs::path& a, const fs::path& b) {
  const auto da = path_depth(a);
  const auto db = path_depth(b);
  if (da != db) return da < db;
  return a.generic_string() < b.generic_string();
}

DiscoveryList discover(const fs::path& root) {
  DiscoveryList out;
  out.root = root;
  std::set<FileId> active;
  walk(root, fs::path{}, active, out);
  std::sort(out.files.begin(), out.files.end(), sources_before);

  // A file reachable through several symlinked directories keeps its first path.
  std::set<FileId> seen;
  std::erase_if(out.files, [&](const fs::path& rel) {
    FileId id;
    return file_id(root / rel, id) && !seen.insert(id).second;
  });
  return out;
}

}  // namespace hbs::registry
