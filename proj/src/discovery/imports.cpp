#include "libmig/discovery/imports.hpp"

#include "libmig/error.hpp"

namespace libmig::discovery {

std::set<ImportHit> scan_imports(const pysrc::Module& module, const ImportNameSet& names) {
  std::set<ImportHit> hits;
  for (const auto& b : module.imports()) {
    auto top = b.top_level();
    if (top.empty() || !names.contains(top)) continue;
    hits.insert(ImportHit{b.line, b.module, b.member, b.bound});
  }
  return hits;
}

std::set<ImportHit> scan_imports(std::string_view source, const ImportNameSet& names) {
  return scan_imports(pysrc::Module::parse(std::string(source)), names);
}

std::set<std::string> library_reference_names(std::string_view source, const ImportNameSet& names) {
  std::set<std::string> out(names.import_names.begin(), names.import_names.end());
  try {
    for (const auto& hit : scan_imports(source, names))
      if (hit.bound != "*") out.insert(hit.bound);
  } catch (const Error&) {
    // Unparsable originals only contribute the bare import names.
  }
  return out;
}

}  // namespace libmig::discovery
