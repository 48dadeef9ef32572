#include "libmig/llm/migrate.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include <spdlog/spdlog.h>

#include "libmig/common/text.hpp"
#include "libmig/llm/extract.hpp"

namespace libmig::llm {

namespace {

void migrate_one(FileMigration& out, const std::string& original, const MigrationRequest& req,
                 const CompletionFn& complete) {
  try {
    auto prompt = build_prompt(req.source_lib, req.source_version, req.target_lib, req.target_version, original);
    out.prompt = prompt.rendered;
    out.response = complete(prompt);
    auto code = extract_code(*out.response);
    auto nl = text::detect_newline(original);
    if ((original.ends_with('\n')) && !code.ends_with('\n')) code += nl;
    out.code = std::move(code);
  } catch (const Error& e) {
    out.error = e.kind();
    out.message = e.what();
    spdlog::warn("[llmmig] {}: {} ({})", out.path, e.what(), to_string(e.kind()));
  } catch (const std::exception& e) {
    out.error = ErrorKind::EndpointUnreachable;
    out.message = e.what();
    spdlog::warn("[llmmig] {}: {}", out.path, e.what());
  }
}

}  // namespace

std::vector<FileMigration> migrate_files(const std::map<std::string, std::string>& files,
                                         const MigrationRequest& request, const CompletionFn& complete,
                                         unsigned parallel) {
  std::vector<const std::pair<const std::string, std::string>*> work;
  for (const auto& f : files) work.push_back(&f);
  std::vector<FileMigration> results(work.size());
  for (std::size_t i = 0; i < work.size(); ++i) results[i].path = work[i]->first;

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < work.size();) {
      spdlog::info("[llmmig] migrating {}", work[i]->first);
      migrate_one(results[i], work[i]->second, request, complete);
    }
  };
  auto n = std::clamp<std::size_t>(parallel, 1, std::max<std::size_t>(work.size(), 1));
  std::vector<std::jthread> threads;
  for (std::size_t t = 1; t < n; ++t) threads.emplace_back(worker);
  worker();
  return results;
}

}  // namespace libmig::llm
