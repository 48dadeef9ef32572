#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "libmig/pipeline/pipeline.hpp"

namespace testsupport {

namespace stdfs = std::filesystem;

stdfs::path fixtures();
std::string slurp(const stdfs::path& p);
void spit(const stdfs::path& p, std::string_view text);

/// A fresh directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(std::string_view tag = "t");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const stdfs::path& path() const { return path_; }
  stdfs::path operator/(const stdfs::path& p) const { return path_ / p; }

 private:
  stdfs::path path_;
};

/// OpenAI-style chat-completions server on 127.0.0.1. Replies are looked up by
/// the code the prompt ends with; `script` queues raw (status, body) replies
/// that are served first.
class MockLlm {
 public:
  MockLlm();
  ~MockLlm();
  std::string base_url() const;
  void reply_for(std::string original_code, std::string response);
  void script(int status, std::string body, std::map<std::string, std::string> headers = {});
  std::size_t requests() const;
  std::vector<nlohmann::json> bodies() const;

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  mutable std::mutex mu_;
  std::map<std::string, std::string> replies_;
  struct Scripted {
    int status;
    std::string body;
    std::map<std::string, std::string> headers;
  };
  std::vector<Scripted> queue_;
  std::vector<nlohmann::json> bodies_;
};

std::string completion_body(std::string_view content);

/// Everything needed to run the pipeline on an e2e fixture scenario.
struct Scenario {
  std::string name;          // directory under fixtures()/e2e
  std::string source_lib;
  std::string target_lib;
  std::string target_version;
};

/// Copies the scenario project to `<work>/project` (replacing any previous
/// copy) and returns spec and options wired to the fake interpreter and a
/// scripted in-process completion function.
struct PreparedRun {
  libmig::prep::MigrationSpec spec;
  libmig::pipeline::Options options;
};
PreparedRun prepare_scenario(const Scenario& s, const stdfs::path& work);

/// Makes the fake interpreter render `template_file` as the run profile.
void point_fake_profile(const stdfs::path& template_file);

}  // namespace testsupport
