#include "support.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "libmig/common/fs.hpp"

#ifndef LIBMIG_FIXTURES_DIR
#error "LIBMIG_FIXTURES_DIR must be defined"
#endif

namespace testsupport {

stdfs::path fixtures() { return LIBMIG_FIXTURES_DIR; }

std::string slurp(const stdfs::path& p) { return libmig::fs::read_file(p); }

void spit(const stdfs::path& p, std::string_view text) {
  stdfs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
}

TempDir::TempDir(std::string_view tag) {
  static std::atomic<int> counter{0};
  path_ = stdfs::temp_directory_path() /
          ("libmig-" + std::string(tag) + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  stdfs::remove_all(path_);
  stdfs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  stdfs::remove_all(path_, ec);
}

std::string completion_body(std::string_view content) {
  nlohmann::json j{{"id", "cmpl-1"},
                   {"object", "chat.completion"},
                   {"choices", {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", content}}}}}}};
  return j.dump();
}

MockLlm::MockLlm() {
  server_.Post(R"(/v1/chat/completions)", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu_);
    auto body = nlohmann::json::parse(req.body, nullptr, false);
    bodies_.push_back(body);
    if (!queue_.empty()) {
      auto s = queue_.front();
      queue_.erase(queue_.begin());
      res.status = s.status;
      for (const auto& [k, v] : s.headers) res.set_header(k, v);
      res.set_content(s.body, "application/json");
      return;
    }
    std::string prompt = body.is_discarded() ? "" : body["messages"][0]["content"].get<std::string>();
    auto at = prompt.rfind("Original code:\n");
    auto code = at == std::string::npos ? std::string() : prompt.substr(at + 15);
    auto it = replies_.find(code);
    if (it == replies_.end()) {
      res.status = 500;
      res.set_content(R"({"error":{"message":"no scripted reply"}})", "application/json");
      return;
    }
    res.set_content(completion_body(it->second), "application/json");
  });
  port_ = server_.bind_to_any_port("127.0.0.1");
  thread_ = std::thread([this] { server_.listen_after_bind(); });
  server_.wait_until_ready();
}

MockLlm::~MockLlm() {
  server_.stop();
  if (thread_.joinable()) thread_.join();
}

std::string MockLlm::base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

void MockLlm::reply_for(std::string original_code, std::string response) {
  std::lock_guard lock(mu_);
  replies_[std::move(original_code)] = std::move(response);
}

void MockLlm::script(int status, std::string body, std::map<std::string, std::string> headers) {
  std::lock_guard lock(mu_);
  queue_.push_back({status, std::move(body), std::move(headers)});
}

std::size_t MockLlm::requests() const {
  std::lock_guard lock(mu_);
  return bodies_.size();
}

std::vector<nlohmann::json> MockLlm::bodies() const {
  std::lock_guard lock(mu_);
  return bodies_;
}

void point_fake_profile(const stdfs::path& template_file) {
  ::setenv("FAKE_PROFILE_TEMPLATE", template_file.c_str(), 1);
}

PreparedRun prepare_scenario(const Scenario& s, const stdfs::path& work) {
  auto dir = fixtures() / "e2e" / s.name;
  auto project = work / "project";
  stdfs::remove_all(project);
  stdfs::create_directories(project);
  stdfs::copy(dir / "project", project, stdfs::copy_options::recursive);
  point_fake_profile(dir / "profile.callgrind");

  std::map<std::string, std::string> replies;
  for (const auto& e : stdfs::recursive_directory_iterator(dir / "responses")) {
    if (!e.is_regular_file()) continue;
    auto rel = libmig::fs::relative_to(e.path(), dir / "responses");
    rel.resize(rel.size() - 3);  // strip ".md"
    replies[slurp(dir / "project" / rel)] = slurp(e.path());
  }

  PreparedRun run;
  run.spec.project_root = project;
  run.spec.source_lib = s.source_lib;
  run.spec.target_lib = s.target_lib;
  run.spec.target_version = s.target_version;
  run.spec.requirements_files = {project / "requirements.txt"};
  run.spec.model_id = "scripted";
  run.spec.api_base_url = "http://127.0.0.1:9/v1";
  run.spec.out_dir = work / "out";
  run.options.provision.host_python = (fixtures() / "fake_python" / "python").string();
  run.options.provision.shim_source = fixtures() / "fake_python" / "shim.py";
  run.options.completion = [replies](const libmig::llm::MigrationPrompt& p) {
    auto it = replies.find(p.code);
    if (it == replies.end()) throw libmig::Error(libmig::ErrorKind::EmptyResponse, "no scripted reply");
    return it->second;
  };
  run.options.parallel = 2;
  run.options.test_timeout = std::chrono::minutes(2);
  return run;
}

}  // namespace testsupport
