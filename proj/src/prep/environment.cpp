#include "libmig/prep/environment.hpp"

#include <regex>

#include <fmt/ranges.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "libmig/common/fs.hpp"
#include "libmig/common/process.hpp"
#include "libmig/common/text.hpp"
#include "libmig/error.hpp"
#include "libmig/prep/requirements.hpp"

namespace libmig::prep {

namespace stdfs = std::filesystem;

namespace {

constexpr const char* kProbe =
    "import json, sys, sysconfig; "
    "print(json.dumps({'version': '%d.%d.%d' % sys.version_info[:3], "
    "'purelib': sysconfig.get_paths()['purelib']}))";

std::string requested_interpreter(const MigrationSpec& spec, const ProvisionOptions& options) {
  if (!options.host_python.empty()) return options.host_python;
  if (spec.python_version) return "python" + *spec.python_version;
  return "python3";
}

bool version_matches(const std::string& actual, const std::string& requested) {
  return actual == requested || actual.rfind(requested + ".", 0) == 0;
}

std::string last_json_line(const std::string& output) {
  auto lines = text::split_lines(output);
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    auto l = text::trim(*it);
    if (!l.empty() && (l.front() == '{' || l.front() == '[')) return std::string(l);
  }
  return {};
}

void probe(EnvHandle& env) {
  auto res = run_process({env.python().string(), "-c", kProbe});
  auto line = last_json_line(res.output);
  if (res.exit_code != 0 || line.empty())
    throw Error(ErrorKind::InterpreterMissing,
                "cannot query interpreter in " + env.venv_path.string() + ": " + res.output);
  auto j = nlohmann::json::parse(line);
  env.interpreter_version = j.at("version").get<std::string>();
  env.site_packages_path = fs::normalize(j.at("purelib").get<std::string>());
}

ProcessResult pip(const EnvHandle& env, std::vector<std::string> args,
                  const ProvisionOptions& options) {
  std::vector<std::string> argv{env.python().string(), "-m", "pip"};
  argv.insert(argv.end(), args.begin(), args.end());
  argv.push_back("--disable-pip-version-check");
  if (args.front() == "install")
    argv.insert(argv.end(), options.pip_args.begin(), options.pip_args.end());
  ProcessOptions popts;
  popts.timeout = options.install_timeout;
  spdlog::info("[prep] pip {}", fmt::join(args, " "));
  return run_process(argv, popts);
}

std::string requirement_name(std::string_view spec) {
  std::size_t i = 0;
  while (i < spec.size() && (std::isalnum(static_cast<unsigned char>(spec[i])) || spec[i] == '-' ||
                             spec[i] == '_' || spec[i] == '.'))
    ++i;
  return std::string(spec.substr(0, i));
}

void check_install(const ProcessResult& res, const std::string& fallback_package) {
  if (res.exit_code == 0 && !res.timed_out) return;
  auto pkg = failed_package_from_pip_output(res.output).value_or(fallback_package);
  throw InstallError(pkg, res.timed_out ? res.output + "\n[timed out]" : res.output);
}

}  // namespace

stdfs::path EnvHandle::python() const { return venv_path / "bin" / "python"; }

stdfs::path EnvHandle::shim_path() const { return venv_path / "libmig" / "shim.py"; }

std::optional<std::string> EnvHandle::installed_version(std::string_view package) const {
  auto it = installed_packages.find(text::normalize_package_name(package));
  if (it == installed_packages.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> failed_package_from_pip_output(std::string_view output) {
  static const std::regex kPatterns[] = {
      std::regex(R"(No matching distribution found for ([^\s]+))"),
      std::regex(R"(Could not find a version that satisfies the requirement ([^\s]+))"),
      std::regex(R"(Failed to build ([^\s]+))"),
      std::regex(R"(Failed building wheel for ([^\s]+))"),
  };
  std::string text(output);
  for (const auto& re : kPatterns) {
    std::smatch m;
    if (std::regex_search(text, m, re)) {
      auto name = requirement_name(m[1].str());
      if (!name.empty()) return name;
    }
  }
  return std::nullopt;
}

void refresh_installed(EnvHandle& env) {
  auto res = run_process({env.python().string(), "-m", "pip", "list", "--format=json",
                          "--disable-pip-version-check"});
  auto line = last_json_line(res.output);
  if (res.exit_code != 0 || line.empty())
    throw Error(ErrorKind::InstallFailed, "cannot list installed packages: " + res.output);
  env.installed_packages.clear();
  for (const auto& p : nlohmann::json::parse(line))
    env.installed_packages[text::normalize_package_name(p.at("name").get<std::string>())] =
        p.at("version").get<std::string>();
}

EnvHandle provision_environment(const MigrationSpec& spec, const ProvisionOptions& options) {
  EnvHandle env;
  env.venv_path = fs::normalize(spec.out_dir / "venv");
  stdfs::create_directories(spec.out_dir);

  if (!stdfs::exists(env.python())) {
    auto interpreter = requested_interpreter(spec, options);
    if (!find_on_path(interpreter))
      throw Error(ErrorKind::InterpreterMissing, "interpreter not found: " + interpreter);
    spdlog::info("[prep] creating virtual environment with {}", interpreter);
    auto res = run_process({interpreter, "-m", "venv", env.venv_path.string()});
    if (res.exit_code != 0)
      throw Error(ErrorKind::InterpreterMissing, "venv creation failed: " + res.output);
  }
  probe(env);
  if (spec.python_version && !version_matches(env.interpreter_version, *spec.python_version))
    throw Error(ErrorKind::InterpreterMissing,
                "environment runs Python " + env.interpreter_version + ", requested " +
                    *spec.python_version);

  int index = 0;
  for (const auto& req_file : spec.requirements_files) {
    auto path = fs::normalize(req_file);
    if (options.reference_date && options.registry) {
      auto reqs = parse_requirements(fs::read_file(path));
      auto pinned = pin_requirements(reqs, *options.reference_date, *options.registry);
      path = fs::normalize(spec.out_dir / ("requirements.resolved." + std::to_string(index) + ".txt"));
      fs::write_file_atomic(path, pinned);
    }
    ++index;
    if (parse_requirements(fs::read_file(path)).empty()) continue;
    check_install(pip(env, {"install", "-r", path.string()}, options), path.string());
  }

  auto target = spec.target_lib + "==" + spec.target_version;
  check_install(pip(env, {"install", target}, options), spec.target_lib);

  if (!options.support_packages.empty()) {
    std::vector<std::string> args{"install"};
    args.insert(args.end(), options.support_packages.begin(), options.support_packages.end());
    check_install(pip(env, args, options), options.support_packages.front());
  }

  if (!options.shim_source.empty()) {
    if (!stdfs::is_regular_file(options.shim_source))
      throw Error(ErrorKind::Validation, "runner shim not found: " + options.shim_source.string());
    fs::write_file_atomic(env.shim_path(), fs::read_file(options.shim_source));
  }

  refresh_installed(env);
  auto installed = env.installed_version(spec.target_lib);
  if (!installed || *installed != spec.target_version)
    throw InstallError(spec.target_lib, "expected " + target + ", found " +
                                            installed.value_or(std::string("nothing")));
  return env;
}

void install_packages(EnvHandle& env, const std::vector<std::string>& requirements,
                      const ProvisionOptions& options) {
  if (requirements.empty()) return;
  std::vector<std::string> args{"install"};
  args.insert(args.end(), requirements.begin(), requirements.end());
  check_install(pip(env, args, options), requirement_name(requirements.front()));
  refresh_installed(env);
}

TestRun run_tests(const EnvHandle& env, const stdfs::path& project_root, Stage stage,
                  bool with_profiling, const RunOptions& options) {
  TestRun run;
  auto dir = options.artifacts_dir.empty() ? env.venv_path.parent_path() / "reports" : options.artifacts_dir;
  stdfs::create_directories(dir);
  run.report_path = dir / (std::string(to_string(stage)) + ".xml");
  auto profile_path = dir / (std::string(to_string(stage)) + ".callgrind");
  std::error_code ec;
  stdfs::remove(run.report_path, ec);
  stdfs::remove(profile_path, ec);

  std::vector<std::string> argv{env.python().string(), env.shim_path().string(), "--report",
                                run.report_path.string()};
  if (with_profiling) {
    argv.push_back("--profile");
    argv.push_back(profile_path.string());
  }
  if (!options.config.test_args.empty()) {
    argv.push_back("--");
    argv.insert(argv.end(), options.config.test_args.begin(), options.config.test_args.end());
  }

  ProcessOptions popts;
  popts.cwd = project_root;
  popts.env = options.config.env;
  popts.env["PYTHONDONTWRITEBYTECODE"] = "1";
  popts.timeout = options.config.timeout
                      ? std::chrono::duration_cast<std::chrono::milliseconds>(*options.config.timeout)
                      : options.timeout;

  spdlog::info("[{}] running tests{}", to_string(stage), with_profiling ? " with profiling" : "");
  auto start = std::chrono::steady_clock::now();
  auto res = run_process(argv, popts);
  double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  run.output = res.output;

  if (res.timed_out)
    throw Error(ErrorKind::RunnerCrashed, "test run timed out after " +
                                              std::to_string(popts.timeout->count()) + " ms");
  if (res.exit_code == 4) throw Error(ErrorKind::NoTestsCollected, "no tests collected");
  if (!stdfs::exists(run.report_path))
    throw Error(ErrorKind::RunnerCrashed,
                "runner exited with code " + std::to_string(res.exit_code) +
                    " without a report:\n" + res.output);
  try {
    run.report = parse_junit_xml(fs::read_file(run.report_path), stage);
  } catch (const Error& e) {
    throw Error(ErrorKind::RunnerCrashed, e.what());
  }
  if (run.report.outcomes.empty()) throw Error(ErrorKind::NoTestsCollected, "no tests collected");
  run.report.wall_time_s = elapsed;
  if (with_profiling) {
    if (stdfs::exists(profile_path))
      run.profile = profile_path;
    else
      spdlog::warn("[{}] runner produced no profile (exit code {})", to_string(stage), res.exit_code);
  }
  return run;
}

}  // namespace libmig::prep
