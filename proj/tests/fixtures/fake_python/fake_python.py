"""Offline stand-in for a CPython interpreter inside a virtual environment.

Understands just enough to let the orchestrator provision and test a project:

  python -m venv DIR              lay out DIR/bin/python and a site-packages
  python -c <probe>               print {"version", "purelib"} as JSON
  python -m pip install ...       copy packages from the local package dir
  python -m pip list --format=json
  python -m pip download ...      always fails (no index)
  python <shim.py> --report R [--profile P] [-- args]
                                  run host pytest with a JUnit report; with
                                  --profile, render $FAKE_PROFILE_TEMPLATE

Packages live in $FAKE_PACKAGES (default: ./packages) as NAME/VERSION/<files>.
Anything named "nonexistent*" fails to install the way pip does.
"""

import json
import os
import re
import shutil
import subprocess
import sys

HERE = os.path.dirname(os.path.abspath(__file__))
VERSION = os.environ.get("FAKE_PYTHON_VERSION", "%d.%d.%d" % sys.version_info[:3])
PACKAGES = os.environ.get("FAKE_PACKAGES", os.path.join(HERE, "packages"))


def norm(name):
    return re.sub(r"[-_.]+", "-", name).lower()


def venv_dir():
    d = os.environ.get("FAKE_VENV")
    if not d:
        sys.exit("fake python: not inside a venv")
    return d


def site_packages(venv):
    minor = ".".join(VERSION.split(".")[:2])
    return os.path.join(venv, "lib", "python" + minor, "site-packages")


def load_state(venv):
    with open(os.path.join(venv, "fake_state.json")) as f:
        return json.load(f)


def save_state(venv, state):
    with open(os.path.join(venv, "fake_state.json"), "w") as f:
        json.dump(state, f, indent=1, sort_keys=True)


def make_venv(path):
    path = os.path.abspath(path)
    os.makedirs(os.path.join(path, "bin"), exist_ok=True)
    os.makedirs(site_packages(path), exist_ok=True)
    launcher = os.path.join(path, "bin", "python")
    with open(launcher, "w") as f:
        f.write("#!/bin/sh\nFAKE_VENV='%s' exec '%s' '%s' \"$@\"\n" % (path, sys.executable, os.path.abspath(__file__)))
    os.chmod(launcher, 0o755)
    if not os.path.exists(os.path.join(path, "fake_state.json")):
        save_state(path, {"packages": {}})
    return 0


def available_versions(name):
    d = os.path.join(PACKAGES, norm(name))
    if not os.path.isdir(d):
        return []
    return sorted(os.listdir(d), key=lambda v: [int(x) if x.isdigit() else x for x in v.split(".")])


def install_one(venv, state, req):
    m = re.match(r"^\s*([A-Za-z0-9][A-Za-z0-9._-]*)\s*(?:\[[^\]]*\])?\s*(?:==\s*([^\s;,]+))?", req)
    if not m:
        return True
    name, pin = m.group(1), m.group(2)
    if norm(name).startswith("nonexistent"):
        print("ERROR: Could not find a version that satisfies the requirement %s (from versions: none)" % req)
        print("ERROR: No matching distribution found for %s" % req)
        return False
    versions = available_versions(name)
    if pin and versions and pin not in versions:
        print("ERROR: No matching distribution found for %s" % req)
        return False
    version = pin or (versions[-1] if versions else "1.0.0")
    site = site_packages(venv)
    if versions:
        src = os.path.join(PACKAGES, norm(name), version)
        for entry in os.listdir(src):
            s, d = os.path.join(src, entry), os.path.join(site, entry)
            if os.path.isdir(s):
                shutil.rmtree(d, ignore_errors=True)
                shutil.copytree(s, d)
            else:
                shutil.copy(s, d)
        tops = sorted(e[:-3] if e.endswith(".py") else e for e in os.listdir(src))
        info = os.path.join(site, "%s-%s.dist-info" % (re.sub(r"[-.]+", "_", name), version))
        os.makedirs(info, exist_ok=True)
        with open(os.path.join(info, "METADATA"), "w") as f:
            f.write("Metadata-Version: 2.1\nName: %s\nVersion: %s\n" % (name, version))
        with open(os.path.join(info, "top_level.txt"), "w") as f:
            f.write("".join(t + "\n" for t in tops))
    state["packages"][norm(name)] = {"name": name, "version": version}
    print("Successfully installed %s-%s" % (name, version))
    return True


VALUE_OPTIONS = {"-i", "--index-url", "--extra-index-url", "-f", "--find-links", "-c", "--constraint", "-d", "--dest"}


def requirement_lines(path):
    out = []
    with open(path) as f:
        for line in f:
            line = line.split("#", 1)[0].strip()
            if line and not line.startswith("-"):
                out.append(line)
    return out


def pip(args):
    venv = venv_dir()
    state = load_state(venv)
    cmd, rest = args[0], args[1:]
    if cmd == "list":
        print(json.dumps([{"name": p["name"], "version": p["version"]} for p in state["packages"].values()]))
        return 0
    if cmd == "download":
        print("ERROR: Could not find a version that satisfies the requirement (offline)")
        return 1
    if cmd != "install":
        print("fake pip: unsupported command %s" % cmd)
        return 2
    reqs = []
    i = 0
    while i < len(rest):
        a = rest[i]
        if a == "-r":
            reqs += requirement_lines(rest[i + 1])
            i += 2
            continue
        if a in VALUE_OPTIONS:
            i += 2
            continue
        if not a.startswith("-"):
            reqs.append(a)
        i += 1
    ok = all([install_one(venv, state, r) for r in reqs])
    save_state(venv, state)
    return 0 if ok else 1


def run_shim(args):
    venv = venv_dir()
    state = load_state(venv)
    report = profile = None
    extra = []
    i = 0
    while i < len(args):
        if args[i] == "--report":
            report = args[i + 1]
            i += 2
        elif args[i] == "--profile":
            profile = args[i + 1]
            i += 2
        elif args[i] == "--":
            extra = args[i + 1:]
            break
        else:
            i += 1
    site = site_packages(venv)
    env = dict(os.environ)
    env["PYTHONPATH"] = os.pathsep.join([os.getcwd(), site] + ([env["PYTHONPATH"]] if env.get("PYTHONPATH") else []))
    cmd = [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", "--junitxml", report]
    if "pytest-asyncio" in state["packages"]:
        cmd += ["-p", "fake_asyncio"]
    res = subprocess.run(cmd + extra, env=env)
    template = os.environ.get("FAKE_PROFILE_TEMPLATE")
    if profile and template and os.path.exists(template):
        with open(template) as f:
            text = f.read()
        text = text.replace("@PROJECT@", os.getcwd()).replace("@SITE@", site)
        with open(profile, "w") as f:
            f.write(text)
    return 4 if res.returncode == 5 else res.returncode


def main(argv):
    if len(argv) >= 2 and argv[0] == "-m" and argv[1] == "venv":
        return make_venv(argv[-1])
    if len(argv) >= 2 and argv[0] == "-c":
        venv = venv_dir()
        print(json.dumps({"version": VERSION, "purelib": site_packages(venv)}))
        return 0
    if len(argv) >= 3 and argv[0] == "-m" and argv[1] == "pip":
        return pip([a for a in argv[2:] if a != "--disable-pip-version-check"])
    if argv and argv[0].endswith(".py"):
        return run_shim(argv[1:])
    print("fake python: unsupported invocation %r" % (argv,))
    return 2


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
