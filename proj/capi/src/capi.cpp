// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#include "emchan.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "emchan/error.hpp"
#include "emchan/runner.hpp"
#include "emchan/scenario.hpp"

struct emchan_scenario {
  YAML::Node root;
};

namespace {

thread_local std::string g_last_error = "no error";

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

emchan_status status_for(emchan::ErrorKind kind) {
  using emchan::ErrorKind;
  switch (kind) {
    case ErrorKind::config:
      return EMCHAN_E_CONFIG;
    case ErrorKind::domain:
      return EMCHAN_E_DOMAIN;
    case ErrorKind::singularity:
    case ErrorKind::accuracy:
    case ErrorKind::ill_conditioned:
    case ErrorKind::packing:
      return EMCHAN_E_NUMERIC;
    case ErrorKind::convergence:
      return EMCHAN_E_CONVERGENCE;
    case ErrorKind::io:
      return EMCHAN_E_IO;
    case ErrorKind::internal:
      return EMCHAN_E_INTERNAL;
  }
  return EMCHAN_E_INTERNAL;
}

template <typename Fn>
emchan_status guarded(Fn&& fn) {
  try {
    fn();
    return EMCHAN_OK;
  } catch (const emchan::Error& e) {
    g_last_error = e.what();
    return status_for(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return EMCHAN_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return EMCHAN_E_INTERNAL;
  }
}

}  // namespace

extern "C" {

const char* emchan_version(void) { return emchan::runner::kVersion; }

const char* emchan_last_error(void) { return g_last_error.c_str(); }

emchan_status emchan_scenario_load(const char* path, emchan_scenario** out) {
  if (path == nullptr || out == nullptr) {
    g_last_error = "emchan_scenario_load: NULL argument";
    return EMCHAN_E_CONFIG;
  }
  *out = nullptr;
  return guarded([&]() {
    std::ifstream in(path);
    if (!in) emchan::throw_error(emchan::ErrorKind::io, std::string("cannot read ") + path);
    std::stringstream buf;
    buf << in.rdbuf();
    YAML::Node root;
    try {
      root = YAML::Load(buf.str());
    } catch (const YAML::ParserException& e) {
      emchan::throw_error(emchan::ErrorKind::config,
                          std::string("config parse error: ") + e.what());
    }
    *out = new emchan_scenario{root};
  });
}

emchan_status emchan_scenario_parse(const char* yaml_text, emchan_scenario** out) {
  if (yaml_text == nullptr || out == nullptr) {
    g_last_error = "emchan_scenario_parse: NULL argument";
    return EMCHAN_E_CONFIG;
  }
  *out = nullptr;
  return guarded([&]() {
    YAML::Node root;
    try {
      root = YAML::Load(yaml_text);
    } catch (const YAML::ParserException& e) {
      emchan::throw_error(emchan::ErrorKind::config,
                          std::string("config parse error: ") + e.what());
    }
    *out = new emchan_scenario{root};
  });
}

void emchan_scenario_free(emchan_scenario* sc) { delete sc; }

emchan_status emchan_scenario_set(emchan_scenario* sc, const char* dotted_key,
                                  const char* value) {
  if (sc == nullptr || dotted_key == nullptr || value == nullptr) {
    g_last_error = "emchan_scenario_set: NULL argument";
    return EMCHAN_E_CONFIG;
  }
  return guarded([&]() { emchan::cfg::apply_override(sc->root, dotted_key, value); });
}

emchan_status emchan_scenario_validate(const emchan_scenario* sc, char** report) {
  if (sc == nullptr) {
    g_last_error = "emchan_scenario_validate: NULL scenario";
    return EMCHAN_E_CONFIG;
  }
  return guarded([&]() {
    auto scenario = emchan::cfg::parse_scenario(sc->root);
    std::string text = emchan::cfg::validate_report(scenario);
    if (report != nullptr) *report = dup_string(text);
  });
}

emchan_status emchan_run(const emchan_scenario* sc, const char* subcommand,
                         const char* output_dir, char** outputs) {
  if (sc == nullptr || subcommand == nullptr) {
    g_last_error = "emchan_run: NULL argument";
    return EMCHAN_E_CONFIG;
  }
  return guarded([&]() {
    auto scenario = emchan::cfg::parse_scenario(sc->root);
    if (output_dir != nullptr && output_dir[0] != '\0') scenario.output_dir = output_dir;
    auto outcome = emchan::runner::run(scenario, subcommand);
    if (outputs != nullptr) {
      std::string joined;
      for (const auto& f : outcome.outputs) {
        if (!joined.empty()) joined += "\n";
        joined += f;
      }
      *outputs = dup_string(joined);
    }
  });
}

void emchan_string_free(char* s) { std::free(s); }

}  // extern "C"
