#include "fpplab.h"

#include <exception>
#include <new>
#include <string>

#include "fpp/config.hpp"
#include "fpp/runner.hpp"

struct fpp_config {
  fpp::Config cfg;
  std::string scratch;  // backs fpp_config_serialize
};

struct fpp_result {
  fpp::RunOutcome out;
};

namespace {

thread_local std::string g_last_error;

void set_last_error(const char* what) { g_last_error = what ? what : ""; }

}  // namespace

extern "C" {

fpp_config* fpp_config_new(void) { return new (std::nothrow) fpp_config(); }

fpp_config* fpp_config_parse(const char* text) {
  if (!text) {
    set_last_error("null text");
    return nullptr;
  }
  try {
    auto* h = new fpp_config();
    h->cfg = fpp::Config::parse(text);
    return h;
  } catch (const std::exception& e) {
    set_last_error(e.what());
    return nullptr;
  }
}

fpp_config* fpp_config_load(const char* path) {
  if (!path) {
    set_last_error("null path");
    return nullptr;
  }
  try {
    auto* h = new fpp_config();
    h->cfg = fpp::Config::load(path);
    return h;
  } catch (const std::exception& e) {
    set_last_error(e.what());
    return nullptr;
  }
}

int fpp_config_set(fpp_config* cfg, const char* assignment) {
  if (!cfg || !assignment) {
    set_last_error("null argument");
    return FPP_ERR_USAGE;
  }
  try {
    cfg->cfg.set_dotted(assignment);
    return FPP_OK;
  } catch (const std::exception& e) {
    set_last_error(e.what());
    return FPP_ERR_USAGE;
  }
}

const char* fpp_config_serialize(fpp_config* cfg) {
  if (!cfg) return "";
  cfg->scratch = cfg->cfg.serialize();
  return cfg->scratch.c_str();
}

void fpp_config_free(fpp_config* cfg) { delete cfg; }

int fpp_subcommand_count(void) { return static_cast<int>(fpp::subcommand_names().size()); }

const char* fpp_subcommand_name(int i) {
  const auto& names = fpp::subcommand_names();
  if (i < 0 || i >= static_cast<int>(names.size())) return nullptr;
  return names[static_cast<std::size_t>(i)].c_str();
}

fpp_result* fpp_run(const char* subcommand, const fpp_config* cfg) {
  auto* res = new (std::nothrow) fpp_result();
  if (!res) return nullptr;
  if (!subcommand || !cfg) {
    res->out.status = FPP_ERR_USAGE;
    res->out.error = "usage: null subcommand or configuration";
    return res;
  }
  try {
    res->out = fpp::run_subcommand(subcommand, cfg->cfg);
  } catch (const std::exception& e) {
    res->out = fpp::RunOutcome{FPP_ERR_INTERNAL, "", std::string("error: ") + e.what()};
  } catch (...) {
    res->out = fpp::RunOutcome{FPP_ERR_INTERNAL, "", "error: unknown failure"};
  }
  return res;
}

int fpp_result_status(const fpp_result* res) { return res ? res->out.status : FPP_ERR_INTERNAL; }

const char* fpp_result_summary(const fpp_result* res) {
  return res ? res->out.summary_json.c_str() : "";
}

const char* fpp_result_error(const fpp_result* res) { return res ? res->out.error.c_str() : ""; }

void fpp_result_free(fpp_result* res) { delete res; }

const char* fpp_last_error(void) { return g_last_error.c_str(); }

}  // extern "C"
