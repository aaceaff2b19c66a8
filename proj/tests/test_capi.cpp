// Exercises the public C interface the way an FFI client would: opaque
// handles only, no symbols from the C++ core.
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <string>

#include "fpplab.h"

namespace {

bool contains(const char* hay, const char* needle) {
  return hay != nullptr && std::strstr(hay, needle) != nullptr;
}

}  // namespace

TEST_CASE("configurations round-trip through set/serialize/parse") {
  fpp_config* cfg = fpp_config_new();
  REQUIRE(cfg != nullptr);
  CHECK(fpp_config_set(cfg, "model.kind=iid") == FPP_OK);
  CHECK(fpp_config_set(cfg, "model.values = 1, 2") == FPP_OK);
  CHECK(fpp_config_set(cfg, "run.seed=42") == FPP_OK);
  const std::string text = fpp_config_serialize(cfg);
  CHECK(text.find("[model]") != std::string::npos);
  CHECK(text.find("kind = iid") != std::string::npos);
  fpp_config* back = fpp_config_parse(text.c_str());
  REQUIRE(back != nullptr);
  CHECK(std::string(fpp_config_serialize(back)) == text);
  fpp_config_free(back);
  fpp_config_free(cfg);
}

TEST_CASE("malformed input reports through fpp_last_error") {
  fpp_config* cfg = fpp_config_new();
  CHECK(fpp_config_set(cfg, "no_dot_or_equals") == FPP_ERR_USAGE);
  CHECK(fpp_last_error()[0] != '\0');
  CHECK(fpp_config_set(cfg, nullptr) == FPP_ERR_USAGE);
  CHECK(fpp_config_parse("[never closed\nkey = 1\n") == nullptr);
  CHECK(fpp_last_error()[0] != '\0');
  CHECK(fpp_config_parse(nullptr) == nullptr);
  CHECK(fpp_config_load("/nonexistent/fpplab.ini") == nullptr);
  CHECK(fpp_last_error()[0] != '\0');
  fpp_config_free(cfg);
  fpp_config_free(nullptr);  // must be a no-op
}

TEST_CASE("subcommand registry") {
  REQUIRE(fpp_subcommand_count() == 8);
  const char* expected[] = {"generate",  "passage", "variance-scan", "shift-test",
                            "animals",   "influence-check", "hn-check", "probe-determination"};
  for (int i = 0; i < 8; ++i) CHECK(std::string(fpp_subcommand_name(i)) == expected[i]);
  CHECK(fpp_subcommand_name(-1) == nullptr);
  CHECK(fpp_subcommand_name(8) == nullptr);
}

TEST_CASE("running a subcommand produces a summary") {
  fpp_config* cfg = fpp_config_new();
  fpp_config_set(cfg, "run.output_dir=capi_out");
  fpp_config_set(cfg, "hn.kernel=iid");
  fpp_config_set(cfg, "hn.alphabet=1,2");
  fpp_config_set(cfg, "hn.probs=0.25,0.75");
  fpp_result* res = fpp_run("hn-check", cfg);
  REQUIRE(res != nullptr);
  CHECK(fpp_result_status(res) == FPP_OK);
  CHECK(fpp_result_error(res)[0] == '\0');
  const std::string summary = fpp_result_summary(res);
  // an iid kernel ignores its boundary, so gamma is exactly 1
  CHECK(contains(summary.c_str(), "\"gamma\": 1.0"));
  CHECK(contains(summary.c_str(), "\"threshold\": 0.75"));
  CHECK(contains(summary.c_str(), "\"satisfied\": true"));
  CHECK(contains(summary.c_str(), "\"subcommand\": \"hn-check\""));
  CHECK(contains(summary.c_str(), "\"config_fingerprint\""));
  CHECK(std::filesystem::exists("capi_out/summary.json"));
  fpp_result_free(res);

  // identical configuration, identical bytes
  fpp_result* res2 = fpp_run("hn-check", cfg);
  CHECK(std::string(fpp_result_summary(res2)) == summary);
  fpp_result_free(res2);
  fpp_config_free(cfg);
}

TEST_CASE("failures surface as status codes, not exceptions") {
  fpp_config* cfg = fpp_config_new();
  fpp_config_set(cfg, "run.output_dir=capi_out");
  fpp_result* res = fpp_run("frobnicate", cfg);
  CHECK(fpp_result_status(res) == FPP_ERR_USAGE);
  CHECK(contains(fpp_result_error(res), "unknown subcommand"));
  CHECK(fpp_result_summary(res)[0] == '\0');
  fpp_result_free(res);

  fpp_config_set(cfg, "hn.version=banana");
  fpp_result* bad = fpp_run("hn-check", cfg);
  CHECK(fpp_result_status(bad) == FPP_ERR_USAGE);
  CHECK(contains(fpp_result_error(bad), "usage:"));
  fpp_result_free(bad);

  fpp_result* nul = fpp_run(nullptr, cfg);
  CHECK(fpp_result_status(nul) == FPP_ERR_USAGE);
  fpp_result_free(nul);
  CHECK(fpp_result_status(nullptr) == FPP_ERR_INTERNAL);
  CHECK(fpp_result_summary(nullptr)[0] == '\0');
  fpp_config_free(cfg);
}
