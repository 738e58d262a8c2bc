/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The CBB Authors
 * SPDX-License-Identifier: Apache-2.0
 */

// Exercises the shared library through its C header only.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cbb/cbb.h>

#include <string>
#include <vector>

namespace {

std::string take(char* s)
{
  std::string out(s ? s : "");
  cbb_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("model lifecycle")
{
  cbb_model* m = nullptr;
  REQUIRE(cbb_model_parse("2 1\n0 1 1.0\n0\n", &m) == CBB_OK);
  CHECK(cbb_model_num_spins(m) == 2);
  CHECK(cbb_model_num_couplings(m) == 1);
  char* text = nullptr;
  REQUIRE(cbb_model_serialize(m, &text) == CBB_OK);
  CHECK(take(text).rfind("2 1\n", 0) == 0);
  char* digest = nullptr;
  REQUIRE(cbb_model_digest(m, &digest) == CBB_OK);
  CHECK(take(digest).size() == 64);
  const int8_t up[2] = {1, 1};
  double e = 0;
  CHECK(cbb_model_energy(m, up, 2, &e) == CBB_OK);
  CHECK(e == -1.0);
  CHECK(cbb_model_energy(m, up, 1, &e) == CBB_ERR_INVALID_ARGUMENT);
  size_t clique = 0;
  CHECK(cbb_model_max_clique(m, &clique) == CBB_OK);
  CHECK(clique == 2);
  cbb_model_free(m);
}

TEST_CASE("errors carry codes and messages")
{
  cbb_model* m = nullptr;
  CHECK(cbb_model_parse("2 1\n0 2 1.0\n0\n", &m) == CBB_ERR_PARSE);
  CHECK(m == nullptr);
  CHECK(std::string(cbb_last_error()).find("line 2") != std::string::npos);
  CHECK(cbb_model_read_file("/nonexistent/file", &m) == CBB_ERR_IO);
  CHECK(cbb_model_parse(nullptr, &m) == CBB_ERR_INVALID_ARGUMENT);
  CHECK(cbb_model_gen_square(0, 1.0, 1, &m) == CBB_ERR_INVALID_ARGUMENT);
  CHECK(std::string(cbb_status_name(CBB_ERR_REFUSED)) == "refused");
  REQUIRE(cbb_model_gen_random(25, 0.1, 1, &m) == CBB_OK);
  double e = 0;
  std::vector<int8_t> c(25);
  CHECK(cbb_brute_force(m, &e, c.data()) == CBB_ERR_SIZE);
  cbb_model_free(m);
}

TEST_CASE("solve, serialize and verify")
{
  cbb_model* m = nullptr;
  REQUIRE(cbb_model_gen_square(3, 1.5, 2, &m) == CBB_OK);
  cbb_params* p = nullptr;
  REQUIRE(cbb_params_create(&p) == CBB_OK);
  CHECK(cbb_params_set(p, "oracle_leaf", "0") == CBB_OK);
  CHECK(cbb_params_set(p, "max_nodes", "zero") == CBB_ERR_INVALID_ARGUMENT);
  CHECK(cbb_params_update_json(p, "{\"trace\": true}") == CBB_OK);
  char* pj = nullptr;
  REQUIRE(cbb_params_to_json(p, &pj) == CBB_OK);
  CHECK(take(pj).find("\"oracle_leaf\": 0") != std::string::npos);

  cbb_certificate* cert = nullptr;
  REQUIRE(cbb_solve(m, p, &cert) == CBB_OK);
  CHECK(cbb_certificate_converged(cert) == 1);
  double eg = 0;
  std::vector<int8_t> ground(9);
  REQUIRE(cbb_brute_force(m, &eg, ground.data()) == CBB_OK);
  CHECK(cbb_certificate_upper(cert) == doctest::Approx(eg).epsilon(1e-9));
  CHECK(cbb_certificate_lower(cert) <= cbb_certificate_upper(cert));
  CHECK(cbb_certificate_num_spins(cert) == 9);
  std::vector<int8_t> config(9);
  CHECK(cbb_certificate_config(cert, config.data()) == CBB_OK);
  double e = 0;
  CHECK(cbb_model_energy(m, config.data(), 9, &e) == CBB_OK);
  CHECK(e == cbb_certificate_upper(cert));

  char* json = nullptr;
  REQUIRE(cbb_certificate_to_json(cert, -1, &json) == CBB_OK);
  const std::string text = take(json);
  CHECK(text.find("\"trace\"") != std::string::npos);
  cbb_certificate* back = nullptr;
  REQUIRE(cbb_certificate_from_json(text.c_str(), &back) == CBB_OK);
  CHECK(cbb_certificate_upper(back) == cbb_certificate_upper(cert));
  char* csv = nullptr;
  REQUIRE(cbb_certificate_history_csv(cert, &csv) == CBB_OK);
  CHECK(take(csv).rfind("step,lower,upper\n0,", 0) == 0);

  int8_t* ext = nullptr;
  size_t n = 0;
  REQUIRE(cbb_config_parse("+++++++++", &ext, &n) == CBB_OK);
  CHECK(n == 9);
  char* report = nullptr;
  REQUIRE(cbb_verify(m, ext, n, back, nullptr, &report) == CBB_OK);
  CHECK(take(report).find("\"hamming_distance\"") != std::string::npos);

  cbb_model* other = nullptr;
  REQUIRE(cbb_model_gen_square(3, 1.5, 3, &other) == CBB_OK);
  CHECK(cbb_verify(other, ext, n, back, nullptr, &report) == CBB_ERR_REFUSED);
  cbb_config_free(ext);
  cbb_model_free(other);
  cbb_certificate_free(back);
  cbb_certificate_free(cert);
  cbb_params_free(p);
  cbb_model_free(m);
}

TEST_CASE("free functions accept null")
{
  cbb_model_free(nullptr);
  cbb_params_free(nullptr);
  cbb_certificate_free(nullptr);
  cbb_string_free(nullptr);
  cbb_config_free(nullptr);
  CHECK(cbb_model_num_spins(nullptr) == 0);
  CHECK(std::string(cbb_version()).size() > 0);
}
