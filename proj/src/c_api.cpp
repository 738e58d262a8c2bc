/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The CBB Authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "cbb/cbb.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "cbb/bnb.hpp"
#include "cbb/chordal.hpp"
#include "cbb/error.hpp"
#include "cbb/model.hpp"

struct cbb_model {
  cbb::SpinModel model;
};

struct cbb_params {
  cbb::RunParams params;
};

struct cbb_certificate {
  cbb::Certificate cert;
};

namespace {

thread_local std::string g_last_error;

cbb_status fail(cbb_status status, const std::string& message)
{
  g_last_error = message;
  return status;
}

// Run `body`, translating exceptions into status codes.
template <class F>
cbb_status guarded(F&& body)
{
  try {
    body();
    return CBB_OK;
  } catch (const cbb::ParseError& e) {
    return fail(CBB_ERR_PARSE, e.what());
  } catch (const cbb::SizeError& e) {
    return fail(CBB_ERR_SIZE, e.what());
  } catch (const cbb::VerificationRefused& e) {
    return fail(CBB_ERR_REFUSED, e.what());
  } catch (const cbb::ContractViolation& e) {
    return fail(CBB_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CBB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CBB_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CBB_ERR_INTERNAL, "unknown error");
  }
}

char* copy_string(const std::string& s)
{
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* cbb_version(void) { return "0.1.0"; }

const char* cbb_last_error(void) { return g_last_error.c_str(); }

const char* cbb_status_name(cbb_status status)
{
  switch (status) {
    case CBB_OK: return "ok";
    case CBB_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case CBB_ERR_PARSE: return "parse_error";
    case CBB_ERR_SIZE: return "size_error";
    case CBB_ERR_REFUSED: return "refused";
    case CBB_ERR_IO: return "io_error";
    case CBB_ERR_INTERNAL: return "internal_error";
  }
  return "unknown";
}

void cbb_string_free(char* s) { std::free(s); }

cbb_status cbb_model_parse(const char* text, cbb_model** out)
{
  if (!text || !out) return fail(CBB_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new cbb_model{cbb::parse_instance(text)}; });
}

cbb_status cbb_model_read_file(const char* path, cbb_model** out)
{
  if (!path || !out) return fail(CBB_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  std::ifstream in(path, std::ios::binary);
  if (!in) return fail(CBB_ERR_IO, std::string("cannot open '") + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  return cbb_model_parse(text.c_str(), out);
}

cbb_status cbb_model_gen_square(size_t L, double sigma, uint64_t seed, cbb_model** out)
{
  if (!out) return fail(CBB_ERR_INVALID_ARGUMENT, "null output pointer");
  *out = nullptr;
  return guarded([&] { *out = new cbb_model{cbb::gen_square(L, sigma, seed)}; });
}

cbb_status cbb_model_gen_triangular(size_t rows, size_t cols, double sigma, uint64_t seed,
                                    cbb_model** out)
{
  if (!out) return fail(CBB_ERR_INVALID_ARGUMENT, "null output pointer");
  *out = nullptr;
  return guarded([&] { *out = new cbb_model{cbb::gen_triangular(rows, cols, sigma, seed)}; });
}

cbb_status cbb_model_gen_chimera(size_t L, double sigma, uint64_t seed, cbb_model** out)
{
  if (!out) return fail(CBB_ERR_INVALID_ARGUMENT, "null output pointer");
  *out = nullptr;
  return guarded([&] { *out = new cbb_model{cbb::gen_chimera(L, sigma, seed)}; });
}

cbb_status cbb_model_gen_random(size_t n, double p, uint64_t seed, cbb_model** out)
{
  if (!out) return fail(CBB_ERR_INVALID_ARGUMENT, "null output pointer");
  *out = nullptr;
  return guarded([&] { *out = new cbb_model{cbb::gen_random(n, p, seed)}; });
}

void cbb_model_free(cbb_model* model) { delete model; }

size_t cbb_model_num_spins(const cbb_model* model) { return model ? model->model.num_spins() : 0; }

size_t cbb_model_num_couplings(const cbb_model* model)
{
  return model ? model->model.couplings().size() : 0;
}

cbb_status cbb_model_serialize(const cbb_model* model, char** out)
{
  if (!model || !out) return fail(CBB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = copy_string(cbb::serialize_instance(model->model)); });
}

cbb_status cbb_model_digest(const cbb_model* model, char** out)
{
  if (!model || !out) return fail(CBB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = copy_string(cbb::instance_digest(model->model)); });
}

cbb_status cbb_model_energy(const cbb_model* model, const int8_t* config, size_t n, double* out)
{
  if (!model || (!config && n) || !out) return fail(CBB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = cbb::energy(model->model, std::span<const std::int8_t>(config, n)); });
}

cbb_status cbb_model_max_clique(const cbb_model* model, size_t* out)
{
  if (!model || !out) return fail(CBB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = cbb::chordal_extension(cbb::dependency_graph(model->model)).max_clique_size();
  });
}

cbb_status cbb_config_parse(const char* text, int8_t** out, size_t* n)
{
  if (!text || !out || !n) return fail(CBB_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  *n = 0;
  return guarded([&] {
    const cbb::SpinConfiguration c = cbb::parse_configuration(text);
    auto* buf = static_cast<int8_t*>(std::malloc(c.size() ? c.size() : 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, c.data(), c.size());
    *out = buf;
    *n = c.size();
  });
}

void cbb_config_free(int8_t* config) { std::free(config); }

cbb_status cbb_brute_force(const cbb_model* model, double* energy, int8_t* config)
{
  if (!model || !energy || (!config && model->model.num_spins()))
    return fail(CBB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const cbb::OracleResult r = cbb::brute_force_ground(model->model);
    *energy = r.energy;
    const auto& c = r.configurations.front();
    std::copy(c.begin(), c.end(), config);
  });
}

cbb_status cbb_params_create(cbb_params** out)
{
  if (!out) return fail(CBB_ERR_INVALID_ARGUMENT, "null output pointer");
  *out = nullptr;
  return guarded([&] { *out = new cbb_params{}; });
}

void cbb_params_free(cbb_params* params) { delete params; }

cbb_status cbb_params_set(cbb_params* params, const char* key, const char* value)
{
  if (!params || !key || !value) return fail(CBB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { params->params = cbb::params_with(params->params, key, value); });
}

cbb_status cbb_params_update_json(cbb_params* params, const char* json)
{
  if (!params || !json) return fail(CBB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { params->params = cbb::params_update_json(params->params, json); });
}

cbb_status cbb_params_to_json(const cbb_params* params, char** out)
{
  if (!params || !out) return fail(CBB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = copy_string(cbb::params_to_json(params->params)); });
}

cbb_status cbb_solve(const cbb_model* model, const cbb_params* params, cbb_certificate** out)
{
  if (!model || !out) return fail(CBB_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const cbb::RunParams p = params ? params->params : cbb::RunParams{};
    *out = new cbb_certificate{cbb::solve_cbb(model->model, p)};
  });
}

void cbb_certificate_free(cbb_certificate* cert) { delete cert; }

cbb_status cbb_certificate_to_json(const cbb_certificate* cert, int include_trace, char** out)
{
  if (!cert || !out) return fail(CBB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::optional<bool> trace;
    if (include_trace >= 0) trace = include_trace != 0;
    *out = copy_string(cbb::certificate_to_json(cert->cert, trace));
  });
}

cbb_status cbb_certificate_from_json(const char* json, cbb_certificate** out)
{
  if (!json || !out) return fail(CBB_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new cbb_certificate{cbb::certificate_from_json(json)}; });
}

cbb_status cbb_certificate_history_csv(const cbb_certificate* cert, char** out)
{
  if (!cert || !out) return fail(CBB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::string csv = "step,lower,upper\n";
    for (const auto& h : cert->cert.history)
      csv += std::to_string(h.step) + "," + cbb::format_number(h.lower) + "," +
             cbb::format_number(h.upper) + "\n";
    *out = copy_string(csv);
  });
}

int cbb_certificate_converged(const cbb_certificate* cert) { return cert && cert->cert.converged; }
double cbb_certificate_lower(const cbb_certificate* cert) { return cert ? cert->cert.lower : 0.0; }
double cbb_certificate_upper(const cbb_certificate* cert) { return cert ? cert->cert.upper : 0.0; }
double cbb_certificate_wall_time(const cbb_certificate* cert) { return cert ? cert->cert.wall_time : 0.0; }
size_t cbb_certificate_nodes(const cbb_certificate* cert) { return cert ? cert->cert.nodes_explored : 0; }
size_t cbb_certificate_branchings(const cbb_certificate* cert) { return cert ? cert->cert.branchings : 0; }
size_t cbb_certificate_num_spins(const cbb_certificate* cert) { return cert ? cert->cert.config.size() : 0; }

cbb_status cbb_certificate_config(const cbb_certificate* cert, int8_t* config)
{
  if (!cert || (!config && !cert->cert.config.empty())) return fail(CBB_ERR_INVALID_ARGUMENT, "null argument");
  std::copy(cert->cert.config.begin(), cert->cert.config.end(), config);
  return CBB_OK;
}

cbb_status cbb_verify(const cbb_model* model, const int8_t* config, size_t n,
                      const cbb_certificate* cert, const cbb_params* params, char** report)
{
  if (!model || (!config && n) || !report) return fail(CBB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const cbb::RunParams p = params ? params->params : cbb::RunParams{};
    const auto r = cbb::verify_external(model->model, std::span<const std::int8_t>(config, n),
                                        cert ? &cert->cert : nullptr, p);
    *report = copy_string(cbb::report_to_json(r));
  });
}

}  // extern "C"
