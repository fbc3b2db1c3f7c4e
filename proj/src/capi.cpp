#include "mslab/mslab.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "experiments.hpp"
#include "field_io.hpp"

struct mslab_context {
  std::string last_error;
};

struct mslab_operator {
  mslab::ScenarioData data;
};

struct mslab_expr {
  mslab::Expr expr;
};

namespace {

template <class Fn>
mslab_status guarded(mslab_context* ctx, Fn&& fn) {
  if (ctx == nullptr) return MSLAB_INVALID_ARGUMENT;
  ctx->last_error.clear();
  try {
    fn();
    return MSLAB_OK;
  } catch (const mslab::Error& e) {
    ctx->last_error = e.what();
    return static_cast<mslab_status>(e.code());
  } catch (const nlohmann::json::exception& e) {
    ctx->last_error = e.what();
    return MSLAB_PARSE;
  } catch (const std::bad_alloc&) {
    ctx->last_error = "out of memory";
    return MSLAB_TOO_LARGE;
  } catch (const std::exception& e) {
    ctx->last_error = e.what();
    return MSLAB_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) throw mslab::Error(mslab::ErrorCode::kInvalidArgument, std::string(what) + " is null");
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

mslab::ComplexField complex_in(const mslab::GridSpec& g, const double* in) {
  mslab::ComplexField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = mslab::complex(in[2 * i], in[2 * i + 1]);
  return f;
}

}  // namespace

extern "C" {

const char* mslab_version(void) { return mslab::kToolVersion; }

const char* mslab_status_name(mslab_status status) {
  switch (status) {
    case MSLAB_OK: return "ok";
    case MSLAB_INVALID_ARGUMENT: return "invalid argument";
    case MSLAB_DEGENERATE: return "degenerate";
    case MSLAB_NOT_CONVERGED: return "not converged";
    case MSLAB_TOO_LARGE: return "too large";
    case MSLAB_NOT_INVERTIBLE: return "not invertible";
    case MSLAB_IO: return "i/o error";
    case MSLAB_PARSE: return "parse error";
    case MSLAB_BROKEN_INVARIANT: return "broken invariant";
    case MSLAB_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void mslab_string_free(char* s) { std::free(s); }

mslab_status mslab_context_create(mslab_context** out) {
  if (out == nullptr) return MSLAB_INVALID_ARGUMENT;
  *out = new (std::nothrow) mslab_context();
  return *out ? MSLAB_OK : MSLAB_TOO_LARGE;
}

void mslab_context_destroy(mslab_context* ctx) { delete ctx; }

const char* mslab_last_error(const mslab_context* ctx) { return ctx ? ctx->last_error.c_str() : ""; }

mslab_status mslab_validate_config(mslab_context* ctx, const char* config_json) {
  return guarded(ctx, [&] {
    need(config_json, "config_json");
    mslab::parse_config(nlohmann::json::parse(config_json));
  });
}

mslab_status mslab_run(mslab_context* ctx, const char* config_json, const char* out_dir, int* exit_code) {
  return guarded(ctx, [&] {
    need(config_json, "config_json");
    need(exit_code, "exit_code");
    const mslab::Config config = mslab::parse_config(nlohmann::json::parse(config_json));
    const std::string dir = out_dir ? std::string(out_dir) : config.output_dir;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw mslab::Error(mslab::ErrorCode::kIo, "cannot create " + dir + ": " + ec.message());
    const mslab::RunResult r = mslab::run(config, dir);
    *exit_code = r.exit_code;
    if (r.exit_code != 0) ctx->last_error = r.error;
  });
}

mslab_status mslab_report(mslab_context* ctx, const char* dir, char** summary_json) {
  return guarded(ctx, [&] {
    need(dir, "dir");
    need(summary_json, "summary_json");
    *summary_json = duplicate(mslab::report_directory(dir).dump(2));
  });
}

mslab_status mslab_operator_create(mslab_context* ctx, int n, int N, double L, const char* scenario_json,
                                   mslab_operator** out) {
  return guarded(ctx, [&] {
    need(scenario_json, "scenario_json");
    need(out, "out");
    const mslab::GridSpec grid = mslab::GridSpec::make(n, N, L);
    const mslab::Scenario s = mslab::scenario_from_json(nlohmann::json::parse(scenario_json));
    *out = new mslab_operator{mslab::build_scenario(s, grid)};
  });
}

void mslab_operator_destroy(mslab_operator* op) { delete op; }

size_t mslab_operator_dim(const mslab_operator* op) { return op ? op->data.H.dim() : 0; }

mslab_status mslab_operator_apply(mslab_context* ctx, const mslab_operator* op, const double* in,
                                  double* out) {
  return guarded(ctx, [&] {
    need(op, "operator");
    need(in, "in");
    need(out, "out");
    const mslab::ComplexField r = op->data.H.apply(complex_in(op->data.grid, in));
    std::memcpy(out, r.data(), r.size() * sizeof(mslab::complex));
  });
}

mslab_status mslab_operator_energy(mslab_context* ctx, const mslab_operator* op, const double* u,
                                   double parts[4]) {
  return guarded(ctx, [&] {
    need(op, "operator");
    need(u, "u");
    need(parts, "parts");
    const mslab::EnergyParts E = op->data.H.energy(complex_in(op->data.grid, u));
    parts[0] = E.kinetic;
    parts[1] = E.potential;
    parts[2] = E.shift;
    parts[3] = E.form;
  });
}

mslab_status mslab_operator_field_strength(mslab_context* ctx, const mslab_operator* op, double* abs_b) {
  return guarded(ctx, [&] {
    need(op, "operator");
    need(abs_b, "abs_b");
    const auto& f = op->data.B.abs_b;
    std::memcpy(abs_b, f.data(), f.size() * sizeof(double));
  });
}

mslab_status mslab_operator_aux(mslab_context* ctx, const mslab_operator* op, double* m) {
  return guarded(ctx, [&] {
    need(op, "operator");
    need(m, "m");
    if (!op->data.aux)
      throw mslab::Error(mslab::ErrorCode::kInvalidArgument, "m(., |B|) is undefined for a vanishing field");
    std::memcpy(m, op->data.aux->data(), op->data.aux->size() * sizeof(double));
  });
}

mslab_status mslab_expr_parse(mslab_context* ctx, const char* text, int n, mslab_expr** out) {
  return guarded(ctx, [&] {
    need(text, "text");
    need(out, "out");
    *out = new mslab_expr{mslab::Expr::parse(text, n)};
  });
}

void mslab_expr_destroy(mslab_expr* e) { delete e; }

mslab_status mslab_expr_eval(mslab_context* ctx, const mslab_expr* e, const double* x, double* value) {
  return guarded(ctx, [&] {
    need(e, "expression");
    need(x, "x");
    need(value, "value");
    mslab::Point p{0.0, 0.0, 0.0};
    for (int a = 0; a < e->expr.dim(); ++a) p[a] = x[a];
    *value = e->expr.eval(p);
  });
}

mslab_status mslab_expr_print(mslab_context* ctx, const mslab_expr* e, char** text) {
  return guarded(ctx, [&] {
    need(e, "expression");
    need(text, "text");
    *text = duplicate(e->expr.print());
  });
}

mslab_status mslab_field_write(mslab_context* ctx, const char* path, int dtype, int n, int N,
                               const double* values) {
  return guarded(ctx, [&] {
    need(path, "path");
    need(values, "values");
    const mslab::GridSpec g = mslab::GridSpec::make(n, N);
    if (dtype == 0) {
      mslab::write_field(path, mslab::RealField(g, std::vector<double>(values, values + g.size())));
    } else if (dtype == 1) {
      mslab::write_field(path, complex_in(g, values));
    } else {
      throw mslab::Error(mslab::ErrorCode::kInvalidArgument, "dtype must be 0 or 1");
    }
  });
}

mslab_status mslab_field_info(mslab_context* ctx, const char* path, int* dtype, int* n, int* N) {
  return guarded(ctx, [&] {
    need(path, "path");
    need(dtype, "dtype");
    need(n, "n");
    need(N, "N");
    const mslab::AnyField f = mslab::read_field(path);
    std::visit(
        [&](const auto& field) {
          *n = field.grid().n;
          *N = field.grid().N;
        },
        f);
    *dtype = static_cast<int>(f.index());
  });
}

mslab_status mslab_field_read(mslab_context* ctx, const char* path, double* values, size_t capacity) {
  return guarded(ctx, [&] {
    need(path, "path");
    need(values, "values");
    const mslab::AnyField f = mslab::read_field(path);
    const std::size_t doubles = f.index() == 0 ? std::get<0>(f).size() : 2 * std::get<1>(f).size();
    if (capacity < doubles)
      throw mslab::Error(mslab::ErrorCode::kInvalidArgument, "buffer holds " + std::to_string(capacity) +
                                                                 " doubles, field needs " +
                                                                 std::to_string(doubles));
    if (f.index() == 0)
      std::memcpy(values, std::get<0>(f).data(), doubles * sizeof(double));
    else
      std::memcpy(values, std::get<1>(f).data(), doubles * sizeof(double));
  });
}

}  // extern "C"
