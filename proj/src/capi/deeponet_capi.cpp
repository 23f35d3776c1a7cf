#include "deeponet/deeponet.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "core/experiment.hpp"
#include "core/gadgets.hpp"
#include "json.hpp"

namespace {

thread_local std::string g_last_error;

don_status fail(don_status code, const char* what) {
  g_last_error = what ? what : "unknown error";
  return code;
}

template <typename F>
don_status guarded(F&& fn) {
  try {
    fn();
    return DON_OK;
  } catch (const don::InvalidArgument& e) {
    return fail(DON_ERR_INVALID_ARG, e.what());
  } catch (const don::NumericalError& e) {
    return fail(DON_ERR_NUMERICAL, e.what());
  } catch (const std::exception& e) {
    return fail(DON_ERR_UNKNOWN, e.what());
  } catch (...) {
    return fail(DON_ERR_UNKNOWN, nullptr);
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

struct don_measure {
  don::MeasureSpec spec;
};

struct don_fields {
  std::vector<don::FieldSample> samples;
};

struct don_spectrum {
  don::SpectrumEstimate est;
};

struct don_operator {
  std::unique_ptr<don::Operator> op;
};

struct don_mlp {
  don::Mlp net;
};

struct don_gadget {
  don::GadgetNet g;
};

extern "C" {

const char* don_version(void) { return don::version(); }

const char* don_last_error(void) { return g_last_error.c_str(); }

don_status don_measure_create(const char* spec_json, don_measure** out) {
  if (!spec_json || !out) return fail(DON_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    auto* m = new don_measure{don::MeasureSpec::from_json(spec_json)};
    *out = m;
  });
}

void don_measure_destroy(don_measure* m) { delete m; }

don_status don_measure_sample(const don_measure* m, uint64_t seed, int count, int grid_n,
                              don_fields** out) {
  if (!m || !out) return fail(DON_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    don::require(count >= 1 && grid_n >= 2, "don_measure_sample: count >= 1, grid_n >= 2");
    auto* f = new don_fields;
    don::Grid g = don::Grid::torus(grid_n, m->spec.dim);
    f->samples.reserve(count);
    for (int i = 0; i < count; ++i) {
      don::Rng rng(seed, static_cast<uint64_t>(i));
      f->samples.push_back(don::sample(m->spec, g, rng));
    }
    *out = f;
  });
}

int don_fields_count(const don_fields* f) { return f ? static_cast<int>(f->samples.size()) : 0; }

int don_fields_value_count(const don_fields* f) {
  return (f && !f->samples.empty()) ? static_cast<int>(f->samples[0].values.size()) : 0;
}

don_status don_fields_values(const don_fields* f, int index, const double** data, int* len) {
  if (!f || !data || !len) return fail(DON_ERR_INVALID_ARG, "null argument");
  if (index < 0 || index >= static_cast<int>(f->samples.size()))
    return fail(DON_ERR_INVALID_ARG, "don_fields_values: index out of range");
  *data = f->samples[index].values.data();
  *len = static_cast<int>(f->samples[index].values.size());
  return DON_OK;
}

void don_fields_destroy(don_fields* f) { delete f; }

don_status don_spectrum_compute(const don_fields* f, int p, don_spectrum** out) {
  if (!f || !out) return fail(DON_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    auto* s = new don_spectrum{don::empirical_spectrum(f->samples, p)};
    *out = s;
  });
}

int don_spectrum_count(const don_spectrum* s) {
  return s ? static_cast<int>(s->est.eigenvalues.size()) : 0;
}

don_status don_spectrum_eigenvalues(const don_spectrum* s, const double** data, int* len) {
  if (!s || !data || !len) return fail(DON_ERR_INVALID_ARG, "null argument");
  *data = s->est.eigenvalues.data();
  *len = static_cast<int>(s->est.eigenvalues.size());
  return DON_OK;
}

don_status don_spectrum_lower_bound(const don_spectrum* s, int p, double* out) {
  if (!s || !out) return fail(DON_ERR_INVALID_ARG, "null argument");
  return guarded([&] { *out = std::sqrt(s->est.tail_sum(p)); });
}

void don_spectrum_destroy(don_spectrum* s) { delete s; }

don_status don_operator_create(const char* op_json, don_operator** out) {
  if (!op_json || !out) return fail(DON_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    auto* o = new don_operator{don::operator_from_json(op_json)};
    *out = o;
  });
}

void don_operator_destroy(don_operator* op) { delete op; }

don_status don_operator_apply(const don_operator* op, const don_fields* in, don_fields** out) {
  if (!op || !in || !out) return fail(DON_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    auto* f = new don_fields;
    f->samples.reserve(in->samples.size());
    try {
      for (const auto& u : in->samples) f->samples.push_back(op->op->apply(u));
    } catch (...) {
      delete f;
      throw;
    }
    *out = f;
  });
}

don_status don_mlp_from_json(const char* checkpoint_json, don_mlp** out) {
  if (!checkpoint_json || !out) return fail(DON_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    auto* m = new don_mlp{don::Mlp::from_json(checkpoint_json)};
    *out = m;
  });
}

don_status don_mlp_to_json(const don_mlp* net, char** json_out) {
  if (!net || !json_out) return fail(DON_ERR_INVALID_ARG, "null argument");
  return guarded([&] { *json_out = dup_string(net->net.to_json()); });
}

don_status don_mlp_forward(const don_mlp* net, const double* x, int x_len, double* y, int y_len) {
  if (!net || !x || !y) return fail(DON_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    don::require(x_len == net->net.input_dim() && y_len == net->net.output_dim(),
                 "don_mlp_forward: shape mismatch");
    auto out = net->net.forward(std::vector<double>(x, x + x_len));
    std::copy(out.begin(), out.end(), y);
  });
}

don_status don_mlp_size(const don_mlp* net, size_t* size_out, int* depth_out) {
  if (!net) return fail(DON_ERR_INVALID_ARG, "null argument");
  if (size_out) *size_out = net->net.size();
  if (depth_out) *depth_out = net->net.depth();
  return DON_OK;
}

void don_mlp_destroy(don_mlp* net) { delete net; }

don_status don_gadget_create(const char* kind, const char* params_json, don_gadget** out) {
  if (!kind || !out) return fail(DON_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    nlohmann::json p =
        params_json ? nlohmann::json::parse(params_json) : nlohmann::json::object();
    std::string k = kind;
    don::GadgetNet g = [&]() {
      if (k == "shrink") return don::shrink_net();
      if (k == "indicator")
        return don::indicator_net(p.value("a", 0.0), p.value("b", 1.0), p.value("eps", 0.01));
      if (k == "cubic") return don::cubic_net(p.value("eps", 1e-3));
      if (k == "acEmulator")
        return don::ac_emulator_net(p.value("m", 33), p.value("n", 10), p.value("dt", 0.05),
                                    p.value("eps", 1e-3));
      throw don::InvalidArgument("don_gadget_create: unknown kind '" + k + "'");
    }();
    *out = new don_gadget{std::move(g)};
  });
}

don_status don_gadget_eval(const don_gadget* g, const double* x, int x_len, double* y,
                           int y_len) {
  if (!g || !x || !y) return fail(DON_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    don::require(x_len == g->g.net.input_dim() && y_len == g->g.net.output_dim(),
                 "don_gadget_eval: shape mismatch");
    auto out = g->g.net.forward(std::vector<double>(x, x + x_len));
    std::copy(out.begin(), out.end(), y);
  });
}

don_status don_gadget_size(const don_gadget* g, size_t* size_out, int* depth_out) {
  if (!g) return fail(DON_ERR_INVALID_ARG, "null argument");
  if (size_out) *size_out = g->g.net.size();
  if (depth_out) *depth_out = g->g.net.depth();
  return DON_OK;
}

void don_gadget_destroy(don_gadget* g) { delete g; }

don_status don_run_tool(const char* config_json, const char* out_dir, int threads,
                        char** manifest_json_out) {
  if (!config_json || !out_dir) return fail(DON_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    std::string manifest = don::run_tool(config_json, out_dir, threads);
    if (manifest_json_out) *manifest_json_out = dup_string(manifest);
  });
}

void don_string_free(char* s) { std::free(s); }

}  // extern "C"
