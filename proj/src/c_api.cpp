#include "nhstark/nhstark.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <string>

#include "nhstark/asymptotics.hpp"
#include "nhstark/chain_model.hpp"
#include "nhstark/dynamics.hpp"
#include "nhstark/error.hpp"
#include "nhstark/gauge.hpp"
#include "nhstark/spectral.hpp"
#include "nhstark/sweep.hpp"

struct nhs_chain_s {
  nhstark::ChainParams params;
};

struct nhs_eigenset_s {
  nhstark::EigenSet eigs;
};

namespace {

thread_local std::string last_error;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ApiError {
  nhs_status status;
  std::string message;
};

nhs_status from_code(nhstark::ErrorCode code) {
  return static_cast<nhs_status>(static_cast<int>(code));
}

template <typename F>
nhs_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return NHS_OK;
  } catch (const ApiError& e) {
    last_error = e.message;
    return e.status;
  } catch (const nhstark::Error& e) {
    last_error = e.what();
    return from_code(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return NHS_ERR_NUMERICAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return NHS_ERR_UNKNOWN;
  } catch (...) {
    last_error = "unknown failure";
    return NHS_ERR_UNKNOWN;
  }
}

template <typename T>
void require_pointer(const T* p, const char* name) {
  if (p == nullptr) {
    throw ApiError{NHS_ERR_INVALID_ARGUMENT, std::string(name) + " is NULL"};
  }
}

template <typename H>
void require_handle(H handle) {
  if (handle == nullptr) {
    throw ApiError{NHS_ERR_INVALID_HANDLE, "handle is NULL"};
  }
}

void require_capacity(size_t capacity, size_t needed) {
  if (capacity < needed) {
    throw ApiError{NHS_ERR_BUFFER_TOO_SMALL, "buffer holds " + std::to_string(capacity) +
                                                 " values, need " + std::to_string(needed)};
  }
}

nhstark::ChainParams to_params(const nhs_params* p) {
  require_pointer(p, "params");
  return {p->sites, p->offset, p->nonreciprocity, p->stark_slope, p->hopping_slope};
}

double or_nan(const std::optional<double>& v) { return v ? *v : kNaN; }

char* duplicate(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out == nullptr) {
    throw std::bad_alloc();
  }
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* nhs_version(void) { return "1.0.0"; }

const char* nhs_status_string(nhs_status status) {
  switch (status) {
    case NHS_OK: return "ok";
    case NHS_ERR_INVALID_HANDLE: return "invalid handle";
    case NHS_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case NHS_ERR_UNKNOWN: return "unknown error";
    default: break;
  }
  const int code = static_cast<int>(status);
  if (code >= 1 && code <= 8) {
    return nhstark::to_string(static_cast<nhstark::ErrorCode>(code));
  }
  return "unrecognized status";
}

const char* nhs_last_error(void) { return last_error.c_str(); }

nhs_status nhs_chain_create(const nhs_params* params, nhs_chain* out) {
  return guarded([&] {
    require_pointer(out, "out");
    *out = nullptr;
    auto p = to_params(params);
    nhstark::validate(p);
    *out = new nhs_chain_s{p};
  });
}

nhs_status nhs_chain_destroy(nhs_chain* chain) {
  return guarded([&] {
    require_pointer(chain, "chain");
    delete *chain;
    *chain = nullptr;
  });
}

nhs_status nhs_chain_sites(nhs_chain chain, int32_t* sites) {
  return guarded([&] {
    require_handle(chain);
    require_pointer(sites, "sites");
    *sites = chain->params.sites;
  });
}

nhs_status nhs_chain_hamiltonian(nhs_chain chain, double* out, size_t capacity) {
  return guarded([&] {
    require_handle(chain);
    require_pointer(out, "out");
    const auto n = static_cast<size_t>(chain->params.sites);
    require_capacity(capacity, n * n);
    const Eigen::MatrixXd h = nhstark::build_hamiltonian(chain->params);
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) {
        out[i * n + j] = h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  });
}

nhs_status nhs_chain_decoupling_bonds(nhs_chain chain, int32_t* out, size_t capacity,
                                      size_t* count) {
  return guarded([&] {
    require_handle(chain);
    require_pointer(count, "count");
    const auto bonds = nhstark::detect_decoupling_bonds(chain->params);
    *count = bonds.size();
    if (!bonds.empty()) {
      require_pointer(out, "out");
      require_capacity(capacity, bonds.size());
      std::copy(bonds.begin(), bonds.end(), out);
    }
  });
}

nhs_status nhs_chain_log_gauge(nhs_chain chain, int32_t closed_form, double* log_factor,
                               size_t capacity, double* exponent) {
  return guarded([&] {
    require_handle(chain);
    require_pointer(log_factor, "log_factor");
    require_capacity(capacity, static_cast<size_t>(chain->params.sites));
    const auto gauge = closed_form ? nhstark::gauge_closed_form(chain->params)
                                   : nhstark::gauge_product(chain->params);
    std::copy(gauge.log_factor.begin(), gauge.log_factor.end(), log_factor);
    if (exponent != nullptr) {
      *exponent = gauge.exponent;
    }
  });
}

nhs_status nhs_chain_transformed_couplings(nhs_chain chain, double* out, size_t capacity) {
  return guarded([&] {
    require_handle(chain);
    require_pointer(out, "out");
    const auto t = nhstark::transform_chain(chain->params);
    require_capacity(capacity, t.coupling.size());
    std::copy(t.coupling.begin(), t.coupling.end(), out);
  });
}

nhs_status nhs_classify(const nhs_params* params, double tolerance, nhs_branch_info* branch,
                        nhs_scales* scales) {
  return guarded([&] {
    const auto p = to_params(params);
    nhstark::validate(p);
    if (branch != nullptr) {
      const auto b = nhstark::classify_branch(p, tolerance);
      branch->ratio = b.ratio;
      branch->kind = static_cast<int32_t>(b.kind);
      branch->wavenumber = or_nan(b.wavenumber);
      branch->critical_root = or_nan(b.critical_root);
      branch->decay_rate = or_nan(b.decay_rate);
      branch->root_re[0] = b.roots.major.real();
      branch->root_im[0] = b.roots.major.imag();
      branch->root_re[1] = b.roots.minor.real();
      branch->root_im[1] = b.roots.minor.imag();
    }
    if (scales != nullptr) {
      const auto s = nhstark::finite_size_scales(p, tolerance);
      scales->screening = s.screening;
      scales->competition = or_nan(s.competition);
      scales->envelope_peak = or_nan(s.envelope_peak);
      scales->threshold_distance = s.threshold_distance;
      scales->width_size_only = s.widths.size_only;
      scales->width_with_gamma = s.widths.with_gamma;
    }
  });
}

nhs_status nhs_eigensolve(nhs_chain chain, nhs_eigenset* out) {
  return guarded([&] {
    require_handle(chain);
    require_pointer(out, "out");
    *out = nullptr;
    *out = new nhs_eigenset_s{nhstark::eigensolve(chain->params)};
  });
}

nhs_status nhs_eigenset_destroy(nhs_eigenset* eigs) {
  return guarded([&] {
    require_pointer(eigs, "eigs");
    delete *eigs;
    *eigs = nullptr;
  });
}

nhs_status nhs_eigenset_energies(nhs_eigenset eigs, double* out, size_t capacity) {
  return guarded([&] {
    require_handle(eigs);
    require_pointer(out, "out");
    const auto& e = eigs->eigs.energies;
    require_capacity(capacity, static_cast<size_t>(e.size()));
    std::copy(e.data(), e.data() + e.size(), out);
  });
}

nhs_status nhs_eigenset_vector(nhs_eigenset eigs, int32_t index, int32_t kind, double* out,
                               size_t capacity) {
  return guarded([&] {
    require_handle(eigs);
    require_pointer(out, "out");
    const auto& e = eigs->eigs;
    if (index < 0 || index >= e.size()) {
      throw ApiError{NHS_ERR_INVALID_ARGUMENT, "state index " + std::to_string(index) +
                                                   " out of range"};
    }
    const Eigen::MatrixXd* source = nullptr;
    switch (kind) {
      case NHS_VECTOR_TRANSFORMED: source = &e.transformed; break;
      case NHS_VECTOR_RIGHT: source = &e.right; break;
      case NHS_VECTOR_LEFT: source = &e.left; break;
      default:
        throw ApiError{NHS_ERR_INVALID_ARGUMENT, "unknown vector kind " + std::to_string(kind)};
    }
    require_capacity(capacity, static_cast<size_t>(e.size()));
    for (int i = 0; i < e.size(); ++i) {
      out[i] = (*source)(i, index);
    }
  });
}

nhs_status nhs_eigenset_diagnostics(nhs_eigenset eigs, double* center, double* ipr,
                                    double* polarization, size_t capacity) {
  return guarded([&] {
    require_handle(eigs);
    const auto& e = eigs->eigs;
    require_capacity(capacity, static_cast<size_t>(e.size()));
    for (int k = 0; k < e.size(); ++k) {
      const auto d = nhstark::right_state_diagnostics(e, k);
      if (center != nullptr) center[k] = d.center;
      if (ipr != nullptr) ipr[k] = d.ipr;
      if (polarization != nullptr) polarization[k] = d.polarization;
    }
  });
}

nhs_status nhs_eigenset_summary(nhs_eigenset eigs, double fraction, double* mean_polarization,
                                double* ipr_top) {
  return guarded([&] {
    require_handle(eigs);
    if (mean_polarization != nullptr) {
      *mean_polarization = nhstark::mean_edge_polarization(eigs->eigs);
    }
    if (ipr_top != nullptr) {
      *ipr_top = nhstark::ipr_top_fraction(eigs->eigs, fraction);
    }
  });
}

nhs_status nhs_entropy_trace(nhs_chain chain, double t_max, double dt, int32_t restabilize_every,
                             double* times, double* entropy, size_t capacity, size_t* count) {
  return guarded([&] {
    require_handle(chain);
    require_pointer(count, "count");
    if (!(dt > 0.0) || !(t_max >= 0.0) || !std::isfinite(t_max) || restabilize_every < 0) {
      throw ApiError{NHS_ERR_INVALID_ARGUMENT, "need dt > 0, t_max >= 0, restabilize_every >= 0"};
    }
    const auto samples = static_cast<size_t>(std::llround(t_max / dt)) + 1;
    *count = samples;
    require_capacity(capacity, samples);
    const auto trace = nhstark::entropy_trace(
        chain->params, {t_max, dt, restabilize_every},
        nhstark::build_cdw_orbitals(chain->params.sites));
    for (size_t k = 0; k < trace.times.size() && k < capacity; ++k) {
      if (times != nullptr) times[k] = trace.times[k];
      if (entropy != nullptr) entropy[k] = trace.entropy[k];
    }
  });
}

nhs_status nhs_run(const char* command, const char* config_path, const char* overrides,
                   const char* output_dir, int32_t threads, char** summary_json) {
  return guarded([&] {
    require_pointer(command, "command");
    if (summary_json != nullptr) {
      *summary_json = nullptr;
    }
    nhstark::RunConfig config;
    config.command = nhstark::parse_command(command);
    if (config_path != nullptr) {
      nhstark::apply_config_file(config, config_path);
    }
    if (overrides != nullptr) {
      nhstark::apply_config_text(config, overrides, "<overrides>");
    }
    if (output_dir != nullptr) {
      config.output_dir = output_dir;
    }
    const auto result = nhstark::run(config, threads < 1 ? 1 : threads);
    if (summary_json != nullptr) {
      *summary_json = duplicate(result.summary.dump(2));
    }
  });
}

nhs_status nhs_reproduce(const char* figure, const char* output_dir, int32_t threads,
                         char** summary_json) {
  return guarded([&] {
    require_pointer(figure, "figure");
    require_pointer(output_dir, "output_dir");
    if (summary_json != nullptr) {
      *summary_json = nullptr;
    }
    const auto result =
        nhstark::reproduce(nhstark::parse_figure(figure), output_dir, threads < 1 ? 1 : threads);
    if (summary_json != nullptr) {
      *summary_json = duplicate(result.summary.dump(2));
    }
  });
}

void nhs_string_free(char* text) { std::free(text); }

}  // extern "C"
