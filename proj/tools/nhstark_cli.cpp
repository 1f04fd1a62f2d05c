// Command-line front end over the C interface.

#include <cstdio>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "nhstark/nhstark.h"

namespace {

struct ParamFlags {
  std::optional<int> sites;
  std::optional<double> offset;
  std::optional<double> gamma;
  std::optional<double> stark;
  std::optional<double> hopping;
  std::vector<std::string> settings;

  void attach(CLI::App* app) {
    app->add_option("-N,--sites", sites, "number of sites");
    app->add_option("-J,--offset", offset, "uniform hopping offset");
    app->add_option("-g,--gamma", gamma, "nonreciprocity");
    app->add_option("--F1", stark, "Stark slope");
    app->add_option("--F2", hopping, "hopping slope");
    app->add_option("--set", settings, "extra config entry as key=value (repeatable)");
  }

  std::string overrides() const {
    std::string text;
    auto put = [&](const char* key, const auto& value) {
      if (value) {
        text += std::string(key) + " = " + CLI::detail::to_string(*value) + "\n";
      }
    };
    put("N", sites);
    put("J", offset);
    put("gamma", gamma);
    put("F1", stark);
    put("F2", hopping);
    for (const auto& s : settings) {
      text += s + "\n";
    }
    return text;
  }
};

int report(nhs_status status, char* summary) {
  if (status != NHS_OK) {
    std::fprintf(stderr, "error (%s): %s\n", nhs_status_string(status), nhs_last_error());
    return static_cast<int>(status);
  }
  if (summary != nullptr) {
    std::printf("%s\n", summary);
    nhs_string_free(summary);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graded non-Hermitian Stark chain simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = ".";
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--threads", threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_flag_callback("--version", [] {
    std::printf("%s\n", nhs_version());
    throw CLI::Success();
  });

  ParamFlags params;
  const char* commands[] = {"skin-factor", "classify", "localization-map", "entanglement",
                            "spectrum"};
  const char* descriptions[] = {
      "similarity factor d_j with power-law and increment fits",
      "asymptotic branch and finite-size scales",
      "mean polarization and selective IPR over (gamma, F1/F2)",
      "half-chain entropy after a charge-density-wave quench",
      "eigenvalues and per-state localization diagnostics",
  };
  std::vector<CLI::App*> subs;
  for (int i = 0; i < 5; ++i) {
    auto* sub = app.add_subcommand(commands[i], descriptions[i]);
    params.attach(sub);
    subs.push_back(sub);
  }

  std::string figure;
  auto* repro = app.add_subcommand("reproduce", "regenerate figure data with a hashed manifest");
  repro->add_option("figure", figure, "fig1, fig2 or fig3")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2", "fig3"}));

  CLI11_PARSE(app, argc, argv);

  if (repro->parsed()) {
    char* summary = nullptr;
    return report(nhs_reproduce(figure.c_str(), out_dir.c_str(), threads, &summary), summary);
  }
  for (int i = 0; i < 5; ++i) {
    if (subs[i]->parsed()) {
      char* summary = nullptr;
      const std::string overrides = params.overrides();
      const auto status =
          nhs_run(commands[i], config_path.empty() ? nullptr : config_path.c_str(),
                  overrides.c_str(), out_dir.c_str(), threads, &summary);
      return report(status, summary);
    }
  }
  return 1;
}
