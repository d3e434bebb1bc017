#include <cstdio>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "electrend/errors.hpp"

using namespace electrend;
using namespace electrend::cli;

int main(int argc, char** argv) {
  CLI::App app{"Election-trend analytics over archived tweet corpora"};
  app.set_version_flag("--version", std::string(electrend::version()));
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  std::vector<Command> commands = {make_ingest(app),  make_train(app),    make_classify(app),
                                   make_trend(app),   make_sweep(app),    make_hashtags(app),
                                   make_synth(app),   make_validate(app)};

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  auto logger = spdlog::stderr_logger_st("electrend");
  logger->set_pattern("[%l] %v");
  logger->set_level(spdlog::level::from_str(log_level));
  spdlog::set_default_logger(logger);

  try {
    for (auto& c : commands) {
      if (c.app->parsed()) c.run();
    }
  } catch (const UsageError& e) {
    spdlog::error("usage: {}", e.what());
    return kUsage;
  } catch (const InputError& e) {
    spdlog::error("input: {}", e.what());
    return kInput;
  } catch (const ValidationFailure& e) {
    spdlog::error("{}", e.what());
    return kValidation;
  } catch (const DataError& e) {
    spdlog::error("data: {}", e.what());
    return kData;
  } catch (const ParseError& e) {
    spdlog::error("data: {}", e.what());
    return kData;
  } catch (const std::exception& e) {
    spdlog::critical("{}", e.what());
    return 1;
  }
  return kOk;
}
