#pragma once

#include "common.hpp"

namespace electrend::cli {

Command make_ingest(CLI::App& parent);
Command make_train(CLI::App& parent);
Command make_classify(CLI::App& parent);
Command make_trend(CLI::App& parent);
Command make_sweep(CLI::App& parent);
Command make_hashtags(CLI::App& parent);
Command make_synth(CLI::App& parent);
Command make_validate(CLI::App& parent);

}  // namespace electrend::cli
