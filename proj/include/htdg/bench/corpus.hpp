// Copyright 2026 The htdg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "htdg/bench/workload.hpp"

namespace htdg::bench {

/// Names accepted by make_corpus, in a fixed order.
std::vector<std::string> corpus_names();

/**
 * Builds one of the canonical example graphs, finalized and ready to run.
 * Device-flow tasks go to domain 1 when `domains` > 1. Throws
 * Error(UnknownCorpus) for an unknown name.
 */
Workload make_corpus(const std::string& name, std::size_t domains = 1);

/// The three-condition random loop graph: init -> F1, each Fi either moves
/// on or jumps back to F1 with probability 1/2, F3 moving on reaches stop.
/// Decisions come from the workload's seed.
Workload make_fig6();

}  // namespace htdg::bench
