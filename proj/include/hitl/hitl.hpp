#pragma once

#include "hitl/core/error.hpp"
#include "hitl/core/target.hpp"
#include "hitl/corpus/decision.hpp"
#include "hitl/corpus/event_log.hpp"
#include "hitl/corpus/record.hpp"
#include "hitl/corpus/store.hpp"
#include "hitl/corpus/training_format.hpp"
#include "hitl/corpus/version.hpp"
#include "hitl/loop/author_client.hpp"
#include "hitl/loop/orchestrator.hpp"
#include "hitl/loop/parser.hpp"
#include "hitl/loop/service.hpp"
#include "hitl/loop/strategy.hpp"
#include "hitl/metrics/distribution.hpp"
#include "hitl/metrics/edit_distance.hpp"
#include "hitl/metrics/imbalance.hpp"
#include "hitl/metrics/novelty.hpp"
#include "hitl/metrics/report.hpp"
#include "hitl/metrics/repetition.hpp"
#include "hitl/metrics/stats.hpp"
#include "hitl/metrics/ter.hpp"
#include "hitl/metrics/vocabulary.hpp"
#include "hitl/sim/mock_author.hpp"
#include "hitl/sim/rng.hpp"
#include "hitl/sim/scripted_reviewer.hpp"
#include "hitl/sim/simulation.hpp"
#include "hitl/text/tokenizer.hpp"
