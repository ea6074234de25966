#pragma once

// Umbrella header. HTTP-backed providers live in agora/http_provider.hpp
// and are pulled in separately to keep offline binaries lean.

#include "agora/analysis.hpp"
#include "agora/categories.hpp"
#include "agora/census.hpp"
#include "agora/config.hpp"
#include "agora/core.hpp"
#include "agora/corpus.hpp"
#include "agora/embedding.hpp"
#include "agora/errors.hpp"
#include "agora/gateway.hpp"
#include "agora/keywords.hpp"
#include "agora/prompts.hpp"
#include "agora/semantic.hpp"
#include "agora/sentiment.hpp"
#include "agora/sim.hpp"
#include "agora/stats.hpp"
#include "agora/version.hpp"
