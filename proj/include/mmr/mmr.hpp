#pragma once

// Everything except the HTTP layer (mmr/http.hpp), which needs httplib.

#include "mmr/artifacts.hpp"
#include "mmr/audio.hpp"
#include "mmr/dataset.hpp"
#include "mmr/defaults.hpp"
#include "mmr/editor.hpp"
#include "mmr/json_schema.hpp"
#include "mmr/predicate.hpp"
#include "mmr/reify.hpp"
#include "mmr/service.hpp"
#include "mmr/spec.hpp"
#include "mmr/text.hpp"
#include "mmr/visual.hpp"
#include "mmr/wav.hpp"
