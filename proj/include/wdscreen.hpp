#pragma once

#include "wdscreen/error.hpp"
#include "wdscreen/core_data.hpp"
#include "wdscreen/transport.hpp"
#include "wdscreen/measures.hpp"
#include "wdscreen/screening.hpp"
#include "wdscreen/simgen.hpp"
#include "wdscreen/harness.hpp"
#include "wdscreen/ingest.hpp"
#include "wdscreen/selftest.hpp"
