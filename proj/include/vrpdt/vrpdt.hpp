#pragma once

#include "errors.hpp"
#include "geo.hpp"
#include "random.hpp"
#include "calendar.hpp"
#include "instance.hpp"
#include "encoding.hpp"
#include "trips.hpp"
#include "travel_model.hpp"
#include "traffic_oracle.hpp"
#include "cost.hpp"
#include "construction.hpp"
#include "moves.hpp"
#include "vnd.hpp"
#include "bench.hpp"
#include "config.hpp"
