#pragma once

#include "mpent/concentration.hpp"
#include "mpent/entropy.hpp"
#include "mpent/error.hpp"
#include "mpent/io.hpp"
#include "mpent/linalg.hpp"
#include "mpent/lp.hpp"
#include "mpent/mregs.hpp"
#include "mpent/protocol.hpp"
#include "mpent/protocols.hpp"
#include "mpent/reducibility.hpp"
#include "mpent/schmidt.hpp"
#include "mpent/state.hpp"
#include "mpent/states.hpp"
