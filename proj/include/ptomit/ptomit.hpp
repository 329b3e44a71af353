#ifndef PTOMIT_PTOMIT_HPP
#define PTOMIT_PTOMIT_HPP

#include "ptomit/error.hpp"
#include "ptomit/params.hpp"
#include "ptomit/cubic.hpp"
#include "ptomit/steady_state.hpp"
#include "ptomit/response.hpp"
#include "ptomit/pt_phase.hpp"
#include "ptomit/tdsim.hpp"
#include "ptomit/config.hpp"
#include "ptomit/sweep.hpp"
#include "ptomit/run.hpp"

#endif // PTOMIT_PTOMIT_HPP
