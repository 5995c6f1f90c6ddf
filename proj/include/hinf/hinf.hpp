#pragma once

#include "hinf/certificate.hpp"
#include "hinf/hermitian.hpp"
#include "hinf/oracle.hpp"
#include "hinf/sdp_build.hpp"
#include "hinf/sdp_solver.hpp"
#include "hinf/state_space.hpp"
#include "hinf/system_io.hpp"
#include "hinf/types.hpp"
