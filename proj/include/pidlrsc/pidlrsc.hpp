#pragma once

#include "pidlrsc/errors.hpp"
#include "pidlrsc/linalg.hpp"
#include "pidlrsc/rng.hpp"
#include "pidlrsc/log.hpp"
#include "pidlrsc/metric.hpp"
#include "pidlrsc/lrsc.hpp"
#include "pidlrsc/cfd.hpp"
#include "pidlrsc/pid.hpp"
#include "pidlrsc/synthbag.hpp"
#include "pidlrsc/model.hpp"
#include "pidlrsc/trainer.hpp"
#include "pidlrsc/eval.hpp"
#include "pidlrsc/io.hpp"
#include "pidlrsc/commands.hpp"
