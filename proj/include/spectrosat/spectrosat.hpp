#pragma once

#include "spectrosat/config.hpp"
#include "spectrosat/dsp.hpp"
#include "spectrosat/error.hpp"
#include "spectrosat/fft.hpp"
#include "spectrosat/instrument.hpp"
#include "spectrosat/io.hpp"
#include "spectrosat/linelist.hpp"
#include "spectrosat/parallel.hpp"
#include "spectrosat/pipeline.hpp"
#include "spectrosat/radtran.hpp"
#include "spectrosat/report.hpp"
#include "spectrosat/retrieval.hpp"
#include "spectrosat/rng.hpp"
#include "spectrosat/spectrum.hpp"
#include "spectrosat/voigt.hpp"
