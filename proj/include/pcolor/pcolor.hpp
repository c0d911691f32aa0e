#pragma once

#include "pcolor/colorimetry.hpp"
#include "pcolor/error.hpp"
#include "pcolor/image_io.hpp"
#include "pcolor/ingest.hpp"
#include "pcolor/mvstat.hpp"
#include "pcolor/perceptual_space.hpp"
#include "pcolor/spectral.hpp"
#include "pcolor/triples.hpp"
