#pragma once

#include "docdiff/diff.hpp"
#include "docdiff/eval.hpp"
#include "docdiff/geometry.hpp"
#include "docdiff/image.hpp"
#include "docdiff/image_io.hpp"
#include "docdiff/ocr.hpp"
#include "docdiff/pixmatch.hpp"
#include "docdiff/raster.hpp"
#include "docdiff/segment.hpp"
#include "docdiff/synth.hpp"
#include "docdiff/textmatch.hpp"
#include "docdiff/textnorm.hpp"
#include "docdiff/truth.hpp"
