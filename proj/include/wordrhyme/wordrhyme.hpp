#pragma once

#include "wordrhyme/clustering.hpp"
#include "wordrhyme/config.hpp"
#include "wordrhyme/cooccurrence.hpp"
#include "wordrhyme/corpus.hpp"
#include "wordrhyme/embedding.hpp"
#include "wordrhyme/error.hpp"
#include "wordrhyme/glove.hpp"
#include "wordrhyme/pipeline.hpp"
#include "wordrhyme/report.hpp"
#include "wordrhyme/rhythm.hpp"
#include "wordrhyme/unicode.hpp"
#include "wordrhyme/word2vec.hpp"
