#pragma once

#include "lexboot/annotation.hpp"
#include "lexboot/bootstrap.hpp"
#include "lexboot/classifier.hpp"
#include "lexboot/corpus.hpp"
#include "lexboot/error.hpp"
#include "lexboot/features.hpp"
#include "lexboot/resources.hpp"
#include "lexboot/service.hpp"
#include "lexboot/vectorspace.hpp"
