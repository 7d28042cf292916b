#pragma once

#include "lexboot/classifier/dataset.hpp"
#include "lexboot/classifier/elastic_net.hpp"
#include "lexboot/classifier/evaluation.hpp"
