#pragma once

#include "desv/lfsa.hpp"
#include "desv/graph.hpp"
#include "desv/derivations.hpp"
#include "desv/composition.hpp"
#include "desv/property.hpp"
#include "desv/inference.hpp"
#include "desv/concealment.hpp"
#include "desv/verify.hpp"
#include "desv/legacy.hpp"
#include "desv/oracle.hpp"
#include "desv/generator.hpp"
#include "desv/io.hpp"
#include "desv/dot.hpp"
