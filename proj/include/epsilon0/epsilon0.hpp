#pragma once

#include "epsilon0/abelian_group.hpp"
#include "epsilon0/additive_char.hpp"
#include "epsilon0/cyclotomic.hpp"
#include "epsilon0/epsilon.hpp"
#include "epsilon0/errors.hpp"
#include "epsilon0/galois_ring.hpp"
#include "epsilon0/group_ring.hpp"
#include "epsilon0/k1_congruence.hpp"
#include "epsilon0/metabelian.hpp"
#include "epsilon0/number_theory.hpp"
#include "epsilon0/reciprocity.hpp"
#include "epsilon0/serialize.hpp"
#include "epsilon0/unit_group.hpp"

namespace epsilon0 {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace epsilon0
