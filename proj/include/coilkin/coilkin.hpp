#pragma once

#include "coilkin/actuation.hpp"
#include "coilkin/catalog.hpp"
#include "coilkin/error.hpp"
#include "coilkin/geometry.hpp"
#include "coilkin/kinematics.hpp"
#include "coilkin/perception.hpp"
#include "coilkin/scene.hpp"
#include "coilkin/simulator.hpp"
#include "coilkin/transform.hpp"
#include "coilkin/workspace.hpp"
