#pragma once

#include <aircomp/error.hpp>
#include <aircomp/model.hpp>
#include <aircomp/worst_case.hpp>
#include <aircomp/optimizer.hpp>
#include <aircomp/experiments.hpp>
#include <aircomp/io.hpp>
#include <aircomp/verify.hpp>
