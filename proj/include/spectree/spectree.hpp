#pragma once

#include "spectree/commands.hpp"
#include "spectree/compop.hpp"
#include "spectree/error.hpp"
#include "spectree/io.hpp"
#include "spectree/lpspace.hpp"
#include "spectree/operator_spec.hpp"
#include "spectree/oracle.hpp"
#include "spectree/schatten.hpp"
#include "spectree/selfmap.hpp"
#include "spectree/tree.hpp"
#include "spectree/weight.hpp"
