#pragma once

#include "losmimo/channel.hpp"
#include "losmimo/harness.hpp"
#include "losmimo/metrics.hpp"
#include "losmimo/modem.hpp"
#include "losmimo/numerics.hpp"
#include "losmimo/phasenoise.hpp"
#include "losmimo/presets.hpp"
#include "losmimo/psd_check.hpp"
#include "losmimo/receiver.hpp"
#include "losmimo/spectrum.hpp"
#include "losmimo/validation.hpp"
