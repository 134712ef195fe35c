#pragma once

#define SVARID_VERSION "0.1.0"
