#pragma once

// Single include point for cpp-httplib so every translation unit sees the
// same configuration.
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
// Small request/response pairs stall on Nagle plus delayed ACK otherwise.
#ifndef CPPHTTPLIB_TCP_NODELAY
#define CPPHTTPLIB_TCP_NODELAY true
#endif
#include <httplib.h>
