#pragma once

#include <httplib.h>

#include "squarecut/service.hpp"

namespace squarecut {

/// Registers the JSON endpoints on an httplib server. The service must
/// outlive the server.
void install_routes(httplib::Server& server, Service& service);

}  // namespace squarecut
