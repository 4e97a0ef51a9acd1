#pragma once
// HTTP routes for the questionnaire, reports, self-tests and weight edits.
// Field names are documented in docs/api.md.

#include "snn/session.hpp"

namespace httplib {
class Server;
}

namespace snn {

void mount_api(httplib::Server& server, SessionService& service);

}  // namespace snn
