// Copyright 2026 The rww-crowdfund Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <memory>
#include <string>

#include "rww/service.hpp"

// After service.hpp: <resolv.h> (pulled in by httplib) defines a _res macro that breaks Eigen.
#include <httplib.h>

namespace rww::service {

/// HTTP front end over Service. Every route delegates to Service::handle.
inline std::unique_ptr<httplib::Server> make_http_server(const Service& service) {
  auto server = std::make_unique<httplib::Server>();
  auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    const auto out = service.handle(req.method, req.path, req.body);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  server->Get(".*", forward);
  server->Post(".*", forward);
  return server;
}

}  // namespace rww::service
