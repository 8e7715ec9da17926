// Copyright 2026 The ckdctx Authors.
//
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


#ifndef CKDCTX_SERVICE_SERVER_H_
#define CKDCTX_SERVICE_SERVER_H_

#include <memory>
#include <string>
#include <thread>

#include "ckdctx/service/api.h"

namespace httplib {
class Server;
}

namespace ckdctx::service {

// HTTP transport over a Service. Requests are handled on the server's
// thread pool; the Service serialises mutations through its job queue.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  // Binds host:port (0 picks a free port) and serves on a background
  // thread. Returns the bound port; throws kIo when binding fails.
  int Start(const std::string& host, int port);
  // Binds and serves on the calling thread until Stop().
  void Run(const std::string& host, int port);
  void Stop();

 private:
  int Bind(const std::string& host, int port);

  Service& service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace ckdctx::service

#endif  // CKDCTX_SERVICE_SERVER_H_
