// Copyright 2026 The bimflow Authors.
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

#include "bimflow/server/server.hpp"

#include <condition_variable>
#include <deque>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include <boost/asio/dispatch.hpp>
#include <boost/asio/executor_work_guard.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/strand.hpp>
#include <boost/asio/thread_pool.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>

#include "bimflow/kernel/persistence.hpp"
#include "bimflow/server/multipart.hpp"
#include "bimflow/util/text.hpp"

namespace bimflow::server {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

using Request = http::request<http::string_body>;
using Response = http::response<http::string_body>;

namespace {

constexpr std::size_t kBodyLimit = 64 * 1024 * 1024;

std::string_view sv(beast::string_view s) { return {s.data(), s.size()}; }

std::vector<std::string> path_segments(std::string_view target) {
  target = target.substr(0, target.find('?'));
  std::vector<std::string> out;
  for (auto& s : util::split(target, '/')) {
    if (!s.empty()) out.push_back(std::move(s));
  }
  return out;
}

std::string mime_type(const std::filesystem::path& path) {
  const auto ext = util::to_lower(path.extension().string());
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  if (ext == ".wasm") return "application/wasm";
  return "application/octet-stream";
}

}  // namespace

struct Server::Impl {
  Impl(std::shared_ptr<orchestrator::Engine> e, orchestrator::ServerConfig c)
      : engine(std::move(e)), config(std::move(c)), workers(static_cast<std::size_t>(std::max(1, config.workers))) {}

  Response handle(const Request& req);
  Response json_response(const Request& req, http::status status, const json& body) const;
  Response error_response(const Request& req, http::status status, const std::string& message) const;
  Response handle_audio(const Request& req, const std::shared_ptr<orchestrator::Session>& session);
  std::optional<Response> serve_static(const Request& req) const;

  void register_audio(const std::string& ref, const std::string& session_id, const std::string& text) {
    std::lock_guard lock(audio_mutex);
    audio_refs[ref] = {session_id, text};
  }
  std::optional<std::string> take_audio(const std::string& ref, const std::string& session_id) {
    std::lock_guard lock(audio_mutex);
    auto it = audio_refs.find(ref);
    if (it == audio_refs.end() || it->second.first != session_id) return std::nullopt;
    auto text = it->second.second;
    audio_refs.erase(it);
    return text;
  }

  void do_accept();

  std::shared_ptr<orchestrator::Engine> engine;
  orchestrator::ServerConfig config;
  asio::io_context ioc{1};
  tcp::acceptor acceptor{ioc};
  asio::thread_pool workers;
  std::thread io_thread;
  std::optional<asio::executor_work_guard<asio::io_context::executor_type>> guard;

  std::mutex audio_mutex;
  std::map<std::string, std::pair<std::string, std::string>> audio_refs;
  std::uint64_t next_audio_ref = 1;

  std::mutex run_mutex;
  std::condition_variable run_cv;
  bool running = false;
  bool stopped = false;
};

namespace {

// ------------------------------------------------------------------ websocket

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, Server::Impl& impl, std::shared_ptr<orchestrator::Session> session)
      : ws_(std::move(socket)), impl_(impl), session_(std::move(session)) {}

  ~WsSession() { unsubscribe(); }

  void run(Request req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

  void send(std::string message) {
    asio::post(ws_.get_executor(), [self = shared_from_this(), m = std::move(message)]() mutable {
      self->queue_.push_back(std::move(m));
      if (!self->writing_) self->do_write();
    });
  }

  void send_error(std::string_view code, std::string_view message) {
    send(json{{"type", "error"}, {"code", code}, {"message", message}}.dump());
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    std::weak_ptr<WsSession> weak = weak_from_this();
    try {
      subscription_ = session_->events().subscribe([weak](const orchestrator::Event& event) {
        if (auto self = weak.lock()) self->send(json(event).dump());
      });
    } catch (const orchestrator::OrchestratorError& e) {
      send_error(orchestrator::to_string(e.code()), e.what());
      return;
    }
    json hello{{"type", "connected"}, {"session_id", session_->id()}};
    auto pending = session_->pending_question();
    hello["pending_question"] = pending ? json(*pending) : json(nullptr);
    send(hello.dump());
    do_read();
  }

  void do_read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      unsubscribe();
      return;
    }
    std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    handle_message(text);
    do_read();
  }

  void handle_message(const std::string& text) {
    auto msg = json::parse(text, nullptr, false);
    if (msg.is_discarded() || !msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
      send_error("ProtocolError", "messages are JSON objects with a string 'type'");
      return;
    }
    const auto type = msg["type"].get<std::string>();
    std::string payload;
    if (type == "utterance" || type == "answer") {
      if (!msg.contains("text") || !msg["text"].is_string() || util::trim(msg["text"].get<std::string>()).empty()) {
        send_error("ProtocolError", "'" + type + "' needs a non-empty 'text'");
        return;
      }
      payload = msg["text"].get<std::string>();
    } else if (type == "upload_audio_ref") {
      if (!msg.contains("audio_ref") || !msg["audio_ref"].is_string()) {
        send_error("ProtocolError", "'upload_audio_ref' needs an 'audio_ref'");
        return;
      }
      auto transcript = impl_.take_audio(msg["audio_ref"].get<std::string>(), session_->id());
      if (!transcript) {
        send_error("NotFound", "unknown audio_ref for this session");
        return;
      }
      payload = *transcript;
    } else {
      send_error("ProtocolError", "unknown message type '" + type + "'");
      return;
    }
    asio::post(impl_.workers, [self = shared_from_this(), type, payload] {
      try {
        if (type == "answer") {
          self->session_->answer_question(payload);
        } else {
          self->session_->handle_utterance(payload);
        }
      } catch (const orchestrator::OrchestratorError& e) {
        self->send_error(orchestrator::to_string(e.code()), e.what());
      } catch (const std::exception& e) {
        self->send_error("InternalError", e.what());
      }
    });
  }

  void do_write() {
    writing_ = true;
    ws_.text(true);
    ws_.async_write(asio::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->writing_ = false;
        self->queue_.clear();
        return;
      }
      self->queue_.pop_front();
      if (self->queue_.empty()) {
        self->writing_ = false;
      } else {
        self->do_write();
      }
    });
  }

  void unsubscribe() {
    if (subscription_ != 0) {
      session_->events().unsubscribe(subscription_);
      subscription_ = 0;
    }
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  Server::Impl& impl_;
  std::shared_ptr<orchestrator::Session> session_;
  std::deque<std::string> queue_;
  bool writing_ = false;
  std::uint64_t subscription_ = 0;
};

// ------------------------------------------------------------------ http

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, Server::Impl& impl) : stream_(std::move(socket)), impl_(impl) {}

  void run() {
    asio::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::do_read, shared_from_this()));
  }

 private:
  void do_read() {
    parser_.emplace();
    parser_->body_limit(kBodyLimit);
    stream_.expires_after(std::chrono::seconds(60));
    http::async_read(stream_, buffer_, *parser_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    if (ec) return;
    Request req = parser_->release();

    if (websocket::is_upgrade(req)) {
      const auto segs = path_segments(sv(req.target()));
      if (segs.size() == 3 && segs[0] == "sessions" && segs[2] == "ws") {
        if (auto session = impl_.engine->find_session(segs[1])) {
          stream_.expires_never();
          std::make_shared<WsSession>(stream_.release_socket(), impl_, session)->run(std::move(req));
          return;
        }
      }
      send(impl_.error_response(req, http::status::not_found, "no such websocket endpoint"));
      return;
    }

    asio::post(impl_.workers, [self = shared_from_this(), req = std::move(req)] {
      Response res;
      try {
        res = self->impl_.handle(req);
      } catch (const std::exception& e) {
        res = self->impl_.error_response(req, http::status::internal_server_error, e.what());
      }
      asio::post(self->stream_.get_executor(),
                 [self, res = std::move(res)]() mutable { self->send(std::move(res)); });
    });
  }

  void send(Response res) {
    auto sp = std::make_shared<Response>(std::move(res));
    const bool keep_alive = sp->keep_alive();
    http::async_write(stream_, *sp, [self = shared_from_this(), sp, keep_alive](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (!keep_alive) {
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
        return;
      }
      self->do_read();
    });
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
  Server::Impl& impl_;
};

}  // namespace

// ------------------------------------------------------------------ routing

Response Server::Impl::json_response(const Request& req, http::status status, const json& body) const {
  Response res{status, req.version()};
  res.set(http::field::server, "bimflow");
  res.set(http::field::content_type, "application/json");
  res.keep_alive(req.keep_alive());
  res.body() = body.dump();
  res.prepare_payload();
  return res;
}

Response Server::Impl::error_response(const Request& req, http::status status, const std::string& message) const {
  return json_response(req, status, json{{"error", message}});
}

Response Server::Impl::handle(const Request& req) {
  const auto segs = path_segments(sv(req.target()));
  const auto method = req.method();

  if (segs.size() == 1 && segs[0] == "health" && method == http::verb::get) {
    return json_response(req, http::status::ok, {{"ok", true}, {"mock", engine->is_mock()}});
  }
  if (segs.size() == 1 && segs[0] == "sessions" && method == http::verb::post) {
    std::optional<std::uint64_t> seed;
    if (!req.body().empty()) {
      auto body = json::parse(req.body(), nullptr, false);
      if (body.is_discarded() || !body.is_object()) {
        return error_response(req, http::status::bad_request, "body must be a JSON object");
      }
      if (body.contains("seed")) {
        if (!body["seed"].is_number_unsigned()) {
          return error_response(req, http::status::bad_request, "seed must be a non-negative integer");
        }
        seed = body["seed"].get<std::uint64_t>();
      }
    }
    auto session = engine->create_session(seed);
    return json_response(req, http::status::created, {{"session_id", session->id()}});
  }
  if (segs.size() >= 3 && segs[0] == "sessions") {
    auto session = engine->find_session(segs[1]);
    if (!session) return error_response(req, http::status::not_found, "no session '" + segs[1] + "'");
    if (segs.size() == 3 && segs[2] == "audio" && method == http::verb::post) return handle_audio(req, session);
    if (segs.size() == 3 && segs[2] == "project" && method == http::verb::get) {
      return json_response(req, http::status::ok, json(session->project()));
    }
    if (segs.size() == 3 && segs[2] == "history" && method == http::verb::get) {
      return json_response(req, http::status::ok, json(session->history()));
    }
    if (segs.size() == 4 && segs[2] == "trace" && method == http::verb::get) {
      auto turn = util::parse_number(segs[3]);
      if (!turn || *turn != static_cast<int>(*turn)) {
        return error_response(req, http::status::bad_request, "turn must be an integer");
      }
      auto trace = session->trace(static_cast<int>(*turn));
      if (!trace) return error_response(req, http::status::not_found, "no trace for turn " + segs[3]);
      return json_response(req, http::status::ok, json(*trace));
    }
  }
  if (method == http::verb::get) {
    if (auto res = serve_static(req)) return std::move(*res);
  }
  return error_response(req, http::status::not_found, "not found");
}

Response Server::Impl::handle_audio(const Request& req, const std::shared_ptr<orchestrator::Session>& session) {
  auto boundary = multipart_boundary(sv(req[http::field::content_type]));
  if (!boundary) return error_response(req, http::status::bad_request, "expected multipart/form-data");
  std::vector<FormPart> parts;
  try {
    parts = parse_multipart(req.body(), *boundary);
  } catch (const MultipartError& e) {
    return error_response(req, http::status::bad_request, e.what());
  }
  const auto* audio = find_part(parts, "audio");
  if (audio == nullptr) return error_response(req, http::status::bad_request, "missing 'audio' part");
  bool submit = true;
  if (const auto* s = find_part(parts, "submit")) submit = !util::iequals(util::trim(s->data), "false");

  llm::Transcript transcript;
  try {
    const auto* bytes = reinterpret_cast<const std::byte*>(audio->data.data());
    transcript = engine->transcribe({bytes, audio->data.size()}, audio->content_type);
  } catch (const llm::GatewayError& e) {
    const auto status = e.code() == llm::GatewayErrc::UnsupportedMedia ? http::status::unsupported_media_type
                        : e.code() == llm::GatewayErrc::ResponseEmpty  ? http::status::unprocessable_entity
                                                                       : http::status::bad_gateway;
    return error_response(req, status, e.what());
  }

  std::string ref;
  {
    std::lock_guard lock(audio_mutex);
    ref = "a-" + std::to_string(next_audio_ref++);
  }
  json body{{"transcript", transcript.text},
            {"language", transcript.language_tag},
            {"duration", transcript.duration_s},
            {"submitted", submit}};
  if (submit) {
    if (session->pending_question()) {
      return error_response(req, http::status::conflict, "a question is pending; answer it first");
    }
    asio::post(workers, [session, text = transcript.text] {
      try {
        session->handle_utterance(text);
      } catch (const std::exception&) {
        // Failures reach subscribers through the session's event stream.
      }
    });
    body["audio_ref"] = nullptr;
  } else {
    register_audio(ref, session->id(), transcript.text);
    body["audio_ref"] = ref;
  }
  return json_response(req, http::status::ok, body);
}

std::optional<Response> Server::Impl::serve_static(const Request& req) const {
  if (!config.static_dir) return std::nullopt;
  auto segs = path_segments(sv(req.target()));
  std::filesystem::path path = *config.static_dir;
  for (const auto& s : segs) {
    if (s == ".." || s == "." || s.find('\\') != std::string::npos) return std::nullopt;
    path /= s;
  }
  if (segs.empty() || std::filesystem::is_directory(path)) path /= "index.html";
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  Response res{http::status::ok, req.version()};
  res.set(http::field::server, "bimflow");
  res.set(http::field::content_type, mime_type(path));
  res.keep_alive(req.keep_alive());
  res.body().assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  res.prepare_payload();
  return res;
}

void Server::Impl::do_accept() {
  acceptor.async_accept(asio::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    std::make_shared<HttpSession>(std::move(socket), *this)->run();
    do_accept();
  });
}

// ------------------------------------------------------------------ lifecycle

Server::Server(std::shared_ptr<orchestrator::Engine> engine, orchestrator::ServerConfig config)
    : impl_(std::make_unique<Impl>(std::move(engine), std::move(config))) {}

Server::~Server() { stop(); }

void Server::start() {
  std::lock_guard lock(impl_->run_mutex);
  if (impl_->running) return;
  const auto address = asio::ip::make_address(impl_->config.host);
  tcp::endpoint endpoint{address, impl_->config.port};
  impl_->acceptor.open(endpoint.protocol());
  impl_->acceptor.set_option(asio::socket_base::reuse_address(true));
  impl_->acceptor.bind(endpoint);
  impl_->acceptor.listen(asio::socket_base::max_listen_connections);
  impl_->guard.emplace(impl_->ioc.get_executor());
  impl_->do_accept();
  impl_->io_thread = std::thread([this] { impl_->ioc.run(); });
  impl_->running = true;
}

void Server::stop() {
  {
    std::lock_guard lock(impl_->run_mutex);
    if (!impl_->running || impl_->stopped) return;
    impl_->stopped = true;
  }
  asio::post(impl_->ioc, [this] {
    beast::error_code ec;
    impl_->acceptor.close(ec);
  });
  impl_->guard.reset();
  impl_->workers.join();
  impl_->ioc.stop();
  if (impl_->io_thread.joinable()) impl_->io_thread.join();
  impl_->run_cv.notify_all();
}

void Server::wait() {
  std::unique_lock lock(impl_->run_mutex);
  impl_->run_cv.wait(lock, [this] { return impl_->stopped || !impl_->running; });
}

std::uint16_t Server::port() const {
  beast::error_code ec;
  auto ep = impl_->acceptor.local_endpoint(ec);
  return ec ? impl_->config.port : ep.port();
}

}  // namespace bimflow::server
