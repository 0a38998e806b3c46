#ifndef BOOSTER_SERVICE_HTTP_API_HPP
#define BOOSTER_SERVICE_HTTP_API_HPP

#include <booster/error.hpp>
#include <booster/service/experiment_run.hpp>

#include <httplib.h>
#include <json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <thread>

namespace booster {

inline nlohmann::json to_json(const TrialView& v) {
  return {{"participant", v.participant},
          {"number", v.number},
          {"total", v.total},
          {"session", v.session_index},
          {"trial", v.trial_index},
          {"practice", v.practice},
          {"variable_gain_db", v.variable_gain_db},
          {"phase", std::string(to_string(v.phase))},
          {"complete", v.complete},
          {"loop", v.loop_playback}};
}

inline nlohmann::json to_json(const Progress& p) {
  return {{"committed", p.committed}, {"total", p.total}, {"scored_committed", p.scored_committed},
          {"complete", p.complete}};
}

namespace detail {

inline nlohmann::json request_body(const httplib::Request& req) {
  if (req.body.empty()) return nlohmann::json::object();
  try {
    auto j = nlohmann::json::parse(req.body);
    if (!j.is_object()) throw ParameterError("request body must be a JSON object");
    return j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParameterError(std::string("malformed JSON body: ") + e.what());
  }
}

/// participant from the query string or the JSON body; absent means "the
/// current run".
inline std::optional<std::string> participant_of(const httplib::Request& req, const nlohmann::json& body) {
  if (req.has_param("participant")) return req.get_param_value("participant");
  if (body.contains("participant")) return body.at("participant").get<std::string>();
  return std::nullopt;
}

inline void send_json(httplib::Response& res, const nlohmann::json& j, int status = 200) {
  res.status = status;
  res.set_content(j.dump(), "application/json");
}

/// Runs a handler and maps library errors onto HTTP status codes.
inline void guarded(httplib::Response& res, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const RunStateError& e) {
    send_json(res, {{"error", e.what()}}, 409);
  } catch (const StorageError& e) {
    send_json(res, {{"error", e.what()}}, 503);
  } catch (const ParameterError& e) {
    send_json(res, {{"error", e.what()}}, 400);
  } catch (const nlohmann::json::exception& e) {
    send_json(res, {{"error", e.what()}}, 400);
  } catch (const std::exception& e) {
    send_json(res, {{"error", e.what()}}, 500);
  }
}

} // namespace detail

/// Registers the listener-facing endpoints. Responses never name the
/// condition; audio is served as WAV bytes labelled only A or B.
inline void install_routes(httplib::Server& server, Experiment& experiment) {
  using detail::guarded;
  using detail::participant_of;
  using detail::request_body;
  using detail::send_json;

  server.Post("/run", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = request_body(req);
      const auto who = participant_of(req, body);
      if (!who) throw ParameterError("participant is required");
      send_json(res, to_json(experiment.start_run(*who).view()));
    });
  });

  server.Get("/trial", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, to_json(experiment.run(participant_of(req, {})).view())); });
  });

  server.Get("/audio", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      if (!req.has_param("which")) throw ParameterError("which=A|B is required");
      const auto which = parse_which(req.get_param_value("which"));
      const auto bytes = experiment.run(participant_of(req, {})).request_audio(which);
      res.set_content(reinterpret_cast<const char*>(bytes->data()), bytes->size(), "audio/wav");
      res.set_header("Cache-Control", "no-store");
    });
  });

  server.Post("/gain", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = request_body(req);
      if (!body.contains("delta") || !body.at("delta").is_number_integer()) {
        throw ParameterError("delta must be +1 or -1");
      }
      const auto step = experiment.run(participant_of(req, body)).adjust_gain(body.at("delta").get<int>());
      send_json(res, {{"variable_gain_db", step.variable_gain_db}, {"clamped", step.clamped}});
    });
  });

  server.Post("/next", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = request_body(req);
      auto& run = experiment.run(participant_of(req, body));
      run.commit_trial();
      send_json(res, to_json(run.view()));
    });
  });

  server.Post("/stop", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = request_body(req);
      auto& run = experiment.run(participant_of(req, body));
      run.stop_playback();
      send_json(res, to_json(run.view()));
    });
  });

  server.Get("/progress", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, to_json(experiment.run(participant_of(req, {})).progress())); });
  });
}

/// Serves an Experiment on a background thread until destroyed.
class ServiceHost {
public:
  /// port 0 picks a free port.
  ServiceHost(Experiment& experiment, const std::string& host = "127.0.0.1", int port = 0) {
    install_routes(server_, experiment);
    port_ = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
    if (port_ < 0) throw ParameterError("cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ServiceHost(const ServiceHost&) = delete;
  ServiceHost& operator=(const ServiceHost&) = delete;

  ~ServiceHost() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  [[nodiscard]] int port() const noexcept { return port_; }

private:
  httplib::Server server_;
  int port_ = -1;
  std::thread thread_;
};

} // namespace booster

#endif
