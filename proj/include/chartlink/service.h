#ifndef CHARTLINK_SERVICE_H_
#define CHARTLINK_SERVICE_H_

#include <memory>
#include <string>

#include "chartlink/config.h"
#include "chartlink/nlp.h"

namespace chartlink {

// HTTP facade over the pipeline. Cases live under config.data_dir, one
// directory each (see corpus.h). Routes:
//
//   GET   /health
//   GET   /cases
//   POST  /cases                            multipart: paragraph, chart, encoding,
//                                           optional case_id, fixture
//   GET   /cases/{id}
//   GET   /cases/{id}/chart.png
//   GET   /cases/{id}/links
//   POST  /cases/{id}/links:run             optional {"revision"}
//   PATCH /cases/{id}/links/{link}          {"action", "elementId"?, "revision"}
//   POST  /cases/{id}/links:regroup         optional {"revision"}
//   GET   /cases/{id}/overlays?group=&emit=specs|png
//   POST  /cases/{id}/transcript            [{"text", "t_start", "t_end"}]
//   POST  /cases/{id}/audio                 raw audio, when audio is enabled
//
// Errors carry {"code", "message", "field"?} bodies.
class Service {
 public:
  Service(Config config, std::shared_ptr<NlpBackend> backend);
  ~Service();

  Service(const Service &) = delete;
  Service &operator=(const Service &) = delete;

  // Binds config.host:config.port and serves until Stop().
  bool Listen();
  // Binds an ephemeral port on config.host and returns it.
  int BindToAnyPort();
  // Serves on the socket bound by BindToAnyPort until Stop().
  bool ListenAfterBind();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace chartlink

#endif  // CHARTLINK_SERVICE_H_
