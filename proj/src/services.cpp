// Copyright 2026 The egoview Authors
// SPDX-License-Identifier: Apache-2.0

#include "egoview/services.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <regex>
#include <semaphore>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "egoview/error.hpp"
#include "egoview/util.hpp"

namespace egoview::services {

using nlohmann::json;

namespace {

constexpr std::string_view kCaptionTemplates[] = {
    "a view containing",
    "a photo of",
    "an indoor scene with",
    "a cluttered corner of a room with",
};
constexpr std::size_t kNumTemplates = std::size(kCaptionTemplates);

std::string join_labels(std::vector<std::string> labels) {
  std::ranges::sort(labels);
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  if (labels.empty()) return "nothing recognizable";
  std::string out = labels.front();
  for (std::size_t i = 1; i < labels.size(); ++i) {
    out += (i + 1 == labels.size()) ? " and " : ", ";
    out += labels[i];
  }
  return out;
}

std::vector<std::string> label_tokens(const std::vector<std::string>& labels) {
  std::vector<std::string> out;
  for (const auto& l : labels) {
    auto t = tokenize(l);
    out.insert(out.end(), t.begin(), t.end());
  }
  return out;
}

const std::vector<std::string>& require_labels(const ImageRef& image) {
  if (!image.visible_labels) {
    throw Error(ErrorKind::InvalidImageReference,
                "stub service needs visible labels for view '" + image.view_id + "'");
  }
  return *image.visible_labels;
}

std::string line_value(std::string_view text, std::string_view prefix) {
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, end - pos);
    if (line.starts_with(prefix)) return std::string(line.substr(prefix.size()));
    pos = end + 1;
  }
  return {};
}

}  // namespace

double token_jaccard(std::span<const std::string> a, std::span<const std::string> b) {
  const std::set<std::string> sa(a.begin(), a.end());
  const std::set<std::string> sb(b.begin(), b.end());
  std::size_t common = 0;
  for (const auto& t : sa) common += sb.contains(t) ? 1 : 0;
  const std::size_t uni = sa.size() + sb.size() - common;
  return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

// --- configuration ---------------------------------------------------------

void ServiceEndpointConfig::validate() const {
  if (max_in_flight < 1) throw Error(ErrorKind::InvalidArgument, "max_in_flight must be >= 1");
  if (!(timeout_seconds > 0.0)) throw Error(ErrorKind::InvalidArgument, "timeout must be positive");
  if (mode == Mode::Remote && base_url.empty()) {
    throw Error(ErrorKind::InvalidArgument, "remote mode needs a base_url");
  }
}

void ServiceEndpointConfig::apply_environment() {
  if (const char* url = std::getenv("MODEL_SERVICE_URL"); url && *url) base_url = url;
}

// --- stub ------------------------------------------------------------------

std::vector<std::string> StubModelService::caption_image(const ImageRef& image,
                                                         std::size_t num_captions) {
  if (num_captions < 1) throw Error(ErrorKind::InvalidArgument, "num_captions must be >= 1");
  const std::string subject = join_labels(require_labels(image));
  const std::uint64_t offset = splitmix64(seed_ ^ fnv1a64(image.view_id));
  std::vector<std::string> captions;
  captions.reserve(num_captions);
  for (std::size_t i = 0; i < num_captions; ++i) {
    const std::size_t t = i == 0 ? 0 : 1 + (offset + i - 1) % (kNumTemplates - 1);
    captions.push_back(std::string(kCaptionTemplates[t]) + " " + subject);
  }
  return captions;
}

std::vector<std::vector<double>> StubModelService::embed_text(std::span<const std::string> texts) {
  if (texts.empty()) throw Error(ErrorKind::InvalidArgument, "embed_text needs at least one text");
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    auto tokens = tokenize(text);
    std::ranges::sort(tokens);
    std::vector<double> v(kStubEmbeddingDim, 0.0);
    for (const auto& tok : tokens) {
      const std::uint64_t h = fnv1a64(tok, seed_);
      for (std::size_t d = 0; d < kStubEmbeddingDim; ++d) {
        const std::uint64_t bits = splitmix64(h + d);
        v[d] += static_cast<double>(bits >> 11) * 0x1.0p-52 - 1.0;
      }
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      v[0] = 1.0;
    } else {
      for (double& x : v) x /= norm;
    }
    out.push_back(std::move(v));
  }
  return out;
}

ScoreResult StubModelService::score_image_text(const ImageRef& image,
                                               std::span<const std::string> texts) {
  if (texts.empty()) throw Error(ErrorKind::InvalidArgument, "score_image_text needs texts");
  const auto labels = label_tokens(require_labels(image));
  ScoreResult result;
  result.scores.reserve(texts.size());
  for (const auto& text : texts) result.scores.push_back(token_jaccard(tokenize(text), labels));
  return result;
}

std::string StubModelService::generate_text(const std::string& prompt, int max_tokens,
                                            double /*temperature*/) {
  if (max_tokens < 1) throw Error(ErrorKind::InvalidArgument, "max_tokens must be >= 1");
  if (prompt.find(kSynthesisMarker) != std::string::npos) {
    json reply = json::object();
    reply["question"] = "Combining: " + line_value(prompt, kPromptQuestion1) + " | " +
                        line_value(prompt, kPromptQuestion2) + "?";
    reply["answer"] = line_value(prompt, kPromptAnswer1);
    return reply.dump();
  }
  return "stub-digest:" + hex64(fnv1a64(prompt, seed_));
}

// --- remote ----------------------------------------------------------------

struct RemoteModelService::Impl {
  explicit Impl(ServiceEndpointConfig c)
      : cfg(std::move(c)), slots(static_cast<std::ptrdiff_t>(cfg.max_in_flight)) {
    static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(cfg.base_url, m, url_re)) {
      throw Error(ErrorKind::InvalidArgument, "malformed service url '" + cfg.base_url + "'");
    }
    origin = m[1].str();
    prefix = m[2].matched ? m[2].str() : "";
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  }

  json post(const std::string& route, const json& body) {
    const std::string payload = body.dump();
    const std::size_t attempts = cfg.retry_backoff_seconds.size() + 1;
    std::string last_failure;
    for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(
            std::chrono::duration<double>(cfg.retry_backoff_seconds[attempt - 1]));
      }
      httplib::Result res = [&] {
        slots.acquire();
        struct Release {
          std::counting_semaphore<>& s;
          ~Release() { s.release(); }
        } release{slots};
        httplib::Client client(origin);
        const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
            std::chrono::duration<double>(cfg.timeout_seconds));
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        return client.Post(prefix + route, payload, "application/json");
      }();
      if (!res) {
        last_failure = httplib::to_string(res.error());
        continue;
      }
      if (res->status >= 500) {
        last_failure = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200) {
        throw Error(ErrorKind::ServiceProtocol,
                    route + " returned HTTP " + std::to_string(res->status));
      }
      json reply = json::parse(res->body, nullptr, /*allow_exceptions=*/false);
      if (reply.is_discarded() || !reply.is_object()) {
        throw Error(ErrorKind::ServiceProtocol, route + " returned a non-object body");
      }
      return reply;
    }
    throw Error(ErrorKind::ServiceUnavailable,
                cfg.base_url + route + " unavailable after " + std::to_string(attempts) +
                    " attempts: " + last_failure);
  }

  static void put_image(json& body, const ImageRef& image) {
    if (image.image_path) {
      body["image_path"] = *image.image_path;
    } else if (image.image_b64) {
      body["image_b64"] = *image.image_b64;
    } else {
      throw Error(ErrorKind::InvalidImageReference,
                  "view '" + image.view_id + "' has neither image_path nor image_b64");
    }
  }

  template <typename T>
  static T field(const json& reply, const char* key, const std::string& route) {
    try {
      return reply.at(key).get<T>();
    } catch (const json::exception& e) {
      throw Error(ErrorKind::ServiceProtocol, route + ": bad '" + key + "' field: " + e.what());
    }
  }

  ServiceEndpointConfig cfg;
  std::counting_semaphore<> slots;
  std::string origin;
  std::string prefix;
};

RemoteModelService::RemoteModelService(ServiceEndpointConfig cfg) {
  cfg.validate();
  impl_ = std::make_unique<Impl>(std::move(cfg));
}

RemoteModelService::~RemoteModelService() = default;

std::vector<std::string> RemoteModelService::caption_image(const ImageRef& image,
                                                           std::size_t num_captions) {
  if (num_captions < 1) throw Error(ErrorKind::InvalidArgument, "num_captions must be >= 1");
  json body = json::object();
  Impl::put_image(body, image);
  body["num_captions"] = num_captions;
  const std::string route = "/v1/caption";
  return Impl::field<std::vector<std::string>>(impl_->post(route, body), "captions", route);
}

std::vector<std::vector<double>> RemoteModelService::embed_text(
    std::span<const std::string> texts) {
  if (texts.empty()) throw Error(ErrorKind::InvalidArgument, "embed_text needs at least one text");
  const std::string route = "/v1/embed_text";
  json body = {{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
  auto vectors = Impl::field<std::vector<std::vector<double>>>(impl_->post(route, body),
                                                               "embeddings", route);
  if (vectors.size() != texts.size()) {
    throw Error(ErrorKind::ServiceProtocol, route + ": embedding count does not match input");
  }
  return vectors;
}

ScoreResult RemoteModelService::score_image_text(const ImageRef& image,
                                                 std::span<const std::string> texts) {
  if (texts.empty()) throw Error(ErrorKind::InvalidArgument, "score_image_text needs texts");
  const std::string route = "/v1/score_image_text";
  json body = json::object();
  Impl::put_image(body, image);
  body["texts"] = std::vector<std::string>(texts.begin(), texts.end());
  ScoreResult result;
  result.scores = Impl::field<std::vector<double>>(impl_->post(route, body), "scores", route);
  if (result.scores.size() != texts.size()) {
    throw Error(ErrorKind::ServiceProtocol, route + ": score count does not match input");
  }
  for (double& s : result.scores) s = std::isnan(s) ? 0.0 : std::clamp(s, 0.0, 1.0);
  return result;
}

std::string RemoteModelService::generate_text(const std::string& prompt, int max_tokens,
                                              double temperature) {
  if (max_tokens < 1) throw Error(ErrorKind::InvalidArgument, "max_tokens must be >= 1");
  const std::string route = "/v1/generate";
  json body = {{"prompt", prompt}, {"max_tokens", max_tokens}, {"temperature", temperature}};
  return Impl::field<std::string>(impl_->post(route, body), "text", route);
}

std::unique_ptr<ModelService> make_service(const ServiceEndpointConfig& cfg) {
  cfg.validate();
  if (cfg.mode == Mode::Stub) return std::make_unique<StubModelService>(cfg.seed);
  return std::make_unique<RemoteModelService>(cfg);
}

}  // namespace egoview::services
