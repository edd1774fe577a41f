// Copyright 2026 The egoview Authors
// SPDX-License-Identifier: Apache-2.0

// Model-service clients: captioning, text embedding, image-text scoring and
// text generation behind one interface. RemoteModelService speaks the JSON
// wire protocol below; StubModelService is a deterministic in-process
// stand-in used for offline and reproducible runs.
//
//   POST <base>/v1/caption          {image_path|image_b64, num_captions} -> {captions: [...]}
//   POST <base>/v1/embed_text       {texts: [...]}                        -> {embeddings: [[...]]}
//   POST <base>/v1/score_image_text {image_path|image_b64, texts: [...]}  -> {scores: [...]}
//   POST <base>/v1/generate         {prompt, max_tokens, temperature}     -> {text}

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace egoview::services {

/// What a service needs to "see" a view. Remote services read the image;
/// the stub reads `visible_labels`, a sidecar of object labels visible in
/// the view.
struct ImageRef {
  std::string view_id;
  std::optional<std::string> image_path;
  std::optional<std::string> image_b64;
  std::optional<std::vector<std::string>> visible_labels;
};

struct ScoreResult {
  std::vector<double> scores;  // aligned with the input texts, each in [0, 1]
};

enum class Mode { Remote, Stub };

struct ServiceEndpointConfig {
  std::string base_url;
  double timeout_seconds = 30.0;
  std::size_t max_in_flight = 8;
  Mode mode = Mode::Stub;
  std::uint64_t seed = 0;
  // Sleep before each retry; retries happen on transport failures only.
  std::vector<double> retry_backoff_seconds = {0.5, 2.0};

  void validate() const;
  /// MODEL_SERVICE_URL, when set, replaces base_url.
  void apply_environment();
};

// Prompts carrying this marker are composition requests; the stub answers
// them with its fixed template.
inline constexpr std::string_view kSynthesisMarker = "[[egoview:compose]]";
// Line prefixes of a composition prompt that the stub reads back.
inline constexpr std::string_view kPromptQuestion1 = "Question 1: ";
inline constexpr std::string_view kPromptAnswer1 = "Answer 1: ";
inline constexpr std::string_view kPromptQuestion2 = "Question 2: ";
inline constexpr std::string_view kPromptAnswer2 = "Answer 2: ";

inline constexpr std::size_t kStubEmbeddingDim = 64;

class ModelService {
 public:
  virtual ~ModelService() = default;

  virtual std::vector<std::string> caption_image(const ImageRef& image,
                                                 std::size_t num_captions) = 0;
  virtual std::vector<std::vector<double>> embed_text(std::span<const std::string> texts) = 0;
  virtual ScoreResult score_image_text(const ImageRef& image,
                                       std::span<const std::string> texts) = 0;
  virtual std::string generate_text(const std::string& prompt, int max_tokens,
                                    double temperature) = 0;
};

/// Pure function of (inputs, seed); reentrant.
///  - caption: "<template> <labels>" with sorted labels, first template fixed,
///    the rest rotated by seed.
///  - embed: per-token seeded hash vectors summed in sorted token order and
///    L2-normalized.
///  - score: Jaccard overlap of text tokens and label tokens.
///  - generate: the composition template for marked prompts, otherwise a
///    seeded digest of the prompt.
class StubModelService final : public ModelService {
 public:
  explicit StubModelService(std::uint64_t seed = 0) : seed_(seed) {}

  std::vector<std::string> caption_image(const ImageRef& image, std::size_t num_captions) override;
  std::vector<std::vector<double>> embed_text(std::span<const std::string> texts) override;
  ScoreResult score_image_text(const ImageRef& image, std::span<const std::string> texts) override;
  std::string generate_text(const std::string& prompt, int max_tokens, double temperature) override;

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

class RemoteModelService final : public ModelService {
 public:
  explicit RemoteModelService(ServiceEndpointConfig cfg);
  ~RemoteModelService() override;

  std::vector<std::string> caption_image(const ImageRef& image, std::size_t num_captions) override;
  std::vector<std::vector<double>> embed_text(std::span<const std::string> texts) override;
  ScoreResult score_image_text(const ImageRef& image, std::span<const std::string> texts) override;
  std::string generate_text(const std::string& prompt, int max_tokens, double temperature) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::unique_ptr<ModelService> make_service(const ServiceEndpointConfig& cfg);

/// Jaccard similarity of two token sets; 0 when both are empty.
double token_jaccard(std::span<const std::string> a, std::span<const std::string> b);

}  // namespace egoview::services
