#ifndef PRPO_EMBEDDING_HPP
#define PRPO_EMBEDDING_HPP

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace prpo {

// Desk-scale stand-in for pixel content: an id plus lowercase attribute
// tags, or an opaque reference for a remote embedding service.
struct ImageDescriptor {
  std::string id;
  std::vector<std::string> tags;
  std::optional<std::string> external_ref;
};

// Feature-hashing bag of tokens: index and sign hashes per token,
// accumulated then L2-normalized. Empty input gives the zero vector.
std::vector<double> reference_embedding(const std::vector<std::string>& tokens,
                                        std::size_t dim);

// dot / sqrt(|a|^2 * |b|^2); defined as 0 when either vector is zero.
// Bitwise-identical inputs give exactly 1.
double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

// Image-text encoder role. Implementations must be deterministic and
// return unit-norm vectors of exactly dim() components (the zero vector
// only for empty input).
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dim() const = 0;
  virtual std::vector<double> embed_text(const std::vector<std::string>& tokens) const = 0;
  virtual std::vector<double> embed_image(const ImageDescriptor& img) const = 0;
};

class ReferenceEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit ReferenceEmbeddingProvider(std::size_t dim = 256);
  std::size_t dim() const override { return dim_; }
  std::vector<double> embed_text(const std::vector<std::string>& tokens) const override;
  std::vector<double> embed_image(const ImageDescriptor& img) const override;

 private:
  std::size_t dim_;
};

struct RemoteEmbeddingConfig {
  std::string endpoint;       // e.g. http://127.0.0.1:8080/embed
  std::size_t dim = 256;
  int timeout_ms = 5000;
  int max_retries = 3;
  int backoff_base_ms = 100;  // doubled per retry
};

// HTTP client satisfying the provider contract for real images. Posts
// {"texts": [[...tokens]]} or {"image_ref": "..."} and expects
// {"vectors": [[...]]} back. Throws ProviderFailure once retries are
// exhausted.
class RemoteEmbeddingClient final : public EmbeddingProvider {
 public:
  explicit RemoteEmbeddingClient(RemoteEmbeddingConfig cfg);
  std::size_t dim() const override { return cfg_.dim; }
  std::vector<double> embed_text(const std::vector<std::string>& tokens) const override;
  std::vector<double> embed_image(const ImageDescriptor& img) const override;

 private:
  std::vector<double> post(const std::string& body) const;
  RemoteEmbeddingConfig cfg_;
};

}  // namespace prpo

#endif
