#include "prpo/embedding.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "prpo/errors.hpp"
#include "prpo/text.hpp"

namespace prpo {

std::vector<double> reference_embedding(const std::vector<std::string>& tokens,
                                        std::size_t dim) {
  if (dim < 8) throw DomainError("reference_embedding: dim must be >= 8");
  std::vector<double> v(dim, 0.0);
  if (tokens.empty()) return v;

  for (const auto& tok : tokens) {
    const std::uint64_t idx_hash = fnv1a64(tok);
    const std::uint64_t sign_hash = fnv1a64(tok, 0x9e3779b97f4a7c15ull);
    const std::size_t idx = static_cast<std::size_t>(idx_hash % dim);
    v[idx] += (sign_hash & 1u) ? 1.0 : -1.0;
  }

  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  if (norm2 == 0.0) return v;  // signs cancelled exactly
  const double norm = std::sqrt(norm2);
  for (double& x : v) x /= norm;
  return v;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw ShapeMismatch("cosine_similarity: dimension mismatch");
  double dot = 0.0, na2 = 0.0, nb2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na2 += a[i] * a[i];
    nb2 += b[i] * b[i];
  }
  if (na2 == 0.0 || nb2 == 0.0) return 0.0;
  return dot / std::sqrt(na2 * nb2);
}

ReferenceEmbeddingProvider::ReferenceEmbeddingProvider(std::size_t dim) : dim_(dim) {
  if (dim < 8) throw DomainError("embedding dim must be >= 8");
}

std::vector<double> ReferenceEmbeddingProvider::embed_text(
    const std::vector<std::string>& tokens) const {
  return reference_embedding(tokens, dim_);
}

std::vector<double> ReferenceEmbeddingProvider::embed_image(
    const ImageDescriptor& img) const {
  return reference_embedding(img.tags, dim_);
}

namespace {

// Split "http://host:port/path" into base and path for httplib.
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  auto scheme_end = endpoint.find("://");
  std::size_t path_start =
      endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  if (path_start == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

}  // namespace

RemoteEmbeddingClient::RemoteEmbeddingClient(RemoteEmbeddingConfig cfg)
    : cfg_(std::move(cfg)) {
  if (cfg_.dim < 8) throw DomainError("embedding dim must be >= 8");
  if (cfg_.endpoint.empty()) throw ConfigError("endpoint", "must not be empty");
}

std::vector<double> RemoteEmbeddingClient::post(const std::string& body) const {
  const auto [base, path] = split_endpoint(cfg_.endpoint);
  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(cfg_.backoff_base_ms << (attempt - 1)));
    }
    httplib::Client client(base);
    client.set_connection_timeout(0, cfg_.timeout_ms * 1000);
    client.set_read_timeout(0, cfg_.timeout_ms * 1000);
    auto res = client.Post(path, body, "application/json");
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP status " + std::to_string(res->status);
      continue;
    }
    try {
      auto j = nlohmann::json::parse(res->body);
      if (!j.contains("vectors") || !j["vectors"].is_array() || j["vectors"].empty()) {
        last_error = "embedding response lacks 'vectors'";
        continue;
      }
      auto vec = j["vectors"][0].get<std::vector<double>>();
      if (vec.size() != cfg_.dim) {
        last_error = "embedding response has wrong dimension: got " +
                     std::to_string(vec.size()) + ", expected " +
                     std::to_string(cfg_.dim);
        continue;
      }
      return vec;
    } catch (const nlohmann::json::exception& e) {
      last_error = std::string("bad response body: ") + e.what();
    }
  }
  throw ProviderFailure("embedding request to " + cfg_.endpoint + " failed after " +
                        std::to_string(cfg_.max_retries + 1) + " attempts: " + last_error);
}

std::vector<double> RemoteEmbeddingClient::embed_text(
    const std::vector<std::string>& tokens) const {
  nlohmann::json body;
  body["texts"] = nlohmann::json::array({tokens});
  return post(body.dump());
}

std::vector<double> RemoteEmbeddingClient::embed_image(const ImageDescriptor& img) const {
  if (!img.external_ref) {
    // Tag-backed images do not need the wire at all.
    return reference_embedding(img.tags, cfg_.dim);
  }
  nlohmann::json body;
  body["image_ref"] = *img.external_ref;
  return post(body.dump());
}

}  // namespace prpo
