#pragma once

#include <string>
#include <utility>
#include <vector>

#include "reliag/error.hpp"

namespace reliag {

// A response value: either clusterable text (canonical id + surface form) or
// the distinguished IDK. IDK is a variant, not a magic string, so a literal
// answer "I don't know" from a provider can never collide with it.
class Answer {
 public:
  enum class Kind { Text, Idk };

  Answer() : kind_(Kind::Idk) {}

  static Answer idk() { return Answer(); }

  static Answer text(std::string canonical_id, std::string surface) {
    if (canonical_id.empty())
      throw Error(ErrorCode::RejectRange, "TEXT answer requires a canonical_id");
    Answer a;
    a.kind_ = Kind::Text;
    a.canonical_id_ = std::move(canonical_id);
    a.surface_ = std::move(surface);
    return a;
  }

  static Answer text(const std::string& canonical_id) {
    return text(canonical_id, canonical_id);
  }

  Kind kind() const noexcept { return kind_; }
  bool is_idk() const noexcept { return kind_ == Kind::Idk; }
  bool is_text() const noexcept { return kind_ == Kind::Text; }

  const std::string& canonical_id() const {
    require_text();
    return canonical_id_;
  }

  const std::string& surface() const {
    require_text();
    return surface_;
  }

  friend bool operator==(const Answer& a, const Answer& b) {
    if (a.kind_ != b.kind_) return false;
    if (a.kind_ == Kind::Idk) return true;
    return a.canonical_id_ == b.canonical_id_ && a.surface_ == b.surface_;
  }
  friend bool operator!=(const Answer& a, const Answer& b) { return !(a == b); }

 private:
  void require_text() const {
    if (kind_ != Kind::Text)
      throw Error(ErrorCode::Internal, "IDK answer carries no canonical_id/surface");
  }

  Kind kind_;
  std::string canonical_id_;
  std::string surface_;
};

struct SourcedAnswer {
  int source_id = 0;
  Answer answer;
};

// Partition of the TEXT responses handed to the clusterer. Cluster order and
// within-cluster order follow insertion order of the input, which makes both
// the tie-break policy and "first response in the cluster" deterministic.
struct ClusterSet {
  std::vector<std::vector<SourcedAnswer>> clusters;

  bool empty() const noexcept { return clusters.empty(); }
  std::size_t size() const noexcept { return clusters.size(); }
};

}  // namespace reliag
