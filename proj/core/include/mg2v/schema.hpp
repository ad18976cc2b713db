#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mg2v/common.hpp"

namespace mg2v {

struct Relation {
  TypeId src;
  std::string label;
  TypeId dst;
};

// Node-type and relation vocabulary of an HIN. Declaring a relation also
// declares its reverse (label suffixed "^-1"), so the relation set is always
// closed under inversion.
class Schema {
 public:
  TypeId add_node_type(const std::string& name);
  // Adds the forward relation and its reverse; returns the forward id.
  RelId add_relation(const std::string& src_type, const std::string& label,
                     const std::string& dst_type);

  std::optional<TypeId> find_type(const std::string& name) const;
  TypeId type_id(const std::string& name) const;  // throws on unknown name
  const std::string& type_name(TypeId t) const;
  size_t num_types() const { return type_names_.size(); }

  std::optional<RelId> find_relation(TypeId src, const std::string& label, TypeId dst) const;
  bool has_relation_between(TypeId src, TypeId dst) const;
  const Relation& relation(RelId r) const { return relations_.at(r); }
  RelId reverse(RelId r) const { return reverse_.at(r); }
  // Generated reverse directions occupy the odd ids.
  bool is_reverse(RelId r) const { return r % 2 == 1; }
  size_t num_relations() const { return relations_.size(); }

  static std::string reverse_label(const std::string& label);

  // Text format: lines "nodetype <name>" and "relation <src> <label> <dst>".
  // Reverse relations must not be declared; they are implied.
  static Schema load(const std::string& path);
  static Schema parse(const std::string& text);
  void save(const std::string& path) const;
  std::string serialize() const;

 private:
  std::vector<std::string> type_names_;
  std::vector<Relation> relations_;
  std::vector<RelId> reverse_;  // relation id -> id of its inverse
};

}  // namespace mg2v
