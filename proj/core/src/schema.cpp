#include "mg2v/schema.hpp"

#include <fstream>
#include <sstream>

namespace mg2v {

TypeId Schema::add_node_type(const std::string& name) {
  if (name.empty()) throw Error("schema: empty node type name");
  if (find_type(name)) throw Error("schema: duplicate node type '" + name + "'");
  type_names_.push_back(name);
  return static_cast<TypeId>(type_names_.size() - 1);
}

std::string Schema::reverse_label(const std::string& label) {
  static const std::string suffix = "^-1";
  if (label.size() > suffix.size() &&
      label.compare(label.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return label.substr(0, label.size() - suffix.size());
  }
  return label + suffix;
}

RelId Schema::add_relation(const std::string& src_type, const std::string& label,
                           const std::string& dst_type) {
  if (label.empty()) throw Error("schema: empty relation label");
  auto src = find_type(src_type);
  auto dst = find_type(dst_type);
  if (!src) throw Error("schema: relation '" + label + "' references undeclared type '" +
                        src_type + "'");
  if (!dst) throw Error("schema: relation '" + label + "' references undeclared type '" +
                        dst_type + "'");
  if (find_relation(*src, label, *dst)) {
    throw Error("schema: duplicate relation " + src_type + " -" + label + "-> " + dst_type);
  }
  const std::string rev = reverse_label(label);
  if (find_relation(*dst, rev, *src)) {
    throw Error("schema: relation " + src_type + " -" + label + "-> " + dst_type +
                " collides with the reverse of an existing relation");
  }
  RelId fwd = static_cast<RelId>(relations_.size());
  relations_.push_back({*src, label, *dst});
  relations_.push_back({*dst, rev, *src});
  reverse_.push_back(fwd + 1);
  reverse_.push_back(fwd);
  return fwd;
}

std::optional<TypeId> Schema::find_type(const std::string& name) const {
  for (size_t i = 0; i < type_names_.size(); ++i) {
    if (type_names_[i] == name) return static_cast<TypeId>(i);
  }
  return std::nullopt;
}

TypeId Schema::type_id(const std::string& name) const {
  auto t = find_type(name);
  if (!t) throw Error("schema: unknown node type '" + name + "'");
  return *t;
}

const std::string& Schema::type_name(TypeId t) const {
  if (t < 0 || static_cast<size_t>(t) >= type_names_.size()) {
    throw Error("schema: node type id out of range: " + std::to_string(t));
  }
  return type_names_[t];
}

std::optional<RelId> Schema::find_relation(TypeId src, const std::string& label,
                                           TypeId dst) const {
  for (size_t i = 0; i < relations_.size(); ++i) {
    const Relation& r = relations_[i];
    if (r.src == src && r.dst == dst && r.label == label) return static_cast<RelId>(i);
  }
  return std::nullopt;
}

bool Schema::has_relation_between(TypeId src, TypeId dst) const {
  for (const Relation& r : relations_) {
    if (r.src == src && r.dst == dst) return true;
  }
  return false;
}

Schema Schema::parse(const std::string& text) {
  Schema schema;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw) || kw[0] == '#') continue;
    if (kw == "nodetype") {
      std::string name;
      if (!(ls >> name)) throw ParseError(lineno, 1, "nodetype needs a name");
      schema.add_node_type(name);
    } else if (kw == "relation") {
      std::string src, label, dst;
      if (!(ls >> src >> label >> dst)) {
        throw ParseError(lineno, 1, "relation needs '<src_type> <label> <dst_type>'");
      }
      schema.add_relation(src, label, dst);
    } else {
      throw ParseError(lineno, 1, "unknown schema keyword '" + kw + "'");
    }
  }
  return schema;
}

Schema Schema::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open schema file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string Schema::serialize() const {
  std::ostringstream out;
  for (const std::string& t : type_names_) out << "nodetype " << t << "\n";
  // Even ids are the declared directions, odd ids their generated reverses.
  for (size_t i = 0; i < relations_.size(); i += 2) {
    const Relation& r = relations_[i];
    out << "relation " << type_name(r.src) << " " << r.label << " " << type_name(r.dst) << "\n";
  }
  return out.str();
}

void Schema::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write schema file: " + path);
  out << serialize();
}

}  // namespace mg2v
