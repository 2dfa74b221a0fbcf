#include "chaoslab/serialize.hpp"

#include <json.hpp>

#include "chaoslab/errors.hpp"

namespace chaoslab {

namespace {

using nlohmann::json;

json slot_to_json(const Point& p) {
  switch (p.kind()) {
    case SpaceKind::Scalar:
      return p.scalar_value();
    case SpaceKind::Symbol:
      return p.symbol_value();
    case SpaceKind::Velocity3: {
      const Eigen::Vector3d v = p.velocity3_value();
      return json::array({v[0], v[1], v[2]});
    }
    case SpaceKind::Phase: {
      json pos = json::array(), vel = json::array();
      const Eigen::VectorXd x = p.phase_position();
      const Eigen::VectorXd v = p.phase_velocity();
      for (Eigen::Index i = 0; i < x.size(); ++i) pos.push_back(x[i]);
      for (Eigen::Index i = 0; i < v.size(); ++i) vel.push_back(v[i]);
      return json{{"position", pos}, {"velocity", vel}};
    }
  }
  throw InvalidInputError("slot_to_json: unknown kind");
}

Point slot_from_json(const json& j, SpaceKind kind) {
  switch (kind) {
    case SpaceKind::Scalar:
      if (!j.is_number()) throw InvalidInputError("measure JSON: scalar atom must be a number");
      return Point::scalar(j.get<double>());
    case SpaceKind::Symbol:
      if (!j.is_number_integer())
        throw InvalidInputError("measure JSON: symbol atom must be an integer");
      return Point::symbol(j.get<int>());
    case SpaceKind::Velocity3: {
      if (!j.is_array() || j.size() != 3)
        throw InvalidInputError("measure JSON: velocity3 atom must be a 3-array");
      return Point::velocity3(Eigen::Vector3d(j[0].get<double>(), j[1].get<double>(),
                                              j[2].get<double>()));
    }
    case SpaceKind::Phase: {
      if (!j.is_object() || !j.contains("position") || !j.contains("velocity"))
        throw InvalidInputError("measure JSON: phase atom needs position and velocity");
      const auto& pos = j["position"];
      const auto& vel = j["velocity"];
      if (!pos.is_array() || !vel.is_array() || pos.size() != vel.size() || pos.empty())
        throw InvalidInputError("measure JSON: phase arrays malformed");
      Eigen::VectorXd x(pos.size()), v(vel.size());
      for (std::size_t i = 0; i < pos.size(); ++i) x[static_cast<Eigen::Index>(i)] = pos[i].get<double>();
      for (std::size_t i = 0; i < vel.size(); ++i) v[static_cast<Eigen::Index>(i)] = vel[i].get<double>();
      return Point::phase(x, v);
    }
  }
  throw InvalidInputError("slot_from_json: unknown kind");
}

}  // namespace

std::string to_json_string(const AtomicMeasure& mu, int indent) {
  json out;
  out["kind"] = space_kind_name(mu.kind());
  out["width"] = mu.tuple_width();
  json atoms = json::array();
  for (int i = 0; i < mu.support_size(); ++i) {
    const Atom& a = mu.atom(i);
    json encoded;
    if (a.width() == 1) {
      encoded = slot_to_json(a.slots[0]);
    } else {
      encoded = json::array();
      for (const Point& p : a.slots) encoded.push_back(slot_to_json(p));
    }
    atoms.push_back(json{{"atom", encoded}, {"weight", mu.weight(i)}});
  }
  out["atoms"] = atoms;
  return out.dump(indent);
}

AtomicMeasure atomic_measure_from_json_string(const std::string& text) {
  json in = json::parse(text, nullptr, true);
  if (!in.is_object() || !in.contains("kind") || !in.contains("width") || !in.contains("atoms"))
    throw InvalidInputError("measure JSON: need kind, width, atoms");
  const SpaceKind kind = space_kind_from_name(in["kind"].get<std::string>());
  const int width = in["width"].get<int>();
  if (width < 1) throw InvalidInputError("measure JSON: width must be >= 1");
  std::vector<Atom> atoms;
  std::vector<double> weights;
  for (const auto& entry : in["atoms"]) {
    if (!entry.contains("atom") || !entry.contains("weight"))
      throw InvalidInputError("measure JSON: each entry needs atom and weight");
    const auto& encoded = entry["atom"];
    Atom a;
    if (width == 1) {
      a.slots.push_back(slot_from_json(encoded, kind));
    } else {
      if (!encoded.is_array() || static_cast<int>(encoded.size()) != width)
        throw InvalidInputError("measure JSON: tuple atom width mismatch");
      for (const auto& s : encoded) a.slots.push_back(slot_from_json(s, kind));
    }
    atoms.push_back(std::move(a));
    weights.push_back(entry["weight"].get<double>());
  }
  return AtomicMeasure(std::move(atoms), std::move(weights));
}

}  // namespace chaoslab
