#include "topo/record.hpp"

#include "topo/error.hpp"
#include "topo/raster.hpp"

#include <cmath>
#include <string>

namespace topo {

void to_json(nlohmann::json& j, const SampleMeta& meta) {
  j = meta.extra.is_object() ? meta.extra : nlohmann::json::object();
  j["id"] = meta.id;
  j["spec"] = meta.spec;
  j["split"] = meta.split;
  j["seed"] = meta.seed;
  j["generator_version"] = meta.generator_version;
}

void from_json(const nlohmann::json& j, SampleMeta& meta) {
  j.at("id").get_to(meta.id);
  j.at("spec").get_to(meta.spec);
  meta.split = j.value("split", std::string{});
  meta.seed = j.value("seed", std::uint64_t{0});
  meta.generator_version = j.value("generator_version", std::string{});
  meta.extra = nlohmann::json::object();
  for (const auto& [key, value] : j.items()) {
    if (key != "id" && key != "spec" && key != "split" && key != "seed" &&
        key != "generator_version") {
      meta.extra[key] = value;
    }
  }
}

const FloatImage* SampleRecord::find(std::string_view name) const noexcept {
  for (const auto& ch : channels) {
    if (ch.name == name) return &ch.data;
  }
  return nullptr;
}

const FloatImage& SampleRecord::channel(std::string_view name) const {
  if (const auto* p = find(name)) return *p;
  throw Error(ErrorCode::InvalidArgument, "record has no channel '" + std::string(name) + "'");
}

Field to_field(const FloatImage& image) { return image.cast<double>(); }
FloatImage to_image(const Field& field) { return field.cast<float>(); }

SampleRecord encode_sample(const ProblemSpec& spec, const FieldBundle& fields,
                           const Field& density, const DesignDomain& domain) {
  const auto same_shape = [&](const Field& f) {
    return f.rows() == domain.nely && f.cols() == domain.nelx;
  };
  for (const Field* f : {&fields.ux, &fields.uy, &fields.s11, &fields.s22, &fields.s12,
                         &fields.e11, &fields.e22, &fields.e12, &fields.svm, &fields.w,
                         &density}) {
    if (!same_shape(*f)) {
      throw Error(ErrorCode::ShapeMismatch, "field shape does not match the domain grid");
    }
  }

  SampleRecord rec;
  rec.meta.spec = spec;
  const auto [load_x, load_y] = rasterize_load(spec, domain);
  rec.channels.reserve(kChannelNames.size());
  rec.channels.push_back(
      {"vf", FloatImage::Constant(domain.nely, domain.nelx, static_cast<float>(spec.vf_target))});
  rec.channels.push_back({"bc_code", rasterize_bc(spec.scenario(), domain).cast<float>()});
  rec.channels.push_back({"load_x", to_image(load_x)});
  rec.channels.push_back({"load_y", to_image(load_y)});
  rec.channels.push_back({"ux", to_image(fields.ux)});
  rec.channels.push_back({"uy", to_image(fields.uy)});
  rec.channels.push_back({"s11", to_image(fields.s11)});
  rec.channels.push_back({"s22", to_image(fields.s22)});
  rec.channels.push_back({"s12", to_image(fields.s12)});
  rec.channels.push_back({"e11", to_image(fields.e11)});
  rec.channels.push_back({"e22", to_image(fields.e22)});
  rec.channels.push_back({"e12", to_image(fields.e12)});
  rec.channels.push_back({"svm", to_image(fields.svm)});
  rec.channels.push_back({"w", to_image(fields.w)});
  rec.target = to_image(density);
  return rec;
}

std::vector<std::string> record_violations(const SampleRecord& rec) {
  std::vector<std::string> out;
  const auto rows = rec.target.rows();
  const auto cols = rec.target.cols();
  for (const auto& ch : rec.channels) {
    if (ch.data.rows() != rows || ch.data.cols() != cols) {
      out.push_back("channel " + ch.name + " shape differs from target");
    } else if (!ch.data.allFinite()) {
      out.push_back("channel " + ch.name + " has non-finite values");
    }
  }
  if (!out.empty()) return out;

  if (!rec.target.allFinite() || (rec.target.size() > 0 &&
                                  (rec.target.minCoeff() < 0.0f || rec.target.maxCoeff() > 1.0f))) {
    out.emplace_back("target entries outside [0, 1]");
  }
  if (const auto* vf = rec.find("vf")) {
    const auto expected = static_cast<float>(rec.meta.spec.vf_target);
    if (vf->size() > 0 && (vf->minCoeff() != expected || vf->maxCoeff() != expected)) {
      out.emplace_back("vf channel is not constant at meta vf_target");
    }
  }
  if (const auto* bc = rec.find("bc_code")) {
    for (Eigen::Index i = 0; i < bc->size(); ++i) {
      const float v = bc->data()[i];
      if (!(v == 0.0f || v == 1.0f || v == 2.0f || v == 3.0f)) {
        out.emplace_back("bc_code entry outside {0,1,2,3}");
        break;
      }
    }
  }
  for (const char* name : {"svm", "w"}) {
    if (const auto* ch = rec.find(name); ch && ch->size() > 0 && ch->minCoeff() < 0.0f) {
      out.push_back(std::string(name) + " channel has negative entries");
    }
  }
  return out;
}

std::vector<std::string_view> combo_channels(int combo) {
  std::vector<std::string_view> names = {"vf", "bc_code", "load_x", "load_y"};
  auto add = [&names](std::initializer_list<std::string_view> more) {
    names.insert(names.end(), more.begin(), more.end());
  };
  switch (combo) {
    case 0: break;
    case 1: add({"ux", "uy"}); break;
    case 2: add({"w"}); break;
    case 3: add({"svm"}); break;
    case 4: add({"svm", "w"}); break;
    case 5: add({"s11", "s22", "s12"}); break;
    case 6: add({"e11", "e22", "e12"}); break;
    case 7: add({"s11", "s22", "s12", "e11", "e22", "e12"}); break;
    case 8: add({"ux", "uy", "svm", "w"}); break;
    default:
      throw Error(ErrorCode::UnknownCombo, "field combination " + std::to_string(combo) +
                                               " is not defined (valid: 0..8)");
  }
  return names;
}

std::vector<FloatImage> select_field_combo(const SampleRecord& record, int combo) {
  std::vector<FloatImage> stack;
  for (auto name : combo_channels(combo)) stack.push_back(record.channel(name));
  return stack;
}

}  // namespace topo
