#include "cae/checkpoint.hpp"

#include "cae/binary_io.hpp"
#include "cae/error.hpp"

namespace cae {

namespace {

constexpr std::string_view kMagic = "CAE1";

nlohmann::ordered_json header_json(Autoencoder& model, const cle::EncodingConfig& encoding,
                                   const TrainingMetadata& training) {
  nlohmann::ordered_json j;
  j["model"] = to_json(model.config());
  j["encoding"] = {{"cutoff", encoding.cutoff}, {"mode", std::string(cle::to_string(encoding.mode))}};
  nlohmann::ordered_json t;
  t["epochs_run"] = training.epochs_run;
  t["final_train_loss"] = training.final_train_loss;
  t["final_val_loss"] = training.final_val_loss ? nlohmann::ordered_json(*training.final_val_loss) : nlohmann::ordered_json(nullptr);
  t["seed"] = training.seed;
  j["training"] = std::move(t);
  auto params = nlohmann::ordered_json::array();
  for (const auto& p : model.params()) params.push_back({{"name", p.name}, {"shape", p.value->shape()}});
  j["parameters"] = std::move(params);
  return j;
}

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(Autoencoder& model, const cle::EncodingConfig& encoding,
                                               const TrainingMetadata& training) {
  if (encoding.cutoff != model.config().cutoff) {
    throw InvalidArgument("encoding cutoff does not match the model input width");
  }
  const std::string header = header_json(model, encoding, training).dump();
  io::ByteWriter w;
  w.buffer().reserve(header.size() + 4 * model.parameter_count() + 16);
  w.bytes(kMagic);
  w.u16(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(header.size()));
  w.bytes(header);
  for (const auto& p : model.params()) w.f32s(p.value->span());
  w.u32(io::crc32(w.buffer()));
  return std::move(w.buffer());
}

Checkpoint deserialize_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagic.size() ||
      std::string_view(reinterpret_cast<const char*>(bytes.data()), kMagic.size()) != kMagic) {
    throw FormatError("not a CAE checkpoint (bad magic)");
  }
  io::ByteReader r(bytes, "checkpoint");
  r.bytes(kMagic.size());
  const auto version = r.u16();
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint format version " + std::to_string(version) + " (this build reads " +
                      std::to_string(kCheckpointVersion) + ")");
  }
  if (bytes.size() < 4 + 2 + 4 + 4) throw FormatError("truncated checkpoint");
  const auto payload = bytes.first(bytes.size() - 4);
  io::ByteReader tail(bytes.last(4), "checkpoint");
  const auto stored_crc = tail.u32();
  const auto crc = io::crc32(payload);
  if (crc != stored_crc) throw FormatError("checkpoint CRC mismatch (file corrupt or truncated)");

  io::ByteReader body(payload, "checkpoint");
  body.bytes(kMagic.size() + 2);
  const std::string header = body.bytes(body.u32());
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint header is not valid JSON: ") + e.what());
  }

  cle::EncodingConfig encoding;
  TrainingMetadata training;
  ModelConfig config;
  try {
    config = model_config_from_json(j.at("model"));
    encoding.cutoff = j.at("encoding").at("cutoff").get<std::size_t>();
    encoding.mode = cle::mode_from_string(j.at("encoding").at("mode").get<std::string>());
    encoding.validate();
    const auto& t = j.at("training");
    training.epochs_run = t.at("epochs_run").get<std::size_t>();
    training.final_train_loss = t.at("final_train_loss").get<double>();
    if (!t.at("final_val_loss").is_null()) training.final_val_loss = t.at("final_val_loss").get<double>();
    training.seed = t.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid checkpoint header: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("invalid checkpoint header: ") + e.what());
  }

  Checkpoint ck{Autoencoder(config), encoding, training, crc};
  auto params = ck.model.params();
  try {
    const auto& declared = j.at("parameters");
    if (declared.size() != params.size()) throw FormatError("checkpoint parameter list does not match architecture");
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (declared[i].at("name").get<std::string>() != params[i].name ||
          declared[i].at("shape").get<nn::Shape>() != params[i].value->shape()) {
        throw FormatError("checkpoint parameter " + std::to_string(i) + " (" + params[i].name +
                          ") does not match the architecture");
      }
      body.f32s(params[i].value->span());
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid checkpoint parameter list: ") + e.what());
  }
  if (!body.done()) throw FormatError("checkpoint has trailing bytes after the parameter block");
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, Autoencoder& model, const cle::EncodingConfig& encoding,
                     const TrainingMetadata& training) {
  io::write_file(path, serialize_checkpoint(model, encoding, training));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return deserialize_checkpoint(io::read_file(path)); }

}  // namespace cae
