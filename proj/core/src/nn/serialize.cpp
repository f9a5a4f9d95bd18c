#include "radarmon/nn/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "radarmon/error.hpp"

namespace radarmon::nn {

namespace {

static_assert(std::endian::native == std::endian::little, "model container assumes a little-endian host");

enum class Kind : std::uint8_t { Conv = 0, Relu = 1, MaxPool = 2, Dense = 3, Softmax = 4 };
constexpr std::uint8_t kCustomVariant = 255;

class Writer {
 public:
  template <class T>
  void put(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void u32(std::size_t v) { put(static_cast<std::uint32_t>(v)); }
  std::string& str() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}
  template <class T>
  T get() {
    if (pos_ + sizeof(T) > s_.size()) throw IoError("model file truncated");
    T v;
    std::memcpy(&v, s_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::size_t u32() { return get<std::uint32_t>(); }
  void bytes(char* dst, std::size_t n) {
    if (pos_ + n > s_.size()) throw IoError("model file truncated");
    std::memcpy(dst, s_.data() + pos_, n);
    pos_ += n;
  }
  bool done() const { return pos_ == s_.size(); }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_model(const CnnModel& model) {
  Writer w;
  w.str().append(kModelMagic, sizeof(kModelMagic));
  w.put(kModelFormatVersion);
  w.put(model.variant() ? static_cast<std::uint8_t>(*model.variant()) : kCustomVariant);
  const auto& in = model.input_shape();
  w.u32(in.c);
  w.u32(in.h);
  w.u32(in.w);
  w.u32(model.layers().size());
  for (const auto& layer : model.layers()) {
    if (const auto* c = std::get_if<Conv>(&layer)) {
      w.put(Kind::Conv);
      for (auto v : {c->out_channels, c->kernel_h, c->kernel_w, c->stride, c->pad}) w.u32(v);
    } else if (std::holds_alternative<Relu>(layer)) {
      w.put(Kind::Relu);
    } else if (const auto* p = std::get_if<MaxPool>(&layer)) {
      w.put(Kind::MaxPool);
      w.u32(p->size);
    } else if (const auto* d = std::get_if<Dense>(&layer)) {
      w.put(Kind::Dense);
      w.u32(d->out);
    } else {
      w.put(Kind::Softmax);
    }
  }
  w.u32(model.params().size());
  for (const auto& t : model.params()) {
    w.u32(t.rank());
    for (auto d : t.shape()) w.u32(d);
    w.str().append(reinterpret_cast<const char*>(t.data()), t.size() * sizeof(double));
  }
  return std::move(w.str());
}

CnnModel deserialize_model(const std::string& bytes) {
  Reader r(bytes);
  char magic[sizeof(kModelMagic)];
  r.bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kModelMagic, sizeof(magic)) != 0) throw IoError("not a radarmon model file");
  const auto version = r.get<std::uint32_t>();
  if (version != kModelFormatVersion) throw IoError("unsupported model format version " + std::to_string(version));
  const auto variant_code = r.get<std::uint8_t>();
  std::optional<ModelVariant> variant;
  if (variant_code != kCustomVariant) {
    if (variant_code > static_cast<std::uint8_t>(ModelVariant::AP)) throw IoError("unknown model variant code");
    variant = static_cast<ModelVariant>(variant_code);
  }
  Shape3 in;
  in.c = r.u32();
  in.h = r.u32();
  in.w = r.u32();
  std::vector<LayerSpec> layers(r.u32());
  for (auto& layer : layers) {
    switch (static_cast<Kind>(r.get<std::uint8_t>())) {
      case Kind::Conv: {
        Conv c;
        c.out_channels = r.u32();
        c.kernel_h = r.u32();
        c.kernel_w = r.u32();
        c.stride = r.u32();
        c.pad = r.u32();
        layer = c;
        break;
      }
      case Kind::Relu: layer = Relu{}; break;
      case Kind::MaxPool: layer = MaxPool{r.u32()}; break;
      case Kind::Dense: layer = Dense{r.u32()}; break;
      case Kind::Softmax: layer = Softmax{}; break;
      default: throw IoError("unknown layer kind in model file");
    }
  }
  CnnModel model = [&] {
    try {
      return CnnModel(in, std::move(layers), variant);
    } catch (const ShapeError& e) {
      throw IoError(std::string("invalid layer stack in model file: ") + e.what());
    }
  }();
  const auto n_tensors = r.u32();
  if (n_tensors != model.params().size()) throw IoError("model file parameter count mismatch");
  for (auto& t : model.params()) {
    const auto rank = r.u32();
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) d = r.u32();
    if (shape != t.shape()) throw IoError("model file tensor shape mismatch");
    r.bytes(reinterpret_cast<char*>(t.data()), t.size() * sizeof(double));
  }
  if (!r.done()) throw IoError("trailing bytes in model file");
  return model;
}

void save_model(const CnnModel& model, const std::filesystem::path& path) {
  const auto bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to '" + path.string() + "'");
}

CnnModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model '" + path.string() + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace radarmon::nn
